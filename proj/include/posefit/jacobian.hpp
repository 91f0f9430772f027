#pragma once

#include "posefit/rendering.hpp"
#include "posefit/sampling.hpp"

#include <Eigen/Core>
#include <vector>

namespace posefit {

/// Feature-difference matrix E (m x N_s): column i is ref - sample_i.
using FeatureDeltaMatrix = Eigen::MatrixXd;

/// Result of one online Jacobian fit. J is m x 6 (pixels per unit pose
/// parameter); residual is ||J B - E||_F; cond_b the spectral condition
/// number of B.
struct JacobianFit {
    Eigen::MatrixXd J;
    double residual = 0.0;
    double cond_b = 0.0;
};

/// Stacks per-sample feature differences: column i = ref - sample_i.
/// Throws DimensionMismatch if vector lengths differ.
FeatureDeltaMatrix build_feature_deltas(const FeatureVector& ref_features,
                                        const std::vector<FeatureVector>& sample_features);

/// Fits J from E = J B in the least-squares sense, mathematically the right
/// inverse J = E B' (B B')^-1. Solved through a rank-revealing orthogonal
/// decomposition rather than the explicit inverse. Throws RankDeficientBatch
/// when B's smallest singular value is below 1e-12 of its largest, and
/// DimensionMismatch when column counts disagree.
JacobianFit learn_jacobian(const FeatureDeltaMatrix& E, const PerturbationBatch& B);

} // namespace posefit
