#include "posefit/jacobian.hpp"

#include "posefit/errors.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <string>

namespace posefit {

FeatureDeltaMatrix build_feature_deltas(const FeatureVector& ref_features,
                                        const std::vector<FeatureVector>& sample_features) {
    const Eigen::Index m = ref_features.size();
    FeatureDeltaMatrix E(m, static_cast<Eigen::Index>(sample_features.size()));
    for (std::size_t i = 0; i < sample_features.size(); ++i) {
        if (sample_features[i].size() != m) {
            throw DimensionMismatch(
                "build_feature_deltas: sample " + std::to_string(i) + " has length " +
                std::to_string(sample_features[i].size()) + ", expected " +
                std::to_string(m));
        }
        E.col(static_cast<Eigen::Index>(i)) = ref_features - sample_features[i];
    }
    return E;
}

JacobianFit learn_jacobian(const FeatureDeltaMatrix& E, const PerturbationBatch& batch) {
    const auto& B = batch.B;
    if (E.cols() != B.cols()) {
        throw DimensionMismatch("learn_jacobian: E has " + std::to_string(E.cols()) +
                                " columns, B has " + std::to_string(B.cols()));
    }
    if (E.rows() < 8) {
        throw DimensionMismatch("learn_jacobian: need at least 8 feature rows "
                                "(4 tracked features), got " + std::to_string(E.rows()));
    }

    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(B);
    const auto& sigma = svd.singularValues();
    if (sigma(sigma.size() - 1) < 1e-12 * sigma(0)) {
        throw RankDeficientBatch("learn_jacobian: B is rank deficient (sigma_min/sigma_max = " +
                                 std::to_string(sigma(sigma.size() - 1) / sigma(0)) + ")");
    }

    // min_J ||J B - E||_F column-block-wise: solve B' J' = E' for J'. With B
    // full row rank this equals the explicit right-inverse formula.
    JacobianFit fit;
    fit.J = B.transpose()
                .completeOrthogonalDecomposition()
                .solve(E.transpose())
                .transpose();
    fit.residual = (fit.J * B - E).norm();
    fit.cond_b = sigma(0) / sigma(sigma.size() - 1);
    return fit;
}

} // namespace posefit
