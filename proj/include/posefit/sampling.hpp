#pragma once

#include "posefit/geometry.hpp"
#include "posefit/rng.hpp"

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace posefit {

/// Knobs for one perturbation batch around a reference pose.
struct SamplerConfig {
    int n_samples = 24;                 // >= 12 (2x the pose DoF)
    double theta_max = 0.0;             // radians, in (0, pi/2)
    double cap_half_angle = 0.0;        // radians, in (0, pi]
    Eigen::Vector3d translation_half_widths = Eigen::Vector3d::Zero();
    std::uint64_t seed = 0;
    double conservative_scale = 0.5;    // in (0, 1)

    /// Throws ValidationError naming the violated invariant.
    void validate() const;
};

/// The sampled pose deltas stacked as the 6 x N_s matrix B. Column i is
/// pose_difference(reference, perturbed_i).
struct PerturbationBatch {
    Eigen::Matrix<double, 6, Eigen::Dynamic> B;

    int n_samples() const { return static_cast<int>(B.cols()); }
    Vector6d delta(int i) const { return B.col(i); }
};

struct SampledPerturbations {
    PerturbationBatch batch;
    std::vector<Pose> poses;    // the perturbed poses, one per column of B
};

/// Unit vector uniform over the spherical cap of the given angular radius
/// around reference_axis (which must be unit norm).
Eigen::Vector3d sample_axis_in_cap(const Eigen::Vector3d& reference_axis,
                                   double cap_half_angle, Pcg32& rng);

/// Random small rotation as a Gibbs vector tan(theta/2) * axis. The angle is
/// drawn with density proportional to (1 - cos theta) on [0, theta_max] (the
/// Haar-uniform SO(3) marginal restricted to the ball) by inverting the
/// closed-form CDF (theta - sin theta) / (theta_max - sin theta_max) with
/// bisection to 1e-12; the axis comes from sample_axis_in_cap.
GibbsVector sample_rotation(double theta_max,
                            const Eigen::Vector3d& reference_axis,
                            double cap_half_angle, Pcg32& rng);

/// Generates config.n_samples pose perturbations about the reference:
/// rotation axes in a cap around the camera boresight expressed in the
/// object frame, angles per sample_rotation, translation deltas i.i.d.
/// uniform within the half-width box. Deterministic for a given seed.
/// Resamples up to 5 times if B fails the rank-6 check; then throws
/// DegenerateBatch.
SampledPerturbations sample_batch(const Pose& reference,
                                  const SamplerConfig& config);

/// Conservative re-initialization: scales theta_max and the translation
/// half-widths by conservative_scale, leaving everything else unchanged.
SamplerConfig shrink(const SamplerConfig& config);

} // namespace posefit
