// Shared test scenarios built on the library's public surface.

#pragma once

#include "posefit/jacobian.hpp"
#include "posefit/rendering.hpp"
#include "posefit/sampling.hpp"
#include "posefit/scenario.hpp"

#include "oracles.hpp"

#include <numbers>
#include <vector>

namespace fixtures {

inline posefit::TargetModel square4_model() {
    return posefit::TargetModel({{0, {-1, -1, 0}},
                                 {1, {-1, 1, 0}},
                                 {2, {1, -1, 0}},
                                 {3, {1, 1, 0}}});
}

/// Learns the render Jacobian of a 4-point square at depth 5 with the given
/// sampling radius (used for both rotation and translation), and returns the
/// relative Frobenius error against the analytic chain-rule oracle.
inline double pinhole_jacobian_error(double radius, std::uint64_t seed) {
    const posefit::TargetModel model = square4_model();
    const posefit::CameraIntrinsics K = posefit::default_camera();
    const posefit::PinholeRenderer renderer(model, K);
    posefit::Pose reference;
    reference.t = posefit::Translation(0, 0, 5);

    posefit::SamplerConfig cfg;
    cfg.n_samples = 48;
    cfg.theta_max = radius;
    cfg.cap_half_angle = std::numbers::pi;
    cfg.translation_half_widths = Eigen::Vector3d::Constant(radius);
    cfg.seed = seed;

    const posefit::SampledPerturbations s = posefit::sample_batch(reference, cfg);
    const posefit::FeatureObservation ref_obs = renderer.render(reference);
    std::vector<posefit::FeatureObservation> sample_obs;
    for (const auto& p : s.poses) sample_obs.push_back(renderer.render(p));
    const posefit::CommonFeatures cf = posefit::common_features(ref_obs, sample_obs);

    const posefit::FeatureDeltaMatrix E =
        posefit::build_feature_deltas(cf.reference, cf.others);
    const posefit::JacobianFit fit = posefit::learn_jacobian(E, s.batch);

    const Eigen::MatrixXd analytic = oracles::projection_jacobian(model, reference, K);
    return (fit.J - analytic).norm() / analytic.norm();
}

} // namespace fixtures
