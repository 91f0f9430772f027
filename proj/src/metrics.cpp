#include "posefit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace posefit {

double translation_error(const Translation& t, const Translation& t_hat) {
    return (t - t_hat).norm();
}

double rotation_error_deg(const RotationMatrix& R, const RotationMatrix& R_hat) {
    // Floating-point traces can land marginally outside [-1, 3]; clamp so the
    // metric never returns NaN.
    const double c = std::clamp(((R.transpose() * R_hat).trace() - 1.0) / 2.0, -1.0, 1.0);
    return std::acos(c) * 180.0 / std::numbers::pi;
}

PoseError pose_error(const Pose& truth, const Pose& estimate) {
    return PoseError{
        translation_error(truth.t, estimate.t),
        rotation_error_deg(crp_to_rotation(truth.q), crp_to_rotation(estimate.q)),
    };
}

} // namespace posefit
