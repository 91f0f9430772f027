#pragma once

#include "posefit/geometry.hpp"

namespace posefit {

/// Pose error split into its translation and rotation components.
struct PoseError {
    double translation = 0.0;   // scene length units
    double rotation_deg = 0.0;  // degrees, in [0, 180]
};

/// Euclidean distance between true and estimated translation vectors.
double translation_error(const Translation& t, const Translation& t_hat);

/// Alignment angle between two rotations, in degrees:
/// acos((tr(R' R_hat) - 1) / 2) with the argument clamped to [-1, 1].
double rotation_error_deg(const RotationMatrix& R, const RotationMatrix& R_hat);

PoseError pose_error(const Pose& truth, const Pose& estimate);

} // namespace posefit
