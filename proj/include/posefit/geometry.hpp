#pragma once

#include <Eigen/Core>

namespace posefit {

/// Gibbs vector (classical Rodrigues parameters), q = tan(theta/2) * axis.
/// Represents every rotation with angle strictly below pi.
using GibbsVector = Eigen::Vector3d;

using RotationMatrix = Eigen::Matrix3d;
using Translation = Eigen::Vector3d;
using Vector6d = Eigen::Matrix<double, 6, 1>;

/// 6-DoF pose: orientation as a Gibbs vector plus a translation. The flat
/// 6-vector layout is [q1 q2 q3 t1 t2 t3] everywhere in this library.
struct Pose {
    GibbsVector q = GibbsVector::Zero();
    Translation t = Translation::Zero();

    Vector6d as_vector() const {
        Vector6d p;
        p << q, t;
        return p;
    }

    static Pose from_vector(const Vector6d& p) {
        return Pose{p.head<3>(), p.tail<3>()};
    }
};

/// Skew-symmetric cross-product matrix: skew(v) * w == v x w.
Eigen::Matrix3d skew(const Eigen::Vector3d& v);

/// Cayley transform of a Gibbs vector, closed form:
///   R = ((1 - q'q) I + 2 q q' - 2 [qx]) / (1 + q'q).
/// For q = tan(theta/2) * e this is the frame-transformation (passive)
/// matrix, i.e. the transpose of the active rotation about e by theta.
RotationMatrix crp_to_rotation(const GibbsVector& q);

/// Inverse of crp_to_rotation. Throws NearSingularRotation when the rotation
/// angle is at or near pi (trace(R) <= -1 + 1e-6).
GibbsVector rotation_to_crp(const RotationMatrix& R);

/// Relative pose delta, oriented "reference minus other" in both blocks:
///   delta_q = rotation_to_crp(R_other' * R_ref)
///   delta_t = t_ref - t_other
/// This orientation makes a Jacobian learned from such deltas match the
/// forward derivative of the rendering function, and makes the additive
/// solver update a contraction toward the reference.
Vector6d pose_difference(const Pose& ref, const Pose& other);

/// Additive update on the flat [q t] vector: exact for translation, a
/// first-order step for rotation. Throws NearSingularRotation if the updated
/// Gibbs vector is not finite.
Pose apply_pose_delta(const Pose& base, const Vector6d& delta);

} // namespace posefit
