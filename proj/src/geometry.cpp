#include "posefit/geometry.hpp"

#include "posefit/errors.hpp"

#include <cmath>

namespace posefit {

namespace {
constexpr double kTracePiGuard = -1.0 + 1e-6;
} // namespace

Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
    Eigen::Matrix3d s;
    s <<   0.0, -v.z(),  v.y(),
         v.z(),    0.0, -v.x(),
        -v.y(),  v.x(),    0.0;
    return s;
}

RotationMatrix crp_to_rotation(const GibbsVector& q) {
    const double s = q.squaredNorm();
    return ((1.0 - s) * Eigen::Matrix3d::Identity()
            + 2.0 * q * q.transpose()
            - 2.0 * skew(q)) / (1.0 + s);
}

GibbsVector rotation_to_crp(const RotationMatrix& R) {
    const double tr = R.trace();
    if (tr <= kTracePiGuard) {
        throw NearSingularRotation(
            "rotation_to_crp: rotation angle at or near pi (trace = " +
            std::to_string(tr) + ")");
    }
    // From the closed form, R' - R = 4 [qx] / (1 + q'q) and
    // 1 + q'q = 4 / (1 + tr), so q = vee(R' - R) / (1 + tr).
    return GibbsVector(R(1, 2) - R(2, 1),
                       R(2, 0) - R(0, 2),
                       R(0, 1) - R(1, 0)) / (1.0 + tr);
}

Vector6d pose_difference(const Pose& ref, const Pose& other) {
    const RotationMatrix r_ref = crp_to_rotation(ref.q);
    const RotationMatrix r_other = crp_to_rotation(other.q);
    Vector6d delta;
    delta.head<3>() = rotation_to_crp(r_other.transpose() * r_ref);
    delta.tail<3>() = ref.t - other.t;
    return delta;
}

Pose apply_pose_delta(const Pose& base, const Vector6d& delta) {
    Pose out;
    out.q = base.q + delta.head<3>();
    out.t = base.t + delta.tail<3>();
    if (!out.q.allFinite()) {
        throw NearSingularRotation(
            "apply_pose_delta: updated Gibbs vector is not finite");
    }
    return out;
}

} // namespace posefit
