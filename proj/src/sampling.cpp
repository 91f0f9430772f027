#include "posefit/sampling.hpp"

#include "posefit/errors.hpp"

#include <Eigen/Geometry>
#include <Eigen/SVD>
#include <cmath>
#include <numbers>
#include <string>

namespace posefit {

namespace {

constexpr double kRankTolerance = 1e-12;
constexpr int kMaxResampleAttempts = 5;

/// Inverts F(theta) = (theta - sin theta) / (T - sin T) on [0, T].
double invert_angle_cdf(double u, double theta_max) {
    const double norm = theta_max - std::sin(theta_max);
    const double target = u * norm;
    double lo = 0.0;
    double hi = theta_max;
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (mid - std::sin(mid) < target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Shortest-arc rotation taking +z to the given unit axis.
Eigen::Matrix3d frame_from_z_to(const Eigen::Vector3d& axis) {
    const double c = axis.z();
    if (c > 1.0 - 1e-12) {
        return Eigen::Matrix3d::Identity();
    }
    if (c < -1.0 + 1e-12) {
        Eigen::Matrix3d flip = Eigen::Matrix3d::Identity();
        flip(1, 1) = -1.0;
        flip(2, 2) = -1.0;
        return flip;   // 180 degrees about x
    }
    const Eigen::Vector3d w = Eigen::Vector3d::UnitZ().cross(axis);
    const Eigen::Matrix3d wx = skew(w);
    return Eigen::Matrix3d::Identity() + wx + wx * wx / (1.0 + c);
}

bool batch_is_valid(const Eigen::Matrix<double, 6, Eigen::Dynamic>& B) {
    for (Eigen::Index i = 0; i < B.cols(); ++i) {
        if (B.col(i).isZero(0.0)) {
            return false;
        }
    }
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(B);
    const auto& sigma = svd.singularValues();
    return sigma(sigma.size() - 1) > kRankTolerance * sigma(0);
}

} // namespace

void SamplerConfig::validate() const {
    if (n_samples < 12) {
        throw ValidationError("sampler.n_samples >= 12 (got " +
                              std::to_string(n_samples) + ")");
    }
    if (!(theta_max > 0.0 && theta_max < std::numbers::pi / 2.0)) {
        throw ValidationError("sampler.theta_max in (0, pi/2) (got " +
                              std::to_string(theta_max) + ")");
    }
    if (!(cap_half_angle > 0.0 && cap_half_angle <= std::numbers::pi)) {
        throw ValidationError("sampler.cap_half_angle in (0, pi] (got " +
                              std::to_string(cap_half_angle) + ")");
    }
    if (!(translation_half_widths.array() > 0.0).all()) {
        throw ValidationError("sampler.translation_half_widths must be positive");
    }
    if (!(conservative_scale > 0.0 && conservative_scale < 1.0)) {
        throw ValidationError("sampler.conservative_scale in (0, 1) (got " +
                              std::to_string(conservative_scale) + ")");
    }
}

Eigen::Vector3d sample_axis_in_cap(const Eigen::Vector3d& reference_axis,
                                   double cap_half_angle, Pcg32& rng) {
    // Uniform over cap area: cos(alpha) uniform in [cos(cap), 1].
    const double cos_alpha = 1.0 - rng.uniform() * (1.0 - std::cos(cap_half_angle));
    const double sin_alpha = std::sqrt(std::max(0.0, 1.0 - cos_alpha * cos_alpha));
    const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const Eigen::Vector3d local(sin_alpha * std::cos(phi),
                                sin_alpha * std::sin(phi),
                                cos_alpha);
    return (frame_from_z_to(reference_axis) * local).normalized();
}

GibbsVector sample_rotation(double theta_max,
                            const Eigen::Vector3d& reference_axis,
                            double cap_half_angle, Pcg32& rng) {
    const double theta = invert_angle_cdf(rng.uniform(), theta_max);
    const Eigen::Vector3d axis =
        sample_axis_in_cap(reference_axis, cap_half_angle, rng);
    return std::tan(0.5 * theta) * axis;
}

SampledPerturbations sample_batch(const Pose& reference,
                                  const SamplerConfig& config) {
    config.validate();
    Pcg32 rng = make_rng(config.seed, RngStream::pose_sampling);

    const RotationMatrix r_ref = crp_to_rotation(reference.q);
    // Camera boresight (+z of the camera frame) expressed in the object
    // frame; sampled rotation axes cluster around it so perturbed views keep
    // the reference features visible.
    const Eigen::Vector3d boresight = r_ref.row(2).transpose();

    for (int attempt = 0; attempt < kMaxResampleAttempts; ++attempt) {
        SampledPerturbations out;
        out.batch.B.resize(6, config.n_samples);
        out.poses.reserve(config.n_samples);

        for (int i = 0; i < config.n_samples; ++i) {
            const GibbsVector dq = sample_rotation(
                config.theta_max, boresight, config.cap_half_angle, rng);
            Eigen::Vector3d dt;
            for (int k = 0; k < 3; ++k) {
                const double hw = config.translation_half_widths(k);
                dt(k) = rng.uniform(-hw, hw);
            }

            // Perturbed pose: reference orientation composed with the sample
            // rotation, translation offset by dt. The stored column is then
            // recomputed through pose_difference so B is exactly consistent
            // with the geometry convention.
            Pose perturbed;
            perturbed.q = rotation_to_crp(r_ref * crp_to_rotation(dq));
            perturbed.t = reference.t + dt;
            out.batch.B.col(i) = pose_difference(reference, perturbed);
            out.poses.push_back(perturbed);
        }

        if (batch_is_valid(out.batch.B)) {
            return out;
        }
    }
    throw DegenerateBatch("sample_batch: no rank-6 batch after " +
                          std::to_string(kMaxResampleAttempts) + " attempts");
}

SamplerConfig shrink(const SamplerConfig& config) {
    SamplerConfig out = config;
    out.theta_max *= config.conservative_scale;
    out.translation_half_widths *= config.conservative_scale;
    return out;
}

} // namespace posefit
