#include "posefit/sampling.hpp"

#include "posefit/errors.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <Eigen/SVD>
#include <cmath>
#include <numbers>
#include <vector>

using namespace posefit;

namespace {

SamplerConfig small_config(std::uint64_t seed = 0) {
    SamplerConfig cfg;
    cfg.n_samples = 24;
    cfg.theta_max = 0.01;
    cfg.cap_half_angle = std::numbers::pi;
    cfg.translation_half_widths = Eigen::Vector3d(0.01, 0.01, 0.01);
    cfg.seed = seed;
    return cfg;
}

} // namespace

TEST_CASE("sample_axis_in_cap degenerate cap returns the reference axis") {
    Pcg32 rng(3, 1);
    const Eigen::Vector3d ref = Eigen::Vector3d(1, 2, -1).normalized();
    for (int i = 0; i < 100; ++i) {
        const Eigen::Vector3d axis = sample_axis_in_cap(ref, 1e-9, rng);
        CHECK((axis - ref).norm() < 1e-6);
    }
}

TEST_CASE("sample_axis_in_cap full sphere is isotropic") {
    Pcg32 rng(5, 2);
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const Eigen::Vector3d axis =
            sample_axis_in_cap(Eigen::Vector3d::UnitZ(), std::numbers::pi, rng);
        CHECK(axis.norm() == doctest::Approx(1.0).epsilon(1e-9));
        mean += axis;
    }
    CHECK((mean / n).norm() < 0.02);
}

TEST_CASE("sample_axis_in_cap is area-uniform over the cap") {
    const double cap = 0.2;
    const Eigen::Vector3d ref = Eigen::Vector3d(0.3, -0.8, 0.52).normalized();
    Pcg32 rng(11, 3);
    std::vector<double> transformed;
    double max_angle = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const Eigen::Vector3d axis = sample_axis_in_cap(ref, cap, rng);
        const double alpha = std::acos(std::clamp(axis.dot(ref), -1.0, 1.0));
        max_angle = std::max(max_angle, alpha);
        transformed.push_back((1.0 - std::cos(alpha)) / (1.0 - std::cos(cap)));
    }
    CHECK(max_angle <= cap + 1e-12);
    // Area-uniformity: (1 - cos a) / (1 - cos cap) must be U[0, 1].
    const double ks = oracles::ks_statistic(std::move(transformed),
                                            [](double x) { return x; });
    CHECK(ks < 0.02);
}

TEST_CASE("sample_rotation respects the angle bound") {
    Pcg32 rng(13, 4);
    const double theta_max = 0.1;
    const double bound = std::tan(0.05);
    for (int i = 0; i < 100000; ++i) {
        const GibbsVector q = sample_rotation(theta_max, Eigen::Vector3d::UnitZ(),
                                              std::numbers::pi, rng);
        CHECK(q.norm() <= bound + 1e-12);
    }
}

TEST_CASE("sample_rotation angles follow the (1 - cos) density") {
    Pcg32 rng(17, 5);
    const double theta_max = std::numbers::pi / 3.0;
    const double norm = theta_max - std::sin(theta_max);
    std::vector<double> angles;
    for (int i = 0; i < 100000; ++i) {
        const GibbsVector q = sample_rotation(theta_max, Eigen::Vector3d::UnitZ(),
                                              std::numbers::pi, rng);
        angles.push_back(2.0 * std::atan(q.norm()));
    }
    const double ks = oracles::ks_statistic(
        std::move(angles),
        [&](double t) { return (t - std::sin(t)) / norm; });
    CHECK(ks < 0.02);
}

TEST_CASE("restricted Haar property: mean trace matches the density moment") {
    // Full-sphere cap, theta_max near pi (the primitive accepts the full
    // range; the pi/2 bound applies to sampler configs). Under density
    // (1 - cos t) on [0, T]: E[tr R] = 1 + 2 E[cos theta], with
    // E[cos] = (sin T - T/2 - sin(2T)/4) / (T - sin T).
    Pcg32 rng(19, 6);
    const double T = std::numbers::pi - 0.01;
    double mean_trace = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const GibbsVector q =
            sample_rotation(T, Eigen::Vector3d::UnitZ(), std::numbers::pi, rng);
        mean_trace += crp_to_rotation(q).trace();
    }
    mean_trace /= n;
    const double num = std::sin(T) - (T / 2.0 + std::sin(2.0 * T) / 4.0);
    const double den = T - std::sin(T);
    const double expected = 1.0 + 2.0 * (num / den);
    // Absolute tolerance: sd(tr)/sqrt(n) is about 0.003 here.
    CHECK(std::abs(mean_trace - expected) < 0.015);
}

TEST_CASE("sample_batch is deterministic and rank 6") {
    Pose reference;
    reference.q = GibbsVector(0.1, -0.05, 0.2);
    reference.t = Translation(0.5, 0.2, 8.0);

    const SampledPerturbations a = sample_batch(reference, small_config(99));
    const SampledPerturbations b = sample_batch(reference, small_config(99));
    CHECK(a.batch.B == b.batch.B);
    REQUIRE(a.poses.size() == 24);

    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a.batch.B);
    CHECK(svd.singularValues()(5) > 0.0);
    CHECK(svd.singularValues()(5) > 1e-12 * svd.singularValues()(0));

    const SampledPerturbations c = sample_batch(reference, small_config(100));
    CHECK(a.batch.B != c.batch.B);
}

TEST_CASE("sample_batch deltas are consistent with pose_difference") {
    Pose reference;
    reference.q = GibbsVector(0.05, 0.0, -0.1);
    reference.t = Translation(0, 0, 5);
    const SampledPerturbations s = sample_batch(reference, small_config(7));
    for (int i = 0; i < s.batch.n_samples(); ++i) {
        const Vector6d expected = pose_difference(reference, s.poses[static_cast<std::size_t>(i)]);
        CHECK((s.batch.B.col(i) - expected).norm() == 0.0);
    }
}

TEST_CASE("sample_batch respects the sampling bounds") {
    Pose reference;
    reference.t = Translation(0, 0, 5);
    SamplerConfig cfg = small_config(21);
    cfg.theta_max = 0.05;
    cfg.translation_half_widths = Eigen::Vector3d(0.01, 0.02, 0.03);
    const SampledPerturbations s = sample_batch(reference, cfg);
    for (int i = 0; i < s.batch.n_samples(); ++i) {
        const Vector6d d = s.batch.B.col(i);
        CHECK(2.0 * std::atan(d.head<3>().norm()) <= cfg.theta_max + 1e-12);
        for (int k = 0; k < 3; ++k) {
            CHECK(std::abs(d(3 + k)) <= cfg.translation_half_widths(k) + 1e-15);
        }
    }
}

TEST_CASE("shrink scales the radii multiplicatively") {
    SamplerConfig cfg = small_config();
    cfg.theta_max = 0.1;
    cfg.translation_half_widths = Eigen::Vector3d(1, 2, 3);
    cfg.conservative_scale = 0.5;

    const SamplerConfig once = shrink(cfg);
    CHECK(once.theta_max == doctest::Approx(0.05));
    CHECK((once.translation_half_widths - Eigen::Vector3d(0.5, 1.0, 1.5)).norm() == 0.0);
    CHECK(once.n_samples == cfg.n_samples);
    CHECK(once.seed == cfg.seed);

    const SamplerConfig twice = shrink(once);
    CHECK(twice.theta_max == doctest::Approx(0.025));
    CHECK((twice.translation_half_widths - Eigen::Vector3d(0.25, 0.5, 0.75)).norm() == 0.0);
}

TEST_CASE("SamplerConfig validation names the violated invariant") {
    SamplerConfig cfg = small_config();
    cfg.n_samples = 11;
    CHECK_THROWS_WITH_AS(cfg.validate(),
                         doctest::Contains("n_samples"), ValidationError);
    cfg = small_config();
    cfg.theta_max = 2.0;
    CHECK_THROWS_WITH_AS(cfg.validate(),
                         doctest::Contains("theta_max"), ValidationError);
    cfg = small_config();
    cfg.cap_half_angle = 0.0;
    CHECK_THROWS_WITH_AS(cfg.validate(),
                         doctest::Contains("cap_half_angle"), ValidationError);
    cfg = small_config();
    cfg.conservative_scale = 1.0;
    CHECK_THROWS_WITH_AS(cfg.validate(),
                         doctest::Contains("conservative_scale"), ValidationError);
}

TEST_CASE("rank-6 holds in at least 999 of 1000 minimal batches") {
    // Direct draws through the public primitives, 12 samples per batch (the
    // minimum), no resampling involved.
    int full_rank = 0;
    for (int seed = 0; seed < 1000; ++seed) {
        Pcg32 rng(static_cast<std::uint64_t>(seed), 8);
        Eigen::Matrix<double, 6, Eigen::Dynamic> B(6, 12);
        for (int i = 0; i < 12; ++i) {
            B.col(i).head<3>() = sample_rotation(0.01, Eigen::Vector3d::UnitZ(),
                                                 std::numbers::pi, rng);
            for (int k = 0; k < 3; ++k) B(3 + k, i) = rng.uniform(-0.01, 0.01);
        }
        const Eigen::JacobiSVD<Eigen::MatrixXd> svd(B);
        if (svd.singularValues()(5) > 1e-12 * svd.singularValues()(0)) ++full_rank;
    }
    CHECK(full_rank >= 999);
}
