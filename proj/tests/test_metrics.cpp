#include "posefit/metrics.hpp"

#include "posefit/rng.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace posefit;

TEST_CASE("translation_error is the Euclidean distance") {
    CHECK(translation_error(Translation(1, 2, 3), Translation(1, 2, 3)) == 0.0);
    CHECK(translation_error(Translation(0, 0, 0), Translation(3, 4, 0)) ==
          doctest::Approx(5.0));
}

TEST_CASE("rotation_error on constructed angles") {
    const RotationMatrix I = RotationMatrix::Identity();
    CHECK(rotation_error_deg(I, I) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(rotation_error_deg(
              I, oracles::rodrigues(Eigen::Vector3d::UnitZ(), std::numbers::pi / 2)) ==
          doctest::Approx(90.0).epsilon(1e-9));
    CHECK(rotation_error_deg(
              I, oracles::rodrigues(Eigen::Vector3d::UnitX(), std::numbers::pi)) ==
          doctest::Approx(180.0).epsilon(1e-9));
}

TEST_CASE("rotation_error symmetry and left-invariance") {
    Pcg32 rng(21, 5);
    for (int i = 0; i < 1000; ++i) {
        const RotationMatrix R = oracles::rodrigues(oracles::random_unit_vector(rng),
                                                    rng.uniform(0.0, std::numbers::pi));
        const RotationMatrix S = oracles::rodrigues(oracles::random_unit_vector(rng),
                                                    rng.uniform(0.0, std::numbers::pi));
        const RotationMatrix Q = oracles::rodrigues(oracles::random_unit_vector(rng),
                                                    rng.uniform(0.0, std::numbers::pi));
        CHECK(rotation_error_deg(R, S) == rotation_error_deg(S, R));
        CHECK(rotation_error_deg(Q * R, Q * S) ==
              doctest::Approx(rotation_error_deg(R, S)).epsilon(1e-9));
    }
}

TEST_CASE("rotation_error approximates the rotation-vector norm for small angles") {
    Pcg32 rng(22, 6);
    for (int i = 0; i < 200; ++i) {
        const double norm = rng.uniform(1e-4, 0.1);
        const Eigen::Vector3d axis = oracles::random_unit_vector(rng);
        const RotationMatrix R = oracles::rodrigues(oracles::random_unit_vector(rng),
                                                    rng.uniform(0.0, 2.0));
        const RotationMatrix R_hat = R * oracles::rodrigues(axis, norm);
        const double expected_deg = norm * 180.0 / std::numbers::pi;
        CHECK(rotation_error_deg(R, R_hat) ==
              doctest::Approx(expected_deg).epsilon(0.01));
    }
}

TEST_CASE("rotation_error clamps out-of-range traces") {
    // Scale the matrix slightly so the trace overshoots the valid range.
    const RotationMatrix R = RotationMatrix::Identity() * (1.0 + 1e-13);
    CHECK(std::isfinite(rotation_error_deg(RotationMatrix::Identity(), R)));
    const RotationMatrix F =
        oracles::rodrigues(Eigen::Vector3d::UnitX(), std::numbers::pi) * (1.0 + 1e-13);
    CHECK(std::isfinite(rotation_error_deg(RotationMatrix::Identity(), F)));
}
