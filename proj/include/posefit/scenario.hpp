#pragma once

#include "posefit/geometry.hpp"
#include "posefit/rendering.hpp"
#include "posefit/sampling.hpp"
#include "posefit/solver.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace posefit {

/// Where a target model comes from: a named generator, a seeded random
/// point cloud, or a model file.
struct ModelSpec {
    enum class Kind { cube8, asymmetric12, random, file };
    Kind kind = Kind::cube8;
    int n = 0;                  // random generator only
    std::uint64_t seed = 0;     // random generator only
    std::string path;           // file only
};

/// Initial guess: either an explicit pose or a seeded random offset from the
/// ground truth (rotation about a random axis plus a translation offset of
/// the given fraction of the ground-truth range).
struct InitialGuessSpec {
    bool is_offset = false;
    Pose pose;                  // explicit form
    double rotation_deg = 0.0;  // offset form
    double translation_fraction = 0.0;
    std::uint64_t seed = 0;
};

struct CorruptionParams {
    double noise_sigma = 0.0;
    double outlier_fraction = 0.0;
    double dropout_fraction = 0.0;
    std::uint64_t seed = 0;
};

struct Scenario {
    ModelSpec model;
    CameraIntrinsics camera;
    Pose ground_truth;
    InitialGuessSpec initial_guess;
    CorruptionParams corruption;
    SamplerConfig sampler;
    LMConfig lm;
};

/// Default camera used when a scenario omits the camera block:
/// 640x480, fx = fy = 500, zero skew, centered principal point.
CameraIntrinsics default_camera();

/// Parses and fully validates a scenario file. Unknown fields are rejected
/// with a ParseError naming the key; invariant violations raise
/// ValidationError naming the invariant.
Scenario load_scenario(const std::string& path);

/// Same, from an in-memory JSON document (text form).
Scenario parse_scenario(const std::string& text);

/// Builds the target model for a spec. The random generator draws points
/// uniformly in the cube [-0.5, 0.5]^3 and resamples (up to 10 times, then
/// DegenerateModel) while the smallest PCA eigenvalue of the point set is
/// below 1e-6.
TargetModel generate_model(const ModelSpec& spec);

/// Parses the compact model-spec syntax used by the CLI:
/// "cube8", "asymmetric12", "random:N:SEED", or a path to a model file.
ModelSpec parse_model_spec(const std::string& text);

TargetModel load_model_file(const std::string& path);
void write_model_file(const TargetModel& model, const std::string& path);
CameraIntrinsics load_camera_file(const std::string& path);

/// Materializes the initial guess (resolving a seeded offset spec against
/// the ground truth).
Pose resolve_initial_guess(const Scenario& scenario);

} // namespace posefit
