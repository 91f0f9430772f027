#pragma once

#include "posefit/geometry.hpp"

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace posefit {

/// Calibrated pinhole intrinsics. gamma is the axis skew; (x0, y0) the
/// principal point offset. All in pixels.
struct CameraIntrinsics {
    double fx = 0.0;
    double fy = 0.0;
    double gamma = 0.0;
    double x0 = 0.0;
    double y0 = 0.0;
    int width = 0;
    int height = 0;

    Eigen::Matrix3d matrix() const {
        Eigen::Matrix3d k;
        k << fx, gamma, x0,
             0.0,  fy, y0,
             0.0, 0.0, 1.0;
        return k;
    }
};

/// Identified 3D keypoints in the object frame. Keypoints are normalized to
/// ascending id order at construction so that feature vectors built from any
/// observation of the model share a single deterministic ordering.
class TargetModel {
public:
    struct Keypoint {
        int id = 0;
        Eigen::Vector3d position = Eigen::Vector3d::Zero();
    };

    /// Validates (unique ids, at least 3 points) and sorts by id.
    explicit TargetModel(std::vector<Keypoint> keypoints);

    const std::vector<Keypoint>& keypoints() const { return keypoints_; }
    std::size_t size() const { return keypoints_.size(); }

private:
    std::vector<Keypoint> keypoints_;
};

/// Per-keypoint projected pixel coordinates. Entries follow the model's
/// keypoint order; invisible entries keep their id with visible = false.
struct FeatureObservation {
    struct Entry {
        int id = 0;
        double u = 0.0;
        double v = 0.0;
        bool visible = false;
    };
    std::vector<Entry> entries;

    std::size_t visible_count() const;
};

/// Stacked (u, v) coordinates of the commonly visible keypoints, interleaved
/// as (u1, v1, u2, v2, ...), ordered by ascending keypoint id.
using FeatureVector = Eigen::VectorXd;

struct ProjectedPoint {
    double u = 0.0;
    double v = 0.0;
    double depth = 0.0;
};

/// Minimum depth for a point to count as in front of the camera.
inline constexpr double kDepthEpsilon = 1e-9;

/// Minimum number of features that must be tracked across all observations.
inline constexpr int kMinCommonFeatures = 4;

/// Projects one object-frame point through the camera at the given pose:
/// b = R(q) a + t, then the perspective division of K b. Throws BehindCamera
/// when depth <= kDepthEpsilon.
ProjectedPoint project_point(const Eigen::Vector3d& a, const Pose& pose,
                             const CameraIntrinsics& K);

/// Black-box forward model x = f(p). Implementations must be pure and safe
/// to call concurrently.
class Renderer {
public:
    virtual ~Renderer() = default;
    virtual FeatureObservation render(const Pose& pose) const = 0;
};

/// Keypoint projector: the stand-in renderer. A keypoint is visible when its
/// depth exceeds kDepthEpsilon and its projection lands inside the image.
class PinholeRenderer final : public Renderer {
public:
    PinholeRenderer(TargetModel model, CameraIntrinsics intrinsics);

    FeatureObservation render(const Pose& pose) const override;

    const TargetModel& model() const { return model_; }
    const CameraIntrinsics& intrinsics() const { return intrinsics_; }

private:
    TargetModel model_;
    CameraIntrinsics intrinsics_;
};

/// Simulates feature detection imperfections on an observation. Applied in
/// three passes over visible entries: isotropic Gaussian pixel noise, then
/// replacement by outliers uniform over [0, width) x [0, height), then
/// visibility dropout. Deterministic for a given seed. Fractions are
/// per-entry probabilities.
FeatureObservation corrupt(const FeatureObservation& obs, int width, int height,
                           double noise_sigma, double outlier_fraction,
                           double dropout_fraction, std::uint64_t seed);

struct CommonFeatures {
    std::vector<int> ids;                 // ascending
    FeatureVector reference;              // 2 * ids.size()
    std::vector<FeatureVector> others;    // one per input observation
};

/// Intersects the visible ids of the reference with every other observation
/// (identity correspondence by keypoint id) and stacks the common features.
/// Throws InsufficientFeatures when fewer than kMinCommonFeatures ids remain.
CommonFeatures common_features(const FeatureObservation& ref,
                               const std::vector<FeatureObservation>& others);

} // namespace posefit
