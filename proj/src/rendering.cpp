#include "posefit/rendering.hpp"

#include "posefit/errors.hpp"
#include "posefit/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>
#include <unordered_set>

namespace posefit {

TargetModel::TargetModel(std::vector<Keypoint> keypoints)
    : keypoints_(std::move(keypoints)) {
    if (keypoints_.size() < 3) {
        throw ValidationError("TargetModel: at least 3 keypoints required, got " +
                              std::to_string(keypoints_.size()));
    }
    std::sort(keypoints_.begin(), keypoints_.end(),
              [](const Keypoint& a, const Keypoint& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < keypoints_.size(); ++i) {
        if (keypoints_[i].id == keypoints_[i - 1].id) {
            throw ValidationError("TargetModel: duplicate keypoint id " +
                                  std::to_string(keypoints_[i].id));
        }
    }
}

std::size_t FeatureObservation::visible_count() const {
    return static_cast<std::size_t>(
        std::count_if(entries.begin(), entries.end(),
                      [](const Entry& e) { return e.visible; }));
}

namespace {

struct RawProjection {
    double u = std::numeric_limits<double>::quiet_NaN();
    double v = std::numeric_limits<double>::quiet_NaN();
    double depth = 0.0;
    bool in_front = false;
};

RawProjection project_raw(const Eigen::Vector3d& a, const RotationMatrix& R,
                          const Translation& t, const CameraIntrinsics& K) {
    const Eigen::Vector3d b = R * a + t;
    RawProjection p;
    p.depth = b.z();
    if (p.depth <= kDepthEpsilon) {
        return p;
    }
    p.in_front = true;
    p.u = (K.fx * b.x() + K.gamma * b.y()) / b.z() + K.x0;
    p.v = K.fy * b.y() / b.z() + K.y0;
    return p;
}

} // namespace

ProjectedPoint project_point(const Eigen::Vector3d& a, const Pose& pose,
                             const CameraIntrinsics& K) {
    const RawProjection p = project_raw(a, crp_to_rotation(pose.q), pose.t, K);
    if (!p.in_front) {
        throw BehindCamera("project_point: depth " + std::to_string(p.depth) +
                           " <= " + std::to_string(kDepthEpsilon));
    }
    return ProjectedPoint{p.u, p.v, p.depth};
}

PinholeRenderer::PinholeRenderer(TargetModel model, CameraIntrinsics intrinsics)
    : model_(std::move(model)), intrinsics_(intrinsics) {
    if (intrinsics_.fx <= 0.0 || intrinsics_.fy <= 0.0 ||
        intrinsics_.width <= 0 || intrinsics_.height <= 0) {
        throw ValidationError("PinholeRenderer: fx, fy and image dimensions must be positive");
    }
}

FeatureObservation PinholeRenderer::render(const Pose& pose) const {
    const RotationMatrix R = crp_to_rotation(pose.q);
    FeatureObservation obs;
    obs.entries.reserve(model_.size());
    for (const auto& kp : model_.keypoints()) {
        const RawProjection p = project_raw(kp.position, R, pose.t, intrinsics_);
        const bool in_frame = p.in_front &&
            p.u >= 0.0 && p.u < static_cast<double>(intrinsics_.width) &&
            p.v >= 0.0 && p.v < static_cast<double>(intrinsics_.height);
        obs.entries.push_back({kp.id, p.u, p.v, in_frame});
    }
    return obs;
}

FeatureObservation corrupt(const FeatureObservation& obs, int width, int height,
                           double noise_sigma, double outlier_fraction,
                           double dropout_fraction, std::uint64_t seed) {
    if (outlier_fraction < 0.0 || outlier_fraction > 1.0 ||
        dropout_fraction < 0.0 || dropout_fraction > 1.0) {
        throw ValidationError("corrupt: fractions must lie in [0, 1]");
    }
    FeatureObservation out = obs;
    Pcg32 rng = make_rng(seed, RngStream::corruption);

    if (noise_sigma > 0.0) {
        for (auto& e : out.entries) {
            if (!e.visible) continue;
            e.u += noise_sigma * rng.normal();
            e.v += noise_sigma * rng.normal();
        }
    }
    if (outlier_fraction > 0.0) {
        for (auto& e : out.entries) {
            if (!e.visible) continue;
            if (rng.uniform() < outlier_fraction) {
                e.u = rng.uniform(0.0, static_cast<double>(width));
                e.v = rng.uniform(0.0, static_cast<double>(height));
            }
        }
    }
    if (dropout_fraction > 0.0) {
        for (auto& e : out.entries) {
            if (!e.visible) continue;
            if (rng.uniform() < dropout_fraction) {
                e.visible = false;
            }
        }
    }
    return out;
}

CommonFeatures common_features(const FeatureObservation& ref,
                               const std::vector<FeatureObservation>& others) {
    std::unordered_map<int, std::size_t> counts;
    for (const auto& e : ref.entries) {
        if (e.visible) counts.emplace(e.id, 0);
    }
    for (const auto& obs : others) {
        std::unordered_set<int> seen;
        for (const auto& e : obs.entries) {
            if (!e.visible) continue;
            auto it = counts.find(e.id);
            if (it != counts.end() && seen.insert(e.id).second) {
                ++it->second;
            }
        }
    }

    std::vector<int> ids;
    for (const auto& [id, n] : counts) {
        if (n == others.size()) ids.push_back(id);
    }
    std::sort(ids.begin(), ids.end());

    if (ids.size() < static_cast<std::size_t>(kMinCommonFeatures)) {
        throw InsufficientFeatures(
            "common_features: only " + std::to_string(ids.size()) +
            " features common to all observations (need " +
            std::to_string(kMinCommonFeatures) + ")");
    }

    auto stack = [&ids](const FeatureObservation& obs) {
        std::unordered_map<int, const FeatureObservation::Entry*> by_id;
        for (const auto& e : obs.entries) by_id[e.id] = &e;
        FeatureVector x(2 * ids.size());
        for (std::size_t j = 0; j < ids.size(); ++j) {
            const auto* e = by_id.at(ids[j]);
            x(2 * j) = e->u;
            x(2 * j + 1) = e->v;
        }
        return x;
    };

    CommonFeatures out;
    out.ids = ids;
    out.reference = stack(ref);
    out.others.reserve(others.size());
    for (const auto& obs : others) out.others.push_back(stack(obs));
    return out;
}

} // namespace posefit
