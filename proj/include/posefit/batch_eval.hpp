#pragma once

#include "posefit/rendering.hpp"

#include <vector>

namespace posefit {

/// How to evaluate the per-sample renders of a perturbation batch. The
/// renders are independent pure calls writing to pre-sized slots, so the
/// two policies produce bit-identical results; the serial path is the
/// reference implementation the parallel one is tested against.
enum class EvalPolicy {
    serial,
    parallel,
};

/// Renders the model at every pose. With EvalPolicy::parallel the loop over
/// poses runs under OpenMP.
std::vector<FeatureObservation> render_at_poses(const Renderer& renderer,
                                                const std::vector<Pose>& poses,
                                                EvalPolicy policy);

} // namespace posefit
