#include "posefit/batch_eval.hpp"

namespace posefit {

std::vector<FeatureObservation> render_at_poses(const Renderer& renderer,
                                                const std::vector<Pose>& poses,
                                                EvalPolicy policy) {
    std::vector<FeatureObservation> out(poses.size());
    const auto n = static_cast<std::ptrdiff_t>(poses.size());
    if (policy == EvalPolicy::parallel) {
        #pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            out[static_cast<std::size_t>(i)] = renderer.render(poses[static_cast<std::size_t>(i)]);
        }
    } else {
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            out[static_cast<std::size_t>(i)] = renderer.render(poses[static_cast<std::size_t>(i)]);
        }
    }
    return out;
}

} // namespace posefit
