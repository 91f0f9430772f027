// Benchmark comparing the serial reference kernel against the OpenMP one:
// batch rendering at sampled poses, and a full solve. Also cross-checks that
// both paths produce identical output before timing them.

#include "posefit/batch_eval.hpp"
#include "posefit/runner.hpp"
#include "posefit/scenario.hpp"
#include "posefit/solver.hpp"

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

using namespace posefit;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
}

bool observations_equal(const std::vector<FeatureObservation>& a,
                        const std::vector<FeatureObservation>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].entries.size() != b[i].entries.size()) return false;
        for (std::size_t j = 0; j < a[i].entries.size(); ++j) {
            const auto& x = a[i].entries[j];
            const auto& y = b[i].entries[j];
            const bool u_same = (x.u == y.u) || (x.u != x.u && y.u != y.u);
            const bool v_same = (x.v == y.v) || (x.v != x.v && y.v != y.v);
            if (x.id != y.id || x.visible != y.visible || !u_same || !v_same) {
                return false;
            }
        }
    }
    return true;
}

void bench_render(int n_points, int n_poses, int repeats) {
    ModelSpec spec;
    spec.kind = ModelSpec::Kind::random;
    spec.n = n_points;
    spec.seed = 7;
    const TargetModel model = generate_model(spec);
    const PinholeRenderer renderer(model, default_camera());

    Pose reference;
    reference.t = Eigen::Vector3d(0.0, 0.0, 5.0);
    SamplerConfig cfg;
    cfg.n_samples = n_poses;
    cfg.theta_max = 0.02;
    cfg.cap_half_angle = 3.0;
    cfg.translation_half_widths = Eigen::Vector3d(0.02, 0.02, 0.02);
    cfg.seed = 3;
    const SampledPerturbations sampled = sample_batch(reference, cfg);

    const auto serial_ref = render_at_poses(renderer, sampled.poses, EvalPolicy::serial);
    const auto parallel_ref =
        render_at_poses(renderer, sampled.poses, EvalPolicy::parallel);
    if (!observations_equal(serial_ref, parallel_ref)) {
        std::fprintf(stderr, "FATAL: serial and parallel kernels disagree\n");
        std::exit(1);
    }

    auto time_policy = [&](EvalPolicy policy) {
        const auto start = std::chrono::steady_clock::now();
        for (int r = 0; r < repeats; ++r) {
            volatile auto sink =
                render_at_poses(renderer, sampled.poses, policy).size();
            (void)sink;
        }
        return seconds_since(start) / repeats;
    };

    const double t_serial = time_policy(EvalPolicy::serial);
    const double t_parallel = time_policy(EvalPolicy::parallel);
    std::printf("render  %6d pts x %5d poses | serial %9.3f ms | openmp %9.3f ms | speedup %.2fx\n",
                n_points, n_poses, 1e3 * t_serial, 1e3 * t_parallel,
                t_serial / t_parallel);
}

void bench_solve(int repeats) {
    Scenario s;
    s.model.kind = ModelSpec::Kind::random;
    s.model.n = 64;
    s.model.seed = 11;
    s.camera = default_camera();
    s.ground_truth.t = Eigen::Vector3d(0.0, 0.0, 8.0);
    s.initial_guess.is_offset = true;
    s.initial_guess.rotation_deg = 5.0;
    s.initial_guess.translation_fraction = 0.02;
    s.initial_guess.seed = 2;
    s.sampler.n_samples = 256;
    s.sampler.theta_max = 0.02;
    s.sampler.cap_half_angle = 3.0;
    s.sampler.translation_half_widths = Eigen::Vector3d(0.05, 0.05, 0.05);
    s.sampler.seed = 5;
    s.lm.max_iterations = 20;

    const TargetModel model = generate_model(s.model);
    const PinholeRenderer renderer(model, s.camera);
    const FeatureObservation ref = renderer.render(s.ground_truth);
    const Pose guess = resolve_initial_guess(s);

    auto time_policy = [&](EvalPolicy policy) {
        const auto start = std::chrono::steady_clock::now();
        for (int r = 0; r < repeats; ++r) {
            volatile auto sink =
                estimate_pose(renderer, ref, guess, s.sampler, s.lm,
                              s.ground_truth, policy)
                    .records.size();
            (void)sink;
        }
        return seconds_since(start) / repeats;
    };

    const double t_serial = time_policy(EvalPolicy::serial);
    const double t_parallel = time_policy(EvalPolicy::parallel);
    std::printf("solve   64 pts, 256 samples/iter      | serial %9.3f ms | openmp %9.3f ms | speedup %.2fx\n",
                1e3 * t_serial, 1e3 * t_parallel, t_serial / t_parallel);
}

} // namespace

int main(int argc, char** argv) {
    int repeats = 20;
    if (argc > 1) {
        repeats = std::atoi(argv[1]);
        if (repeats < 1) repeats = 1;
    }
    std::printf("threads: %d (set OMP_NUM_THREADS to change)\n", omp_get_max_threads());

    bench_render(256, 64, repeats);
    bench_render(256, 1024, repeats);
    bench_render(4096, 256, repeats);
    bench_solve(repeats);
    return 0;
}
