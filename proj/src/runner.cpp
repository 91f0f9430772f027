#include "posefit/runner.hpp"

#include "posefit/batch_eval.hpp"
#include "posefit/errors.hpp"
#include "posefit/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace posefit {

namespace {

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

double median_of(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n == 0) return 0.0;
    return n % 2 == 1 ? values[n / 2]
                      : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

} // namespace

const char* to_string(TerminationReason reason) {
    switch (reason) {
    case TerminationReason::converged: return "converged";
    case TerminationReason::max_iterations: return "max_iterations";
    case TerminationReason::degenerate: return "degenerate";
    }
    return "unknown";
}

void write_iterations_csv(const std::vector<IterationRecord>& records,
                          const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write csv file: " + path);
    }
    out << kCsvHeader << "\n";
    for (const auto& r : records) {
        out << r.iteration << ","
            << fmt17(r.cost) << ","
            << fmt17(r.step_norm) << ","
            << fmt17(r.lambda) << ","
            << fmt17(r.cond_b) << ","
            << r.k_features << ","
            << fmt17(r.rotation_error_deg) << ","
            << fmt17(r.translation_error) << ","
            << fmt17(r.estimate.q.x()) << ","
            << fmt17(r.estimate.q.y()) << ","
            << fmt17(r.estimate.q.z()) << ","
            << fmt17(r.estimate.t.x()) << ","
            << fmt17(r.estimate.t.y()) << ","
            << fmt17(r.estimate.t.z()) << "\n";
    }
}

std::vector<IterationRecord> read_iterations_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot read csv file: " + path);
    }
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) {
        throw ParseError(path + ": unexpected csv header");
    }
    std::vector<IterationRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 14) {
            throw ParseError(path + ": expected 14 columns, got " +
                             std::to_string(cells.size()));
        }
        IterationRecord r;
        r.iteration = std::atoi(cells[0].c_str());
        r.cost = std::strtod(cells[1].c_str(), nullptr);
        r.step_norm = std::strtod(cells[2].c_str(), nullptr);
        r.lambda = std::strtod(cells[3].c_str(), nullptr);
        r.cond_b = std::strtod(cells[4].c_str(), nullptr);
        r.k_features = std::atoi(cells[5].c_str());
        r.rotation_error_deg = std::strtod(cells[6].c_str(), nullptr);
        r.translation_error = std::strtod(cells[7].c_str(), nullptr);
        for (int i = 0; i < 3; ++i) {
            r.estimate.q(i) = std::strtod(cells[8 + i].c_str(), nullptr);
            r.estimate.t(i) = std::strtod(cells[11 + i].c_str(), nullptr);
        }
        records.push_back(r);
    }
    return records;
}

RunSummary run(const Scenario& scenario, const std::string& output_dir,
               EvalPolicy policy) {
    const TargetModel model = generate_model(scenario.model);
    const PinholeRenderer renderer(model, scenario.camera);

    const FeatureObservation clean_ref = renderer.render(scenario.ground_truth);
    const FeatureObservation ref_obs =
        corrupt(clean_ref, scenario.camera.width, scenario.camera.height,
                scenario.corruption.noise_sigma, scenario.corruption.outlier_fraction,
                scenario.corruption.dropout_fraction, scenario.corruption.seed);
    const Pose guess = resolve_initial_guess(scenario);

    const auto start = std::chrono::steady_clock::now();
    const SolveResult solve = estimate_pose(renderer, ref_obs, guess,
                                            scenario.sampler, scenario.lm,
                                            scenario.ground_truth, policy);
    const auto stop = std::chrono::steady_clock::now();

    RunSummary summary;
    summary.terminal_error = pose_error(scenario.ground_truth, solve.final_pose);
    summary.iterations = static_cast<int>(solve.records.size());
    summary.converged = solve.converged;
    summary.reason = solve.reason;
    summary.reinits_used = solve.reinits_used;
    summary.records = solve.records;
    summary.wall_seconds = std::chrono::duration<double>(stop - start).count();

    std::filesystem::create_directories(output_dir);
    write_iterations_csv(solve.records,
                         (std::filesystem::path(output_dir) / "iterations.csv").string());
    return summary;
}

Scenario batch_trial_scenario(const Scenario& base, int index) {
    Scenario trial = base;
    const auto salt = static_cast<std::uint64_t>(index);
    trial.sampler.seed = mix_seed(base.sampler.seed, salt);
    trial.corruption.seed = mix_seed(base.corruption.seed, salt);
    if (trial.initial_guess.is_offset) {
        trial.initial_guess.seed = mix_seed(base.initial_guess.seed, salt);
    }
    return trial;
}

BatchResult run_batch(const Scenario& scenario, int n_trials,
                      const std::string& output_dir, EvalPolicy policy) {
    if (n_trials < 1) {
        throw ValidationError("run_batch: n_trials >= 1");
    }
    std::filesystem::create_directories(output_dir);

    BatchResult result;
    result.trials.resize(n_trials);
    std::vector<std::exception_ptr> failures(n_trials);

    const bool parallel_trials = (policy == EvalPolicy::parallel);
    // Trials are independent; each writes only its own files. The inner
    // per-sample render loop falls back to serial inside this region
    // (nested parallelism stays disabled).
    #pragma omp parallel for schedule(dynamic) if (parallel_trials)
    for (int i = 0; i < n_trials; ++i) {
        try {
            char name[48];
            std::snprintf(name, sizeof(name), "trial_%03d", i);
            const Scenario trial = batch_trial_scenario(scenario, i);
            result.trials[i] =
                run(trial, (std::filesystem::path(output_dir) / name).string(), policy);
        } catch (...) {
            failures[i] = std::current_exception();
        }
    }
    for (const auto& f : failures) {
        if (f) std::rethrow_exception(f);
    }

    std::vector<double> rot, trans, iters;
    int converged = 0;
    for (const auto& t : result.trials) {
        rot.push_back(t.terminal_error.rotation_deg);
        trans.push_back(t.terminal_error.translation);
        iters.push_back(static_cast<double>(t.iterations));
        converged += t.converged ? 1 : 0;
    }
    result.median_rotation_error_deg = median_of(rot);
    result.median_translation_error = median_of(trans);
    result.worst_rotation_error_deg = *std::max_element(rot.begin(), rot.end());
    result.worst_translation_error = *std::max_element(trans.begin(), trans.end());
    result.worst_iterations =
        static_cast<int>(*std::max_element(iters.begin(), iters.end()));
    result.converged_fraction = static_cast<double>(converged) / n_trials;

    std::ofstream agg(std::filesystem::path(output_dir) / "aggregate.csv");
    if (!agg) {
        throw Error("cannot write aggregate.csv in " + output_dir);
    }
    agg << "trial,converged,reason,iterations,reinits,rot_err_deg,trans_err\n";
    for (int i = 0; i < n_trials; ++i) {
        const auto& t = result.trials[i];
        agg << i << "," << (t.converged ? 1 : 0) << "," << to_string(t.reason) << ","
            << t.iterations << "," << t.reinits_used << ","
            << fmt17(t.terminal_error.rotation_deg) << ","
            << fmt17(t.terminal_error.translation) << "\n";
    }
    agg << "median,,," << fmt17(median_of(iters)) << ",,"
        << fmt17(result.median_rotation_error_deg) << ","
        << fmt17(result.median_translation_error) << "\n";
    agg << "worst,,," << result.worst_iterations << ",,"
        << fmt17(result.worst_rotation_error_deg) << ","
        << fmt17(result.worst_translation_error) << "\n";
    agg << "converged_fraction," << fmt17(result.converged_fraction) << ",,,,,\n";
    return result;
}

} // namespace posefit
