#pragma once

#include "posefit/metrics.hpp"
#include "posefit/scenario.hpp"
#include "posefit/solver.hpp"

#include <string>
#include <vector>

namespace posefit {

/// Outcome of one scenario run.
struct RunSummary {
    PoseError terminal_error;
    int iterations = 0;
    bool converged = false;
    TerminationReason reason = TerminationReason::max_iterations;
    int reinits_used = 0;
    std::vector<IterationRecord> records;
    double wall_seconds = 0.0;
};

/// Fixed column order of iterations.csv.
inline constexpr const char* kCsvHeader =
    "iter,cost,step_norm,lambda,cond_B,k_features,rot_err_deg,trans_err,"
    "q1,q2,q3,t1,t2,t3";

void write_iterations_csv(const std::vector<IterationRecord>& records,
                          const std::string& path);

/// Inverse of write_iterations_csv; reals round-trip exactly (17 significant
/// digits).
std::vector<IterationRecord> read_iterations_csv(const std::string& path);

/// Runs one scenario end to end: builds the model and renderer, renders the
/// reference at the ground truth, applies the corruption, resolves the
/// initial guess, solves, and writes <output_dir>/iterations.csv.
/// Solver infeasibility/degeneracy errors propagate to the caller.
RunSummary run(const Scenario& scenario, const std::string& output_dir,
               EvalPolicy policy = EvalPolicy::parallel);

struct BatchResult {
    std::vector<RunSummary> trials;
    /// Medians and worst cases over the trials (rotation error, translation
    /// error, iteration count), plus the converged fraction.
    double median_rotation_error_deg = 0.0;
    double median_translation_error = 0.0;
    double worst_rotation_error_deg = 0.0;
    double worst_translation_error = 0.0;
    int worst_iterations = 0;
    double converged_fraction = 0.0;
};

/// Runs n_trials variants of the scenario, re-deriving the sampler,
/// corruption and initial-guess seeds per trial with mix_seed(base, trial).
/// Writes iterations_<trial>.csv per trial plus aggregate.csv; all CSV
/// content is deterministic for a fixed scenario (no wall times).
/// Trials run concurrently under OpenMP when the policy is parallel.
BatchResult run_batch(const Scenario& scenario, int n_trials,
                      const std::string& output_dir,
                      EvalPolicy policy = EvalPolicy::parallel);

/// Scenario variant used for trial `index` of a batch.
Scenario batch_trial_scenario(const Scenario& base, int index);

const char* to_string(TerminationReason reason);

} // namespace posefit
