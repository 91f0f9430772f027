#pragma once

#include "posefit/batch_eval.hpp"
#include "posefit/geometry.hpp"
#include "posefit/jacobian.hpp"
#include "posefit/rendering.hpp"
#include "posefit/sampling.hpp"

#include <optional>
#include <vector>

namespace posefit {

/// Levenberg-Marquardt knobs.
struct LMConfig {
    double lambda0 = 1e-3;
    double lambda_up = 10.0;
    double lambda_down = 0.1;
    double epsilon = 1e-6;      // convergence threshold on ||dp||
    int max_iterations = 50;
    int max_reinits = 5;        // total budget of conservative re-samplings

    void validate() const;
};

/// Diagnostics captured once per outer iteration, describing the iterate at
/// the start of the iteration and the step computed from it. Error fields
/// are NaN when no ground truth was supplied.
struct IterationRecord {
    int iteration = 0;          // 1-based
    Pose estimate;
    double cost = 0.0;          // squared residual norm, px^2
    double step_norm = 0.0;     // ||dp||
    double lambda = 0.0;        // damping used for the final step attempt
    double cond_b = 0.0;
    int k_features = 0;
    double rotation_error_deg = 0.0;
    double translation_error = 0.0;
};

enum class TerminationReason {
    converged,
    max_iterations,
    degenerate,
};

struct SolveResult {
    Pose final_pose;
    bool converged = false;
    TerminationReason reason = TerminationReason::max_iterations;
    std::vector<IterationRecord> records;
    int reinits_used = 0;
};

/// Squared Euclidean norm of the feature residual ref - current.
/// Throws DimensionMismatch on unequal lengths.
double cost(const FeatureVector& ref, const FeatureVector& current);

/// One damped step: solves (J'J + lambda diag(J'J)) dp = J' residual.
/// lambda -> 0 recovers the Gauss-Newton step; lambda -> inf drives dp to 0.
/// Throws SingularNormalEquations when the damped matrix is singular.
Vector6d lm_step(const Eigen::MatrixXd& J, const FeatureVector& residual,
                 double lambda);

/// Iterative pose estimation against a reference observation:
/// per outer iteration, render at the current guess, intersect features with
/// the reference, sample a perturbation batch around the guess, render the
/// samples, learn the local Jacobian, and take a damped step. A candidate
/// step is accepted only if it strictly decreases the cost; on rejection
/// lambda is scaled up and the step recomputed from the same Jacobian. After
/// 10 rejections the iteration ends without a step (lambda keeps the
/// accumulated increase) and the outer loop moves on. Terminates when
/// ||dp|| < epsilon or on budget exhaustion. When fewer than 4 features stay
/// common during sampling, the sampler shrinks and the iteration retries, up
/// to max_reinits in total.
///
/// Throws InitialGuessInfeasible when the reference and the render at the
/// initial guess share fewer than 4 visible features. Ground truth, when
/// given, only populates the per-iteration error diagnostics.
SolveResult estimate_pose(const Renderer& renderer,
                          const FeatureObservation& ref_obs,
                          const Pose& initial_guess,
                          const SamplerConfig& sampler_config,
                          const LMConfig& lm_config,
                          const std::optional<Pose>& ground_truth = std::nullopt,
                          EvalPolicy policy = EvalPolicy::parallel);

} // namespace posefit
