#include "posefit/solver.hpp"

#include "posefit/errors.hpp"
#include "posefit/metrics.hpp"
#include "posefit/rng.hpp"

#include <Eigen/LU>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_map>

namespace posefit {

namespace {

constexpr int kMaxRejectionsPerIteration = 10;

/// Stacks the candidate's features on the given id set; returns false if any
/// of those ids is no longer visible at the candidate pose.
bool stack_on_ids(const FeatureObservation& obs, const std::vector<int>& ids,
                  FeatureVector* out) {
    std::unordered_map<int, const FeatureObservation::Entry*> by_id;
    for (const auto& e : obs.entries) by_id[e.id] = &e;
    out->resize(2 * static_cast<Eigen::Index>(ids.size()));
    for (std::size_t j = 0; j < ids.size(); ++j) {
        auto it = by_id.find(ids[j]);
        if (it == by_id.end() || !it->second->visible) return false;
        (*out)(2 * static_cast<Eigen::Index>(j)) = it->second->u;
        (*out)(2 * static_cast<Eigen::Index>(j) + 1) = it->second->v;
    }
    return true;
}

} // namespace

void LMConfig::validate() const {
    if (!(lambda0 > 0.0)) {
        throw ValidationError("lm.lambda0 > 0 (got " + std::to_string(lambda0) + ")");
    }
    if (!(lambda_up > 1.0)) {
        throw ValidationError("lm.lambda_up > 1 (got " + std::to_string(lambda_up) + ")");
    }
    if (!(lambda_down > 0.0 && lambda_down < 1.0)) {
        throw ValidationError("lm.lambda_down in (0, 1) (got " +
                              std::to_string(lambda_down) + ")");
    }
    if (!(epsilon > 0.0)) {
        throw ValidationError("lm.epsilon > 0 (got " + std::to_string(epsilon) + ")");
    }
    if (max_iterations < 1) {
        throw ValidationError("lm.max_iterations >= 1 (got " +
                              std::to_string(max_iterations) + ")");
    }
    if (max_reinits < 0) {
        throw ValidationError("lm.max_reinits >= 0 (got " +
                              std::to_string(max_reinits) + ")");
    }
}

double cost(const FeatureVector& ref, const FeatureVector& current) {
    if (ref.size() != current.size()) {
        throw DimensionMismatch("cost: lengths " + std::to_string(ref.size()) +
                                " vs " + std::to_string(current.size()));
    }
    return (ref - current).squaredNorm();
}

Vector6d lm_step(const Eigen::MatrixXd& J, const FeatureVector& residual,
                 double lambda) {
    if (J.rows() != residual.size()) {
        throw DimensionMismatch("lm_step: J has " + std::to_string(J.rows()) +
                                " rows, residual length " +
                                std::to_string(residual.size()));
    }
    const Eigen::MatrixXd jtj = J.transpose() * J;
    Eigen::MatrixXd damped = jtj;
    damped.diagonal() += lambda * jtj.diagonal();

    const Eigen::FullPivLU<Eigen::MatrixXd> lu(damped);
    if (!lu.isInvertible()) {
        throw SingularNormalEquations(
            "lm_step: damped normal equations singular at lambda = " +
            std::to_string(lambda));
    }
    return lu.solve(J.transpose() * residual);
}

SolveResult estimate_pose(const Renderer& renderer,
                          const FeatureObservation& ref_obs,
                          const Pose& initial_guess,
                          const SamplerConfig& sampler_config,
                          const LMConfig& lm_config,
                          const std::optional<Pose>& ground_truth,
                          EvalPolicy policy) {
    sampler_config.validate();
    lm_config.validate();

    if (ref_obs.visible_count() < static_cast<std::size_t>(kMinCommonFeatures)) {
        throw InitialGuessInfeasible(
            "estimate_pose: reference observation has only " +
            std::to_string(ref_obs.visible_count()) + " visible features");
    }
    try {
        common_features(ref_obs, {renderer.render(initial_guess)});
    } catch (const InsufficientFeatures& e) {
        throw InitialGuessInfeasible(
            std::string("estimate_pose: initial guess infeasible: ") + e.what());
    }

    SolveResult result;
    Pose current = initial_guess;
    SamplerConfig sampler = sampler_config;
    double lambda = lm_config.lambda0;

    auto make_record = [&](int iteration, double cost_value, double step_norm,
                           double lambda_used, double cond_b, int k) {
        IterationRecord rec;
        rec.iteration = iteration;
        rec.estimate = current;
        rec.cost = cost_value;
        rec.step_norm = step_norm;
        rec.lambda = lambda_used;
        rec.cond_b = cond_b;
        rec.k_features = k;
        if (ground_truth) {
            const PoseError err = pose_error(*ground_truth, current);
            rec.rotation_error_deg = err.rotation_deg;
            rec.translation_error = err.translation;
        } else {
            rec.rotation_error_deg = std::numeric_limits<double>::quiet_NaN();
            rec.translation_error = std::numeric_limits<double>::quiet_NaN();
        }
        return rec;
    };

    auto finish = [&](TerminationReason reason) {
        result.final_pose = current;
        result.converged = (reason == TerminationReason::converged);
        result.reason = reason;
        return result;
    };

    for (int iteration = 1; iteration <= lm_config.max_iterations; ++iteration) {
        const FeatureObservation current_obs = renderer.render(current);

        // Sample around the current estimate and establish the feature set
        // common to the reference, the current render, and every sample.
        // Each attempt draws a fresh seed so retries change the directions,
        // not just the radii.
        SampledPerturbations sampled;
        CommonFeatures cf;
        bool have_batch = false;
        while (!have_batch) {
            sampler.seed = mix_seed(sampler_config.seed,
                                    static_cast<std::uint64_t>(iteration) * 64 +
                                        static_cast<std::uint64_t>(result.reinits_used));
            try {
                sampled = sample_batch(current, sampler);
                std::vector<FeatureObservation> observations;
                observations.reserve(sampled.poses.size() + 1);
                observations.push_back(current_obs);
                auto sample_obs = render_at_poses(renderer, sampled.poses, policy);
                observations.insert(observations.end(),
                                    std::make_move_iterator(sample_obs.begin()),
                                    std::make_move_iterator(sample_obs.end()));
                cf = common_features(ref_obs, observations);
                have_batch = true;
            } catch (const InsufficientFeatures&) {
                if (result.reinits_used >= lm_config.max_reinits) {
                    result.records.push_back(
                        make_record(iteration, 0.0, 0.0, lambda, 0.0, 0));
                    return finish(TerminationReason::degenerate);
                }
                sampler = shrink(sampler);
                ++result.reinits_used;
            } catch (const DegenerateBatch&) {
                if (result.reinits_used >= lm_config.max_reinits) {
                    result.records.push_back(
                        make_record(iteration, 0.0, 0.0, lambda, 0.0, 0));
                    return finish(TerminationReason::degenerate);
                }
                sampler = shrink(sampler);
                ++result.reinits_used;
            }
        }

        const FeatureVector& x_ref = cf.reference;
        const FeatureVector& h = cf.others[0];
        const int k = static_cast<int>(cf.ids.size());
        const double current_cost = cost(x_ref, h);

        const FeatureDeltaMatrix E = build_feature_deltas(
            h, {cf.others.begin() + 1, cf.others.end()});
        const JacobianFit fit = learn_jacobian(E, sampled.batch);
        const FeatureVector residual = x_ref - h;

        int rejections = 0;
        while (true) {
            const double lambda_used = lambda;
            const Vector6d dp = lm_step(fit.J, residual, lambda_used);
            const double step_norm = dp.norm();

            if (step_norm < lm_config.epsilon) {
                result.records.push_back(make_record(iteration, current_cost,
                                                     step_norm, lambda_used,
                                                     fit.cond_b, k));
                return finish(TerminationReason::converged);
            }

            const Pose candidate = apply_pose_delta(current, dp);
            FeatureVector candidate_features;
            const bool all_visible = stack_on_ids(renderer.render(candidate),
                                                  cf.ids, &candidate_features);
            // Losing a tracked feature counts as a rejection.
            if (all_visible && cost(x_ref, candidate_features) < current_cost) {
                result.records.push_back(make_record(iteration, current_cost,
                                                     step_norm, lambda_used,
                                                     fit.cond_b, k));
                current = candidate;
                lambda *= lm_config.lambda_down;
                break;
            }
            lambda *= lm_config.lambda_up;
            if (++rejections >= kMaxRejectionsPerIteration) {
                // Stalled iteration: no step this round; the raised lambda
                // carries into the next iteration's fresh batch.
                result.records.push_back(make_record(iteration, current_cost,
                                                     step_norm, lambda_used,
                                                     fit.cond_b, k));
                break;
            }
        }
    }
    return finish(TerminationReason::max_iterations);
}

} // namespace posefit
