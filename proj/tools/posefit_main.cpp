// Command-line front end: run single scenarios, seeded batches, validate
// configs, and generate target model files.

#include "posefit/errors.hpp"
#include "posefit/runner.hpp"
#include "posefit/scenario.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 2;
constexpr int kExitDegenerate = 3;
constexpr int kExitConfig = 4;

void print_run_summary(const posefit::RunSummary& s, const std::string& out_dir) {
    std::printf("RESULT converged=%d reason=%s iterations=%d reinits=%d "
                "rot_err_deg=%.17g trans_err=%.17g wall_s=%.6f\n",
                s.converged ? 1 : 0, posefit::to_string(s.reason), s.iterations,
                s.reinits_used, s.terminal_error.rotation_deg,
                s.terminal_error.translation, s.wall_seconds);
    std::printf("\n");
    std::printf("  termination        %s after %d iteration(s)\n",
                posefit::to_string(s.reason), s.iterations);
    std::printf("  rotation error     %.6g deg\n", s.terminal_error.rotation_deg);
    std::printf("  translation error  %.6g units\n", s.terminal_error.translation);
    std::printf("  sampler reinits    %d\n", s.reinits_used);
    std::printf("  wall time          %.3f s\n", s.wall_seconds);
    std::printf("  iteration log      %s/iterations.csv\n", out_dir.c_str());
}

void print_batch_summary(const posefit::BatchResult& b, const std::string& out_dir) {
    std::printf("RESULT trials=%zu converged_fraction=%.17g "
                "median_rot_err_deg=%.17g median_trans_err=%.17g "
                "worst_rot_err_deg=%.17g worst_trans_err=%.17g\n",
                b.trials.size(), b.converged_fraction,
                b.median_rotation_error_deg, b.median_translation_error,
                b.worst_rotation_error_deg, b.worst_translation_error);
    std::printf("\n");
    std::printf("  trials             %zu (%.0f%% converged)\n", b.trials.size(),
                100.0 * b.converged_fraction);
    std::printf("  median errors      %.6g deg / %.6g units\n",
                b.median_rotation_error_deg, b.median_translation_error);
    std::printf("  worst errors       %.6g deg / %.6g units\n",
                b.worst_rotation_error_deg, b.worst_translation_error);
    std::printf("  worst iterations   %d\n", b.worst_iterations);
    std::printf("  aggregate log      %s/aggregate.csv\n", out_dir.c_str());
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"6-DoF pose estimation via online-learned render Jacobians"};
    app.require_subcommand(1);

    bool serial = false;
    app.add_flag("--serial", serial, "Force the serial evaluation kernel");

    std::string scenario_path;
    std::string out_dir = ".";
    int n_seeds = 0;
    std::string model_spec_text;
    std::string model_out;

    CLI::App* cmd_run = app.add_subcommand("run", "Run one scenario");
    cmd_run->add_option("scenario", scenario_path, "Scenario config file")->required();
    cmd_run->add_option("--out", out_dir, "Output directory (default: .)");

    CLI::App* cmd_batch = app.add_subcommand("batch", "Run seeded trials of a scenario");
    cmd_batch->add_option("scenario", scenario_path, "Scenario config file")->required();
    cmd_batch->add_option("--seeds", n_seeds, "Number of trials")->required();
    cmd_batch->add_option("--out", out_dir, "Output directory (default: .)");

    CLI::App* cmd_validate = app.add_subcommand("validate", "Validate a scenario config");
    cmd_validate->add_option("scenario", scenario_path, "Scenario config file")->required();

    CLI::App* cmd_gen = app.add_subcommand("gen-model", "Generate a target model file");
    cmd_gen->add_option("spec", model_spec_text,
                        "cube8 | asymmetric12 | random:N[:SEED]")->required();
    cmd_gen->add_option("--out", model_out, "Output model file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    const posefit::EvalPolicy policy =
        serial ? posefit::EvalPolicy::serial : posefit::EvalPolicy::parallel;

    try {
        if (cmd_run->parsed()) {
            const posefit::Scenario scenario = posefit::load_scenario(scenario_path);
            const posefit::RunSummary summary = posefit::run(scenario, out_dir, policy);
            print_run_summary(summary, out_dir);
            return summary.reason == posefit::TerminationReason::degenerate
                       ? kExitDegenerate
                       : kExitOk;
        }
        if (cmd_batch->parsed()) {
            const posefit::Scenario scenario = posefit::load_scenario(scenario_path);
            const posefit::BatchResult batch =
                posefit::run_batch(scenario, n_seeds, out_dir, policy);
            print_batch_summary(batch, out_dir);
            for (const auto& t : batch.trials) {
                if (t.reason == posefit::TerminationReason::degenerate) {
                    return kExitDegenerate;
                }
            }
            return kExitOk;
        }
        if (cmd_validate->parsed()) {
            posefit::load_scenario(scenario_path);
            std::printf("OK %s\n", scenario_path.c_str());
            return kExitOk;
        }
        if (cmd_gen->parsed()) {
            const posefit::ModelSpec spec = posefit::parse_model_spec(model_spec_text);
            const posefit::TargetModel model = posefit::generate_model(spec);
            posefit::write_model_file(model, model_out);
            std::printf("wrote %zu keypoints to %s\n", model.size(), model_out.c_str());
            return kExitOk;
        }
    } catch (const posefit::InitialGuessInfeasible& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInfeasible;
    } catch (const posefit::Degenerate& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitDegenerate;
    } catch (const posefit::DegenerateBatch& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitDegenerate;
    } catch (const posefit::DegenerateModel& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitDegenerate;
    } catch (const posefit::ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    } catch (const posefit::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    } catch (const posefit::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return kExitOk;
}
