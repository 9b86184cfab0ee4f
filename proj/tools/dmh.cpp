#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "dmh/errors.hpp"

namespace {

using dmh::cli::RunConfig;

void add_shared(CLI::App& cmd, RunConfig& config) {
    cmd.add_option("--views", config.view_paths, "View matrix files (DMH1)");
    cmd.add_option("--labels", config.labels_path, "Label matrix file (DMH1)");
    cmd.add_option("--code-length", config.code_lengths, "Code length(s) c")
        ->check(CLI::PositiveNumber);
    cmd.add_option("--alpha", config.alpha, "Per-view alpha (one value broadcasts)");
    cmd.add_option("--beta", config.beta, "Per-view beta: number or auto");
    cmd.add_option("--gamma", config.gamma, "Per-view gamma (one value broadcasts)");
    cmd.add_option("--ks", config.train.k_s, "Initial step size");
    cmd.add_option("--ke", config.train.k_e, "Final step size");
    cmd.add_option("--max-iter", config.train.max_iter, "Iteration cap K");
    cmd.add_option("--rtol", config.train.convergence_rtol,
                   "Relative objective change that stops training");
    cmd.add_option("--seed", config.train.seed, "Seed for init and split");
    cmd.add_option("--radius", config.radius, "Hash lookup radius");
    cmd.add_option("--cutoff", config.cutoff, "Ranking cutoff R (0 = whole database)");
    cmd.add_option("--test-fraction", config.test_fraction, "Query fraction")
        ->check(CLI::Range(0.0, 1.0));
    cmd.add_option("--out", config.out, "Output directory");
    cmd.add_option("--n-per-class", config.synthetic.n_per_class,
                   "Synthetic rows per class");
    cmd.add_option("--classes", config.synthetic.n_classes, "Synthetic classes");
    cmd.add_option("--dims", config.synthetic.dims, "Synthetic view dimensions");
    cmd.add_option("--noise", config.synthetic.noise_sigma, "Synthetic noise sigma");
    cmd.add_option("--data-seed", config.synthetic.seed, "Synthetic generator seed");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cross-view binary hashing: train, encode, evaluate"};
    app.require_subcommand(1);
    RunConfig config;

    auto* generate = app.add_subcommand("generate", "Write the synthetic dataset");
    auto* train = app.add_subcommand("train", "Train a model");
    auto* encode = app.add_subcommand("encode", "Encode a matrix with a trained view");
    auto* eval = app.add_subcommand("eval", "MAP and lookup F1 in both directions");
    auto* ablate = app.add_subcommand("ablate", "Paired and grid sweeps");
    auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference gradient checks");
    auto* propcheck = app.add_subcommand("propcheck", "Geometry oracles");

    for (auto* cmd : {generate, train, encode, eval, ablate, gradcheck, propcheck}) {
        add_shared(*cmd, config);
    }
    encode->add_option("--model", config.model_path, "Model file")->required();
    encode->add_option("--input", config.input_path, "Matrix to encode")->required();
    encode->add_option("--view-id", config.view_id, "View to encode with");
    eval->add_option("--model", config.model_path, "Evaluate this model instead of training");
    ablate->add_option("--gamma-grid", config.gamma_grid, "Gamma values");
    ablate->add_option("--alpha-grid", config.alpha_grid, "Label-view alpha values");
    ablate->add_option("--beta-grid", config.beta_grid, "Target ranges max|beta X|");
    ablate->add_flag("--reference-grids", "Sweep the reference gamma, alpha and beta grids");
    ablate->add_option("--seeds", config.seeds, "Number of consecutive seeds")
        ->check(CLI::PositiveNumber);
    gradcheck->add_option("--instances", config.instances, "Random instances")
        ->check(CLI::PositiveNumber);
    gradcheck->add_flag("--inject-sign-error", config.inject_sign_error,
                        "Negate the analytic gradient");
    propcheck->add_option("--d", config.prop_d, "Rows of W for the angle check")
        ->check(CLI::PositiveNumber);
    propcheck->add_option("--c", config.prop_c, "Columns of W for the angle check")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : dmh::cli::kExitUsage;
    }

    if (ablate->parsed() && ablate->count("--reference-grids") > 0) {
        config.gamma_grid = dmh::cli::reference_gamma_grid();
        config.alpha_grid = dmh::cli::reference_alpha_grid();
        config.beta_grid = dmh::cli::reference_beta_grid();
    }

    try {
        if (generate->parsed()) return dmh::cli::cmd_generate(config, std::cout);
        if (train->parsed()) return dmh::cli::cmd_train(config, std::cout);
        if (encode->parsed()) return dmh::cli::cmd_encode(config, std::cout);
        if (eval->parsed()) return dmh::cli::cmd_eval(config, std::cout);
        if (ablate->parsed()) return dmh::cli::cmd_ablate(config, std::cout);
        if (gradcheck->parsed()) return dmh::cli::cmd_gradcheck(config, std::cout);
        if (propcheck->parsed()) return dmh::cli::cmd_propcheck(config, std::cout);
    } catch (const dmh::DivergedError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return dmh::cli::kExitDiverged;
    } catch (const dmh::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return dmh::cli::kExitUsage;
    }
    return dmh::cli::kExitUsage;
}
