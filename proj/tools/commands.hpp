#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "dmh/artifact.hpp"
#include "dmh/data.hpp"
#include "dmh/eval.hpp"
#include "dmh/optimizer.hpp"

namespace dmh::cli {

/// Parameters shared by every subcommand. Defaults:
/// alpha 10 for the label view and 1 otherwise, gamma 0.001,
/// k_s 0.003, k_e 0.0015, K 400, hash lookup radius 2.
struct RunConfig {
    // Dataset: matrix files, or the built-in synthetic instance when no
    // view paths are given.
    std::vector<std::filesystem::path> view_paths;
    std::filesystem::path labels_path;
    SyntheticSpec synthetic;

    std::vector<int> code_lengths{32};
    // Per-view lists (feature views then label view). One value broadcasts
    // to every view; empty means the default.
    std::vector<double> alpha;
    std::vector<std::string> beta;  // numbers or "auto" (255 / max|X|)
    std::vector<double> gamma;

    TrainConfig train;
    std::size_t radius = 2;
    std::size_t cutoff = 0;  // 0 ranks the whole database
    double test_fraction = 0.05;

    std::filesystem::path out = ".";
    std::filesystem::path model_path;

    // encode
    std::filesystem::path input_path;
    std::string view_id;

    // ablate
    std::vector<double> gamma_grid;
    std::vector<double> alpha_grid;
    std::vector<double> beta_grid;
    int seeds = 1;

    // gradcheck / propcheck
    int instances = 20;
    bool inject_sign_error = false;
    int prop_d = 2;
    int prop_c = 3;
};

/// Label-view alpha and default gamma.
inline constexpr double kLabelAlpha = 10.0;
inline constexpr double kFeatureAlpha = 1.0;
inline constexpr double kDefaultGamma = 0.001;

/// Reference sweep grids.
std::vector<double> reference_gamma_grid();  // 10^{-5..1}
std::vector<double> reference_alpha_grid();  // {1, 5, 10, 15, 20, 25}
std::vector<double> reference_beta_grid();   // 2^{1,2,4,6,8,9} - 1

/// Loaded (or generated), split and rescaled dataset.
struct PreparedData {
    MultimodalDataset dataset;  // rescaled, split
    std::vector<double> betas;
    LoadReport load_report;
};

PreparedData prepare_data(const RunConfig& config);

/// Per-view hyperparameters after resolving broadcast and defaults.
std::vector<ViewHyper> resolve_hyper(const RunConfig& config,
                                     const MultimodalDataset& dataset,
                                     std::span<const double> betas);

struct TrainedRun {
    HashModel model;
    TrainTrace trace;
    CodeMatrix codes;
};

TrainedRun train_model(const PreparedData& data, const RunConfig& config,
                       int code_length);

/// Both directions between every ordered pair of feature views.
std::vector<Direction> feature_directions(const MultimodalDataset& dataset);

int cmd_generate(const RunConfig& config, std::ostream& out);
int cmd_train(const RunConfig& config, std::ostream& out);
int cmd_encode(const RunConfig& config, std::ostream& out);
int cmd_eval(const RunConfig& config, std::ostream& out);
int cmd_ablate(const RunConfig& config, std::ostream& out);
int cmd_gradcheck(const RunConfig& config, std::ostream& out);
int cmd_propcheck(const RunConfig& config, std::ostream& out);

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;     // a check failed
inline constexpr int kExitUsage = 2;       // bad configuration or input
inline constexpr int kExitDiverged = 3;    // training diverged

}  // namespace dmh::cli
