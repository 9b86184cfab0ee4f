#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dmh/model.hpp"

namespace dmh {

/// Step-size schedule and stopping rule. Defaults:
/// k_s = 0.003, k_e = 0.0015, K = 400.
struct TrainConfig {
    double k_s = 0.003;
    double k_e = 0.0015;
    int max_iter = 400;
    double convergence_rtol = 1e-5;
    std::uint64_t seed = 0;

    void validate() const;
    bool operator==(const TrainConfig&) const = default;
};

/// Fixed per-view scalars supplied by the caller.
struct ViewHyper {
    double alpha = 1.0;
    double beta = 1.0;
    double gamma = 0.001;
};

struct TrainTrace {
    std::vector<double> objective_per_iteration;
    int iterations_run = 0;
    bool converged = false;
    std::vector<std::string> warnings;
};

struct TrainResult {
    std::vector<ViewParams> params;
    CodeMatrix codes;
    TrainTrace trace;
};

/// Linearly decaying step: k_s - (k_s - k_e) * k / K, for 0 <= k <= K.
double step_size(int k, const TrainConfig& config);

/// Zero-mean Gaussian initialisation with standard deviation 0.01.
std::vector<ViewParams> initialize_params(std::span<const ViewMatrix> views,
                                          std::span<const ViewHyper> hyper,
                                          int code_length, std::uint64_t seed);

/// Alternating minimisation with the decaying step and a Frobenius-normalised
/// W step. The returned codes are refreshed from the final parameters.
TrainResult train(std::span<const ViewMatrix> views, const TrainConfig& config,
                  std::span<const ViewHyper> hyper, int code_length);

/// Same loop with a fixed step of config.k_s and raw (unnormalised) W steps.
TrainResult train_prototype(std::span<const ViewMatrix> views,
                            const TrainConfig& config,
                            std::span<const ViewHyper> hyper, int code_length);

struct TrainOptions {
    bool normalize_weight_step = true;
    bool decay_step = true;
    /// Called after each iteration's parameter step (1-based index).
    std::function<void(int, std::span<const ViewParams>)> on_iteration;
};

TrainResult train_with_options(std::span<const ViewMatrix> views,
                               const TrainConfig& config,
                               std::span<const ViewHyper> hyper,
                               int code_length, const TrainOptions& options);

}  // namespace dmh
