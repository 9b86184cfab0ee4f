#include "dmh/optimizer.hpp"

#include <algorithm>
#include <cmath>

#include "dmh/errors.hpp"
#include "dmh/random.hpp"

namespace dmh {

namespace {

constexpr double kInitStddev = 0.01;
constexpr double kObjectiveFloor = 1e-12;
constexpr double kMinGradientNorm = 1e-12;

void check_inputs(std::span<const ViewMatrix> views,
                  std::span<const ViewHyper> hyper, int code_length) {
    if (views.empty()) throw ContractViolation("training needs a view");
    if (hyper.size() != views.size()) {
        throw ContractViolation("expected " + std::to_string(views.size()) +
                                " hyperparameter sets, got " +
                                std::to_string(hyper.size()));
    }
    if (code_length < 1) throw ConfigError("code length must be positive");
    const Eigen::Index n = views.front().rows();
    for (const auto& view : views) {
        view.validate();
        if (view.rows() != n) {
            throw ContractViolation("views disagree in row count");
        }
    }
    for (const auto& h : hyper) {
        if (!(h.alpha > 0.0)) throw ConfigError("alpha must be positive");
        if (!(h.beta > 0.0)) throw ConfigError("beta must be positive");
        if (!(h.gamma >= 0.0)) throw ConfigError("gamma must be non-negative");
    }
}

std::vector<EmbeddingMatrix> embed_all(std::span<const ViewMatrix> views,
                                       std::span<const ViewParams> params) {
    std::vector<EmbeddingMatrix> out;
    out.reserve(views.size());
    for (std::size_t i = 0; i < views.size(); ++i) {
        out.push_back(sigmoid_embed(views[i], params[i]));
    }
    return out;
}

}  // namespace

void TrainConfig::validate() const {
    if (!(k_e > 0.0)) throw ConfigError("k_e must be positive");
    if (!(k_s >= k_e)) throw ConfigError("k_s must be >= k_e");
    if (max_iter < 1) throw ConfigError("max_iter must be >= 1");
    if (!(convergence_rtol >= 0.0)) {
        throw ConfigError("convergence_rtol must be non-negative");
    }
}

double step_size(int k, const TrainConfig& config) {
    if (k < 0 || k > config.max_iter) {
        throw ContractViolation("iteration " + std::to_string(k) +
                                " outside [0, " +
                                std::to_string(config.max_iter) + "]");
    }
    return config.k_s - (config.k_s - config.k_e) * static_cast<double>(k) /
                            static_cast<double>(config.max_iter);
}

std::vector<ViewParams> initialize_params(std::span<const ViewMatrix> views,
                                          std::span<const ViewHyper> hyper,
                                          int code_length, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<ViewParams> params;
    params.reserve(views.size());
    for (std::size_t i = 0; i < views.size(); ++i) {
        ViewParams p;
        p.W.resize(views[i].cols(), code_length);
        p.v.resize(code_length);
        // Row-major draw order so the stream does not depend on Eigen storage.
        for (Eigen::Index r = 0; r < p.W.rows(); ++r) {
            for (Eigen::Index c = 0; c < p.W.cols(); ++c) {
                p.W(r, c) = kInitStddev * rng.normal();
            }
        }
        for (Eigen::Index c = 0; c < p.v.size(); ++c) {
            p.v(c) = kInitStddev * rng.normal();
        }
        p.alpha = hyper[i].alpha;
        p.beta = hyper[i].beta;
        p.gamma = hyper[i].gamma;
        params.push_back(std::move(p));
    }
    return params;
}

TrainResult train_with_options(std::span<const ViewMatrix> views,
                               const TrainConfig& config,
                               std::span<const ViewHyper> hyper,
                               int code_length, const TrainOptions& options) {
    config.validate();
    check_inputs(views, hyper, code_length);

    TrainResult result;
    for (const auto& view : views) {
        if (is_degenerate(view)) {
            result.trace.warnings.push_back("view '" + view.view_id +
                                            "' has zero variance in every "
                                            "feature");
        }
    }

    result.params = initialize_params(views, hyper, code_length, config.seed);
    std::vector<EmbeddingMatrix> embeddings = embed_all(views, result.params);

    double previous = objective_from_embeddings(
        update_code_matrix_from_embeddings(embeddings, result.params),
        embeddings, result.params);

    auto& trace = result.trace;
    for (int k = 0; k < config.max_iter; ++k) {
        const double step =
            options.decay_step ? step_size(k, config) : config.k_s;
        const CodeMatrix B =
            update_code_matrix_from_embeddings(embeddings, result.params);

        // Gradients for every view are taken at the same parameter state.
        std::vector<ViewGradient> grads;
        grads.reserve(views.size());
        for (std::size_t i = 0; i < views.size(); ++i) {
            grads.push_back(view_gradient(views[i], result.params[i], B));
        }
        for (std::size_t i = 0; i < views.size(); ++i) {
            ViewParams& p = result.params[i];
            p.v -= step * grads[i].bias;
            if (options.normalize_weight_step) {
                const double norm = grads[i].weights.norm();
                if (norm >= kMinGradientNorm) {
                    p.W -= (step / norm) * grads[i].weights;
                }
            } else {
                p.W -= step * grads[i].weights;
            }
        }

        for (const auto& p : result.params) {
            if (!p.W.allFinite() || !p.v.allFinite()) {
                throw DivergedError(k + 1, "parameters became non-finite at "
                                           "iteration " +
                                               std::to_string(k + 1));
            }
        }
        embeddings = embed_all(views, result.params);
        const double value =
            objective_from_embeddings(B, embeddings, result.params);
        if (!std::isfinite(value)) {
            throw DivergedError(k + 1, "objective became non-finite at "
                                       "iteration " +
                                           std::to_string(k + 1));
        }
        trace.objective_per_iteration.push_back(value);
        trace.iterations_run = k + 1;
        if (options.on_iteration) {
            options.on_iteration(k + 1, result.params);
        }

        const double change =
            std::abs(value - previous) / std::max(previous, kObjectiveFloor);
        previous = value;
        if (change < config.convergence_rtol) {
            trace.converged = true;
            break;
        }
    }

    result.codes =
        update_code_matrix_from_embeddings(embeddings, result.params);
    return result;
}

TrainResult train(std::span<const ViewMatrix> views, const TrainConfig& config,
                  std::span<const ViewHyper> hyper, int code_length) {
    return train_with_options(views, config, hyper, code_length, {});
}

TrainResult train_prototype(std::span<const ViewMatrix> views,
                            const TrainConfig& config,
                            std::span<const ViewHyper> hyper,
                            int code_length) {
    TrainOptions options;
    options.normalize_weight_step = false;
    options.decay_step = false;
    return train_with_options(views, config, hyper, code_length, options);
}

}  // namespace dmh
