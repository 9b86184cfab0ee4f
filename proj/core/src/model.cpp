#include "dmh/model.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "dmh/errors.hpp"

namespace dmh {

namespace {

// Largest double below 1; keeps C strictly inside (0, 1) after saturation.
constexpr double kUpper = 1.0 - 0x1.0p-53;
constexpr double kLower = std::numeric_limits<double>::min();

void check_shapes(const ViewMatrix& view, const ViewParams& params) {
    if (view.cols() != params.W.rows()) {
        throw ContractViolation("view '" + view.view_id + "' has " +
                                std::to_string(view.cols()) +
                                " features but W has " +
                                std::to_string(params.W.rows()) + " rows");
    }
    if (params.v.size() != params.W.cols()) {
        throw ContractViolation("bias length " +
                                std::to_string(params.v.size()) +
                                " != code length " +
                                std::to_string(params.W.cols()));
    }
}

void check_codes(const CodeMatrix& B, Eigen::Index n, Eigen::Index c) {
    if (B.rows() != n || B.cols() != c) {
        throw ContractViolation(
            "code matrix is " + std::to_string(B.rows()) + "x" +
            std::to_string(B.cols()) + ", expected " + std::to_string(n) +
            "x" + std::to_string(c));
    }
}

}  // namespace

void ViewMatrix::validate() const {
    if (data.rows() < 1 || data.cols() < 1) {
        throw InputError("view '" + view_id + "' is empty");
    }
    if (!data.allFinite()) {
        throw InputError("view '" + view_id + "' has non-finite entries");
    }
}

void ViewParams::validate() const {
    if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
    if (!(beta > 0.0)) throw ConfigError("beta must be positive");
    if (!(gamma >= 0.0)) throw ConfigError("gamma must be non-negative");
    if (v.size() != W.cols()) {
        throw ContractViolation("bias length does not match W columns");
    }
    if (!W.allFinite() || !v.allFinite()) {
        throw InputError("view parameters have non-finite entries");
    }
}

double stable_sigmoid(double z) noexcept {
    double s;
    if (z >= 0.0) {
        s = 1.0 / (1.0 + std::exp(-z));
    } else {
        const double e = std::exp(z);
        s = e / (1.0 + e);
    }
    if (s > kUpper) return kUpper;
    if (s < kLower) return kLower;
    return s;
}

EmbeddingMatrix sigmoid_embed(const ViewMatrix& view,
                              const ViewParams& params) {
    check_shapes(view, params);
    if (!view.data.allFinite()) {
        throw InputError("view '" + view.view_id + "' has non-finite entries");
    }
    if (!params.W.allFinite() || !params.v.allFinite()) {
        throw InputError("view parameters have non-finite entries");
    }
    Matrix z = view.data * params.W;
    z.rowwise() += params.v.transpose();
    return {z.unaryExpr([](double x) { return stable_sigmoid(x); })};
}

double mcr_value(const Matrix& C) {
    if (C.rows() == 0) return 0.0;
    const Matrix gram = C.transpose() * C / static_cast<double>(C.rows());
    return gram.norm();
}

double mcr_penalty(const Matrix& C) {
    const double value = mcr_value(C);
    return value * value;
}

double objective_from_embeddings(const CodeMatrix& B,
                                 std::span<const EmbeddingMatrix> embeddings,
                                 std::span<const ViewParams> params) {
    if (embeddings.size() != params.size()) {
        throw ContractViolation("embedding and parameter counts differ");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < embeddings.size(); ++i) {
        const Matrix& C = embeddings[i].values;
        check_codes(B, C.rows(), C.cols());
        const double quantization =
            (B.bits.cast<double>() - C).squaredNorm();
        double term = quantization;
        if (params[i].gamma > 0.0) term += params[i].gamma * mcr_penalty(C);
        total += params[i].alpha * term;
    }
    return total;
}

double objective(const CodeMatrix& B, std::span<const ViewMatrix> views,
                 std::span<const ViewParams> params) {
    if (views.size() != params.size()) {
        throw ContractViolation("view and parameter counts differ");
    }
    std::vector<EmbeddingMatrix> embeddings;
    embeddings.reserve(views.size());
    for (std::size_t i = 0; i < views.size(); ++i) {
        embeddings.push_back(sigmoid_embed(views[i], params[i]));
    }
    return objective_from_embeddings(B, embeddings, params);
}

CodeMatrix update_code_matrix_from_embeddings(
    std::span<const EmbeddingMatrix> embeddings,
    std::span<const ViewParams> params) {
    if (embeddings.empty()) {
        throw ContractViolation("code update needs at least one view");
    }
    if (embeddings.size() != params.size()) {
        throw ContractViolation("embedding and parameter counts differ");
    }
    const Eigen::Index n = embeddings.front().values.rows();
    const Eigen::Index c = embeddings.front().values.cols();
    Matrix weighted = Matrix::Zero(n, c);
    double alpha_sum = 0.0;
    for (std::size_t i = 0; i < embeddings.size(); ++i) {
        const Matrix& C = embeddings[i].values;
        if (C.rows() != n || C.cols() != c) {
            throw ContractViolation("embeddings disagree in shape");
        }
        weighted += params[i].alpha * C;
        alpha_sum += params[i].alpha;
    }
    weighted /= alpha_sum;
    return {weighted.unaryExpr([](double x) -> std::uint8_t {
        return x >= 0.5 ? 1 : 0;
    })};
}

CodeMatrix update_code_matrix(std::span<const ViewMatrix> views,
                              std::span<const ViewParams> params) {
    if (views.size() != params.size()) {
        throw ContractViolation("view and parameter counts differ");
    }
    std::vector<EmbeddingMatrix> embeddings;
    embeddings.reserve(views.size());
    for (std::size_t i = 0; i < views.size(); ++i) {
        embeddings.push_back(sigmoid_embed(views[i], params[i]));
    }
    return update_code_matrix_from_embeddings(embeddings, params);
}

ViewGradient view_gradient(const ViewMatrix& view, const ViewParams& params,
                           const CodeMatrix& B) {
    const Matrix C = sigmoid_embed(view, params).values;
    check_codes(B, C.rows(), C.cols());
    const double n = static_cast<double>(C.rows());

    Matrix d_embed = 2.0 * (C - B.bits.cast<double>());
    if (params.gamma > 0.0) {
        const Matrix gram = C.transpose() * C;
        d_embed.noalias() += (4.0 * params.gamma / (n * n)) * (C * gram);
    }
    d_embed *= params.alpha;
    const Matrix d_pre =
        d_embed.cwiseProduct(C.cwiseProduct((1.0 - C.array()).matrix()));

    ViewGradient grad;
    grad.bias = d_pre.colwise().sum().transpose();
    grad.weights = view.data.transpose() * d_pre;
    return grad;
}

Vector grad_bias(const ViewMatrix& view, const ViewParams& params,
                 const CodeMatrix& B) {
    return view_gradient(view, params, B).bias;
}

Matrix grad_weights(const ViewMatrix& view, const ViewParams& params,
                    const CodeMatrix& B) {
    return view_gradient(view, params, B).weights;
}

bool is_degenerate(const ViewMatrix& view) {
    if (view.rows() == 0) return true;
    for (Eigen::Index j = 0; j < view.cols(); ++j) {
        const auto col = view.data.col(j);
        if (col.maxCoeff() != col.minCoeff()) return false;
    }
    return true;
}

}  // namespace dmh
