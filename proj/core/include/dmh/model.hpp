#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

#include <Eigen/Dense>

namespace dmh {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using BitMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

/// One modality's feature matrix, samples in rows. All views of a dataset
/// share the row order. Views handed to the model are expected to be
/// already multiplied by their beta (see rescale_views).
struct ViewMatrix {
    Matrix data;
    std::string view_id;
    bool is_label_view = false;

    Eigen::Index rows() const { return data.rows(); }
    Eigen::Index cols() const { return data.cols(); }

    /// Throws InputError on empty or non-finite data.
    void validate() const;
};

/// Learnable weights and bias of one view plus its fixed scalars.
///
/// beta records the rescale factor that was folded into the view matrix
/// before training; the model itself never multiplies by it again.
struct ViewParams {
    Matrix W;  // d x c
    Vector v;  // c
    double alpha = 1.0;
    double beta = 1.0;
    double gamma = 0.001;

    Eigen::Index input_dim() const { return W.rows(); }
    Eigen::Index code_length() const { return W.cols(); }

    /// Throws ConfigError / InputError when alpha <= 0, gamma < 0, beta <= 0,
    /// shapes disagree, or an entry is non-finite.
    void validate() const;
};

/// Binary code matrix, n x c, entries exactly 0 or 1.
struct CodeMatrix {
    BitMatrix bits;

    Eigen::Index rows() const { return bits.rows(); }
    Eigen::Index cols() const { return bits.cols(); }
    bool operator==(const CodeMatrix&) const = default;
};

/// Sigmoid embedding C = 1 / (1 + exp(-(X W + 1 v^T))), entries in (0, 1).
struct EmbeddingMatrix {
    Matrix values;
};

/// Logistic function, saturating inside the open interval (0, 1).
double stable_sigmoid(double z) noexcept;

EmbeddingMatrix sigmoid_embed(const ViewMatrix& view, const ViewParams& params);

/// Frobenius norm of C^T C / n. Accepts any real matrix, not only sigmoid
/// outputs.
double mcr_value(const Matrix& C);

/// The regularizer as it enters the objective: mcr_value(C)^2.
double mcr_penalty(const Matrix& C);

/// E = sum_i alpha_i (||B - C_i||_F^2 + gamma_i ||C_i^T C_i / n||_F^2).
double objective(const CodeMatrix& B, std::span<const ViewMatrix> views,
                 std::span<const ViewParams> params);

/// Objective from precomputed embeddings; same value as objective().
double objective_from_embeddings(const CodeMatrix& B,
                                 std::span<const EmbeddingMatrix> embeddings,
                                 std::span<const ViewParams> params);

/// Rounded alpha-weighted average of the embeddings, ties (0.5) go to 1.
CodeMatrix update_code_matrix(std::span<const ViewMatrix> views,
                              std::span<const ViewParams> params);

CodeMatrix update_code_matrix_from_embeddings(
    std::span<const EmbeddingMatrix> embeddings,
    std::span<const ViewParams> params);

struct ViewGradient {
    Vector bias;     // c
    Matrix weights;  // d x c
};

/// Analytic gradient of the objective term of one view.
///
/// With Z = X W + 1 v^T and C = sigmoid(Z):
///   dE/dC = alpha (2 (C - B) + 4 gamma / n^2 * C (C^T C))
///   dE/dZ = dE/dC o C o (1 - C)
///   dE/dW = X^T dE/dZ,  dE/dv = column sums of dE/dZ
ViewGradient view_gradient(const ViewMatrix& view, const ViewParams& params,
                           const CodeMatrix& B);

Vector grad_bias(const ViewMatrix& view, const ViewParams& params,
                 const CodeMatrix& B);
Matrix grad_weights(const ViewMatrix& view, const ViewParams& params,
                    const CodeMatrix& B);

/// True when every feature column of the view is constant. Such views are
/// accepted, callers surface a warning.
bool is_degenerate(const ViewMatrix& view);

}  // namespace dmh
