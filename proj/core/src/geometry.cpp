#include "dmh/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dmh/errors.hpp"
#include "dmh/random.hpp"

namespace dmh::geometry {

namespace {

constexpr int kExhaustiveSignLimit = 14;

void normalize_columns(Matrix& W) {
    for (Eigen::Index j = 0; j < W.cols(); ++j) {
        const double norm = W.col(j).norm();
        if (norm > 0.0) W.col(j) /= norm;
    }
}

double signed_cos_sum(const Matrix& gram, const std::vector<int>& signs) {
    double sum = 0.0;
    for (Eigen::Index p = 0; p < gram.rows(); ++p) {
        for (Eigen::Index q = p + 1; q < gram.cols(); ++q) {
            sum += signs[p] * signs[q] * gram(p, q);
        }
    }
    return sum;
}

// Column signs minimising the sum of pairwise cosines. Exhaustive for small
// c (first column fixed), single-flip descent otherwise.
std::vector<int> canonical_signs(const Matrix& gram) {
    const auto c = static_cast<int>(gram.rows());
    std::vector<int> best(c, 1);
    if (c < 2) return best;
    if (c <= kExhaustiveSignLimit) {
        double best_sum = signed_cos_sum(gram, best);
        std::vector<int> signs(c, 1);
        for (std::uint32_t mask = 1; mask < (1u << (c - 1)); ++mask) {
            for (int j = 1; j < c; ++j) signs[j] = (mask >> (j - 1)) & 1u ? -1 : 1;
            const double sum = signed_cos_sum(gram, signs);
            if (sum < best_sum - 1e-15) {
                best_sum = sum;
                best = signs;
            }
        }
        return best;
    }
    bool improved = true;
    while (improved) {
        improved = false;
        for (int j = 1; j < c; ++j) {
            double delta = 0.0;
            for (int q = 0; q < c; ++q) {
                if (q != j) delta += best[j] * best[q] * gram(j, q);
            }
            if (delta > 1e-15) {  // flipping j lowers the sum by 2 * delta
                best[j] = -best[j];
                improved = true;
            }
        }
    }
    return best;
}

}  // namespace

double or_penalty(const Matrix& W) {
    if (!W.allFinite()) throw InputError("W has non-finite entries");
    return (W.transpose() * W - Matrix::Identity(W.cols(), W.cols())).norm();
}

AngleProfile angle_profile(const Matrix& W) {
    Matrix unit = W;
    normalize_columns(unit);
    const Matrix gram = unit.transpose() * unit;
    const auto signs = canonical_signs(gram);

    AngleProfile profile;
    std::vector<double> abs_cos;
    for (Eigen::Index p = 0; p < gram.rows(); ++p) {
        for (Eigen::Index q = p + 1; q < gram.cols(); ++q) {
            const double cosine =
                std::clamp(signs[p] * signs[q] * gram(p, q), -1.0, 1.0);
            profile.pairwise_angles.push_back(std::acos(cosine));
            abs_cos.push_back(std::abs(cosine));
        }
    }
    if (profile.pairwise_angles.empty()) return profile;

    const auto count = static_cast<double>(abs_cos.size());
    double angle_mean = 0.0;
    double cos_mean = 0.0;
    for (std::size_t i = 0; i < abs_cos.size(); ++i) {
        angle_mean += profile.pairwise_angles[i];
        cos_mean += abs_cos[i];
    }
    angle_mean /= count;
    cos_mean /= count;
    profile.mean_angle = angle_mean;
    for (std::size_t i = 0; i < abs_cos.size(); ++i) {
        profile.max_deviation = std::max(
            profile.max_deviation, std::abs(profile.pairwise_angles[i] - angle_mean));
        profile.abs_cos_deviation =
            std::max(profile.abs_cos_deviation, std::abs(abs_cos[i] - cos_mean));
    }
    return profile;
}

MinimizeResult minimize_or_penalty(int d, int c, std::uint64_t seed,
                                   const MinimizeOptions& options) {
    if (d < 1 || c < 1) throw ContractViolation("d and c must be positive");
    Rng rng(seed);
    Matrix W(d, c);
    for (int r = 0; r < d; ++r) {
        for (int j = 0; j < c; ++j) W(r, j) = rng.normal();
    }
    normalize_columns(W);

    MinimizeResult result;
    result.W = W;
    result.penalty = or_penalty(W);
    const Matrix identity = Matrix::Identity(c, c);
    for (int it = 0; it < options.max_iter; ++it) {
        const Matrix residual = W.transpose() * W - identity;
        // Gradient of ||W^T W - I||_F^2, projected onto the tangent space of
        // the unit-column constraint.
        Matrix grad = 4.0 * W * residual;
        for (Eigen::Index j = 0; j < c; ++j) {
            grad.col(j) -= W.col(j).dot(grad.col(j)) * W.col(j);
        }
        result.iterations = it + 1;
        if (grad.norm() < options.gradient_tol) {
            result.converged = true;
            break;
        }
        W -= options.step * grad;
        normalize_columns(W);
        const double penalty = or_penalty(W);
        if (penalty <= result.penalty) {
            result.penalty = penalty;
            result.W = W;
        }
    }
    result.angles = angle_profile(result.W);
    return result;
}

double rotation_invariance_check(const Matrix& W, const Matrix& R) {
    if (R.rows() != R.cols() || R.rows() != W.cols()) {
        throw ContractViolation("R must be square with W.cols() rows");
    }
    const Matrix defect = R.transpose() * R - Matrix::Identity(R.rows(), R.cols());
    if (defect.cwiseAbs().maxCoeff() > 1e-10) {
        throw ContractViolation("R is not orthogonal within 1e-10");
    }
    return std::abs(or_penalty(W * R) - or_penalty(W));
}

Matrix random_orthogonal(int size, std::uint64_t seed) {
    if (size < 1) throw ContractViolation("size must be positive");
    Rng rng(seed);
    Matrix g(size, size);
    for (int r = 0; r < size; ++r) {
        for (int c = 0; c < size; ++c) g(r, c) = rng.normal();
    }
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(size, size);
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < size; ++j) {
        if (r(j, j) < 0.0) q.col(j) = -q.col(j);
    }
    return q;
}

RankCheck embedding_rank_bound_check(const ViewMatrix& view,
                                     const ViewParams& params,
                                     double relative_tol) {
    const Matrix C = sigmoid_embed(view, params).values;
    Eigen::JacobiSVD<Matrix> svd(C);
    RankCheck check;
    check.singular_values = svd.singularValues();
    check.bound = view.cols() + 1;
    const double largest =
        check.singular_values.size() > 0 ? check.singular_values(0) : 0.0;
    const double cutoff = relative_tol * largest;
    check.numerical_rank = (check.singular_values.array() > cutoff).count();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(C.transpose() * C,
                                              Eigen::EigenvaluesOnly);
    check.gram_min_eigenvalue = eig.eigenvalues().minCoeff();
    return check;
}

}  // namespace dmh::geometry
