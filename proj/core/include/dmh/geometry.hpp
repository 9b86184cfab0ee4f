#pragma once

#include <cstdint>
#include <vector>

#include "dmh/model.hpp"

namespace dmh::geometry {

/// Pairwise column angles of a unit-column matrix.
struct AngleProfile {
    std::vector<double> pairwise_angles;  // radians, pairs p < q in row order
    double mean_angle = 0.0;
    double max_deviation = 0.0;      // max |angle - mean angle|
    double abs_cos_deviation = 0.0;  // max ||cos| - mean |cos||
};

/// ||W^T W - I||_F
double or_penalty(const Matrix& W);

/// Angle profile after choosing column signs that minimise the sum of
/// pairwise cosines. The penalty ignores column signs, so the signed angles
/// of a minimiser are only defined up to this choice.
AngleProfile angle_profile(const Matrix& W);

struct MinimizeOptions {
    double step = 0.05;
    int max_iter = 200000;
    double gradient_tol = 1e-11;
};

struct MinimizeResult {
    Matrix W;  // columns have unit norm
    AngleProfile angles;
    double penalty = 0.0;
    int iterations = 0;
    bool converged = false;  // false: iteration cap hit, best iterate returned
};

/// Projected gradient descent on or_penalty over matrices with unit-norm
/// columns, from a seeded Gaussian start.
MinimizeResult minimize_or_penalty(int d, int c, std::uint64_t seed,
                                   const MinimizeOptions& options = {});

/// |or_penalty(W R) - or_penalty(W)|. R must be orthogonal to 1e-10.
double rotation_invariance_check(const Matrix& W, const Matrix& R);

/// Haar-distributed orthogonal matrix from the QR factorisation of a
/// Gaussian matrix (sign-corrected by diag(R)).
Matrix random_orthogonal(int size, std::uint64_t seed);

struct RankCheck {
    Eigen::Index numerical_rank = 0;
    Eigen::Index bound = 0;  // d + 1
    Vector singular_values;
    double gram_min_eigenvalue = 0.0;  // smallest eigenvalue of C^T C
};

/// Numerical rank of sigmoid_embed(view, params): singular values above
/// 1e-8 * sigma_max. Asserts nothing; callers compare against the bound.
RankCheck embedding_rank_bound_check(const ViewMatrix& view,
                                     const ViewParams& params,
                                     double relative_tol = 1e-8);

}  // namespace dmh::geometry
