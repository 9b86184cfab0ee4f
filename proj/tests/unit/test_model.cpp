#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "dmh/errors.hpp"
#include "dmh/model.hpp"
#include "oracles.hpp"

using namespace dmh;

namespace {

ViewParams params_of(Matrix W, Vector v, double alpha = 1.0, double gamma = 0.0) {
    ViewParams p;
    p.W = std::move(W);
    p.v = std::move(v);
    p.alpha = alpha;
    p.gamma = gamma;
    return p;
}

CodeMatrix round_of(const Matrix& C) {
    CodeMatrix B;
    B.bits = (C.array() >= 0.5).cast<std::uint8_t>();
    return B;
}

struct Instance {
    std::vector<ViewMatrix> views;
    std::vector<ViewParams> params;
    CodeMatrix B;
};

Instance random_instance(std::uint64_t seed, int n, int d, int c, double gamma,
                         double scale = 0.5) {
    Rng rng(seed);
    Instance inst;
    inst.views.push_back({oracle::random_gaussian(rng, n, d), "x", false});
    inst.params.push_back(params_of(oracle::random_gaussian(rng, d, c, scale),
                                    oracle::random_gaussian(rng, c, 1, scale).col(0),
                                    0.5 + rng.uniform(), gamma));
    inst.B = oracle::random_codes(rng, n, c);
    return inst;
}

void check_close(const Matrix& a, const Matrix& b, double rtol, double floor) {
    REQUIRE(a.rows() == b.rows());
    REQUIRE(a.cols() == b.cols());
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        const double scale = std::max({std::abs(a(i)), std::abs(b(i)), floor});
        CHECK(std::abs(a(i) - b(i)) / scale <= rtol);
    }
}

}  // namespace

TEST_CASE("sigmoid_embed of zero parameters is one half") {
    Rng rng(3);
    ViewMatrix X{oracle::random_gaussian(rng, 6, 4), "x", false};
    const auto C = sigmoid_embed(X, params_of(Matrix::Zero(4, 5), Vector::Zero(5)));
    CHECK((C.values.array() == 0.5).all());
}

TEST_CASE("sigmoid_embed saturates below one") {
    ViewMatrix X{Matrix::Ones(1, 1), "x", false};
    const auto C = sigmoid_embed(X, params_of(Matrix::Constant(1, 1, 40.0),
                                              Vector::Zero(1)));
    CHECK(std::abs(C.values(0, 0) - 1.0) <= 1e-15);
    CHECK(C.values(0, 0) < 1.0);

    const auto low = sigmoid_embed(X, params_of(Matrix::Constant(1, 1, -800.0),
                                                Vector::Zero(1)));
    CHECK(low.values(0, 0) > 0.0);
}

TEST_CASE("sigmoid_embed scalar case") {
    ViewMatrix X{Matrix::Identity(2, 2), "x", false};
    Matrix W(2, 1);
    W << 1.0, -1.0;
    const auto C = sigmoid_embed(X, params_of(W, Vector::Zero(1)));
    CHECK(C.values(0, 0) == doctest::Approx(oracle::sigmoid(1.0)).epsilon(1e-15));
    CHECK(C.values(1, 0) == doctest::Approx(oracle::sigmoid(-1.0)).epsilon(1e-15));
    CHECK(C.values(0, 0) == doctest::Approx(0.7311).epsilon(1e-4));
    CHECK(C.values(1, 0) == doctest::Approx(0.2689).epsilon(1e-4));
}

TEST_CASE("sigmoid_embed rejects bad input") {
    ViewMatrix X{Matrix::Ones(3, 2), "x", false};
    CHECK_THROWS_AS(sigmoid_embed(X, params_of(Matrix::Zero(3, 2), Vector::Zero(2))),
                    ContractViolation);
    CHECK_THROWS_AS(sigmoid_embed(X, params_of(Matrix::Zero(2, 2), Vector::Zero(3))),
                    ContractViolation);
    X.data(1, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(sigmoid_embed(X, params_of(Matrix::Zero(2, 2), Vector::Zero(2))),
                    InputError);
}

TEST_CASE("sigmoid_embed stays in (0,1) and is monotone in the pre-activation") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        ViewMatrix X{oracle::random_gaussian(rng, 8, 3, 30.0), "x", false};
        auto p = params_of(oracle::random_gaussian(rng, 3, 4, 10.0),
                           oracle::random_gaussian(rng, 4, 1, 10.0).col(0));
        const auto C = sigmoid_embed(X, p);
        CHECK((C.values.array() > 0.0).all());
        CHECK((C.values.array() < 1.0).all());

        p.v.array() += 0.5;
        const auto shifted = sigmoid_embed(X, p);
        CHECK((shifted.values.array() >= C.values.array()).all());
    }
}

TEST_CASE("mcr_value closed forms") {
    CHECK(mcr_value(Matrix::Zero(4, 3)) == 0.0);
    for (int n : {1, 5, 9}) {
        for (int c : {1, 3, 8}) {
            CHECK(mcr_value(Matrix::Constant(n, c, 0.5)) ==
                  doctest::Approx(0.25 * c).epsilon(1e-14));
        }
    }
    // Columns orthogonal with squared norm n: C^T C / n = I.
    Matrix C(4, 2);
    C << 1, 1, 1, -1, 1, 1, 1, -1;
    CHECK(mcr_value(C) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(mcr_penalty(C) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("mcr_value is invariant to row and column permutations") {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 3 + static_cast<int>(rng.below(10));
        const int c = 1 + static_cast<int>(rng.below(8));
        Matrix C = oracle::random_gaussian(rng, n, c);
        const double base = mcr_value(C);

        Eigen::PermutationMatrix<Eigen::Dynamic> rows(n), cols(c);
        rows.setIdentity();
        cols.setIdentity();
        for (int i = n - 1; i > 0; --i) {
            std::swap(rows.indices()[i], rows.indices()[rng.below(i + 1)]);
        }
        for (int i = c - 1; i > 0; --i) {
            std::swap(cols.indices()[i], cols.indices()[rng.below(i + 1)]);
        }
        const Matrix permuted = rows * C * cols;
        CHECK(mcr_value(permuted) == doctest::Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("objective with gamma 0 and rounded B is the quantization loss") {
    const auto inst = random_instance(5, 12, 3, 6, 0.0);
    const auto C = sigmoid_embed(inst.views[0], inst.params[0]).values;
    const auto B = round_of(C);
    double expected = 0.0;
    for (Eigen::Index i = 0; i < C.size(); ++i) {
        const double r = B.bits(i) - C(i);
        expected += r * r;
    }
    expected *= inst.params[0].alpha;
    CHECK(objective(B, inst.views, inst.params) ==
          doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("objective of zero parameters against all-ones B") {
    for (auto [n, c, alpha] : {std::tuple{4, 3, 1.0}, {10, 7, 2.5}, {1, 1, 10.0}}) {
        Rng rng(static_cast<std::uint64_t>(n * c));
        std::vector<ViewMatrix> views{{oracle::random_gaussian(rng, n, 2), "x", false}};
        std::vector<ViewParams> params{
            params_of(Matrix::Zero(2, c), Vector::Zero(c), alpha, 0.0)};
        CodeMatrix B;
        B.bits = BitMatrix::Ones(n, c);
        const double expected = alpha * n * c * 0.25;
        CHECK(objective(B, views, params) == doctest::Approx(expected).epsilon(1e-14));
        CHECK(oracle::objective(B, views, params) ==
              doctest::Approx(expected).epsilon(1e-14));
    }
}

TEST_CASE("objective is additive over identical views") {
    const auto inst = random_instance(8, 9, 4, 5, 0.0);
    const auto B = round_of(sigmoid_embed(inst.views[0], inst.params[0]).values);
    auto params = inst.params;
    params[0].alpha = 1.0;
    const double single = objective(B, inst.views, params);
    std::vector<ViewMatrix> two{inst.views[0], inst.views[0]};
    std::vector<ViewParams> two_params{params[0], params[0]};
    CHECK(objective(B, two, two_params) == doctest::Approx(2.0 * single).epsilon(1e-14));
}

TEST_CASE("objective matches the summation oracle and is non-negative") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        const double gamma = std::vector<double>{0.0, 0.001, 0.1, 3.0}[seed % 4];
        const auto inst = random_instance(seed, 7 + seed % 5, 3, 1 + seed % 9, gamma);
        const double value = objective(inst.B, inst.views, inst.params);
        CHECK(value >= 0.0);
        CHECK(value == doctest::Approx(oracle::objective(inst.B, inst.views, inst.params))
                           .epsilon(1e-12));
    }
}

TEST_CASE("objective rejects mismatched shapes") {
    const auto inst = random_instance(1, 6, 3, 4, 0.0);
    CodeMatrix wrong;
    wrong.bits = BitMatrix::Zero(6, 5);
    CHECK_THROWS_AS(objective(wrong, inst.views, inst.params), ContractViolation);
    std::vector<ViewParams> none;
    CHECK_THROWS_AS(objective(inst.B, inst.views, none), ContractViolation);
}

TEST_CASE("update_code_matrix rounds a single view") {
    const auto inst = random_instance(4, 15, 3, 9, 0.0, 2.0);
    const auto C = sigmoid_embed(inst.views[0], inst.params[0]).values;
    CHECK(update_code_matrix(inst.views, inst.params) == round_of(C));
}

TEST_CASE("update_code_matrix weighted average and tie rule") {
    std::vector<EmbeddingMatrix> emb{{Matrix::Constant(2, 3, 0.9)},
                                     {Matrix::Constant(2, 3, 0.2)}};
    std::vector<ViewParams> params(2);
    params[0].alpha = params[1].alpha = 1.0;
    auto B = update_code_matrix_from_embeddings(emb, params);
    CHECK((B.bits.array() == 1).all());

    emb = {{Matrix::Constant(2, 2, 0.75)}, {Matrix::Constant(2, 2, 0.25)}};
    B = update_code_matrix_from_embeddings(emb, params);
    CHECK((B.bits.array() == 1).all());

    params[1].alpha = 3.0;  // (0.9 + 3 * 0.2) / 4 = 0.375
    emb = {{Matrix::Constant(1, 1, 0.9)}, {Matrix::Constant(1, 1, 0.2)}};
    CHECK(update_code_matrix_from_embeddings(emb, params).bits(0, 0) == 0);
}

TEST_CASE("update_code_matrix is optimal against single bit flips") {
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
        Rng rng(seed);
        const int n = 4 + static_cast<int>(rng.below(8));
        const int c = 1 + static_cast<int>(rng.below(8));
        const int views = 1 + static_cast<int>(rng.below(3));
        std::vector<ViewMatrix> X;
        std::vector<ViewParams> P;
        for (int i = 0; i < views; ++i) {
            const int d = 1 + static_cast<int>(rng.below(5));
            X.push_back({oracle::random_gaussian(rng, n, d), "v", false});
            P.push_back(params_of(oracle::random_gaussian(rng, d, c),
                                  oracle::random_gaussian(rng, c, 1).col(0),
                                  0.1 + 5.0 * rng.uniform(), 0.0));
        }
        auto B = update_code_matrix(X, P);
        const double base = oracle::objective(B, X, P);
        for (Eigen::Index m = 0; m < n; ++m) {
            for (Eigen::Index k = 0; k < c; ++k) {
                B.bits(m, k) ^= 1;
                CHECK(oracle::objective(B, X, P) >= base);
                B.bits(m, k) ^= 1;
            }
        }
    }
}

TEST_CASE("gradients vanish when B equals C and gamma is 0") {
    const auto inst = random_instance(2, 6, 3, 4, 0.0);
    ViewMatrix X{Matrix::Zero(6, 3), "x", false};
    auto p = inst.params[0];
    CodeMatrix B;
    B.bits = BitMatrix::Ones(6, 4);
    // Saturated bias: C = 1 - 2^-53, the closest a sigmoid gets to B = 1.
    p.v.setConstant(50.0);
    CHECK(grad_bias(X, p, B).cwiseAbs().maxCoeff() <= 1e-20);
    CHECK(grad_weights(X, p, B).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("grad_weights vanishes on zero data") {
    const auto inst = random_instance(6, 10, 4, 5, 0.0);
    ViewMatrix X{Matrix::Zero(10, 4), "x", false};
    CHECK(grad_weights(X, inst.params[0], inst.B).isZero(0.0));
}

TEST_CASE("grad_bias single sample closed form") {
    Rng rng(9);
    ViewMatrix X{oracle::random_gaussian(rng, 1, 3), "x", false};
    auto p = params_of(oracle::random_gaussian(rng, 3, 6),
                       oracle::random_gaussian(rng, 6, 1).col(0), 1.7, 0.0);
    const auto B = oracle::random_codes(rng, 1, 6);
    const auto C = sigmoid_embed(X, p).values;
    const auto g = grad_bias(X, p, B);
    for (Eigen::Index k = 0; k < 6; ++k) {
        const double expected =
            2.0 * p.alpha * (C(0, k) - B.bits(0, k)) * C(0, k) * (1.0 - C(0, k));
        CHECK(g(k) == doctest::Approx(expected).epsilon(1e-14));
    }
}

TEST_CASE("gradients match finite differences on n=20 d=5 c=8") {
    for (double gamma : {0.0, 0.001}) {
        const auto inst = random_instance(20, 20, 5, 8, gamma);
        const auto numeric = oracle::finite_difference(inst.B, inst.views, inst.params, 0);
        check_close(grad_bias(inst.views[0], inst.params[0], inst.B), numeric.bias,
                    1e-4, 1e-4);
        check_close(grad_weights(inst.views[0], inst.params[0], inst.B),
                    numeric.weights, 1e-4, 1e-4);
    }
}

TEST_CASE("gradients match finite differences on random instances") {
    const double gammas[] = {0.0, 0.001, 0.1};
    for (std::uint64_t seed = 100; seed < 130; ++seed) {
        Rng rng(seed);
        const int n = 1 + static_cast<int>(rng.below(30));
        const int d = 1 + static_cast<int>(rng.below(8));
        const int c = 1 + static_cast<int>(rng.below(16));
        const auto inst = random_instance(seed, n, d, c, gammas[seed % 3]);
        const auto numeric = oracle::finite_difference(inst.B, inst.views, inst.params, 0);
        check_close(grad_bias(inst.views[0], inst.params[0], inst.B), numeric.bias,
                    1e-4, 1e-4);
        check_close(grad_weights(inst.views[0], inst.params[0], inst.B),
                    numeric.weights, 1e-4, 1e-4);
    }
}

TEST_CASE("gradients are linear in alpha") {
    auto inst = random_instance(31, 12, 4, 7, 0.1);
    const Matrix g1 = grad_weights(inst.views[0], inst.params[0], inst.B);
    const Vector b1 = grad_bias(inst.views[0], inst.params[0], inst.B);
    inst.params[0].alpha *= 2.0;
    CHECK(grad_weights(inst.views[0], inst.params[0], inst.B) == 2.0 * g1);
    CHECK(grad_bias(inst.views[0], inst.params[0], inst.B) == 2.0 * b1);
}

TEST_CASE("view_gradient agrees with the separate gradients") {
    const auto inst = random_instance(12, 9, 3, 5, 0.001);
    const auto g = view_gradient(inst.views[0], inst.params[0], inst.B);
    CHECK(g.bias == grad_bias(inst.views[0], inst.params[0], inst.B));
    CHECK(g.weights == grad_weights(inst.views[0], inst.params[0], inst.B));
}

TEST_CASE("parameter validation") {
    ViewParams p = params_of(Matrix::Zero(2, 2), Vector::Zero(2));
    CHECK_NOTHROW(p.validate());
    p.alpha = 0.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p.alpha = 1.0;
    p.gamma = -1e-9;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p.gamma = 0.0;
    CHECK_NOTHROW(p.validate());

    ViewMatrix empty{Matrix(0, 3), "x", false};
    CHECK_THROWS_AS(empty.validate(), InputError);
}

TEST_CASE("degenerate views are detected") {
    ViewMatrix flat{Matrix::Constant(5, 3, 2.0), "x", false};
    CHECK(is_degenerate(flat));
    flat.data(2, 1) = 0.0;
    CHECK_FALSE(is_degenerate(flat));
}
