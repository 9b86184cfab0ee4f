#include "dmh/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "dmh/random.hpp"

namespace dmh::diagnostics {

namespace {

int uniform_int(Rng& rng, int lo, int hi) {
    return lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
}

Matrix gaussian(Rng& rng, Eigen::Index rows, Eigen::Index cols, double scale) {
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = scale * rng.normal();
    }
    return m;
}

// Error relative to max(|a|, |f|); magnitudes below atol / rtol are treated
// as atol / rtol so tiny entries are held to the absolute tolerance.
double relative_error(double analytic, double numeric,
                      const GradientCheckOptions& options) {
    const double floor = options.atol / options.rtol;
    const double scale = std::max({std::abs(analytic), std::abs(numeric), floor});
    return std::abs(analytic - numeric) / scale;
}

}  // namespace

GradientInstance random_gradient_instance(std::uint64_t seed, double gamma,
                                          int max_n, int max_d, int max_c) {
    Rng rng(seed);
    GradientInstance inst;
    inst.seed = seed;
    const int n = uniform_int(rng, 5, max_n);
    const int c = uniform_int(rng, 1, max_c);
    const int view_count = uniform_int(rng, 1, 2);
    for (int i = 0; i < view_count; ++i) {
        const int d = uniform_int(rng, 1, max_d);
        inst.views.push_back({gaussian(rng, n, d, 1.0), "v" + std::to_string(i),
                              false});
        ViewParams p;
        p.W = gaussian(rng, d, c, 0.5);
        p.v = gaussian(rng, c, 1, 0.5).col(0);
        p.alpha = 0.5 + 1.5 * rng.uniform();
        p.beta = 1.0;
        p.gamma = gamma;
        inst.params.push_back(std::move(p));
    }
    inst.codes.bits.resize(n, c);
    for (int r = 0; r < n; ++r) {
        for (int j = 0; j < c; ++j) {
            inst.codes.bits(r, j) = static_cast<std::uint8_t>(rng.below(2));
        }
    }
    return inst;
}

GradientCheck check_gradients(const GradientInstance& instance,
                              const GradientCheckOptions& options) {
    GradientCheck result;
    result.seed = instance.seed;
    result.n = static_cast<int>(instance.views.front().rows());
    result.d = static_cast<int>(instance.views.front().cols());
    result.c = static_cast<int>(instance.params.front().W.cols());
    result.gamma = instance.params.front().gamma;

    const double sign = options.flip_sign ? -1.0 : 1.0;
    const ViewGradient analytic =
        view_gradient(instance.views.front(), instance.params.front(),
                      instance.codes);

    std::vector<ViewParams> probe = instance.params;
    auto evaluate = [&] {
        return objective(instance.codes, instance.views, probe);
    };
    const double h = options.step;

    for (Eigen::Index k = 0; k < probe.front().v.size(); ++k) {
        const double saved = probe.front().v(k);
        probe.front().v(k) = saved + h;
        const double plus = evaluate();
        probe.front().v(k) = saved - h;
        const double minus = evaluate();
        probe.front().v(k) = saved;
        const double numeric = (plus - minus) / (2.0 * h);
        result.max_rel_error_bias =
            std::max(result.max_rel_error_bias,
                     relative_error(sign * analytic.bias(k), numeric, options));
    }
    for (Eigen::Index r = 0; r < probe.front().W.rows(); ++r) {
        for (Eigen::Index k = 0; k < probe.front().W.cols(); ++k) {
            const double saved = probe.front().W(r, k);
            probe.front().W(r, k) = saved + h;
            const double plus = evaluate();
            probe.front().W(r, k) = saved - h;
            const double minus = evaluate();
            probe.front().W(r, k) = saved;
            const double numeric = (plus - minus) / (2.0 * h);
            result.max_rel_error_weights = std::max(
                result.max_rel_error_weights,
                relative_error(sign * analytic.weights(r, k), numeric, options));
        }
    }
    result.passed = result.max_rel_error_bias <= options.rtol &&
                    result.max_rel_error_weights <= options.rtol;
    return result;
}

}  // namespace dmh::diagnostics
