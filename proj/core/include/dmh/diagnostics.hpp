#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dmh/model.hpp"

namespace dmh::diagnostics {

/// A random model instance for gradient checking: views, parameters and a
/// binary code matrix, all drawn from one seed.
struct GradientInstance {
    std::uint64_t seed = 0;
    std::vector<ViewMatrix> views;
    std::vector<ViewParams> params;
    CodeMatrix codes;
};

/// n in [5, max_n], d in [1, max_d], c in [1, max_c], one or two views.
GradientInstance random_gradient_instance(std::uint64_t seed, double gamma,
                                          int max_n = 30, int max_d = 8,
                                          int max_c = 16);

struct GradientCheck {
    std::uint64_t seed = 0;
    int n = 0, d = 0, c = 0;
    double gamma = 0.0;
    double max_rel_error_bias = 0.0;
    double max_rel_error_weights = 0.0;
    bool passed = false;
};

struct GradientCheckOptions {
    double step = 1e-5;
    double rtol = 1e-4;
    // Central differences carry ~1e-11 absolute round-off at these sizes;
    // entries below this floor are compared absolutely.
    double atol = 1e-8;
    // Negates the analytic gradient; a negative control for the checker.
    bool flip_sign = false;
};

/// Compares grad_bias / grad_weights of view 0 against central differences
/// of the full objective.
GradientCheck check_gradients(const GradientInstance& instance,
                              const GradientCheckOptions& options = {});

}  // namespace dmh::diagnostics
