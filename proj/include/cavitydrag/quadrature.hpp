#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace cavitydrag {

struct GaussRule {
    std::vector<double> x;  // nodes on [-1, 1]
    std::vector<double> w;
};

// Gauss-Legendre rule with n nodes. Rules are cached and shared between threads.
const GaussRule& gauss_legendre(std::size_t n);

// Fixed rule on [a, b].
double integrate_gl(const std::function<double(double)>& f, double a, double b, std::size_t n);

// Adaptive bisection with a 20/40 node Gauss-Legendre pair per panel.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol = 1e-12, int max_depth = 40);

}  // namespace cavitydrag
