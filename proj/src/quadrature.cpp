#include "cavitydrag/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "cavitydrag/core_model.hpp"

namespace cavitydrag {

namespace {

GaussRule build_rule(std::size_t n) {
    GaussRule r;
    r.x.resize(n);
    r.w.resize(n);
    const std::size_t m = (n + 1) / 2;
    for (std::size_t i = 0; i < m; ++i) {
        double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (std::size_t k = 1; k <= n; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / static_cast<double>(k);
            }
            dp = static_cast<double>(n) * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        r.x[i] = -z;
        r.x[n - 1 - i] = z;
        r.w[i] = w;
        r.w[n - 1 - i] = w;
    }
    return r;
}

}  // namespace

const GaussRule& gauss_legendre(std::size_t n) {
    if (n == 0) throw Error("Gauss-Legendre rule needs at least one node");
    static std::mutex mu;
    static std::map<std::size_t, std::unique_ptr<GaussRule>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end())
        it = cache.emplace(n, std::make_unique<GaussRule>(build_rule(n))).first;
    return *it->second;
}

double integrate_gl(const std::function<double(double)>& f, double a, double b, std::size_t n) {
    const GaussRule& r = gauss_legendre(n);
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += r.w[i] * f(c + h * r.x[i]);
    return s * h;
}

namespace {

double adapt(const std::function<double(double)>& f, double a, double b, double whole,
             double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double left = integrate_gl(f, a, m, 20);
    const double right = integrate_gl(f, m, b, 20);
    const double fine = left + right;
    if (depth <= 0 || std::abs(fine - whole) <= tol) return fine;
    return adapt(f, a, m, left, 0.5 * tol, depth - 1) + adapt(f, m, b, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol, int max_depth) {
    if (a == b) return 0.0;
    const double whole = integrate_gl(f, a, b, 40);
    const double scale = std::abs(integrate_gl([&](double x) { return std::abs(f(x)); }, a, b, 40));
    const double tol = rel_tol * (scale > 0.0 ? scale : 1.0);
    return adapt(f, a, b, whole, tol, max_depth);
}

}  // namespace cavitydrag
