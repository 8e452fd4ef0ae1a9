#include "wick/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace wick {

namespace {

QuadratureRule compute_gauss_legendre(int n) {
    // Newton iteration on Legendre polynomials, nodes symmetric about 0.
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.weights[i] = w;
        rule.nodes[n - 1 - i] = x;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

} // namespace

const QuadratureRule& gauss_legendre(int order) {
    static std::map<int, QuadratureRule> cache;
    static std::mutex mutex;
    std::lock_guard lock(mutex);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, compute_gauss_legendre(order)).first;
    return it->second;
}

double integrate_gl(const std::function<double(double)>& f, double a, double b, int order) {
    const QuadratureRule& rule = gauss_legendre(order);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double acc = 0.0;
    for (int i = 0; i < order; ++i)
        acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return acc * half;
}

double integrate_panels(const std::function<double(double)>& f,
                        const std::vector<double>& breakpoints, int order) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i)
        acc += integrate_gl(f, breakpoints[i], breakpoints[i + 1], order);
    return acc;
}

std::vector<double> graded_breakpoints(double a, double b, bool toward_a, bool toward_b,
                                       int levels, double ratio) {
    if (!(b > a)) return {a, b};
    std::vector<double> pts;
    pts.push_back(a);
    if (toward_a && toward_b) {
        double mid = 0.5 * (a + b);
        double step = (mid - a);
        std::vector<double> left;
        for (int l = 0; l < levels; ++l) {
            step *= ratio;
            left.push_back(a + step);
        }
        for (auto it = left.rbegin(); it != left.rend(); ++it) pts.push_back(*it);
        pts.push_back(mid);
        for (double x : left) pts.push_back(b - (x - a));
    } else if (toward_a) {
        double step = b - a;
        std::vector<double> left;
        for (int l = 0; l < levels; ++l) {
            step *= ratio;
            left.push_back(a + step);
        }
        for (auto it = left.rbegin(); it != left.rend(); ++it) pts.push_back(*it);
    } else if (toward_b) {
        double step = b - a;
        std::vector<double> right;
        for (int l = 0; l < levels; ++l) {
            step *= ratio;
            right.push_back(b - step);
        }
        for (double x : right) pts.push_back(x);
    }
    pts.push_back(b);
    return pts;
}

double integrate_power_weight(const std::function<double(double)>& g, double alpha,
                              int order) {
    if (alpha <= -1.0) throw std::invalid_argument("power weight must have alpha > -1");
    const double p = 1.0 / (1.0 + alpha);
    return p * integrate_gl([&](double v) { return g(std::pow(v, p)); }, 0.0, 1.0, order);
}

} // namespace wick
