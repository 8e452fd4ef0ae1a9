#pragma once

#include <cmath>
#include <functional>
#include <vector>

namespace wick {

struct QuadratureRule {
    std::vector<double> nodes;   // on [-1, 1]
    std::vector<double> weights;
};

/// Gauss-Legendre rule of the given order (cached).
const QuadratureRule& gauss_legendre(int order);

double integrate_gl(const std::function<double(double)>& f, double a, double b,
                    int order = 32);

/// Composite Gauss-Legendre over consecutive breakpoints.
double integrate_panels(const std::function<double(double)>& f,
                        const std::vector<double>& breakpoints, int order = 8);

/// Geometric refinement of [a, b] towards one or both endpoints; used
/// where integrands have endpoint kinks or integrable singularities.
std::vector<double> graded_breakpoints(double a, double b, bool toward_a, bool toward_b,
                                       int levels = 12, double ratio = 0.2);

/// Integral of u^alpha g(u) over [0, 1] for alpha > -1 with g smooth,
/// computed after the flattening substitution u = v^{1/(1+alpha)}.
double integrate_power_weight(const std::function<double(double)>& g, double alpha,
                              int order = 48);

/// Smooth [0,1] -> [0,1] map with vanishing derivatives at both ends;
/// composing with it suppresses integrable endpoint singularities.
inline double algebraic_sigmoid(double z, double p = 4.0) {
    double zp = std::pow(z, p);
    double wp = std::pow(1.0 - z, p);
    return zp / (zp + wp);
}

inline double algebraic_sigmoid_derivative(double z, double p = 4.0) {
    double zp = std::pow(z, p);
    double wp = std::pow(1.0 - z, p);
    double denom = zp + wp;
    // d/dz [z^p / (z^p + (1-z)^p)]
    double num = p * std::pow(z, p - 1) * wp + p * std::pow(1.0 - z, p - 1) * zp;
    return num / (denom * denom);
}

} // namespace wick
