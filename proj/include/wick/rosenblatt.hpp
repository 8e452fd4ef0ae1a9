#pragma once

#include <string>
#include <vector>

#include "wick/chaos2.hpp"
#include "wick/errors.hpp"

namespace wick {

/// Normalization data for the Rosenblatt kernel family
///   f_t(x1,x2) = c_H int_0^t (s-x1)_+^{H/2-1} (s-x2)_+^{H/2-1} ds.
/// c_H is computed numerically from the second-cumulant normalization
/// kappa_2[X_1] = 1; `normalization_residual` records how well the
/// defining identity is met by the quadrature.
struct RosenblattSpec {
    double H = 0.7;
    double c_H = 0.0;
    double normalization_residual = 0.0;

    static RosenblattSpec make(double H);
};

/// B(H/2, 1 - H), the constant produced when a shifted-power pair is
/// integrated out of a kernel contraction.
double rosenblatt_beta_constant(double H);

/// The cyclic singular integral over [0,1]^n of
///   prod_i |s_i - s_{i+1 mod n}|^{H-1},
/// computed by reduction to ordered-gap coordinates: a radial Beta-type
/// factor times simplex integrals per cyclic adjacency class, each handled
/// by flattened Gauss-Legendre quadrature. Exact in the self-similarity
/// scaling by construction of the reduction.
double rosenblatt_cyclic_integral(int n, double H, int resolution = 48);

/// kappa_n[X_t] of the Rosenblatt process, n in [2,6], H in (1/2,1).
/// Scaling route: kappa_n[X_t] = t^{nH} kappa_n[X_1].
double rosenblatt_cumulant(int n, double t, double H, int resolution = 48);

struct RosenblattKernelOptions {
    int n_grid = 128;          // cells on the spatial grid
    double support_multiple = 10.0; // default grid is [-support_multiple*t, t]
    int panel_order = 8;       // Gauss-Legendre order per s-panel
    int grading_levels = 10;   // geometric refinement toward panel kinks
    // explicit grid bounds; when set (lo < hi) they override the default,
    // so kernels at different times can share one grid
    double grid_lo = 0.0;
    double grid_hi = 0.0;
};

struct RosenblattKernelReport {
    double support_L = 0.0;
    double tail_bound = 0.0;     // documented bound on the kappa_2 mass beyond -L
    double kappa2_discretized = 0.0; // 2 Tr(A^2) of the discretized kernel
    double kappa2_target = 0.0;      // t^{2H}
};

/// Cell-averaged discretization of f_t on a uniform grid over [-L, t],
/// with quadrature weights equal to cell widths. Cell averages keep every
/// entry finite even though f_t blows up on its diagonal.
Chaos2Kernel rosenblatt_kernel_discretize(double t, const RosenblattSpec& spec,
                                          const RosenblattKernelOptions& options = {},
                                          RosenblattKernelReport* report = nullptr);

} // namespace wick
