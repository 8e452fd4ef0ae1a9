#include "wick/rosenblatt.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <tuple>

#include "wick/quadrature.hpp"

namespace wick {

double rosenblatt_beta_constant(double H) { return std::beta(H / 2.0, 1.0 - H); }

namespace {

void require_hurst(double H) {
    if (!(H > 0.5 && H < 1.0))
        throw Error("Hurst parameter must lie in (1/2, 1), got " + std::to_string(H));
}

// int_0^1 (1 - rho) rho^alpha drho for alpha > -1 (radial factor of the
// ordered-gap reduction).
double radial_factor(double alpha, int resolution) {
    return integrate_power_weight([](double u) { return 1.0 - u; }, alpha, resolution);
}

// Undirected cyclic adjacency classes on positions {1..n}: cycles
// 1 -> p[0] -> ... -> p[n-2] -> 1 over permutations p of {2..n}, with the
// reversal deduplicated by requiring p[0] < p[n-2].
std::vector<std::vector<std::pair<int, int>>> cycle_classes(int n) {
    std::vector<int> rest(n - 1);
    std::iota(rest.begin(), rest.end(), 2);
    std::vector<std::vector<std::pair<int, int>>> classes;
    do {
        if (rest.front() > rest.back()) continue;
        std::vector<std::pair<int, int>> edges;
        int prev = 1;
        for (int v : rest) {
            edges.emplace_back(std::min(prev, v), std::max(prev, v));
            prev = v;
        }
        edges.emplace_back(1, prev);
        classes.push_back(std::move(edges));
    } while (std::next_permutation(rest.begin(), rest.end()));
    return classes;
}

// Simplex integral over {w_1..w_{n-1} >= 0, sum w = 1} of
// prod_{(i,j)} (w_i + ... + w_{j-1})^{H-1}, by stick-breaking coordinates
// composed with a both-ends flattening map, tensor Gauss-Legendre.
double simplex_class_integral(const std::vector<std::pair<int, int>>& edges, int n,
                              double H, int resolution) {
    const double a = H - 1.0;
    const int dim = n - 2;
    const QuadratureRule& rule = gauss_legendre(resolution);

    std::vector<double> xi(dim), w(n - 1);
    std::vector<int> idx(dim, 0);
    double total = 0.0;
    for (;;) {
        double weight = 1.0;
        for (int d = 0; d < dim; ++d) {
            double z = 0.5 * (1.0 + rule.nodes[idx[d]]);
            weight *= 0.5 * rule.weights[idx[d]] * algebraic_sigmoid_derivative(z);
            xi[d] = algebraic_sigmoid(z);
        }
        // stick breaking: w_k = xi_k prod_{l<k}(1-xi_l), remainder in the
        // last coordinate
        double rem = 1.0;
        for (int d = 0; d < dim; ++d) {
            w[d] = rem * xi[d];
            rem *= 1.0 - xi[d];
        }
        w[dim] = rem;
        // Lebesgue Jacobian of xi -> (w_1..w_dim): prod (1-xi_l)^{dim-1-l}
        double jac = 1.0;
        for (int d = 0; d + 1 < dim; ++d) jac *= std::pow(1.0 - xi[d], dim - 1 - d);

        double f = 1.0;
        for (const auto& [i, j] : edges) {
            double gap = 0.0;
            for (int k = i; k < j; ++k) gap += w[k - 1];
            f *= std::pow(gap, a);
        }
        total += weight * jac * f;

        int d = 0;
        while (d < dim && ++idx[d] == resolution) idx[d++] = 0;
        if (d == dim) break;
    }
    return total;
}

} // namespace

double rosenblatt_cyclic_integral(int n, double H, int resolution) {
    require_hurst(H);
    if (n < 2 || n > 6) throw Error("cyclic integral supported for n in [2,6]");
    const double a = H - 1.0;
    if (n == 2) {
        // two orderings of s1, s2, single gap with doubled exponent
        return 2.0 * radial_factor(2.0 * a, resolution);
    }
    if (n == 3) {
        // single adjacency class; the simplex factor is int w^a (1-w)^a dw,
        // split at 1/2 and flattened at the singular end
        double radial = radial_factor(3.0 * H - 2.0, resolution);
        double simplex =
            2.0 * std::pow(0.5, a + 1.0) *
            integrate_power_weight([&](double v) { return std::pow(1.0 - 0.5 * v, a); }, a,
                                   resolution);
        return 6.0 * radial * simplex;
    }
    double radial = radial_factor(n * H - 2.0, resolution);
    double sum = 0.0;
    for (const auto& edges : cycle_classes(n))
        sum += simplex_class_integral(edges, n, H, resolution);
    return 2.0 * n * radial * sum;
}

RosenblattSpec RosenblattSpec::make(double H) {
    require_hurst(H);
    const double B = rosenblatt_beta_constant(H);
    const double c2_coarse = rosenblatt_cyclic_integral(2, H, 32);
    const double c2 = rosenblatt_cyclic_integral(2, H, 64);
    RosenblattSpec spec;
    spec.H = H;
    spec.c_H = std::sqrt(1.0 / (2.0 * B * B * c2));
    spec.normalization_residual = std::abs(c2 - c2_coarse) / c2;
    return spec;
}

double rosenblatt_cumulant(int n, double t, double H, int resolution) {
    require_hurst(H);
    if (n < 2 || n > 6) throw Error("rosenblatt_cumulant supports n in [2,6]");
    if (t < 0.0) throw Error("time must be nonnegative");
    if (t == 0.0) return 0.0;

    struct Key {
        int n;
        double H;
        int res;
        bool operator<(const Key& o) const {
            return std::tie(n, H, res) < std::tie(o.n, o.H, o.res);
        }
    };
    static std::map<Key, double> cache;
    static std::mutex mutex;

    double kappa1;
    {
        std::lock_guard lock(mutex);
        auto it = cache.find({n, H, resolution});
        if (it != cache.end()) {
            kappa1 = it->second;
        } else {
            RosenblattSpec spec = RosenblattSpec::make(H);
            const double B = rosenblatt_beta_constant(H);
            double cyc = rosenblatt_cyclic_integral(n, H, resolution);
            double fact = 1.0;
            for (int k = 2; k < n; ++k) fact *= k;
            kappa1 = std::ldexp(1.0, n - 1) * fact * std::pow(spec.c_H, n) *
                     std::pow(B, n) * cyc;
            cache.emplace(Key{n, H, resolution}, kappa1);
        }
    }
    return std::pow(t, n * H) * kappa1;
}

Chaos2Kernel rosenblatt_kernel_discretize(double t, const RosenblattSpec& spec,
                                          const RosenblattKernelOptions& options,
                                          RosenblattKernelReport* report) {
    require_hurst(spec.H);
    if (t <= 0.0) throw Error("time must be positive");
    if (options.n_grid < 16) throw Error("kernel grid needs at least 16 cells");
    const double H = spec.H;
    const double hh = H / 2.0;
    const bool explicit_grid = options.grid_lo < options.grid_hi;
    const double lo = explicit_grid ? options.grid_lo : -options.support_multiple * t;
    const double hi = explicit_grid ? options.grid_hi : t;
    if (hi < t) throw Error("kernel grid must extend to the requested time");
    const double L = -lo;
    const int n = options.n_grid;
    const double cell = (hi - lo) / n;

    Eigen::VectorXd weights = Eigen::VectorXd::Constant(n, cell);
    std::vector<double> left(n), right(n);
    for (int i = 0; i < n; ++i) {
        left[i] = lo + i * cell;
        right[i] = lo + (i + 1) * cell;
    }

    // s-panels between consecutive cell boundaries inside (0, t); the cell
    // averages have power-law kinks exactly at those boundaries
    std::vector<double> panel_edges{0.0};
    for (int i = 0; i < n; ++i) {
        if (left[i] > 0.0 && left[i] < t) panel_edges.push_back(left[i]);
    }
    panel_edges.push_back(t);
    std::sort(panel_edges.begin(), panel_edges.end());

    Eigen::MatrixXd accum = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd u(n);
    const QuadratureRule& rule = gauss_legendre(options.panel_order);

    for (std::size_t pnl = 0; pnl + 1 < panel_edges.size(); ++pnl) {
        auto breaks = graded_breakpoints(panel_edges[pnl], panel_edges[pnl + 1],
                                         /*toward_a=*/true, /*toward_b=*/true,
                                         options.grading_levels, 0.2);
        for (std::size_t b = 0; b + 1 < breaks.size(); ++b) {
            const double mid = 0.5 * (breaks[b] + breaks[b + 1]);
            const double half = 0.5 * (breaks[b + 1] - breaks[b]);
            for (int q = 0; q < options.panel_order; ++q) {
                const double s = mid + half * rule.nodes[q];
                const double omega = half * rule.weights[q];
                u.setZero();
                for (int i = 0; i < n && left[i] < s; ++i) {
                    double lead = std::pow(s - left[i], hh);
                    double trail = s > right[i] ? std::pow(s - right[i], hh) : 0.0;
                    u(i) = (lead - trail) / (hh * cell);
                }
                accum.selfadjointView<Eigen::Lower>().rankUpdate(u, spec.c_H * omega);
            }
        }
    }
    Eigen::MatrixXd full = accum.selfadjointView<Eigen::Lower>();

    Chaos2Kernel kernel(std::move(full), std::move(weights), "rosenblatt");
    if (report) {
        report->support_L = L;
        report->kappa2_discretized = 2.0 * kernel.hs_norm2();
        report->kappa2_target = std::pow(t, 2.0 * H);
        const double B = rosenblatt_beta_constant(H);
        report->tail_bound = 8.0 * spec.c_H * spec.c_H * B * std::pow(t, H + 1.0) *
                             std::pow(L, H - 1.0) / (H * (H + 1.0) * (1.0 - H));
    }
    return kernel;
}

} // namespace wick
