#include "wick/process.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "wick/combinatorics.hpp"
#include "wick/rosenblatt.hpp"

namespace wick {

double ProcessModel::kappa(std::vector<TimedVar> vars) const {
    std::sort(vars.begin(), vars.end());
    {
        std::lock_guard lock(mutex_);
        auto it = cache_.find(vars);
        if (it != cache_.end()) return it->second;
    }
    double value = kappa_impl(vars);
    std::lock_guard lock(mutex_);
    return cache_.emplace(std::move(vars), value).first->second;
}

double ProcessModel::dkappa_last_analytic(const std::vector<int>&, int, double) const {
    throw Error("model '" + id() + "' has no analytic time derivative");
}

double ProcessModel::dkappa_total_analytic(const std::vector<int>& components,
                                           double u) const {
    // default analytic route: total derivative as the sum of slot
    // derivatives, grouped by which component sits in the moving slot
    std::map<int, int> mult;
    for (int c : components) ++mult[c];
    double total = 0.0;
    for (const auto& [beta, count] : mult) {
        std::vector<int> alpha;
        bool skipped = false;
        for (int c : components) {
            if (c == beta && !skipped) {
                skipped = true;
                continue;
            }
            alpha.push_back(c);
        }
        total += count * dkappa_last(alpha, beta, u);
    }
    return total;
}

double ProcessModel::dkappa_last(const std::vector<int>& alpha_components, int beta,
                                 double u) const {
    if (has_analytic_time_derivative())
        return dkappa_last_analytic(alpha_components, beta, u);

    auto value_at = [&](double v) {
        std::vector<TimedVar> vars;
        vars.reserve(alpha_components.size() + 1);
        for (int c : alpha_components) vars.push_back({c, u});
        vars.push_back({beta, v});
        return kappa(vars);
    };
    const double h = fd_step * std::max(1.0, std::abs(u));
    const double base = value_at(u);
    auto one_sided = [&](double sign, double step) {
        return sign * (value_at(u + sign * step) - base) / step;
    };
    // Richardson-extrapolated one-sided slopes; a persistent gap between
    // the forward and backward estimates flags a kink
    double fwd = 2.0 * one_sided(+1.0, h / 2) - one_sided(+1.0, h);
    if (u - h <= 0.0) return fwd; // left edge of the time domain
    double bwd = 2.0 * one_sided(-1.0, h / 2) - one_sided(-1.0, h);
    double scale = std::max({std::abs(fwd), std::abs(bwd), 1e-8});
    if (std::abs(fwd - bwd) > fd_consistency_tol * scale)
        throw Error("cumulant time derivative of model '" + id() +
                    "' looks non-smooth at u=" + std::to_string(u) +
                    " (forward/backward finite differences disagree)");
    return 0.5 * (fwd + bwd);
}

double ProcessModel::dkappa_total(const std::vector<int>& components, double u) const {
    if (has_analytic_time_derivative()) return dkappa_total_analytic(components, u);
    auto value_at = [&](double v) {
        std::vector<TimedVar> vars;
        vars.reserve(components.size());
        for (int c : components) vars.push_back({c, v});
        return kappa(vars);
    };
    const double h = fd_step * std::max(1.0, std::abs(u));
    if (u - h <= 0.0) {
        double d1 = (value_at(u + h) - value_at(u)) / h;
        double d2 = (value_at(u + h / 2) - value_at(u)) / (h / 2);
        return 2.0 * d2 - d1;
    }
    double d1 = (value_at(u + h) - value_at(u - h)) / (2.0 * h);
    double d2 = (value_at(u + h / 2) - value_at(u - h / 2)) / h;
    double rich = (4.0 * d2 - d1) / 3.0;
    double scale = std::max({std::abs(d1), std::abs(d2), 1e-8});
    if (std::abs(d2 - d1) > 10.0 * fd_consistency_tol * scale + 1e-9)
        throw Error("total cumulant derivative of model '" + id() +
                    "' did not stabilize under step refinement at u=" + std::to_string(u));
    return rich;
}

Symbol ProcessModel::component_symbol(int beta) const {
    if (dimension() == 1) return "x";
    return "x" + std::to_string(beta + 1);
}

int ProcessModel::component_of(const Symbol& s) const {
    if (dimension() == 1) {
        if (s == "x") return 0;
    } else if (s.size() >= 2 && s[0] == 'x') {
        int idx = std::atoi(s.c_str() + 1) - 1;
        if (idx >= 0 && idx < dimension()) return idx;
    }
    throw Error("unknown component symbol '" + s + "' for model " + id());
}

double ProcessModel::moment_equal_time(const std::vector<int>& powers, double t) const {
    std::vector<TimedVar> vars;
    for (int c = 0; c < static_cast<int>(powers.size()); ++c)
        for (int k = 0; k < powers[c]; ++k) vars.push_back({c, t});
    if (vars.empty()) return 1.0;
    double total = 0.0;
    enumerate_restricted_growth(vars.size(), [&](const std::vector<int>& rgs) {
        int nblocks = *std::max_element(rgs.begin(), rgs.end()) + 1;
        std::vector<std::vector<TimedVar>> blocks(nblocks);
        for (std::size_t i = 0; i < vars.size(); ++i) blocks[rgs[i]].push_back(vars[i]);
        double prod = 1.0;
        for (auto& b : blocks) {
            prod *= kappa(std::move(b));
            if (prod == 0.0) break;
        }
        total += prod;
    });
    return total;
}

// ---------------------------------------------------------------------------

FbmProcessModel::FbmProcessModel(double H) : H_(H) {
    if (!(H > 0.0 && H < 1.0)) throw Error("fBm needs H in (0,1)");
}

std::string FbmProcessModel::id() const { return "fbm(H=" + std::to_string(H_) + ")"; }

double FbmProcessModel::covariance(double u, double v) const {
    return 0.5 * (std::pow(u, 2 * H_) + std::pow(v, 2 * H_) -
                  std::pow(std::abs(u - v), 2 * H_));
}

double FbmProcessModel::kappa_impl(const std::vector<TimedVar>& vars) const {
    if (vars.size() != 2) return 0.0;
    return covariance(vars[0].time, vars[1].time);
}

double FbmProcessModel::dkappa_last_analytic(const std::vector<int>& alpha, int,
                                             double u) const {
    if (alpha.size() != 1) return 0.0;
    // d/dv cov(u, v) at v = u; the |u-v|^{2H-1} part vanishes for H > 1/2
    return H_ * std::pow(u, 2 * H_ - 1);
}

double FbmProcessModel::dkappa_total_analytic(const std::vector<int>& components,
                                              double u) const {
    if (components.size() != 2) return 0.0;
    return 2 * H_ * std::pow(u, 2 * H_ - 1);
}

double BrownianProcessModel::kappa_impl(const std::vector<TimedVar>& vars) const {
    if (vars.size() != 2) return 0.0;
    return std::min(vars[0].time, vars[1].time);
}

// ---------------------------------------------------------------------------

ExchangeableGaussianModel::ExchangeableGaussianModel(int dimension, Cov diag, Cov off,
                                                     Cov ddiag_dv, Cov doff_dv)
    : d_(dimension), diag_(std::move(diag)), off_(std::move(off)),
      ddiag_dv_(std::move(ddiag_dv)), doff_dv_(std::move(doff_dv)) {
    if (d_ < 1) throw Error("dimension must be positive");
}

double ExchangeableGaussianModel::kappa_impl(const std::vector<TimedVar>& vars) const {
    if (vars.size() != 2) return 0.0;
    const TimedVar& a = vars[0];
    const TimedVar& b = vars[1];
    return a.component == b.component ? diag_(a.time, b.time) : off_(a.time, b.time);
}

double ExchangeableGaussianModel::dkappa_last_analytic(const std::vector<int>& alpha,
                                                       int beta, double u) const {
    if (alpha.size() != 1) return 0.0;
    return alpha[0] == beta ? ddiag_dv_(u, u) : doff_dv_(u, u);
}

double ExchangeableGaussianModel::dkappa_total_analytic(const std::vector<int>& components,
                                                        double u) const {
    if (components.size() != 2) return 0.0;
    // symmetric two-time function: total derivative is twice the last-slot one
    return 2.0 * (components[0] == components[1] ? ddiag_dv_(u, u) : doff_dv_(u, u));
}

// ---------------------------------------------------------------------------

IndependentComponentsModel::IndependentComponentsModel(std::vector<Component> components,
                                                       std::string id)
    : components_(std::move(components)), id_(std::move(id)) {}

double IndependentComponentsModel::kappa_impl(const std::vector<TimedVar>& vars) const {
    if (vars.empty()) return 0.0;
    int comp = vars[0].component;
    double t = vars[0].time;
    for (const auto& v : vars) {
        if (v.component != comp) return 0.0; // independent components
        if (v.time != t)
            throw Error("independent-components model supports equal times only");
    }
    int n = static_cast<int>(vars.size());
    if (n == 1) return 0.0;
    const auto& c = components_.at(comp);
    if (n > c.max_order) return 0.0;
    return c.kappa_n(n, t);
}

double IndependentComponentsModel::dkappa_last_analytic(const std::vector<int>& alpha,
                                                        int beta, double u) const {
    for (int a : alpha)
        if (a != beta) return 0.0;
    int n = static_cast<int>(alpha.size()) + 1;
    const auto& c = components_.at(beta);
    if (n > c.max_order) return 0.0;
    return c.dkappa_last_n(n, u);
}

double IndependentComponentsModel::dkappa_total_analytic(const std::vector<int>& components,
                                                         double u) const {
    int comp = components[0];
    for (int c : components)
        if (c != comp) return 0.0;
    int n = static_cast<int>(components.size());
    const auto& c = components_.at(comp);
    if (n > c.max_order) return 0.0;
    return n * c.dkappa_last_n(n, u); // symmetry of the equal-time cumulant
}

// ---------------------------------------------------------------------------

RosenblattProcessModel::RosenblattProcessModel(double H, double horizon, int kernel_grid)
    : H_(H), horizon_(horizon), kernel_grid_(kernel_grid) {
    if (!(H > 0.5 && H < 1.0)) throw Error("Rosenblatt needs H in (1/2,1)");
    if (horizon <= 0.0) throw Error("horizon must be positive");
}

std::string RosenblattProcessModel::id() const {
    return "rosenblatt(H=" + std::to_string(H_) + ")";
}

double RosenblattProcessModel::kappa_n_at_one(int n) const {
    return rosenblatt_cumulant(n, 1.0, H_);
}

const Chaos2Kernel& RosenblattProcessModel::kernel_at(double t) const {
    std::lock_guard lock(kernel_mutex_);
    auto it = kernels_.find(t);
    if (it != kernels_.end()) return it->second;
    RosenblattSpec spec = RosenblattSpec::make(H_);
    RosenblattKernelOptions opt;
    opt.n_grid = kernel_grid_;
    // one grid over [-10 T, T] shared by the kernels at every time
    opt.grid_lo = -10.0 * horizon_;
    opt.grid_hi = horizon_;
    Chaos2Kernel k = rosenblatt_kernel_discretize(t, spec, opt);
    return kernels_.emplace(t, std::move(k)).first->second;
}

double RosenblattProcessModel::kappa_impl(const std::vector<TimedVar>& vars) const {
    const int n = static_cast<int>(vars.size());
    if (n <= 1) return 0.0;
    if (n == 2) {
        double u = vars[0].time, v = vars[1].time;
        return 0.5 * (std::pow(u, 2 * H_) + std::pow(v, 2 * H_) -
                      std::pow(std::abs(u - v), 2 * H_));
    }
    bool equal = true;
    for (const auto& v : vars) equal = equal && v.time == vars[0].time;
    if (equal) return rosenblatt_cumulant(n, vars[0].time, H_);
    // mixed times at order >= 3: discretized-kernel trace route
    std::vector<Chaos2Kernel> kernels;
    kernels.reserve(vars.size());
    for (const auto& v : vars) kernels.push_back(kernel_at(v.time));
    return joint_cumulant_trace(kernels);
}

double RosenblattProcessModel::dkappa_last_analytic(const std::vector<int>& alpha, int,
                                                    double u) const {
    int n = static_cast<int>(alpha.size()) + 1;
    if (n > 6) return 0.0; // beyond the supported cumulant order
    // scaling law kappa_n(t) = t^{nH} kappa_n[X_1] and symmetry in the slots
    return H_ * kappa_n_at_one(n) * std::pow(u, n * H_ - 1.0);
}

double RosenblattProcessModel::dkappa_total_analytic(const std::vector<int>& components,
                                                     double u) const {
    int n = static_cast<int>(components.size());
    if (n > 6) return 0.0;
    return n * H_ * kappa_n_at_one(n) * std::pow(u, n * H_ - 1.0);
}

// ---------------------------------------------------------------------------

Chaos2PathModel::Chaos2PathModel(std::vector<double> times, std::vector<Chaos2Kernel> kernels,
                                 std::string id)
    : times_(std::move(times)), kernels_(std::move(kernels)), id_(std::move(id)) {
    if (times_.size() != kernels_.size())
        throw Error("one kernel per time required");
    for (std::size_t i = 1; i < kernels_.size(); ++i)
        kernels_[0].require_same_grid(kernels_[i]);
}

const Chaos2Kernel& Chaos2PathModel::kernel_at(double t) const {
    for (std::size_t i = 0; i < times_.size(); ++i)
        if (std::abs(times_[i] - t) <= 1e-12 * std::max(1.0, std::abs(t)))
            return kernels_[i];
    throw Error("no kernel at time " + std::to_string(t));
}

double Chaos2PathModel::kappa_impl(const std::vector<TimedVar>& vars) const {
    const int n = static_cast<int>(vars.size());
    if (n <= 1) return 0.0;
    std::vector<Chaos2Kernel> kernels;
    kernels.reserve(vars.size());
    for (const auto& v : vars) kernels.push_back(kernel_at(v.time));
    return joint_cumulant_trace(kernels);
}

// ---------------------------------------------------------------------------

MeanShiftedModel::MeanShiftedModel(const ProcessModel& base,
                                   std::function<double(int, double)> mean_fn)
    : base_(base), mean_fn_(std::move(mean_fn)) {}

double MeanShiftedModel::kappa_impl(const std::vector<TimedVar>& vars) const {
    if (vars.size() == 1) return mean_fn_(vars[0].component, vars[0].time);
    return base_.kappa(vars);
}

double MeanShiftedModel::dkappa_last_analytic(const std::vector<int>& alpha, int beta,
                                              double u) const {
    return base_.dkappa_last(alpha, beta, u);
}

double MeanShiftedModel::dkappa_total_analytic(const std::vector<int>& components,
                                               double u) const {
    return base_.dkappa_total(components, u);
}

} // namespace wick
