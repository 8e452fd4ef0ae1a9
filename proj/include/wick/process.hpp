#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "wick/chaos2.hpp"
#include "wick/errors.hpp"
#include "wick/multiset.hpp"

namespace wick {

/// One argument of a process cumulant: component index beta in [0, d) at
/// time u.
struct TimedVar {
    int component = 0;
    double time = 0.0;
    bool operator<(const TimedVar& o) const {
        return std::tie(component, time) < std::tie(o.component, o.time);
    }
    bool operator==(const TimedVar& o) const {
        return component == o.component && time == o.time;
    }
};

/// Cumulant oracle of a d-dimensional stochastic process, with the time
/// derivatives entering the correction formulas. Derivatives fall back to
/// finite differences with a two-sided consistency check, so a kink in
/// t -> kappa[..., X_t] is reported instead of silently averaged.
class ProcessModel {
public:
    virtual ~ProcessModel() = default;

    virtual std::string id() const = 0;
    virtual int dimension() const { return 1; }
    virtual bool polynomial_relation_free() const = 0;
    /// Largest order with nonvanishing cumulants (2 for Gaussian laws);
    /// nullopt when all orders may contribute.
    virtual std::optional<int> max_cumulant_order() const { return std::nullopt; }

    virtual double mean(int component, double time) const {
        (void)component;
        (void)time;
        return 0.0;
    }

    double kappa(std::vector<TimedVar> vars) const;

    /// d/dv kappa[X^{a_1}_u, ..., X^{a_m}_u, X^b_v] at v = u: the measure
    /// kappa^{alpha beta}(u,...,u,du) of the Ito-Stratonovich formula.
    double dkappa_last(const std::vector<int>& alpha_components, int beta, double u) const;

    /// Total derivative d/du kappa^{gamma}(u,...,u): the measure
    /// kappa^{gamma}(du) of the Ito formula.
    double dkappa_total(const std::vector<int>& components, double u) const;

    virtual bool has_analytic_time_derivative() const { return false; }

    Symbol component_symbol(int beta) const;
    int component_of(const Symbol& s) const;

    /// Equal-time moment of the monomial with the given component powers,
    /// through the cumulant partition sum.
    double moment_equal_time(const std::vector<int>& powers, double t) const;

    double fd_step = 1e-5;
    double fd_consistency_tol = 2e-2;

protected:
    virtual double kappa_impl(const std::vector<TimedVar>& sorted_vars) const = 0;
    virtual double dkappa_last_analytic(const std::vector<int>& alpha_components, int beta,
                                        double u) const;
    virtual double dkappa_total_analytic(const std::vector<int>& components, double u) const;

private:
    mutable std::map<std::vector<TimedVar>, double> cache_;
    mutable std::mutex mutex_;
};

/// Fractional Brownian motion with Hurst parameter H:
/// cov(u, v) = (u^{2H} + v^{2H} - |u-v|^{2H}) / 2. The time derivative is
/// analytic for H > 1/2 (the Young regime).
class FbmProcessModel : public ProcessModel {
public:
    explicit FbmProcessModel(double H);
    std::string id() const override;
    bool polynomial_relation_free() const override { return true; }
    std::optional<int> max_cumulant_order() const override { return 2; }
    bool has_analytic_time_derivative() const override { return H_ > 0.5; }
    double covariance(double u, double v) const;
    double hurst() const { return H_; }

protected:
    double kappa_impl(const std::vector<TimedVar>& vars) const override;
    double dkappa_last_analytic(const std::vector<int>& alpha, int beta,
                                double u) const override;
    double dkappa_total_analytic(const std::vector<int>& components, double u) const override;

private:
    double H_;
};

/// Brownian motion, cov = min(u, v). Kept around chiefly because its
/// covariance kink exercises the non-smoothness detection.
class BrownianProcessModel : public ProcessModel {
public:
    std::string id() const override { return "bm"; }
    bool polynomial_relation_free() const override { return true; }
    std::optional<int> max_cumulant_order() const override { return 2; }

protected:
    double kappa_impl(const std::vector<TimedVar>& vars) const override;
};

/// Centred Gaussian process with exchangeable components: a common
/// two-time variance function on the diagonal and a common off-diagonal
/// covariance function.
class ExchangeableGaussianModel : public ProcessModel {
public:
    using Cov = std::function<double(double, double)>;
    ExchangeableGaussianModel(int dimension, Cov diag, Cov off, Cov ddiag_dv = nullptr,
                              Cov doff_dv = nullptr);
    std::string id() const override { return "exchangeable-gaussian"; }
    int dimension() const override { return d_; }
    bool polynomial_relation_free() const override { return true; }
    std::optional<int> max_cumulant_order() const override { return 2; }
    bool has_analytic_time_derivative() const override { return bool(ddiag_dv_); }

protected:
    double kappa_impl(const std::vector<TimedVar>& vars) const override;
    double dkappa_last_analytic(const std::vector<int>& alpha, int beta,
                                double u) const override;
    double dkappa_total_analytic(const std::vector<int>& components, double u) const override;

private:
    int d_;
    Cov diag_, off_, ddiag_dv_, doff_dv_;
};

/// Independent components, each specified by equal-time cumulant functions
/// kappa_n(u) and the last-slot derivatives d/dv kappa^{(n)}(u,..,u,v)|_{v=u}.
/// Mixed-time queries are limited to what the correction formulas need.
class IndependentComponentsModel : public ProcessModel {
public:
    struct Component {
        // kappa_n(u) for n >= 2, indexed by n
        std::function<double(int, double)> kappa_n;
        // d/dv kappa^{(n)}(u,...,u,v)|_{v=u}, n = |alpha| + 1
        std::function<double(int, double)> dkappa_last_n;
        int max_order = 6;
    };
    IndependentComponentsModel(std::vector<Component> components, std::string id);
    std::string id() const override { return id_; }
    int dimension() const override { return static_cast<int>(components_.size()); }
    bool polynomial_relation_free() const override { return true; }
    bool has_analytic_time_derivative() const override { return true; }

protected:
    double kappa_impl(const std::vector<TimedVar>& vars) const override;
    double dkappa_last_analytic(const std::vector<int>& alpha, int beta,
                                double u) const override;
    double dkappa_total_analytic(const std::vector<int>& components, double u) const override;

private:
    std::vector<Component> components_;
    std::string id_;
};

/// Scalar Rosenblatt process. Equal-time cumulants come from the scaling
/// law t^{nH} kappa_n[X_1]; pair cumulants have the fBm covariance; mixed
/// times at order >= 3 go through discretized kernels on a shared grid and
/// carry that discretization error.
class RosenblattProcessModel : public ProcessModel {
public:
    RosenblattProcessModel(double H, double horizon, int kernel_grid = 96);
    std::string id() const override;
    bool polynomial_relation_free() const override { return true; }
    bool has_analytic_time_derivative() const override { return true; }
    double hurst() const { return H_; }
    double kappa_n_at_one(int n) const;

protected:
    double kappa_impl(const std::vector<TimedVar>& vars) const override;
    double dkappa_last_analytic(const std::vector<int>& alpha, int beta,
                                double u) const override;
    double dkappa_total_analytic(const std::vector<int>& components, double u) const override;

private:
    const Chaos2Kernel& kernel_at(double t) const;
    double H_;
    double horizon_;
    int kernel_grid_;
    mutable std::map<double, Chaos2Kernel> kernels_;
    mutable std::mutex kernel_mutex_;
};

/// The scalar process X_t = I2(f_t) for an explicit finite-rank kernel
/// family on a shared grid; every joint cumulant is an exact trace sum.
class Chaos2PathModel : public ProcessModel {
public:
    Chaos2PathModel(std::vector<double> times, std::vector<Chaos2Kernel> kernels,
                    std::string id = "chaos2-path");
    std::string id() const override { return id_; }
    bool polynomial_relation_free() const override { return true; }
    const std::vector<double>& times() const { return times_; }
    const Chaos2Kernel& kernel_at(double t) const;

protected:
    double kappa_impl(const std::vector<TimedVar>& vars) const override;

private:
    std::vector<double> times_;
    std::vector<Chaos2Kernel> kernels_;
    std::string id_;
};

/// Adds a deterministic C^1 mean to a centred base model.
class MeanShiftedModel : public ProcessModel {
public:
    MeanShiftedModel(const ProcessModel& base,
                     std::function<double(int, double)> mean_fn);
    std::string id() const override { return base_.id() + "+mean"; }
    int dimension() const override { return base_.dimension(); }
    bool polynomial_relation_free() const override { return base_.polynomial_relation_free(); }
    std::optional<int> max_cumulant_order() const override { return base_.max_cumulant_order(); }
    bool has_analytic_time_derivative() const override {
        return base_.has_analytic_time_derivative();
    }
    double mean(int component, double time) const override { return mean_fn_(component, time); }

protected:
    double kappa_impl(const std::vector<TimedVar>& vars) const override;
    double dkappa_last_analytic(const std::vector<int>& alpha, int beta,
                                double u) const override;
    double dkappa_total_analytic(const std::vector<int>& components, double u) const override;

private:
    const ProcessModel& base_;
    std::function<double(int, double)> mean_fn_;
};

} // namespace wick
