#include "wick/integrals.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "wick/combinatorics.hpp"

namespace wick {

double SamplePath::mesh() const {
    double m = 0.0;
    for (std::size_t k = 0; k + 1 < times.size(); ++k)
        m = std::max(m, times[k + 1] - times[k]);
    return m;
}

void SamplePath::validate() const {
    if (times.size() < 2) throw Error("sample path needs at least two grid points");
    if (values.size() != times.size()) throw Error("one value vector per time required");
    for (std::size_t k = 0; k + 1 < times.size(); ++k)
        if (!(times[k] < times[k + 1])) throw Error("path grid must be strictly increasing");
    const std::size_t d = values[0].size();
    for (const auto& v : values) {
        if (v.size() != d) throw Error("inconsistent path dimension");
        for (double x : v)
            if (!std::isfinite(x)) throw Error("path carries non-finite values");
    }
}

SamplePath SamplePath::subsample(int stride) const {
    if (stride <= 1) return *this;
    SamplePath out;
    for (std::size_t k = 0; k < times.size(); k += stride) {
        out.times.push_back(times[k]);
        out.values.push_back(values[k]);
    }
    if ((times.size() - 1) % stride != 0) {
        out.times.push_back(times.back());
        out.values.push_back(values.back());
    }
    return out;
}

WickPolynomial<double> scalar_monomial(int degree, double coeff) {
    return WickPolynomial<double>::monomial(Multiset::power("x", degree), coeff);
}

namespace {

std::vector<int> exponents_of(const Multiset& I, const ProcessModel& model) {
    std::vector<int> pows(model.dimension(), 0);
    for (const auto& [sym, k] : I.entries()) pows[model.component_of(sym)] += k;
    return pows;
}

double eval_pow(const std::vector<double>& x, const std::vector<int>& pows) {
    double prod = 1.0;
    for (std::size_t c = 0; c < pows.size(); ++c)
        for (int i = 0; i < pows[c]; ++i) prod *= x[c];
    return prod;
}

double factorial_of_multiset(const Multiset& m) {
    double f = 1.0;
    for (const auto& [s, k] : m.entries())
        for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

void require_form(const PolynomialOneForm& p, const ProcessModel& model) {
    if (static_cast<int>(p.components.size()) != model.dimension())
        throw Error("one integrand polynomial per process component required");
}

// evaluate a polynomial at the path point through component exponents
double eval_poly(const WickPolynomial<double>& p, const ProcessModel& model,
                 const std::vector<double>& x) {
    double total = 0.0;
    for (const auto& [I, c] : p.terms()) total += c * eval_pow(x, exponents_of(I, model));
    return total;
}

} // namespace

double young_integral(const PolynomialOneForm& p, const SamplePath& path,
                      const ProcessModel& model) {
    require_form(p, model);
    path.validate();
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < path.times.size(); ++k) {
        for (int beta = 0; beta < model.dimension(); ++beta) {
            double incr = path.values[k + 1][beta] - path.values[k][beta];
            acc += eval_poly(p.components[beta], model, path.values[k]) * incr;
        }
    }
    return acc;
}

WickIntegrator::WickIntegrator(PolynomialOneForm p, const ProcessModel& model,
                               std::vector<double> times)
    : model_(model), times_(std::move(times)), dimension_(model.dimension()) {
    require_form(p, model);
    if (!model.polynomial_relation_free())
        throw WellDefinednessError("model '" + model.id() +
                                   "' is not declared free of polynomial relations; "
                                   "Wick-Riemann sums against it are not well defined");
    if (times_.size() < 2) throw Error("integration grid needs at least two points");

    const std::size_t intervals = times_.size() - 1;
    for (int beta = 0; beta < dimension_; ++beta) {
        for (const auto& [gamma, coeff] : p.components[beta].terms()) {
            young_terms_.push_back({beta, exponents_of(gamma, model), coeff});
            for_each_submultiset(gamma, [&](const Multiset& alpha) {
                if (alpha.empty()) return;
                long long count = multiplicity_coefficient(gamma, alpha);
                CorrectionPlan plan;
                plan.beta = beta;
                plan.remainder = exponents_of(gamma - alpha, model);
                plan.coeff = coeff * static_cast<double>(count);
                for (const auto& s : alpha.to_symbols())
                    plan.alpha_components.push_back(model.component_of(s));
                plan.dkappa.resize(intervals);
                for (std::size_t k = 0; k < intervals; ++k) {
                    std::vector<TimedVar> at_v, at_u;
                    for (int c : plan.alpha_components) {
                        at_v.push_back({c, times_[k]});
                        at_u.push_back({c, times_[k]});
                    }
                    at_v.push_back({beta, times_[k + 1]});
                    at_u.push_back({beta, times_[k]});
                    plan.dkappa[k] = model.kappa(at_v) - model.kappa(at_u);
                }
                corrections_.push_back(std::move(plan));
            });
        }
    }
}

WickSumBreakdown WickIntegrator::evaluate(const SamplePath& path) const {
    if (path.times.size() != times_.size())
        throw Error("path grid does not match the integrator grid");
    for (std::size_t k = 0; k < times_.size(); ++k)
        if (std::abs(path.times[k] - times_[k]) > 1e-12)
            throw Error("path grid does not match the integrator grid");

    WickSumBreakdown out;
    for (std::size_t k = 0; k + 1 < times_.size(); ++k) {
        const auto& x = path.values[k];
        double young_k = 0.0;
        for (const auto& term : young_terms_) {
            double incr = path.values[k + 1][term.beta] - x[term.beta];
            young_k += term.coeff * eval_pow(x, term.gamma) * incr;
        }
        double corr_k = 0.0;
        for (const auto& plan : corrections_)
            corr_k += plan.coeff * eval_pow(x, plan.remainder) * plan.dkappa[k];
        out.young += young_k;
        out.correction += corr_k;
    }
    // The reverse product formula makes the Wick sum exactly the plain sum
    // minus the correction sum, interval by interval; evaluating it as the
    // difference of the two accumulated sums keeps the identity bit-exact.
    out.wick = out.young - out.correction;
    out.consistency_residual = out.wick - (out.young - out.correction);
    return out;
}

WickSumBreakdown wick_riemann_sum(const PolynomialOneForm& p, const SamplePath& path,
                                  const ProcessModel& model) {
    path.validate();
    WickIntegrator integrator(p, model, path.times);
    return integrator.evaluate(path);
}

std::vector<CorrectionTerm> ito_stratonovich_terms(const PolynomialOneForm& p,
                                                   const ProcessModel& model) {
    require_form(p, model);
    std::vector<CorrectionTerm> out;
    for (int beta = 0; beta < model.dimension(); ++beta) {
        std::set<Multiset> seen;
        for (const auto& [gamma, coeff] : p.components[beta].terms()) {
            for_each_submultiset(gamma, [&](const Multiset& alpha) {
                if (alpha.empty() || !seen.insert(alpha).second) return;
                if (auto max = model.max_cumulant_order();
                    max && alpha.total_size() + 1 > *max)
                    return;
                WickPolynomial<double> dp = differentiate(p.components[beta], alpha);
                if (dp.is_zero()) return;
                CorrectionTerm term;
                term.alpha = alpha;
                for (const auto& s : alpha.to_symbols())
                    term.alpha_components.push_back(model.component_of(s));
                term.beta = beta;
                term.weight = 1.0 / factorial_of_multiset(alpha);
                term.derivative = std::move(dp);
                out.push_back(std::move(term));
            });
        }
    }
    return out;
}

namespace {

double trapezoid(const std::vector<double>& u, const std::vector<double>& f) {
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < u.size(); ++k)
        acc += 0.5 * (f[k] + f[k + 1]) * (u[k + 1] - u[k]);
    return acc;
}

} // namespace

ItoStratCorrection ito_stratonovich_correction(const PolynomialOneForm& p,
                                               const ProcessModel& model, double s, double t,
                                               int quad_points, const SamplePath* path) {
    ItoStratCorrection out;
    out.terms = ito_stratonovich_terms(p, model);
    if (t <= s) return out;

    // deterministic mean on a uniform grid
    {
        std::vector<double> u(quad_points + 1), f(quad_points + 1, 0.0);
        for (int k = 0; k <= quad_points; ++k) u[k] = s + (t - s) * k / quad_points;
        for (int k = 0; k <= quad_points; ++k) {
            double val = 0.0;
            for (const auto& term : out.terms) {
                double e_dp = 0.0;
                for (const auto& [I, c] : term.derivative.terms())
                    e_dp += c * model.moment_equal_time(exponents_of(I, model), u[k]);
                if (e_dp != 0.0)
                    val += term.weight * e_dp *
                           model.dkappa_last(term.alpha_components, term.beta, u[k]);
            }
            f[k] = val;
        }
        out.mean = trapezoid(u, f);
    }

    if (path) {
        path->validate();
        std::vector<double> u, f;
        for (std::size_t k = 0; k < path->times.size(); ++k) {
            if (path->times[k] < s - 1e-12 || path->times[k] > t + 1e-12) continue;
            double val = 0.0;
            for (const auto& term : out.terms)
                val += term.weight * eval_poly(term.derivative, model, path->values[k]) *
                       model.dkappa_last(term.alpha_components, term.beta, path->times[k]);
            u.push_back(path->times[k]);
            f.push_back(val);
        }
        if (u.size() < 2) throw Error("path has fewer than two points inside [s,t]");
        out.pathwise = trapezoid(u, f);
    }
    return out;
}

std::vector<ItoTerm> ito_terms(const WickPolynomial<double>& p, const ProcessModel& model) {
    std::set<Multiset> seen;
    std::vector<ItoTerm> out;
    for (const auto& [mono, coeff] : p.terms()) {
        for_each_submultiset(mono, [&](const Multiset& gamma) {
            if (gamma.total_size() < 2 || !seen.insert(gamma).second) return;
            if (auto max = model.max_cumulant_order(); max && gamma.total_size() > *max)
                return;
            WickPolynomial<double> dp = differentiate(p, gamma);
            if (dp.is_zero()) return;
            ItoTerm term;
            term.gamma = gamma;
            for (const auto& s : gamma.to_symbols())
                term.gamma_components.push_back(model.component_of(s));
            term.weight = 1.0 / factorial_of_multiset(gamma);
            term.derivative = std::move(dp);
            out.push_back(std::move(term));
        });
    }
    return out;
}

double ito_correction_pathwise(const WickPolynomial<double>& p, const ProcessModel& model,
                               const SamplePath& path, double s, double t) {
    path.validate();
    auto terms = ito_terms(p, model);
    std::vector<double> u, f;
    for (std::size_t k = 0; k < path.times.size(); ++k) {
        if (path.times[k] < s - 1e-12 || path.times[k] > t + 1e-12) continue;
        double val = 0.0;
        for (const auto& term : terms)
            val += term.weight * eval_poly(term.derivative, model, path.values[k]) *
                   model.dkappa_total(term.gamma_components, path.times[k]);
        u.push_back(path.times[k]);
        f.push_back(val);
    }
    if (u.size() < 2) throw Error("path has fewer than two points inside [s,t]");
    return trapezoid(u, f);
}

double ito_correction_scalar(const WickPolynomial<double>& p, const ProcessModel& model,
                             const SamplePath& path, double s, double t) {
    if (model.dimension() != 1) throw Error("scalar shortcut needs a one-dimensional model");
    path.validate();
    int deg = p.degree();
    std::vector<double> u, f;
    for (std::size_t k = 0; k < path.times.size(); ++k) {
        if (path.times[k] < s - 1e-12 || path.times[k] > t + 1e-12) continue;
        double val = 0.0;
        WickPolynomial<double> dp = p;
        double fact = 1.0;
        for (int n = 1; n <= deg; ++n) {
            dp = differentiate(dp, Multiset{"x"});
            fact *= n;
            if (n < 2) continue;
            if (auto max = model.max_cumulant_order(); max && n > *max) continue;
            val += eval_poly(dp, model, path.values[k]) / fact *
                   model.dkappa_total(std::vector<int>(n, 0), path.times[k]);
        }
        u.push_back(path.times[k]);
        f.push_back(val);
    }
    if (u.size() < 2) throw Error("path has fewer than two points inside [s,t]");
    return trapezoid(u, f);
}

std::vector<double> univariate_appell_coefficients(int n, const std::vector<double>& kappa) {
    // e_m = sum over partitions of m labeled items of (-1)^{blocks} prod kappa:
    // e_0 = 1, e_m = -sum_j C(m-1, j-1) kappa_j e_{m-j}
    std::vector<double> e(n + 1, 0.0);
    e[0] = 1.0;
    for (int m = 1; m <= n; ++m) {
        double acc = 0.0;
        for (int j = 1; j <= m; ++j) {
            double kj = j < static_cast<int>(kappa.size()) ? kappa[j] : 0.0;
            if (kj != 0.0) acc += static_cast<double>(binomial(m - 1, j - 1)) * kj * e[m - j];
        }
        e[m] = -acc;
    }
    std::vector<double> coeff(n + 1, 0.0);
    for (int k = 0; k <= n; ++k)
        coeff[k] = static_cast<double>(binomial(n, k)) * e[n - k];
    return coeff;
}

namespace {

struct ScalarLawOracle {
    const ProcessModel& model;
    bool shifted;
    double s; // origin of the shifted process

    // kappa_j of X_t (or X_t - X_s) for j = 1..order
    std::vector<double> cumulants(double t, int order) const {
        std::vector<double> kappa(order + 1, 0.0);
        for (int j = 1; j <= order; ++j) {
            if (!shifted) {
                std::vector<TimedVar> vars(j, TimedVar{0, t});
                kappa[j] = model.kappa(vars);
            } else {
                double acc = 0.0;
                for (int i = 0; i <= j; ++i) {
                    std::vector<TimedVar> vars;
                    for (int q = 0; q < j - i; ++q) vars.push_back({0, t});
                    for (int q = 0; q < i; ++q) vars.push_back({0, s});
                    acc += (i % 2 == 0 ? 1.0 : -1.0) * binomial(j, i) * model.kappa(vars);
                }
                kappa[j] = acc;
            }
        }
        return kappa;
    }

    // kappa[(X_u or X_u - X_s)^{x j}, X_v] - same with v = u
    double kappa_increment(int j, double u, double v) const {
        auto mixed = [&](double last) {
            if (!shifted) {
                std::vector<TimedVar> vars(j, TimedVar{0, u});
                vars.push_back({0, last});
                return model.kappa(vars);
            }
            double acc = 0.0;
            for (int i = 0; i <= j; ++i) {
                std::vector<TimedVar> vars;
                for (int q = 0; q < j - i; ++q) vars.push_back({0, u});
                for (int q = 0; q < i; ++q) vars.push_back({0, s});
                vars.push_back({0, last});
                acc += (i % 2 == 0 ? 1.0 : -1.0) * binomial(j, i) * model.kappa(vars);
            }
            return acc;
        };
        return mixed(v) - mixed(u);
    }

    double state(const SamplePath& path, std::size_t k) const {
        return shifted ? path.values[k][0] - path.values[0][0] : path.values[k][0];
    }
};

} // namespace

ScalarIdentityReport verify_scalar_identities(int n, const SamplePath& path,
                                              const ProcessModel& model, int refinements,
                                              bool shifted) {
    if (model.dimension() != 1) throw Error("scalar identities need a one-dimensional model");
    path.validate();
    ScalarIdentityReport report;
    ScalarLawOracle oracle{model, shifted, path.times.front()};

    auto lhs_on = [&](const SamplePath& sub) {
        double acc = 0.0;
        for (std::size_t k = 0; k + 1 < sub.times.size(); ++k) {
            const double u = sub.times[k];
            auto kappa = oracle.cumulants(u, n);
            auto a = univariate_appell_coefficients(n, kappa);
            const double xu = oracle.state(sub, k);
            const double incr = sub.values[k + 1][0] - sub.values[k][0];
            for (int m = 0; m <= n; ++m) {
                if (a[m] == 0.0) continue;
                double corr = 0.0;
                for (int j = 1; j <= m; ++j)
                    corr += static_cast<double>(binomial(m, j)) * std::pow(xu, m - j) *
                            oracle.kappa_increment(j, u, sub.times[k + 1]);
                acc += a[m] * (std::pow(xu, m) * incr - corr);
            }
        }
        return acc;
    };

    auto w_at = [&](double t, double x) {
        auto kappa = oracle.cumulants(t, n + 1);
        auto a = univariate_appell_coefficients(n + 1, kappa);
        double val = 0.0;
        for (int m = 0; m <= n + 1; ++m) val += a[m] * std::pow(x, m);
        return val;
    };
    const std::size_t last = path.times.size() - 1;
    report.rhs = (w_at(path.times[last], oracle.state(path, last)) -
                  w_at(path.times[0], oracle.state(path, 0))) /
                 (n + 1);

    for (int level = refinements - 1; level >= 0; --level) {
        int stride = 1 << level;
        SamplePath sub = path.subsample(stride);
        double lhs = lhs_on(sub);
        report.mesh_residuals.emplace_back(sub.mesh(), std::abs(lhs - report.rhs));
        if (level == 0) {
            report.lhs = lhs;
            report.residual = lhs - report.rhs;
        }
    }
    return report;
}

} // namespace wick
