#pragma once

#include <string>
#include <vector>

#include "wick/polynomial.hpp"
#include "wick/process.hpp"

namespace wick {

/// Discrete sample path on a strictly increasing grid; values[k] is the
/// d-vector at times[k].
struct SamplePath {
    std::vector<double> times;
    std::vector<std::vector<double>> values;

    std::size_t points() const { return times.size(); }
    int dimension() const { return times.empty() ? 0 : static_cast<int>(values[0].size()); }
    double mesh() const;
    void validate() const;

    /// Keeps every stride-th point plus the final endpoint; dyadic strides
    /// of a dyadic grid give nested coarsenings.
    SamplePath subsample(int stride) const;
};

/// Polynomial one-form: one integrand polynomial per process component,
/// in the model's component symbols ("x" when d = 1).
struct PolynomialOneForm {
    std::vector<WickPolynomial<double>> components;

    static PolynomialOneForm scalar(WickPolynomial<double> p) {
        PolynomialOneForm f;
        f.components.push_back(std::move(p));
        return f;
    }
};

/// x^degree in the scalar symbol.
WickPolynomial<double> scalar_monomial(int degree, double coeff = 1.0);

/// Left-point Riemann-Stieltjes sum sum_k p_b(X_{t_k}) (X^b_{t_{k+1}} - X^b_{t_k}).
double young_integral(const PolynomialOneForm& p, const SamplePath& path,
                      const ProcessModel& model);

struct WickSumBreakdown {
    double wick = 0.0;        // sum of p(X_u) <> X_{u,v}
    double young = 0.0;       // plain left-point sum
    double correction = 0.0;  // the cumulant correction sum on the same grid
    // per-interval accumulation of (young_k - correction_k) - wick_k; zero
    // by construction, kept as an explicit witness of the same-grid identity
    double consistency_residual = 0.0;
};

/// One term of the Ito-Stratonovich correction sum: weight = 1/alpha!.
struct CorrectionTerm {
    Multiset alpha;                 // in component symbols
    std::vector<int> alpha_components;
    int beta = 0;
    double weight = 1.0;
    WickPolynomial<double> derivative; // d_alpha p_beta
};

/// Precomputed discretization of the Wick integral of a fixed polynomial
/// one-form on a fixed grid: the cumulant increments are path-independent
/// and shared across Monte Carlo paths.
class WickIntegrator {
public:
    WickIntegrator(PolynomialOneForm p, const ProcessModel& model,
                   std::vector<double> times);

    WickSumBreakdown evaluate(const SamplePath& path) const;

    const std::vector<double>& times() const { return times_; }

private:
    struct MonomialPlan {
        int beta;
        std::vector<int> gamma;   // exponent per component
        double coeff;
    };
    struct CorrectionPlan {
        int beta;
        std::vector<int> remainder; // exponents of X_u^{gamma \ alpha}
        double coeff;               // polynomial coeff times C(gamma, alpha)
        std::vector<int> alpha_components;
        std::vector<double> dkappa; // kappa increment per interval
    };

    const ProcessModel& model_;
    std::vector<double> times_;
    int dimension_;
    std::vector<MonomialPlan> young_terms_;
    std::vector<CorrectionPlan> corrections_;
};

WickSumBreakdown wick_riemann_sum(const PolynomialOneForm& p, const SamplePath& path,
                                  const ProcessModel& model);

/// The alpha-sum of the Ito-Stratonovich formula as an explicit term list;
/// terms whose cumulant order exceeds the model's support are dropped
/// (Gaussian models keep only |alpha| = 1).
std::vector<CorrectionTerm> ito_stratonovich_terms(const PolynomialOneForm& p,
                                                   const ProcessModel& model);

struct ItoStratCorrection {
    double pathwise = 0.0; // needs a path; trapezoid on the path grid
    double mean = 0.0;     // deterministic: E[d_alpha p(X_u)] under the model
    std::vector<CorrectionTerm> terms;
};

/// Correction sum of the Ito-Stratonovich formula over [s, t]: both the
/// pathwise Stieltjes sums (trapezoid along the supplied path) and the
/// deterministic mean form. `path` may be null for the mean alone.
ItoStratCorrection ito_stratonovich_correction(const PolynomialOneForm& p,
                                               const ProcessModel& model, double s, double t,
                                               int quad_points,
                                               const SamplePath* path = nullptr);

/// One term of the Ito change-of-variables correction: weight = 1/gamma!.
struct ItoTerm {
    Multiset gamma;
    std::vector<int> gamma_components;
    double weight = 1.0;
    WickPolynomial<double> derivative; // d_gamma p
};

std::vector<ItoTerm> ito_terms(const WickPolynomial<double>& p, const ProcessModel& model);

/// sum_{|gamma| >= 2} 1/gamma! int_s^t d_gamma p(X_u) kappa^gamma(du),
/// trapezoid along the path restricted to [s, t].
double ito_correction_pathwise(const WickPolynomial<double>& p, const ProcessModel& model,
                               const SamplePath& path, double s, double t);

/// Scalar-case shortcut of the same correction,
/// sum_n 1/n! int p^(n)(X_u) dkappa_n(u); must agree with the generic form.
double ito_correction_scalar(const WickPolynomial<double>& p, const ProcessModel& model,
                             const SamplePath& path, double s, double t);

struct ScalarIdentityReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0;
    // (mesh, |residual|) over dyadic coarsenings, finest last
    std::vector<std::pair<double, double>> mesh_residuals;
};

/// Checks int_s^t X^{<>n} <> dX = (X^{<>(n+1)})_{s,t} / (n+1) on the given
/// path (Appell polynomials of the running marginal law), plus the variant
/// for the shifted process X_{s,u}. Residuals are reported, never asserted.
ScalarIdentityReport verify_scalar_identities(int n, const SamplePath& path,
                                              const ProcessModel& model,
                                              int refinements = 4, bool shifted = false);

/// Coefficients of the univariate Appell polynomial of degree n for the
/// law with cumulants kappa[j], j = 1..n (kappa[0] unused).
std::vector<double> univariate_appell_coefficients(int n, const std::vector<double>& kappa);

} // namespace wick
