#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "wick/cumulants.hpp"
#include "wick/polynomial.hpp"

namespace wick {

/// Sum over all set partitions of the given positions of the product of
/// block cumulants, optionally signed by (-1)^{number of blocks}. The
/// empty position list contributes 1 (the empty partition).
template <class K>
K partition_cumulant_sum(const std::vector<Symbol>& positions,
                         const CumulantModel<K>& model, bool sign_by_blocks) {
    if (positions.empty()) return K(1);
    K total(0);
    enumerate_restricted_growth(positions.size(), [&](const std::vector<int>& rgs) {
        int nblocks = *std::max_element(rgs.begin(), rgs.end()) + 1;
        std::vector<Multiset> blocks(nblocks);
        for (std::size_t i = 0; i < positions.size(); ++i) blocks[rgs[i]].add(positions[i]);
        K prod = (sign_by_blocks && nblocks % 2 == 1) ? K(-1) : K(1);
        for (const auto& b : blocks) {
            prod = prod * model.kappa_ms(b);
            if (scalar_traits<K>::is_zero(prod)) break;
        }
        total = total + prod;
    });
    return total;
}

/// x^{<>I} by the recursion
///   x^{<>I} = x^I - sum over nonempty position-subsets J of
///             E[X^J] x^{<>(I minus J)},  x^{<>empty} = 1,
/// with position-subsets grouped by distinct multiset and counted through
/// the multiplicity coefficient.
template <class K>
WickPolynomial<K> appell_recursive(const Multiset& I, const CumulantModel<K>& model,
                                   std::size_t cap = slot_cap()) {
    check_slot_cap(I.total_size(), cap);
    std::map<Multiset, WickPolynomial<K>> memo;
    std::function<const WickPolynomial<K>&(const Multiset&)> rec =
        [&](const Multiset& J) -> const WickPolynomial<K>& {
        auto it = memo.find(J);
        if (it != memo.end()) return it->second;
        WickPolynomial<K> p = WickPolynomial<K>::monomial(J);
        if (!J.empty()) {
            for_each_submultiset(J, [&](const Multiset& sub) {
                if (sub.empty()) return;
                K weight = K(multiplicity_coefficient(J, sub)) * moment(sub, model);
                if (scalar_traits<K>::is_zero(weight)) return;
                p += rec(J - sub) * (K(-1) * weight);
            });
        }
        return memo.emplace(J, std::move(p)).first->second;
    };
    return rec(I);
}

/// Closed form: x^{<>I} = sum over position-subsets J of I of
/// x^J * sum over partitions pi of the remaining positions of
/// (-1)^{|pi|} kappa[X]^pi.
template <class K>
WickPolynomial<K> appell_closed_form(const Multiset& I, const CumulantModel<K>& model,
                                     std::size_t cap = slot_cap()) {
    const std::vector<Symbol> slots = I.to_symbols();
    const std::size_t n = slots.size();
    check_slot_cap(n, cap);
    WickPolynomial<K> p(Basis::Monomial);
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        Multiset J;
        std::vector<Symbol> rest;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask & (1u << i))
                J.add(slots[i]);
            else
                rest.push_back(slots[i]);
        }
        p.add_term(J, partition_cumulant_sum(rest, model, /*sign_by_blocks=*/true));
    }
    return p;
}

/// The inverse expansion of a plain monomial in the Appell basis:
/// x^I = sum over position-subsets J of x^{<>J} * sum_pi kappa[X]^pi.
template <class K>
WickPolynomial<K> monomial_in_appell_basis(const Multiset& I, const CumulantModel<K>& model,
                                           std::size_t cap = slot_cap()) {
    const std::vector<Symbol> slots = I.to_symbols();
    const std::size_t n = slots.size();
    check_slot_cap(n, cap);
    WickPolynomial<K> p(Basis::Appell, model.id());
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        Multiset J;
        std::vector<Symbol> rest;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask & (1u << i))
                J.add(slots[i]);
            else
                rest.push_back(slots[i]);
        }
        p.add_term(J, partition_cumulant_sum(rest, model, /*sign_by_blocks=*/false));
    }
    return p;
}

template <class K>
WickPolynomial<K> to_appell_basis(const WickPolynomial<K>& p, const CumulantModel<K>& model,
                                  std::size_t cap = slot_cap()) {
    if (p.basis() == Basis::Appell) {
        if (p.model_id() != model.id())
            throw Error("polynomial is in the Appell basis of model '" + p.model_id() +
                        "', not '" + model.id() + "'");
        return p;
    }
    WickPolynomial<K> out(Basis::Appell, model.id());
    for (const auto& [I, c] : p.terms()) out += monomial_in_appell_basis(I, model, cap) * c;
    return out;
}

template <class K>
WickPolynomial<K> to_monomial_basis(const WickPolynomial<K>& p, const CumulantModel<K>& model,
                                    std::size_t cap = slot_cap()) {
    if (p.basis() == Basis::Monomial) return p;
    if (p.model_id() != model.id())
        throw Error("polynomial is in the Appell basis of model '" + p.model_id() +
                    "', not '" + model.id() + "'");
    WickPolynomial<K> out(Basis::Monomial);
    for (const auto& [I, c] : p.terms()) out += appell_closed_form(I, model, cap) * c;
    return out;
}

/// Partial differentiation by a multiset of indices. The rule is the same
/// in both bases: d_J x^I = C(I,J) x^{I\J}, and likewise on x^{<>I}.
template <class K>
WickPolynomial<K> differentiate(const WickPolynomial<K>& p, const Multiset& J) {
    WickPolynomial<K> out(p.basis(), p.model_id());
    for (const auto& [I, c] : p.terms()) {
        long long m = multiplicity_coefficient(I, J);
        if (m != 0) out.add_term(I - J, c * K(m));
    }
    return out;
}

/// Wick product relative to the model: convert both factors to the Appell
/// basis, where x^{<>I} <> x^{<>J} = x^{<>(I u J)}, and return in the
/// requested basis. When the result is to be read as a product of random
/// variables, the model must be free of polynomial relations.
template <class K>
WickPolynomial<K> wick_product(const WickPolynomial<K>& p, const WickPolynomial<K>& q,
                               const CumulantModel<K>& model,
                               Basis output_basis = Basis::Appell,
                               bool for_evaluation = false,
                               std::size_t cap = slot_cap()) {
    if (for_evaluation && !model.polynomial_relation_free())
        throw WellDefinednessError(
            "model '" + model.id() +
            "' is not declared free of polynomial relations; the Wick product "
            "of its random variables is not well defined");
    check_slot_cap(static_cast<std::size_t>(p.degree() + q.degree()), cap);
    WickPolynomial<K> a = to_appell_basis(p, model, cap);
    WickPolynomial<K> b = to_appell_basis(q, model, cap);
    WickPolynomial<K> r(Basis::Appell, model.id());
    for (const auto& [I, ci] : a.terms())
        for (const auto& [J, cj] : b.terms()) r.add_term(I + J, ci * cj);
    return output_basis == Basis::Appell ? r : to_monomial_basis(r, model, cap);
}

/// Product formula: the pointwise product of Appell elements as a sum of
/// x^{<>D} over non-flat diagrams, D = (pi, K), x^{<>D} = kappa^pi x^{<>K}.
template <class K>
WickPolynomial<K> product_formula_expand(const std::vector<Multiset>& rows,
                                         const CumulantModel<K>& model,
                                         std::size_t cap = slot_cap()) {
    DiagramFilter filter;
    filter.non_flat = true;
    WickPolynomial<K> out(Basis::Appell, model.id());
    enumerate_diagrams(rows, filter, [&](const Diagram& d) {
        K prod(1);
        for (const auto& e : d.edges) {
            prod = prod * model.kappa_ms(d.nodes.symbols_of(e));
            if (scalar_traits<K>::is_zero(prod)) return;
        }
        out.add_term(d.nodes.symbols_of(d.residual), prod);
    }, cap);
    return out;
}

/// Reverse product formula: the Wick product of plain monomials as a sum
/// of (-1)^{|pi|} x^{(pi,K)} over non-flat diagrams, in the monomial basis.
template <class K>
WickPolynomial<K> reverse_product_expand(const std::vector<Multiset>& rows,
                                         const CumulantModel<K>& model,
                                         std::size_t cap = slot_cap()) {
    DiagramFilter filter;
    filter.non_flat = true;
    WickPolynomial<K> out(Basis::Monomial);
    enumerate_diagrams(rows, filter, [&](const Diagram& d) {
        K prod = d.edges.size() % 2 == 1 ? K(-1) : K(1);
        for (const auto& e : d.edges) {
            prod = prod * model.kappa_ms(d.nodes.symbols_of(e));
            if (scalar_traits<K>::is_zero(prod)) return;
        }
        out.add_term(d.nodes.symbols_of(d.residual), prod);
    }, cap);
    return out;
}

/// Change of chaos: y^1 <>_Y ... <>_Y y^m with Y^k = X^{<>I_k},
/// substituted after the product, expanded in the X-Appell basis. The sum
/// runs over connected non-flat diagrams with nonempty residual set.
template <class K>
WickPolynomial<K> change_of_chaos_expand(const std::vector<Multiset>& rows,
                                         const CumulantModel<K>& model,
                                         std::size_t cap = slot_cap()) {
    DiagramFilter filter;
    filter.non_flat = true;
    filter.connected = true;
    WickPolynomial<K> out(Basis::Appell, model.id());
    enumerate_diagrams(rows, filter, [&](const Diagram& d) {
        if (d.residual.empty()) return;
        K prod(1);
        for (const auto& e : d.edges) {
            prod = prod * model.kappa_ms(d.nodes.symbols_of(e));
            if (scalar_traits<K>::is_zero(prod)) return;
        }
        out.add_term(d.nodes.symbols_of(d.residual), prod);
    }, cap);
    return out;
}

/// Univariate x^{<>n} through the generating series
/// exp(theta x - K(theta)) as a truncated formal power series in theta,
/// where K is the cumulant generating function.
template <class K>
WickPolynomial<K> appell_from_generating(int n, const CumulantModel<K>& model,
                                         const Symbol& symbol = "x",
                                         std::size_t cap = slot_cap()) {
    check_slot_cap(static_cast<std::size_t>(n), cap);
    // series[j][k] = coefficient of theta^j x^k
    using Series = std::vector<std::vector<K>>;
    auto zero = [&] { return Series(n + 1, std::vector<K>(n + 1, K(0))); };
    auto mul = [&](const Series& a, const Series& b) {
        Series c = zero();
        for (int ja = 0; ja <= n; ++ja)
            for (int ka = 0; ka <= n; ++ka) {
                if (scalar_traits<K>::is_zero(a[ja][ka])) continue;
                for (int jb = 0; ja + jb <= n; ++jb)
                    for (int kb = 0; ka + kb <= n; ++kb) {
                        if (scalar_traits<K>::is_zero(b[jb][kb])) continue;
                        c[ja + jb][ka + kb] = c[ja + jb][ka + kb] + a[ja][ka] * b[jb][kb];
                    }
            }
        return c;
    };

    Series s = zero(); // theta*x - K(theta); no constant term
    if (n >= 1) s[1][1] = K(1);
    for (int j = 1; j <= n; ++j) {
        K kj = model.kappa_ms(Multiset::power(symbol, j));
        if (!scalar_traits<K>::is_zero(kj))
            s[j][0] = s[j][0] - kj / K(factorial_ll(j));
    }

    Series expo = zero();
    expo[0][0] = K(1);
    Series power = expo;
    for (int k = 1; k <= n; ++k) {
        power = mul(power, s);
        K inv_fact = K(1) / K(factorial_ll(k));
        for (int j = 0; j <= n; ++j)
            for (int x = 0; x <= n; ++x) expo[j][x] = expo[j][x] + power[j][x] * inv_fact;
    }

    WickPolynomial<K> out(Basis::Monomial);
    K nfact(factorial_ll(n));
    for (int x = 0; x <= n; ++x)
        out.add_term(Multiset::power(symbol, x), expo[n][x] * nfact);
    return out;
}

struct ExpSeriesResult {
    double value = 0.0;        // partial sum of kappa_l / (l-1)!, l >= 2
    double tail_bound = 0.0;   // geometric estimate from the last ratio
    int terms_used = 0;
    bool conclusive = true;    // ratio test gave a clear verdict
};

/// Partial sums of sum_{l>=2} kappa_l[X] / (l-1)! for a univariate centred
/// model, with a ratio test on the terms. Persistent ratios >= threshold
/// raise ConvergenceError; an empty verdict (e.g. wildly oscillating
/// ratios) is reported as inconclusive rather than guessed.
inline ExpSeriesResult exp_wick_coefficient(const std::function<double(int)>& kappa_of_order,
                                            int truncation_order,
                                            double ratio_threshold = 1.0) {
    if (truncation_order < 2) throw UsageError("truncation order must be at least 2");
    ExpSeriesResult r;
    std::vector<double> terms;
    double fact = 1.0; // (l-1)!
    for (int l = 2; l <= truncation_order; ++l) {
        fact *= (l - 1);
        double a = kappa_of_order(l) / fact;
        terms.push_back(a);
        r.value += a;
    }
    r.terms_used = static_cast<int>(terms.size());

    std::vector<double> ratios;
    for (std::size_t i = 0; i + 1 < terms.size(); ++i)
        if (terms[i] != 0.0) ratios.push_back(std::abs(terms[i + 1] / terms[i]));

    if (ratios.empty()) {
        r.tail_bound = 0.0; // finitely many nonzero cumulants
        return r;
    }
    std::size_t window = std::min<std::size_t>(3, ratios.size());
    bool all_diverging = true, all_converging = true;
    for (std::size_t i = ratios.size() - window; i < ratios.size(); ++i) {
        if (ratios[i] < ratio_threshold) all_diverging = false;
        if (ratios[i] >= 1.0) all_converging = false;
    }
    if (all_diverging)
        throw ConvergenceError("cumulant series fails the ratio test: terms are not decreasing");
    double last_ratio = ratios.back();
    if (all_converging) {
        r.tail_bound = std::abs(terms.back()) * last_ratio / (1.0 - last_ratio);
    } else {
        r.conclusive = false;
        r.tail_bound = std::abs(terms.back());
    }
    return r;
}

template <class K>
ExpSeriesResult exp_wick_coefficient(const CumulantModel<K>& model, const Symbol& symbol,
                                     int truncation_order, double ratio_threshold = 1.0) {
    if (!scalar_traits<K>::is_zero(model.kappa_ms(Multiset{symbol})))
        throw UsageError("exp_wick_coefficient requires a centred model");
    return exp_wick_coefficient(
        [&](int l) { return to_double(model.kappa_ms(Multiset::power(symbol, l))); },
        truncation_order, ratio_threshold);
}

} // namespace wick
