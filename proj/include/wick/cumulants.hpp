#pragma once

#include <algorithm>
#include <compare>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wick/combinatorics.hpp"
#include "wick/diagram.hpp"
#include "wick/multiset.hpp"
#include "wick/rational.hpp"

namespace wick {

/// One argument of a joint cumulant: a component symbol, optionally
/// pinned to a time for process models.
struct Variable {
    Symbol symbol;
    std::optional<double> time;

    Variable(Symbol s) : symbol(std::move(s)) {}
    Variable(Symbol s, double t) : symbol(std::move(s)), time(t) {}

    auto operator<=>(const Variable&) const = default;
};

inline std::vector<Variable> variables_of(const Multiset& ms) {
    std::vector<Variable> vars;
    for (const auto& s : ms.to_symbols()) vars.emplace_back(s);
    return vars;
}

/// Oracle for joint cumulants kappa[X^{v_1},...,X^{v_n}]. Values are
/// cached keyed by the canonical sorted variable list; diagram sums reuse
/// blocks heavily.
template <class K>
class CumulantModel {
public:
    virtual ~CumulantModel() = default;

    virtual std::string id() const = 0;
    virtual bool polynomial_relation_free() const = 0;
    virtual bool rational_exact() const { return scalar_traits<K>::exact; }

    K kappa(std::vector<Variable> vars) const {
        std::sort(vars.begin(), vars.end());
        {
            std::lock_guard lock(mutex_);
            auto it = cache_.find(vars);
            if (it != cache_.end()) return it->second;
        }
        K value = kappa_impl(vars);
        std::lock_guard lock(mutex_);
        return cache_.emplace(std::move(vars), std::move(value)).first->second;
    }

    K kappa_ms(const Multiset& ms) const { return kappa(variables_of(ms)); }

protected:
    /// `vars` arrives sorted; implementations must be symmetric anyway.
    virtual K kappa_impl(const std::vector<Variable>& vars) const = 0;

private:
    mutable std::map<std::vector<Variable>, K> cache_;
    mutable std::mutex mutex_;
};

/// Cumulants given explicitly per multiset; anything absent is an error
/// above the declared order and zero at or below it.
template <class K>
class TableModel : public CumulantModel<K> {
public:
    TableModel(std::string id, std::map<Multiset, K> table, int max_order,
               bool relation_free = false)
        : id_(std::move(id)), table_(std::move(table)), max_order_(max_order),
          relation_free_(relation_free) {}

    static TableModel from_json(const std::string& text, bool relation_free = false) {
        nlohmann::json j = nlohmann::json::parse(text);
        std::map<Multiset, K> table;
        int max_order = 0;
        for (const auto& [key, val] : j.at("kappa").items()) {
            Multiset ms = Multiset::parse(key);
            max_order = std::max(max_order, ms.total_size());
            if constexpr (scalar_traits<K>::exact) {
                if (val.is_string())
                    table[ms] = rational_from_string(val.template get<std::string>());
                else
                    table[ms] = Rational(val.template get<long long>());
            } else {
                table[ms] = val.template get<double>();
            }
        }
        std::string id = j.value("id", std::string("table"));
        return TableModel(id, std::move(table), max_order, relation_free);
    }

    std::string to_json() const {
        nlohmann::json j;
        j["id"] = id_;
        nlohmann::json k = nlohmann::json::object();
        for (const auto& [ms, v] : table_) {
            if constexpr (scalar_traits<K>::exact)
                k[ms.canonical_string()] = wick::to_string(v);
            else
                k[ms.canonical_string()] = v;
        }
        j["kappa"] = k;
        return j.dump();
    }

    std::string id() const override { return id_; }
    bool polynomial_relation_free() const override { return relation_free_; }

protected:
    K kappa_impl(const std::vector<Variable>& vars) const override {
        if (static_cast<int>(vars.size()) > max_order_)
            throw Error("cumulant of order " + std::to_string(vars.size()) +
                        " not present in table model '" + id_ + "'");
        Multiset ms;
        for (const auto& v : vars) ms.add(v.symbol);
        auto it = table_.find(ms);
        return it == table_.end() ? K(0) : it->second;
    }

private:
    std::string id_;
    std::map<Multiset, K> table_;
    int max_order_;
    bool relation_free_;
};

/// Centred jointly Gaussian family: only pair cumulants survive.
template <class K>
class GaussianModel : public CumulantModel<K> {
public:
    GaussianModel(std::string id, std::map<std::pair<Symbol, Symbol>, K> covariance,
                  bool relation_free = true)
        : id_(std::move(id)), cov_(std::move(covariance)), relation_free_(relation_free) {}

    /// Independent standard Gaussians over the given symbols.
    static GaussianModel standard(const std::vector<Symbol>& symbols) {
        std::map<std::pair<Symbol, Symbol>, K> cov;
        for (const auto& s : symbols) cov[{s, s}] = K(1);
        return GaussianModel("gaussian", std::move(cov));
    }

    std::string id() const override { return id_; }
    bool polynomial_relation_free() const override { return relation_free_; }

protected:
    K kappa_impl(const std::vector<Variable>& vars) const override {
        if (vars.size() != 2) return K(0);
        auto key = std::minmax(vars[0].symbol, vars[1].symbol);
        auto it = cov_.find({key.first, key.second});
        return it == cov_.end() ? K(0) : it->second;
    }

private:
    std::string id_;
    std::map<std::pair<Symbol, Symbol>, K> cov_;
    bool relation_free_;
};

/// Single Poisson variable: kappa_n = lambda for every n >= 1. Discrete,
/// so not free of polynomial relations.
template <class K>
class PoissonModel : public CumulantModel<K> {
public:
    PoissonModel(K lambda, Symbol symbol = "x")
        : lambda_(std::move(lambda)), symbol_(std::move(symbol)) {}

    std::string id() const override { return "poisson"; }
    bool polynomial_relation_free() const override { return false; }
    const K& lambda() const { return lambda_; }

protected:
    K kappa_impl(const std::vector<Variable>& vars) const override {
        for (const auto& v : vars)
            if (v.symbol != symbol_) return K(0);
        return vars.empty() ? K(0) : lambda_;
    }

private:
    K lambda_;
    Symbol symbol_;
};

/// The same family with its first cumulant dropped: the law of X - E X.
template <class K>
class CentredModel : public CumulantModel<K> {
public:
    explicit CentredModel(const CumulantModel<K>& base) : base_(base) {}
    std::string id() const override { return base_.id() + "~centred"; }
    bool polynomial_relation_free() const override { return base_.polynomial_relation_free(); }

protected:
    K kappa_impl(const std::vector<Variable>& vars) const override {
        if (vars.size() <= 1) return K(0);
        return base_.kappa(vars);
    }

private:
    const CumulantModel<K>& base_;
};

/// Cumulants of Y^j = sum_i lambda[j][i] X^i, by multilinearity.
template <class K>
class LinearTransformModel : public CumulantModel<K> {
public:
    LinearTransformModel(const CumulantModel<K>& base,
                         std::vector<Symbol> new_symbols,
                         std::vector<Symbol> base_symbols,
                         std::vector<std::vector<K>> coefficients)
        : base_(base), new_symbols_(std::move(new_symbols)),
          base_symbols_(std::move(base_symbols)), coeff_(std::move(coefficients)) {}

    std::string id() const override { return base_.id() + "~linear"; }
    bool polynomial_relation_free() const override { return base_.polynomial_relation_free(); }

protected:
    K kappa_impl(const std::vector<Variable>& vars) const override {
        std::vector<std::size_t> rows;
        for (const auto& v : vars) {
            auto it = std::find(new_symbols_.begin(), new_symbols_.end(), v.symbol);
            if (it == new_symbols_.end()) throw Error("unknown symbol " + v.symbol);
            rows.push_back(static_cast<std::size_t>(it - new_symbols_.begin()));
        }
        K total(0);
        std::vector<std::size_t> pick(vars.size(), 0);
        std::function<void(std::size_t, K)> rec = [&](std::size_t slot, K weight) {
            if (scalar_traits<K>::is_zero(weight)) return;
            if (slot == vars.size()) {
                std::vector<Variable> mapped;
                for (std::size_t i = 0; i < vars.size(); ++i)
                    mapped.emplace_back(base_symbols_[pick[i]]);
                total = total + weight * base_.kappa(std::move(mapped));
                return;
            }
            for (std::size_t i = 0; i < base_symbols_.size(); ++i) {
                pick[slot] = i;
                rec(slot + 1, weight * coeff_[rows[slot]][i]);
            }
        };
        rec(0, K(1));
        return total;
    }

private:
    const CumulantModel<K>& base_;
    std::vector<Symbol> new_symbols_;
    std::vector<Symbol> base_symbols_;
    std::vector<std::vector<K>> coeff_;
};

/// Moment E[X^{v_1} ... X^{v_n}] as the partition sum of cumulant products.
template <class K>
K moment(const std::vector<Variable>& vars, const CumulantModel<K>& model,
         std::size_t cap = slot_cap()) {
    check_slot_cap(vars.size(), cap);
    if (vars.empty()) return K(1);
    K total(0);
    enumerate_restricted_growth(vars.size(), [&](const std::vector<int>& rgs) {
        int nblocks = *std::max_element(rgs.begin(), rgs.end()) + 1;
        std::vector<std::vector<Variable>> blocks(nblocks);
        for (std::size_t i = 0; i < vars.size(); ++i) blocks[rgs[i]].push_back(vars[i]);
        K prod(1);
        for (auto& b : blocks) {
            prod = prod * model.kappa(std::move(b));
            if (scalar_traits<K>::is_zero(prod)) break;
        }
        total = total + prod;
    });
    return total;
}

template <class K>
K moment(const Multiset& ms, const CumulantModel<K>& model, std::size_t cap = slot_cap()) {
    return moment(variables_of(ms), model, cap);
}

/// Joint cumulant from a moment oracle:
/// sum over partitions of (|pi|-1)! (-1)^{|pi|-1} prod_J E[X^J].
template <class K>
K cumulant_from_moments(const std::vector<Variable>& vars,
                        const std::function<K(const std::vector<Variable>&)>& moment_oracle,
                        std::size_t cap = slot_cap()) {
    check_slot_cap(vars.size(), cap);
    if (vars.empty()) return K(0);
    K total(0);
    enumerate_restricted_growth(vars.size(), [&](const std::vector<int>& rgs) {
        int nblocks = *std::max_element(rgs.begin(), rgs.end()) + 1;
        std::vector<std::vector<Variable>> blocks(nblocks);
        for (std::size_t i = 0; i < vars.size(); ++i) blocks[rgs[i]].push_back(vars[i]);
        K prod = scalar_traits<K>::from_fraction(
            (nblocks % 2 == 1 ? 1 : -1) * factorial_ll(nblocks - 1), 1);
        for (const auto& b : blocks) {
            prod = prod * moment_oracle(b);
            if (scalar_traits<K>::is_zero(prod)) break;
        }
        total = total + prod;
    });
    return total;
}

enum class EkwKind { E_monomial, E_appell, kappa_monomial, kappa_appell };

/// The four diagram identities for moments and cumulants of products of
/// plain monomials / Appell polynomials: sums of kappa[X]^D over total
/// diagrams, restricted to non-flat and/or connected ones.
template <class K>
K ekw_identity(EkwKind kind, const std::vector<Multiset>& rows,
               const CumulantModel<K>& model, std::size_t cap = slot_cap()) {
    DiagramFilter filter;
    filter.total = true;
    filter.non_flat = (kind == EkwKind::E_appell || kind == EkwKind::kappa_appell);
    filter.connected = (kind == EkwKind::kappa_monomial || kind == EkwKind::kappa_appell);

    K total(0);
    enumerate_diagrams(rows, filter, [&](const Diagram& d) {
        K prod(1);
        for (const auto& e : d.edges) {
            prod = prod * model.kappa_ms(d.nodes.symbols_of(e));
            if (scalar_traits<K>::is_zero(prod)) return;
        }
        total = total + prod;
    }, cap);
    return total;
}

} // namespace wick
