#pragma once

#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wick/multiset.hpp"
#include "wick/rational.hpp"

namespace wick {

enum class Basis { Monomial, Appell };

/// Sparse multiset-indexed polynomial. A term keyed by multiset I is
/// either the plain monomial x^I or the Appell element x^{<>I} of the
/// model named by `model_id`, depending on the basis tag. Zero
/// coefficients are never stored.
template <class K>
class WickPolynomial {
public:
    WickPolynomial() = default;
    explicit WickPolynomial(Basis basis, std::string model_id = "")
        : basis_(basis), model_id_(std::move(model_id)) {}

    static WickPolynomial monomial(const Multiset& I, K coeff = K(1)) {
        WickPolynomial p(Basis::Monomial);
        p.add_term(I, std::move(coeff));
        return p;
    }

    static WickPolynomial constant(K value, Basis basis = Basis::Monomial,
                                   std::string model_id = "") {
        WickPolynomial p(basis, std::move(model_id));
        p.add_term(Multiset{}, std::move(value));
        return p;
    }

    /// The single Appell basis element x^{<>I} of the given model.
    static WickPolynomial appell_unit(const Multiset& I, const std::string& model_id) {
        WickPolynomial p(Basis::Appell, model_id);
        p.add_term(I, K(1));
        return p;
    }

    Basis basis() const { return basis_; }
    const std::string& model_id() const { return model_id_; }
    const std::map<Multiset, K>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    int degree() const {
        int d = 0;
        for (const auto& [I, c] : terms_) d = std::max(d, I.total_size());
        return d;
    }

    K coefficient(const Multiset& I) const {
        auto it = terms_.find(I);
        return it == terms_.end() ? K(0) : it->second;
    }

    void add_term(const Multiset& I, K coeff) {
        if (scalar_traits<K>::is_zero(coeff)) return;
        auto it = terms_.find(I);
        if (it == terms_.end()) {
            terms_.emplace(I, std::move(coeff));
        } else {
            it->second = it->second + coeff;
            if (scalar_traits<K>::is_zero(it->second)) terms_.erase(it);
        }
    }

    WickPolynomial& operator+=(const WickPolynomial& other) {
        require_compatible(other);
        for (const auto& [I, c] : other.terms_) add_term(I, c);
        return *this;
    }

    WickPolynomial operator+(const WickPolynomial& other) const {
        WickPolynomial r = *this;
        r += other;
        return r;
    }

    WickPolynomial operator-(const WickPolynomial& other) const {
        WickPolynomial r = *this;
        r += other * K(-1);
        return r;
    }

    WickPolynomial operator*(const K& scalar) const {
        WickPolynomial r(basis_, model_id_);
        if (scalar_traits<K>::is_zero(scalar)) return r;
        for (const auto& [I, c] : terms_) r.add_term(I, c * scalar);
        return r;
    }

    /// Pointwise product; defined termwise only in the monomial basis.
    WickPolynomial operator*(const WickPolynomial& other) const {
        if (basis_ != Basis::Monomial || other.basis_ != Basis::Monomial)
            throw Error("pointwise product requires the monomial basis");
        WickPolynomial r(Basis::Monomial);
        for (const auto& [I, a] : terms_)
            for (const auto& [J, b] : other.terms_) r.add_term(I + J, a * b);
        return r;
    }

    WickPolynomial pow(int n) const {
        WickPolynomial r = constant(K(1));
        for (int i = 0; i < n; ++i) r = r * *this;
        return r;
    }

    bool operator==(const WickPolynomial& other) const {
        if (basis_ != other.basis_) return false;
        if (basis_ == Basis::Appell && model_id_ != other.model_id_) return false;
        if (terms_.size() != other.terms_.size()) return false;
        for (const auto& [I, c] : terms_) {
            auto it = other.terms_.find(I);
            if (it == other.terms_.end() || !scalar_traits<K>::close(c, it->second))
                return false;
        }
        return true;
    }

    std::set<Symbol> symbols() const {
        std::set<Symbol> out;
        for (const auto& [I, c] : terms_)
            for (const auto& [s, k] : I.entries()) out.insert(s);
        return out;
    }

    /// Evaluate at the given point; every symbol in the polynomial must be
    /// assigned. Only meaningful in the monomial basis.
    template <class V>
    V evaluate(const std::map<Symbol, V>& point) const {
        if (basis_ != Basis::Monomial)
            throw Error("evaluation requires the monomial basis");
        V total(0);
        for (const auto& [I, c] : terms_) {
            V prod(1);
            for (const auto& [s, k] : I.entries()) {
                auto it = point.find(s);
                if (it == point.end()) throw Error("unassigned symbol " + s);
                for (int i = 0; i < k; ++i) prod = prod * it->second;
            }
            if constexpr (std::is_same_v<V, K>)
                total = total + c * prod;
            else
                total = total + static_cast<V>(to_double(c)) * prod;
        }
        return total;
    }

    std::string to_json() const {
        nlohmann::json j;
        j["basis"] = basis_ == Basis::Monomial ? "monomial" : "appell";
        j["model_id"] = model_id_;
        nlohmann::json t = nlohmann::json::object();
        for (const auto& [I, c] : terms_) {
            if constexpr (scalar_traits<K>::exact)
                t[I.canonical_string()] = wick::to_string(c);
            else
                t[I.canonical_string()] = to_double(c);
        }
        j["terms"] = t;
        return j.dump();
    }

    static WickPolynomial from_json(const std::string& text) {
        nlohmann::json j = nlohmann::json::parse(text);
        WickPolynomial p(j.at("basis") == "appell" ? Basis::Appell : Basis::Monomial,
                         j.value("model_id", std::string()));
        for (const auto& [key, val] : j.at("terms").items()) {
            if constexpr (scalar_traits<K>::exact) {
                if (val.is_string())
                    p.add_term(Multiset::parse(key), rational_from_string(val.template get<std::string>()));
                else
                    p.add_term(Multiset::parse(key), K(val.template get<long long>()));
            } else {
                p.add_term(Multiset::parse(key), val.template get<double>());
            }
        }
        return p;
    }

    /// Renders univariate polynomials densely with explicit zero
    /// coefficients ("x^3 - 3x^2 + 0x + 1"); multivariate ones as a sorted
    /// term list. Appell-basis elements print as A(...).
    std::string pretty() const;

private:
    void require_compatible(const WickPolynomial& other) const {
        if (basis_ != other.basis_)
            throw Error("cannot combine polynomials in different bases");
        if (basis_ == Basis::Appell && model_id_ != other.model_id_)
            throw Error("cannot combine Appell polynomials of different models: '" +
                        model_id_ + "' vs '" + other.model_id_ + "'");
    }

    Basis basis_ = Basis::Monomial;
    std::string model_id_;
    std::map<Multiset, K> terms_;
};

template <class K>
std::string coeff_string(const K& c) {
    if constexpr (scalar_traits<K>::exact) {
        return to_string(c);
    } else {
        std::ostringstream out;
        out << c;
        return out.str();
    }
}

template <class K>
std::string WickPolynomial<K>::pretty() const {
    auto syms = symbols();
    const bool appell = basis_ == Basis::Appell;
    if (syms.size() <= 1 && !appell) {
        // dense univariate rendering, highest degree first
        Symbol s = syms.empty() ? Symbol("x") : *syms.begin();
        int deg = degree();
        std::string out;
        for (int k = deg; k >= 0; --k) {
            K c = coefficient(Multiset::power(s, k));
            std::string cs = coeff_string(c);
            bool negative = !cs.empty() && cs[0] == '-';
            std::string mag = negative ? cs.substr(1) : cs;
            if (k == deg)
                out += negative ? "-" : "";
            else
                out += negative ? " - " : " + ";
            if (k == 0) {
                out += mag;
            } else {
                if (mag != "1") out += mag;
                out += s;
                if (k > 1) out += "^" + std::to_string(k);
            }
        }
        return out.empty() ? "0" : out;
    }
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [I, c] : terms_) {
        std::string cs = coeff_string(c);
        bool negative = !cs.empty() && cs[0] == '-';
        std::string mag = negative ? cs.substr(1) : cs;
        out += first ? (negative ? "-" : "") : (negative ? " - " : " + ");
        first = false;
        std::string body;
        if (appell) {
            body = "A(" + I.canonical_string() + ")";
        } else if (!I.empty()) {
            for (const auto& [s, k] : I.entries()) {
                if (!body.empty()) body += "*";
                body += s;
                if (k > 1) body += "^" + std::to_string(k);
            }
        }
        if (body.empty()) {
            out += mag;
        } else {
            if (mag != "1") out += mag + "*";
            out += body;
        }
    }
    return out;
}

/// Substitutes monomial-basis polynomials for symbols (symbols not in the
/// map are left alone).
template <class K>
WickPolynomial<K> substitute(const WickPolynomial<K>& p,
                             const std::map<Symbol, WickPolynomial<K>>& repl) {
    if (p.basis() != Basis::Monomial)
        throw Error("substitution requires the monomial basis");
    WickPolynomial<K> out(Basis::Monomial);
    for (const auto& [I, c] : p.terms()) {
        WickPolynomial<K> term = WickPolynomial<K>::constant(c);
        for (const auto& [s, k] : I.entries()) {
            auto it = repl.find(s);
            WickPolynomial<K> base = it == repl.end()
                ? WickPolynomial<K>::monomial(Multiset{s})
                : it->second;
            term = term * base.pow(k);
        }
        out += term;
    }
    return out;
}

} // namespace wick
