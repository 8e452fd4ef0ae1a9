#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "wick/errors.hpp"

namespace wick {

using Symbol = std::string;

/// Finite multiset of index symbols with positive multiplicities.
/// This is the exponent object of monomials: a term x^I is keyed by one
/// of these.
class Multiset {
public:
    Multiset() = default;

    Multiset(std::initializer_list<Symbol> symbols) {
        for (const auto& s : symbols) add(s);
    }

    static Multiset from_symbols(const std::vector<Symbol>& symbols) {
        Multiset m;
        for (const auto& s : symbols) m.add(s);
        return m;
    }

    /// n copies of a single symbol.
    static Multiset power(const Symbol& s, int n) {
        Multiset m;
        m.add(s, n);
        return m;
    }

    void add(const Symbol& s, int k = 1) {
        if (k == 0) return;
        auto it = entries_.find(s);
        int next = (it == entries_.end() ? 0 : it->second) + k;
        if (next < 0) throw Error("multiset multiplicity would become negative");
        if (next == 0)
            entries_.erase(s);
        else
            entries_[s] = next;
    }

    int count(const Symbol& s) const {
        auto it = entries_.find(s);
        return it == entries_.end() ? 0 : it->second;
    }

    int total_size() const {
        int n = 0;
        for (const auto& [s, k] : entries_) n += k;
        return n;
    }

    bool empty() const { return entries_.empty(); }

    const std::map<Symbol, int>& entries() const { return entries_; }

    /// Multiset union (adds multiplicities), the I ⊔ J of product terms.
    Multiset operator+(const Multiset& other) const {
        Multiset m = *this;
        for (const auto& [s, k] : other.entries_) m.add(s, k);
        return m;
    }

    /// Multiset difference; requires other ⊆ this.
    Multiset operator-(const Multiset& other) const {
        Multiset m = *this;
        for (const auto& [s, k] : other.entries_) m.add(s, -k);
        return m;
    }

    bool contains(const Multiset& other) const {
        for (const auto& [s, k] : other.entries_)
            if (count(s) < k) return false;
        return true;
    }

    /// Expanded list of symbols, each repeated by its multiplicity,
    /// in sorted order.
    std::vector<Symbol> to_symbols() const {
        std::vector<Symbol> out;
        out.reserve(static_cast<std::size_t>(total_size()));
        for (const auto& [s, k] : entries_)
            for (int i = 0; i < k; ++i) out.push_back(s);
        return out;
    }

    /// Canonical form used in JSON keys: sorted symbols joined by commas,
    /// empty string for the empty multiset.
    std::string canonical_string() const {
        std::string out;
        bool first = true;
        for (const auto& [s, k] : entries_)
            for (int i = 0; i < k; ++i) {
                if (!first) out += ',';
                out += s;
                first = false;
            }
        return out;
    }

    static Multiset parse(const std::string& text) {
        Multiset m;
        std::string tok;
        std::istringstream in(text);
        while (std::getline(in, tok, ',')) {
            // allow "sym^k" shorthand
            auto caret = tok.find('^');
            if (caret != std::string::npos) {
                m.add(tok.substr(0, caret), std::stoi(tok.substr(caret + 1)));
            } else if (!tok.empty()) {
                m.add(tok);
            }
        }
        return m;
    }

    auto operator<=>(const Multiset&) const = default;

private:
    std::map<Symbol, int> entries_;
};

inline long long binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    long long r = 1;
    for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
    return r;
}

/// Multiplicity of J in I: the number of identity-preserving injections
/// J into I, i.e. the product over symbols of binomial(I(s), J(s)).
/// Returns 0 when J is not a submultiset of I.
inline long long multiplicity_coefficient(const Multiset& I, const Multiset& J) {
    long long c = 1;
    for (const auto& [s, k] : J.entries()) {
        c *= binomial(I.count(s), k);
        if (c == 0) return 0;
    }
    return c;
}

/// Visit every distinct submultiset of I (including the empty one and I
/// itself) exactly once, odometer order over per-symbol counts.
inline void for_each_submultiset(const Multiset& I,
                                 const std::function<void(const Multiset&)>& visit) {
    std::vector<std::pair<Symbol, int>> syms(I.entries().begin(), I.entries().end());
    std::vector<int> take(syms.size(), 0);
    for (;;) {
        Multiset J;
        for (std::size_t i = 0; i < syms.size(); ++i)
            if (take[i] > 0) J.add(syms[i].first, take[i]);
        visit(J);
        std::size_t i = 0;
        while (i < syms.size() && take[i] == syms[i].second) take[i++] = 0;
        if (i == syms.size()) break;
        ++take[i];
    }
}

} // namespace wick
