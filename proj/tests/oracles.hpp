#pragma once

// Independent reference computations used as test oracles. Everything
// here recomputes expected values by a different algorithm than the
// library path it checks.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <vector>

#include "wick/cumulants.hpp"
#include "wick/multiset.hpp"
#include "wick/rational.hpp"
#include "wick/rng.hpp"

namespace oracle {

/// Bell numbers by the Bell triangle.
inline std::vector<long long> bell_numbers(int n_max) {
    std::vector<long long> bell{1};
    std::vector<long long> row{1};
    for (int n = 1; n <= n_max; ++n) {
        std::vector<long long> next(n + 1);
        next[0] = row.back();
        for (int k = 1; k <= n; ++k) next[k] = next[k - 1] + row[k - 1];
        bell.push_back(next[0]);
        row = std::move(next);
    }
    return bell; // bell[n] = B(n)
}

/// Set partitions by direct recursive block assignment (different
/// algorithm than restricted-growth enumeration).
inline std::vector<std::vector<std::vector<int>>> partitions_recursive(int n) {
    std::vector<std::vector<std::vector<int>>> out;
    std::vector<std::vector<int>> blocks;
    std::function<void(int)> rec = [&](int item) {
        if (item == n) {
            out.push_back(blocks);
            return;
        }
        for (auto& b : blocks) {
            b.push_back(item);
            rec(item + 1);
            b.pop_back();
        }
        blocks.push_back({item});
        rec(item + 1);
        blocks.pop_back();
    };
    rec(0);
    if (n == 0) out.push_back({});
    return out;
}

/// Count of identity-preserving injections J -> I by brute force over
/// ordered slot choices.
inline long long injection_count(const wick::Multiset& I, const wick::Multiset& J) {
    std::vector<wick::Symbol> islots = I.to_symbols();
    std::vector<wick::Symbol> jslots = J.to_symbols();
    std::vector<bool> used(islots.size(), false);
    std::function<long long(std::size_t)> rec = [&](std::size_t j) -> long long {
        if (j == jslots.size()) return 1;
        long long total = 0;
        for (std::size_t i = 0; i < islots.size(); ++i) {
            if (used[i] || islots[i] != jslots[j]) continue;
            used[i] = true;
            total += rec(j + 1);
            used[i] = false;
        }
        return total;
    };
    long long ordered = rec(0);
    // ordered placements count each injection once per ordering of equal
    // symbols in J; divide by the product of J-multiplicity factorials
    long long denom = 1;
    for (const auto& [s, k] : J.entries())
        for (int i = 2; i <= k; ++i) denom *= i;
    return ordered / denom;
}

/// Deterministic pseudo-random rational cumulant table over the given
/// symbols, all orders up to max_order. Symmetric by construction (keyed
/// by multiset).
inline wick::TableModel<wick::Rational> random_table_model(
    const std::vector<wick::Symbol>& symbols, int max_order, std::uint64_t seed,
    bool centred = false) {
    wick::CounterRng rng(seed, 0x7ab1e);
    std::map<wick::Multiset, wick::Rational> table;
    std::function<void(wick::Multiset, std::size_t, int)> rec =
        [&](wick::Multiset ms, std::size_t from, int remaining) {
            if (!ms.empty()) {
                long long num =
                    static_cast<long long>(rng.next_u64() % 19) - 9; // in [-9, 9]
                long long den = 1 + static_cast<long long>(rng.next_u64() % 4);
                if (centred && ms.total_size() == 1) num = 0;
                table[ms] = wick::Rational(num, den);
            }
            if (remaining == 0) return;
            for (std::size_t i = from; i < symbols.size(); ++i) {
                wick::Multiset next = ms;
                next.add(symbols[i]);
                rec(std::move(next), i, remaining - 1);
            }
        };
    rec(wick::Multiset{}, 0, max_order);
    return wick::TableModel<wick::Rational>("table-seed" + std::to_string(seed),
                                            std::move(table), max_order,
                                            /*relation_free=*/true);
}

} // namespace oracle
