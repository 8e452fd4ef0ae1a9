#pragma once

#include <compare>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "wick/errors.hpp"
#include "wick/multiset.hpp"

namespace wick {

/// Default cap on the number of labeled slots in any enumeration.
/// Bell(12) is about 4.2M partitions, which is the desk-scale ceiling.
/// Overridable through the WICK_SLOT_CAP environment variable.
inline std::size_t slot_cap() {
    static const std::size_t cap = [] {
        if (const char* env = std::getenv("WICK_SLOT_CAP")) {
            long v = std::atol(env);
            if (v > 0) return static_cast<std::size_t>(v);
        }
        return static_cast<std::size_t>(12);
    }();
    return cap;
}

inline void check_slot_cap(std::size_t n, std::size_t cap = slot_cap()) {
    if (n > cap) throw SizeLimitError(n, cap);
}

/// Identity of one node slot: position `pos` in row `row`.
struct SlotId {
    int row = 0;
    int pos = 0;
    auto operator<=>(const SlotId&) const = default;
    std::string to_string() const {
        return "r" + std::to_string(row) + ":" + std::to_string(pos);
    }
    static SlotId parse(const std::string& s);
};

/// Partition of a declared ground set of slots into disjoint nonempty
/// blocks. Blocks and slots within blocks are kept sorted.
struct SetPartition {
    std::vector<SlotId> ground;
    std::vector<std::vector<SlotId>> blocks;

    std::size_t size() const { return blocks.size(); }

    /// Checks disjointness, nonemptiness and exact cover of the ground set.
    bool is_valid() const;
};

/// Enumerates every set partition of the ground set exactly once, in
/// restricted-growth-string order, calling `visit` with the block index
/// assigned to each ground position. n == 0 yields the single empty
/// partition.
void enumerate_restricted_growth(std::size_t n,
                                 const std::function<void(const std::vector<int>&)>& visit);

SetPartition partition_from_rgs(const std::vector<SlotId>& ground,
                                const std::vector<int>& rgs);

void enumerate_set_partitions(const std::vector<SlotId>& ground,
                              const std::function<void(const SetPartition&)>& visit,
                              std::size_t cap = slot_cap());

std::vector<SetPartition> all_set_partitions(const std::vector<SlotId>& ground,
                                             std::size_t cap = slot_cap());

/// Stirling numbers of the second kind: partitions of m labeled items
/// into h nonempty blocks.
long long stirling2(int m, int h);

/// Touchard polynomial T_m evaluated at x, with T_0 = 1.
template <class K>
K touchard(int m, const K& x) {
    K acc(0);
    K xpow(1);
    for (int h = 0; h <= m; ++h) {
        if (h > 0) xpow = xpow * x;
        long long s = stirling2(m, h);
        if (s != 0) acc = acc + K(s) * xpow;
    }
    return acc;
}

} // namespace wick
