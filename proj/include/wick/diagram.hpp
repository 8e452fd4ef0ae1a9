#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wick/combinatorics.hpp"
#include "wick/multiset.hpp"

namespace wick {

/// Rows of labeled node slots. Slot identity is (row, position); the
/// multiset of symbols in row j is the row multiset I_j.
struct NodeSet {
    std::vector<std::vector<Symbol>> rows;

    static NodeSet from_rows(const std::vector<Multiset>& row_multisets);

    std::size_t slot_count() const;
    std::vector<SlotId> all_slots() const; // lexicographic by (row, pos)
    const Symbol& symbol_at(SlotId s) const { return rows.at(s.row).at(s.pos); }
    Multiset row_multiset(int row) const;
    Multiset symbols_of(const std::vector<SlotId>& slots) const;
};

/// Partial diagram D = (pi, K): an edge partition `edges` over a subset of
/// slots and the complementary residual set K. Edges with a single slot are
/// allowed (they carry first-order cumulants of non-centred variables) and
/// count as flat.
struct Diagram {
    NodeSet nodes;
    std::vector<std::vector<SlotId>> edges;
    std::vector<SlotId> residual;

    bool is_total() const { return residual.empty(); }
    bool is_non_flat() const;
    bool is_gaussian() const;
    bool is_connected() const;

    /// Edges plus the residual set as one extra block (when nonempty).
    SetPartition total_partition() const;

    /// Partition of row ids under the relation generated by blocks of the
    /// total partition touching common rows. The residual set counts as a
    /// single block.
    std::vector<std::vector<int>> connected_components() const;

    std::string to_json() const;
    static Diagram from_json(const std::string& text);
};

struct DiagramFilter {
    bool non_flat = false;
    bool connected = false;
    bool total = false;
    bool gaussian = false;
};

/// Enumerates every diagram over the given rows that satisfies all
/// requested predicates, exactly once, in a deterministic canonical order:
/// ascending edge-carrier subsets of the lex-ordered slots, then
/// restricted-growth order of the edge partition.
void enumerate_diagrams(const std::vector<Multiset>& rows,
                        const DiagramFilter& filter,
                        const std::function<void(const Diagram&)>& visit,
                        std::size_t cap = slot_cap());

std::size_t count_diagrams(const std::vector<Multiset>& rows,
                           const DiagramFilter& filter,
                           std::size_t cap = slot_cap());

} // namespace wick
