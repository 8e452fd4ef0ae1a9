#include "wick/diagram.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <set>

#include <json.hpp>

namespace wick {

SlotId SlotId::parse(const std::string& s) {
    if (s.size() < 4 || s[0] != 'r') throw Error("bad slot id: " + s);
    auto colon = s.find(':');
    if (colon == std::string::npos) throw Error("bad slot id: " + s);
    return SlotId{std::stoi(s.substr(1, colon - 1)), std::stoi(s.substr(colon + 1))};
}

bool SetPartition::is_valid() const {
    std::set<SlotId> seen;
    std::size_t total = 0;
    for (const auto& b : blocks) {
        if (b.empty()) return false;
        for (const auto& s : b) {
            if (!seen.insert(s).second) return false;
            ++total;
        }
    }
    if (total != ground.size()) return false;
    for (const auto& s : ground)
        if (!seen.count(s)) return false;
    return true;
}

void enumerate_restricted_growth(std::size_t n,
                                 const std::function<void(const std::vector<int>&)>& visit) {
    std::vector<int> a(n, 0);
    if (n == 0) {
        visit(a);
        return;
    }
    // depth-first assignment a[i] <= 1 + max(a[0..i-1]) gives lexicographic
    // restricted-growth order
    std::function<void(std::size_t, int)> rec = [&](std::size_t i, int max_used) {
        if (i == n) {
            visit(a);
            return;
        }
        for (int v = 0; v <= max_used + 1; ++v) {
            a[i] = v;
            rec(i + 1, std::max(max_used, v));
        }
    };
    rec(1, 0); // a[0] is fixed at 0
}

SetPartition partition_from_rgs(const std::vector<SlotId>& ground,
                                const std::vector<int>& rgs) {
    SetPartition p;
    p.ground = ground;
    int nblocks = rgs.empty() ? 0 : *std::max_element(rgs.begin(), rgs.end()) + 1;
    p.blocks.resize(nblocks);
    for (std::size_t i = 0; i < rgs.size(); ++i) p.blocks[rgs[i]].push_back(ground[i]);
    return p;
}

void enumerate_set_partitions(const std::vector<SlotId>& ground,
                              const std::function<void(const SetPartition&)>& visit,
                              std::size_t cap) {
    check_slot_cap(ground.size(), cap);
    enumerate_restricted_growth(ground.size(), [&](const std::vector<int>& rgs) {
        visit(partition_from_rgs(ground, rgs));
    });
}

std::vector<SetPartition> all_set_partitions(const std::vector<SlotId>& ground,
                                             std::size_t cap) {
    std::vector<SetPartition> out;
    enumerate_set_partitions(ground, [&](const SetPartition& p) { out.push_back(p); }, cap);
    return out;
}

long long stirling2(int m, int h) {
    if (m < 0 || h < 0) throw Error("stirling2 requires nonnegative arguments");
    if (h > m) return 0;
    if (m == 0) return h == 0 ? 1 : 0;
    if (h == 0) return 0;
    std::vector<std::vector<long long>> s(m + 1, std::vector<long long>(h + 1, 0));
    s[0][0] = 1;
    for (int i = 1; i <= m; ++i)
        for (int j = 1; j <= std::min(i, h); ++j)
            s[i][j] = s[i - 1][j - 1] + static_cast<long long>(j) * s[i - 1][j];
    return s[m][h];
}

NodeSet NodeSet::from_rows(const std::vector<Multiset>& row_multisets) {
    NodeSet ns;
    ns.rows.reserve(row_multisets.size());
    for (const auto& m : row_multisets) ns.rows.push_back(m.to_symbols());
    return ns;
}

std::size_t NodeSet::slot_count() const {
    std::size_t n = 0;
    for (const auto& r : rows) n += r.size();
    return n;
}

std::vector<SlotId> NodeSet::all_slots() const {
    std::vector<SlotId> out;
    out.reserve(slot_count());
    for (int r = 0; r < static_cast<int>(rows.size()); ++r)
        for (int p = 0; p < static_cast<int>(rows[r].size()); ++p)
            out.push_back(SlotId{r, p});
    return out;
}

Multiset NodeSet::row_multiset(int row) const {
    return Multiset::from_symbols(rows.at(row));
}

Multiset NodeSet::symbols_of(const std::vector<SlotId>& slots) const {
    Multiset m;
    for (const auto& s : slots) m.add(symbol_at(s));
    return m;
}

bool Diagram::is_non_flat() const {
    for (const auto& e : edges) {
        bool one_row = true;
        for (const auto& s : e)
            if (s.row != e.front().row) {
                one_row = false;
                break;
            }
        if (one_row) return false;
    }
    return true;
}

bool Diagram::is_gaussian() const {
    for (const auto& e : edges)
        if (e.size() != 2) return false;
    return true;
}

SetPartition Diagram::total_partition() const {
    SetPartition p;
    p.ground = nodes.all_slots();
    p.blocks = edges;
    if (!residual.empty()) p.blocks.push_back(residual);
    return p;
}

std::vector<std::vector<int>> Diagram::connected_components() const {
    int m = static_cast<int>(nodes.rows.size());
    std::vector<int> parent(m);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    auto unite = [&](int a, int b) { parent[find(a)] = find(b); };

    SetPartition pi_bar = total_partition();
    for (const auto& block : pi_bar.blocks)
        for (std::size_t i = 1; i < block.size(); ++i)
            unite(block[i - 1].row, block[i].row);

    std::vector<std::vector<int>> comps;
    std::vector<int> comp_of(m, -1);
    for (int r = 0; r < m; ++r) {
        int root = find(r);
        if (comp_of[root] < 0) {
            comp_of[root] = static_cast<int>(comps.size());
            comps.emplace_back();
        }
        comps[comp_of[root]].push_back(r);
    }
    return comps;
}

bool Diagram::is_connected() const { return connected_components().size() <= 1; }

std::string Diagram::to_json() const {
    nlohmann::json j;
    j["rows"] = nodes.rows;
    auto ids = [](const std::vector<SlotId>& v) {
        std::vector<std::string> out;
        out.reserve(v.size());
        for (const auto& s : v) out.push_back(s.to_string());
        return out;
    };
    j["edges"] = nlohmann::json::array();
    for (const auto& e : edges) j["edges"].push_back(ids(e));
    j["residual"] = ids(residual);
    return j.dump();
}

Diagram Diagram::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    Diagram d;
    d.nodes.rows = j.at("rows").get<std::vector<std::vector<Symbol>>>();
    for (const auto& e : j.at("edges")) {
        std::vector<SlotId> block;
        for (const auto& s : e) block.push_back(SlotId::parse(s.get<std::string>()));
        d.edges.push_back(std::move(block));
    }
    for (const auto& s : j.at("residual")) d.residual.push_back(SlotId::parse(s.get<std::string>()));
    return d;
}

namespace {

// Enumerates perfect matchings of `items`, always pairing the first
// unmatched slot with each later one in ascending order. Flat pairs are
// pruned when `non_flat` is set.
void enumerate_matchings(const std::vector<SlotId>& items, bool non_flat,
                         std::vector<std::vector<SlotId>>& acc,
                         const std::function<void(const std::vector<std::vector<SlotId>>&)>& done) {
    if (items.empty()) {
        done(acc);
        return;
    }
    const SlotId first = items.front();
    for (std::size_t i = 1; i < items.size(); ++i) {
        if (non_flat && items[i].row == first.row) continue;
        std::vector<SlotId> rest;
        rest.reserve(items.size() - 2);
        for (std::size_t k = 1; k < items.size(); ++k)
            if (k != i) rest.push_back(items[k]);
        acc.push_back({first, items[i]});
        enumerate_matchings(rest, non_flat, acc, done);
        acc.pop_back();
    }
}

} // namespace

void enumerate_diagrams(const std::vector<Multiset>& rows,
                        const DiagramFilter& filter,
                        const std::function<void(const Diagram&)>& visit,
                        std::size_t cap) {
    NodeSet nodes = NodeSet::from_rows(rows);
    const std::vector<SlotId> slots = nodes.all_slots();
    const std::size_t n = slots.size();
    check_slot_cap(n, std::min<std::size_t>(cap, 20)); // mask enumeration is 32-bit

    auto emit = [&](std::vector<std::vector<SlotId>> edges, std::vector<SlotId> residual) {
        Diagram d{nodes, std::move(edges), std::move(residual)};
        if (filter.connected && !d.is_connected()) return;
        visit(d);
    };

    auto run_mask = [&](std::uint32_t mask) {
        std::vector<SlotId> carrier, residual;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask & (1u << i))
                carrier.push_back(slots[i]);
            else
                residual.push_back(slots[i]);
        }
        if (filter.gaussian) {
            if (carrier.size() % 2 != 0) return;
            std::vector<std::vector<SlotId>> acc;
            enumerate_matchings(carrier, filter.non_flat, acc,
                                [&](const std::vector<std::vector<SlotId>>& edges) {
                                    emit(edges, residual);
                                });
        } else {
            enumerate_restricted_growth(carrier.size(), [&](const std::vector<int>& rgs) {
                auto part = partition_from_rgs(carrier, rgs);
                if (filter.non_flat) {
                    for (const auto& b : part.blocks) {
                        for (const auto& s : b)
                            if (s.row != b.front().row) goto next_block;
                        return; // some block lies in a single row
                    next_block:;
                    }
                }
                emit(part.blocks, residual);
            });
        }
    };

    if (filter.total) {
        run_mask((1u << n) - 1u);
    } else {
        for (std::uint32_t mask = 0; mask < (1u << n); ++mask) run_mask(mask);
    }
}

std::size_t count_diagrams(const std::vector<Multiset>& rows,
                           const DiagramFilter& filter,
                           std::size_t cap) {
    std::size_t n = 0;
    enumerate_diagrams(rows, filter, [&](const Diagram&) { ++n; }, cap);
    return n;
}

} // namespace wick
