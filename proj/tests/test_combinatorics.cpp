#include <doctest.h>

#include <set>

#include "oracles.hpp"
#include "wick/combinatorics.hpp"
#include "wick/diagram.hpp"

using namespace wick;

TEST_CASE("set partition counts match the Bell triangle") {
    auto bell = oracle::bell_numbers(10);
    for (int n = 0; n <= 10; ++n) {
        std::vector<SlotId> ground;
        for (int i = 0; i < n; ++i) ground.push_back({0, i});
        std::size_t count = 0;
        enumerate_set_partitions(ground, [&](const SetPartition& p) {
            CHECK(p.is_valid());
            ++count;
        });
        CHECK(count == static_cast<std::size_t>(bell[n]));
    }
}

TEST_CASE("two slots give the two partitions, zero slots give the empty one") {
    std::vector<SlotId> two{{0, 0}, {0, 1}};
    auto parts = all_set_partitions(two);
    REQUIRE(parts.size() == 2);
    CHECK(parts[0].blocks.size() == 1); // restricted-growth order: {ab} first
    CHECK(parts[1].blocks.size() == 2);

    auto empty = all_set_partitions({});
    REQUIRE(empty.size() == 1);
    CHECK(empty[0].blocks.empty());
}

TEST_CASE("partition stream agrees with an independent recursive enumeration") {
    for (int n = 1; n <= 6; ++n) {
        std::vector<SlotId> ground;
        for (int i = 0; i < n; ++i) ground.push_back({0, i});
        std::set<std::vector<std::vector<int>>> ours;
        enumerate_set_partitions(ground, [&](const SetPartition& p) {
            std::vector<std::vector<int>> blocks;
            for (const auto& b : p.blocks) {
                std::vector<int> ids;
                for (const auto& s : b) ids.push_back(s.pos);
                std::sort(ids.begin(), ids.end());
                blocks.push_back(ids);
            }
            std::sort(blocks.begin(), blocks.end());
            CHECK(ours.insert(blocks).second); // exactly once
        });
        std::set<std::vector<std::vector<int>>> reference;
        for (auto blocks : oracle::partitions_recursive(n)) {
            for (auto& b : blocks) std::sort(b.begin(), b.end());
            std::sort(blocks.begin(), blocks.end());
            reference.insert(blocks);
        }
        CHECK(ours == reference);
    }
}

TEST_CASE("enumeration cap") {
    std::vector<SlotId> ground;
    for (int i = 0; i < 13; ++i) ground.push_back({0, i});
    CHECK_THROWS_AS(all_set_partitions(ground), SizeLimitError);
    try {
        all_set_partitions(ground);
    } catch (const SizeLimitError& e) {
        CHECK(std::string(e.what()).find("12") != std::string::npos);
    }
}

TEST_CASE("multiplicity coefficient counts identity-preserving injections") {
    Multiset I{"x", "x", "y"};
    CHECK(multiplicity_coefficient(I, Multiset{"x", "y"}) == 2);
    CHECK(multiplicity_coefficient(I, Multiset{}) == 1);
    CHECK(multiplicity_coefficient(Multiset::power("x", 5), Multiset::power("x", 2)) == 10);
    CHECK(multiplicity_coefficient(Multiset{"x"}, Multiset{"z"}) == 0);

    // brute force cross-check on a mixed shape
    wick::CounterRng rng(7, 1);
    std::vector<Multiset> shapes{
        {"x", "x", "y"}, {"x", "x", "x", "y", "y"}, {"a", "b", "c"}, {"x", "x", "x", "x"}};
    for (const auto& big : shapes) {
        for_each_submultiset(big, [&](const Multiset& sub) {
            CHECK(multiplicity_coefficient(big, sub) == oracle::injection_count(big, sub));
        });
    }
}

TEST_CASE("stirling2 and touchard") {
    CHECK(stirling2(0, 0) == 1);
    CHECK(stirling2(3, 0) == 0);
    CHECK(stirling2(4, 2) == 7);
    CHECK(stirling2(5, 5) == 1);

    // touchard(3, -lambda) = -lambda^3 + 3 lambda^2 - lambda
    for (long long l = 1; l <= 4; ++l) {
        Rational x(-l);
        Rational expected = -Rational(l * l * l) + Rational(3 * l * l) - Rational(l);
        CHECK(touchard(3, x) == expected);
    }
}

TEST_CASE("diagram counts from the worked second-chaos examples") {
    std::vector<Multiset> rows2{Multiset::power("x", 2), Multiset::power("x", 2)};
    DiagramFilter f;
    f.total = true;
    f.non_flat = true;
    f.gaussian = true;
    CHECK(count_diagrams(rows2, f) == 2);

    std::vector<Multiset> rows3{Multiset::power("x", 2), Multiset::power("x", 2),
                                Multiset::power("x", 2)};
    f.connected = true;
    CHECK(count_diagrams(rows3, f) == 8);
}

TEST_CASE("connected pairings of m rows of two slots number 2^{m-1} (m-1)!") {
    for (int m = 2; m <= 5; ++m) {
        std::vector<Multiset> rows(m, Multiset::power("x", 2));
        DiagramFilter f;
        f.total = true;
        f.non_flat = true;
        f.gaussian = true;
        f.connected = true;
        long long expected = 1;
        for (int k = 2; k < m; ++k) expected *= k;
        expected <<= (m - 1);
        CHECK(count_diagrams(rows, f) == static_cast<std::size_t>(expected));
    }
}

TEST_CASE("unfiltered diagram count equals the subset-partition double count") {
    // sum over carrier subsets S of B(|S|) = B(n+1) for n slots
    auto bell = oracle::bell_numbers(9);
    std::vector<Multiset> rows{{"x", "y"}, {"x"}, {"y", "y", "z"}};
    int n = 6;
    DiagramFilter none;
    CHECK(count_diagrams(rows, none) == static_cast<std::size_t>(bell[n + 1]));
}

TEST_CASE("connected components follow the total partition") {
    // residual spanning all rows makes everything one component
    Diagram d;
    d.nodes = NodeSet::from_rows({{"x"}, {"y"}});
    d.residual = d.nodes.all_slots();
    CHECK(d.connected_components().size() == 1);
    CHECK(!d.is_total());

    // one cross edge joins two rows
    Diagram d2;
    d2.nodes = NodeSet::from_rows({{"x"}, {"y"}});
    d2.edges = {{{0, 0}, {1, 0}}};
    CHECK(d2.is_total());
    CHECK(d2.connected_components().size() == 1);

    // five rows; edges wire rows 1-3 together, rows 4-5 together, and the
    // residual sits inside row 4 only: two components
    Diagram d3;
    d3.nodes = NodeSet::from_rows({Multiset::power("a", 3), Multiset::power("b", 3),
                                   Multiset::power("c", 3), Multiset::power("d", 5),
                                   Multiset{"e"}});
    d3.edges = {{{0, 0}, {1, 1}},
                {{0, 1}, {1, 2}, {2, 0}},
                {{1, 0}, {2, 1}},
                {{0, 2}, {2, 2}},
                {{3, 0}, {3, 1}, {4, 0}}};
    d3.residual = {{3, 2}, {3, 3}, {3, 4}};
    CHECK(d3.total_partition().is_valid());
    auto comps = d3.connected_components();
    REQUIRE(comps.size() == 2);
    CHECK(comps[0] == std::vector<int>{0, 1, 2});
    CHECK(comps[1] == std::vector<int>{3, 4});

    // the second worked diagram: connected only through the residual set
    Diagram d4;
    d4.nodes = NodeSet::from_rows({Multiset::power("a", 6), Multiset::power("b", 3),
                                   Multiset::power("c", 3), Multiset::power("d", 3)});
    d4.edges = {{{0, 0}, {1, 0}}, {{0, 2}, {0, 4}}, {{2, 0}, {3, 0}, {3, 1}}, {{2, 1}, {3, 2}}};
    d4.residual = {{0, 1}, {0, 3}, {0, 5}, {1, 1}, {1, 2}, {2, 2}};
    CHECK(d4.connected_components().size() == 1);
    CHECK(!d4.is_non_flat()); // it has a flat edge in the first row
}

TEST_CASE("total iff residual empty; predicates") {
    Diagram d;
    d.nodes = NodeSet::from_rows({{"x", "x"}, {"y"}});
    d.edges = {{{0, 0}, {1, 0}}};
    d.residual = {{0, 1}};
    CHECK(!d.is_total());
    CHECK(d.is_non_flat());
    CHECK(!d.is_gaussian()); // a singleton residual is not an edge; edges are pairs
    d.edges.push_back({{0, 1}});
    d.residual.clear();
    CHECK(d.is_total());
    CHECK(!d.is_non_flat()); // singleton edge inside one row is flat
    CHECK(!d.is_gaussian());
}

TEST_CASE("diagram enumeration is deterministic and serialization round-trips") {
    std::vector<Multiset> rows{{"x", "y"}, {"x", "x"}};
    DiagramFilter f;
    auto dump_all = [&]() {
        std::string all;
        enumerate_diagrams(rows, f, [&](const Diagram& d) {
            all += d.to_json();
            all += '\n';
        });
        return all;
    };
    std::string first = dump_all();
    std::string second = dump_all();
    CHECK(first == second);
    CHECK(!first.empty());

    enumerate_diagrams(rows, f, [&](const Diagram& d) {
        Diagram back = Diagram::from_json(d.to_json());
        CHECK(back.to_json() == d.to_json());
    });
}

TEST_CASE("gaussian matching fast path agrees with the generic enumerator") {
    std::vector<Multiset> rows{Multiset::power("x", 2), Multiset::power("x", 2),
                               Multiset::power("x", 2)};
    DiagramFilter matching;
    matching.total = true;
    matching.gaussian = true;
    std::size_t fast = count_diagrams(rows, matching);

    // generic path: all total partitions filtered to pair blocks
    DiagramFilter total_only;
    total_only.total = true;
    std::size_t generic = 0;
    enumerate_diagrams(rows, total_only, [&](const Diagram& d) {
        if (d.is_gaussian()) ++generic;
    });
    CHECK(fast == generic);
    CHECK(fast == 15); // perfect matchings of 6 slots
}
