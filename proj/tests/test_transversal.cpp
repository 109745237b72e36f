#include "oracles.hpp"

#include <strongcol/graph.hpp>
#include <strongcol/partition.hpp>
#include <strongcol/transversal.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace strongcol;

namespace {

struct Instance
{
    Graph g;
    std::vector<Part> parts;
};

/// r <= 5 parts of size <= 4 drawn from G(n, p) with n <= 20.
Instance tiny_instance(std::uint64_t seed)
{
    Rng rng(seed);
    const std::size_t r = 2 + rng.below(4);
    const std::size_t size = 1 + rng.below(4);
    const std::size_t n = std::min<std::size_t>(20, r * size + rng.below(4));
    const double p = 0.15 + 0.6 * rng.uniform();
    Instance out{gen_gnp({n, p, mix_seed(seed, 1)}), random_disjoint_parts(n, size, r, mix_seed(seed, 2))};
    return out;
}

std::vector<Part> sides_of_k22() { return {{0, 1}, {2, 3}}; }

} // namespace

TEST(VerifyTransversal, Examples)
{
    Graph empty(6);
    std::vector<Part> parts{{0, 1}, {2, 3}, {4, 5}};
    Transversal t(3);
    t.choice = {1, 2, 5};
    EXPECT_TRUE(verify_transversal(empty, parts, t));

    Graph k22 = disjoint_complete_bipartite(2, 1);
    for (Vertex a : {0u, 1u})
        for (Vertex b : {2u, 3u}) {
            Transversal x(2);
            x.choice = {a, b};
            EXPECT_FALSE(verify_transversal(k22, sides_of_k22(), x));
        }
}

TEST(VerifyTransversal, RejectsPartialAndForeignChoices)
{
    Graph g(4);
    std::vector<Part> parts{{0, 1}, {2, 3}};
    Transversal partial(2);
    partial.choice = {0, std::nullopt};
    EXPECT_FALSE(verify_transversal(g, parts, partial));
    Transversal foreign(2);
    foreign.choice = {2, 3};
    EXPECT_FALSE(verify_transversal(g, parts, foreign));
    EXPECT_FALSE(verify_transversal(g, parts, Transversal(1)));
}

TEST(Greedy, NoCrossEdgesPicksLowest)
{
    Graph g(6);
    g.add_edge(0, 1);
    g.add_edge(2, 3);
    std::vector<Part> parts{{1, 0}, {3, 2}, {5, 4}};
    auto t = greedy_transversal(g, parts, 0.0);
    ASSERT_TRUE(t);
    EXPECT_EQ(t->choice, (std::vector<std::optional<Vertex>>{0, 2, 4}));
}

TEST(Greedy, SidesOfK22Absent)
{
    EXPECT_FALSE(greedy_transversal(disjoint_complete_bipartite(2, 1), sides_of_k22()));
}

TEST(Greedy, RejectsBadFraction)
{
    Graph g(2);
    std::vector<Part> parts{{0}, {1}};
    EXPECT_THROW(greedy_transversal(g, parts, 1.0), ConfigError);
    EXPECT_THROW(greedy_transversal(g, parts, -0.5), ConfigError);
}

TEST(Greedy, SoundAgainstExhaustiveOracle)
{
    std::size_t exists = 0, found = 0;
    for (std::uint64_t s = 0; s < 50; ++s) {
        Rng rng(s);
        const std::size_t r = 2 + rng.below(5);
        Graph g = gen_gnp({18, 0.2 + 0.3 * rng.uniform(), s});
        auto parts = random_disjoint_parts(18, 3, r, mix_seed(s, 9));
        const bool any = oracle::transversal_exists(g, parts);
        auto t = greedy_transversal(g, parts);
        exists += any ? 1 : 0;
        if (t) {
            ++found;
            EXPECT_TRUE(any);
            EXPECT_TRUE(verify_transversal(g, parts, *t));
        }
    }
    RecordProperty("exists", static_cast<int>(exists));
    RecordProperty("greedy_found", static_cast<int>(found));
    EXPECT_LE(found, exists);
}

TEST(Resampling, PerfectMatchingBetweenParts)
{
    Graph g(12);
    for (Vertex i = 0; i < 6; ++i)
        g.add_edge(i, 6 + i);
    std::vector<Part> parts{{0, 1, 2, 3, 4, 5}, {6, 7, 8, 9, 10, 11}};
    for (std::uint64_t s = 0; s < 20; ++s) {
        auto t = resampling_transversal(g, parts, 1000, s);
        ASSERT_TRUE(t);
        EXPECT_TRUE(verify_transversal(g, parts, *t));
    }
}

TEST(Resampling, SidesOfK22ExhaustCap)
{
    ResampleStats stats;
    EXPECT_FALSE(resampling_transversal(disjoint_complete_bipartite(2, 1), sides_of_k22(), 500, 3, &stats));
    EXPECT_EQ(stats.resamples, 500u);
}

TEST(Resampling, EmptyPartAndOverlap)
{
    Graph g(4);
    std::vector<Part> with_empty{{0}, {}};
    EXPECT_FALSE(resampling_transversal(g, with_empty, 10, 1));
    std::vector<Part> overlap{{0, 1}, {1, 2}};
    EXPECT_THROW(resampling_transversal(g, overlap, 10, 1), DomainError);
    auto none = resampling_transversal(g, std::vector<Part>{}, 10, 1);
    ASSERT_TRUE(none);
    EXPECT_TRUE(none->choice.empty());
}

TEST(Resampling, Deterministic)
{
    Graph g = gen_gnp({60, 0.1, 5});
    auto parts = random_disjoint_parts(60, 10, 6, 2);
    EXPECT_EQ(resampling_transversal(g, parts, 10000, 8), resampling_transversal(g, parts, 10000, 8));
}

TEST(Pinned, EdgelessAnyPins)
{
    Graph g(6);
    std::vector<Part> parts{{0, 1}, {2, 3}, {4, 5}};
    std::vector<Pin> pins{{0, 1}, {2, 4}};
    auto t = pinned_transversal(g, parts, pins, 1);
    ASSERT_TRUE(t);
    EXPECT_EQ(t->choice[0], 1u);
    EXPECT_EQ(t->choice[2], 4u);
    EXPECT_TRUE(verify_transversal(g, parts, *t));
}

TEST(Pinned, StarCenter)
{
    // parts {center, pads} and {leaves + one non-neighbor}
    Graph g(8); // 0 center, 1..3 leaves, 4..7 isolated
    for (Vertex leaf : {1u, 2u, 3u})
        g.add_edge(0, leaf);
    std::vector<Part> roomy{{0, 4, 5, 6}, {1, 2, 3, 7}};
    auto t = pinned_transversal(g, roomy, std::vector<Pin>{{0, 0}}, 2);
    ASSERT_TRUE(t);
    EXPECT_EQ(t->choice[1], 7u);

    std::vector<Part> tight{{0, 4, 5}, {1, 2, 3}};
    EXPECT_FALSE(pinned_transversal(g, tight, std::vector<Pin>{{0, 0}}, 2));
}

TEST(Pinned, PinErrors)
{
    Graph g(4);
    g.add_edge(0, 2);
    std::vector<Part> parts{{0, 1}, {2, 3}};
    EXPECT_THROW(pinned_transversal(g, parts, std::vector<Pin>{{0, 0}, {1, 2}}, 1), DomainError);
    EXPECT_THROW(pinned_transversal(g, parts, std::vector<Pin>{{0, 2}}, 1), DomainError);
    EXPECT_THROW(pinned_transversal(g, parts, std::vector<Pin>{{0, 0}, {0, 1}}, 1), DomainError);
    EXPECT_THROW(pinned_transversal(g, parts, std::vector<Pin>{{5, 0}}, 1), DomainError);
}

TEST(Pinned, DenseInstancesKeepMaxDegreePin)
{
    for (std::uint64_t s = 0; s < 20; ++s) {
        Graph g = gen_gnp({120, 0.3, s});
        const std::size_t k = max_degree(g).degree + 1;
        Graph padded = pad_isolated(g, k);
        auto vp = random_equal_partition(padded.size(), k, mix_seed(s, 3));
        const Vertex top = max_degree(padded).argmax.front();
        const std::size_t owner = part_index(vp.parts, padded.size())[top];
        auto t = pinned_transversal(padded, vp.parts, std::vector<Pin>{{owner, top}}, s);
        ASSERT_TRUE(t) << s;
        EXPECT_TRUE(verify_transversal(padded, vp.parts, *t));
        EXPECT_EQ(t->choice[owner], top);
    }
}

TEST(AlmostDominating, GrowThenMinimalize)
{
    // part {4,5,6,7}; vertex 0 dominates 4,5; vertex 1 dominates 6; vertex 2 dominates 7
    Graph g(8);
    g.add_edge(0, 4);
    g.add_edge(0, 5);
    g.add_edge(1, 6);
    g.add_edge(2, 7);
    std::vector<Part> parts{{0}, {1}, {2}, {4, 5, 6, 7}};
    VertexSet alive(8);
    for (Vertex v : {0u, 1u, 2u, 4u, 5u, 6u, 7u})
        alive.insert(v);
    auto pins = grow_almost_dominating(g, parts, alive, 3, 1);
    ASSERT_TRUE(pins);
    ASSERT_EQ(pins->size(), 2u);
    EXPECT_EQ((*pins)[0].vertex, 0u);
}

TEST(TinyInstances, ExhaustiveEquivalence)
{
    std::size_t infeasible = 0, feasible = 0, resample_hits = 0;
    for (std::uint64_t s = 0; s < 200; ++s) {
        auto inst = tiny_instance(s);
        const bool any = oracle::transversal_exists(inst.g, inst.parts);
        auto greedy = greedy_transversal(inst.g, inst.parts);
        auto lll = resampling_transversal(inst.g, inst.parts, 100000, s);
        auto pinned = pinned_transversal(inst.g, inst.parts, {}, s);
        for (const auto * t : {&greedy, &lll, &pinned}) {
            if (*t) {
                EXPECT_TRUE(verify_transversal(inst.g, inst.parts, **t)) << "seed " << s;
            }
        }
        if (! any) {
            ++infeasible;
            EXPECT_FALSE(greedy) << "seed " << s;
            EXPECT_FALSE(lll) << "seed " << s;
            EXPECT_FALSE(pinned) << "seed " << s;
        }
        else {
            ++feasible;
            resample_hits += lll ? 1 : 0;
        }
    }
    EXPECT_GT(infeasible, 0u);
    EXPECT_GT(feasible, 0u);
    EXPECT_GE(static_cast<double>(resample_hits), 0.99 * static_cast<double>(feasible));
}
