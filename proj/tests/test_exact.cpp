#include "oracles.hpp"

#include <strongcol/exact.hpp>
#include <strongcol/graph.hpp>
#include <strongcol/partition.hpp>

#include <gtest/gtest.h>

#include <functional>
#include <set>

using namespace strongcol;

namespace {

/// Plain k-coloring of g with a clique added on every part.
bool augmented_colorable(const Graph & g, const VertexPartition & vp)
{
    Graph h = g;
    for (const auto & part : vp.parts)
        add_clique(h, part);
    std::vector<std::size_t> color(h.size(), vp.k);
    std::function<bool(Vertex)> rec = [&](Vertex v) {
        if (v == h.size())
            return true;
        for (std::size_t c = 0; c < vp.k; ++c) {
            bool ok = true;
            for (Vertex u = 0; u < v && ok; ++u)
                ok = ! (h.adjacent(u, v) && color[u] == c);
            if (! ok)
                continue;
            color[v] = c;
            if (rec(v + 1))
                return true;
        }
        color[v] = vp.k;
        return false;
    };
    return rec(0);
}

Graph two_k22_padded() { return pad_isolated(disjoint_complete_bipartite(2, 2), 3); }

} // namespace

TEST(EqualPartitions, Counts)
{
    auto count = [](std::size_t m, std::size_t k) {
        std::size_t c = 0;
        std::set<std::vector<Part>> distinct;
        for_each_equal_partition(m, k, [&](const std::vector<Part> & parts) {
            ++c;
            distinct.insert(parts);
        });
        EXPECT_EQ(distinct.size(), c);
        return c;
    };
    EXPECT_EQ(count(6, 3), 10u);
    EXPECT_EQ(count(6, 2), 15u);
    EXPECT_EQ(count(8, 4), 35u);
    EXPECT_EQ(count(9, 3), 280u);
    EXPECT_EQ(count(4, 1), 1u);
    EXPECT_THROW(count(5, 2), DomainError);
}

TEST(PartitionCheck, CompleteBipartitePair)
{
    Graph g = two_k22_padded();
    EXPECT_FALSE(is_strongly_k_colorable_for_partition(g, complete_bipartite_refutation(2, 2)));

    Graph k22 = pad_isolated(disjoint_complete_bipartite(2, 1), 3);
    VertexPartition sides{3, {{0, 1, 4}, {2, 3, 5}}};
    EXPECT_FALSE(is_strongly_k_colorable_for_partition(k22, sides));
}

TEST(PartitionCheck, CertificatesVerify)
{
    Graph g = cycle_graph(6);
    VertexPartition vp{3, {{0, 2, 4}, {1, 3, 5}}};
    auto c = find_rainbow_coloring(g, vp);
    ASSERT_TRUE(c);
    EXPECT_TRUE(verify_certificate(g, vp, *c));
}

TEST(PartitionCheck, SizeGuard)
{
    Graph g(30);
    auto vp = block_partition(30, 3);
    EXPECT_THROW(find_rainbow_coloring(g, vp), SizeError);
    EXPECT_TRUE(find_rainbow_coloring(g, vp, 30));
}

TEST(PartitionCheck, AgreesWithIndependentOracles)
{
    std::size_t positive = 0, negative = 0;
    for (std::uint64_t s = 0; s < 120; ++s) {
        Rng rng(s);
        const std::size_t k = 2 + rng.below(3);
        const std::size_t n = k * (2 + rng.below(2));
        Graph g = gen_gnp({n, 0.15 + 0.35 * rng.uniform(), s});
        auto vp = random_equal_partition(n, k, mix_seed(s, 4));
        const bool expected = augmented_colorable(g, vp);
        EXPECT_EQ(oracle::rainbow_coloring_exists(g, vp), expected) << "seed " << s;
        auto found = find_rainbow_coloring(g, vp);
        EXPECT_EQ(found.has_value(), expected) << "seed " << s;
        if (found) {
            EXPECT_TRUE(verify_certificate(g, vp, *found));
        }
        (expected ? positive : negative) += 1;
    }
    EXPECT_GT(positive, 0u);
    EXPECT_GT(negative, 0u);
}

TEST(StrongColorability, CompleteBipartitePair)
{
    Graph g = disjoint_complete_bipartite(2, 2);
    auto three = strongly_k_colorable(g, 3);
    EXPECT_FALSE(three.colorable);
    ASSERT_TRUE(three.refutation);
    EXPECT_FALSE(is_strongly_k_colorable_for_partition(pad_isolated(g, 3), *three.refutation));
    EXPECT_TRUE(strongly_k_colorable(g, 4).colorable);
}

TEST(StrongColorability, EdgelessAndGuard)
{
    EXPECT_TRUE(strongly_k_colorable(Graph(5), 1).colorable);
    EXPECT_TRUE(strongly_k_colorable(Graph(5), 2).colorable);
    EXPECT_THROW(strongly_k_colorable(Graph(9), 3), SizeError);
    EXPECT_THROW(strongly_k_colorable(Graph(4), 0), DomainError);
}

TEST(StrongColorability, SequentialAndParallelAgree)
{
    for (std::uint64_t s = 0; s < 6; ++s) {
        Graph g = gen_gnp({8, 0.3, s});
        const std::size_t k = max_degree(g).degree + 1;
        auto a = strongly_k_colorable(g, k, 8, 1);
        auto b = strongly_k_colorable(g, k, 8, 4);
        EXPECT_EQ(a.colorable, b.colorable);
        EXPECT_EQ(a.refutation, b.refutation);
    }
}

TEST(StrongChromatic, KnownValues)
{
    EXPECT_EQ(strong_chromatic_number_exact(cycle_graph(6)).value, 3u);
    EXPECT_EQ(strong_chromatic_number_exact(cycle_graph(9), 9).value, 3u);
    EXPECT_EQ(strong_chromatic_number_exact(complete_graph(4)).value, 4u);
    EXPECT_EQ(strong_chromatic_number_exact(Graph(5)).value, 1u);
    EXPECT_EQ(strong_chromatic_number_exact(Graph(0)).value, 1u);
    auto pair = strong_chromatic_number_exact(disjoint_complete_bipartite(2, 2));
    EXPECT_EQ(pair.value, 4u);
    ASSERT_TRUE(pair.refutation);
    EXPECT_EQ(pair.refutation->k, 3u);
    EXPECT_FALSE(is_strongly_k_colorable_for_partition(two_k22_padded(), *pair.refutation));
}

TEST(StrongChromatic, LowerBoundRefutation)
{
    auto star = strong_chromatic_number_exact(star_graph(3));
    EXPECT_EQ(star.value, 4u);
    ASSERT_TRUE(star.refutation);
    EXPECT_EQ(star.refutation->k, 3u);
    EXPECT_FALSE(is_strongly_k_colorable_for_partition(pad_isolated(star_graph(3), 3), *star.refutation));
}

TEST(StrongChromatic, BoundsAndMonotonicity)
{
    for (std::uint64_t s = 0; s < 10; ++s) {
        Graph g = gen_gnp({7, 0.35, s});
        auto r = strong_chromatic_number_exact(g);
        const std::size_t delta = max_degree(g).degree;
        EXPECT_GE(r.value, delta + 1);
        EXPECT_LE(r.value, std::max<std::size_t>(1, 2 * delta + 1));
        if (r.value < 7) {
            EXPECT_TRUE(strongly_k_colorable(g, r.value + 1).colorable);
        }
    }
    EXPECT_THROW(strong_chromatic_number_exact(Graph(9)), SizeError);
}
