#include <strongcol/graph.hpp>
#include <strongcol/partition.hpp>
#include <strongcol/sparse.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace strongcol;

namespace {

struct Instance
{
    Graph g;
    std::vector<Part> parts;
};

/// G(n, p) with disjoint random parts of size ceil((1+eps) Δ).
Instance sparse_instance(std::size_t n, double p, std::uint64_t seed, double eps = 0.2)
{
    Graph g = gen_gnp({n, p, seed});
    const std::size_t delta = max_degree(g).degree;
    const auto size = static_cast<std::size_t>(std::ceil((1.0 + eps) * static_cast<double>(delta)));
    auto parts = random_disjoint_parts(n, size, n / size, mix_seed(seed, 5));
    return {std::move(g), std::move(parts)};
}

} // namespace

TEST(Sparse, EdgelessShortCircuits)
{
    Graph g(9);
    std::vector<Part> parts{{0, 1, 2}, {3, 4, 5}, {6, 7, 8}};
    auto run = sparse_transversal(g, parts, {}, 1);
    ASSERT_TRUE(run.transversal);
    EXPECT_TRUE(verify_transversal(g, parts, *run.transversal));
    EXPECT_TRUE(run.short_circuit);
    ASSERT_EQ(run.first_chain.size(), 1u);
    EXPECT_TRUE(run.first_chain.front().empty());
}

TEST(Sparse, NoParts)
{
    auto run = sparse_transversal(Graph(3), std::vector<Part>{}, {}, 1);
    ASSERT_TRUE(run.transversal);
    EXPECT_TRUE(run.transversal->choice.empty());
}

TEST(Sparse, PartsBelowThresholdAreRejected)
{
    Graph g = cycle_graph(6);
    std::vector<Part> parts{{0, 3}, {1, 4}};
    EXPECT_THROW(sparse_transversal(g, parts, {}, 1), PreconditionError);
}

TEST(Sparse, ConfigValidation)
{
    Graph g(4);
    std::vector<Part> parts{{0, 1}, {2, 3}};
    SparseConfig bad;
    bad.epsilon = 0;
    EXPECT_THROW(sparse_transversal(g, parts, bad, 1), ConfigError);
    SparseConfig neg;
    neg.heavy_threshold = -1.0;
    EXPECT_THROW(sparse_transversal(g, parts, neg, 1), ConfigError);
    SparseConfig cap;
    cap.resample_cap = 0;
    EXPECT_THROW(sparse_transversal(g, parts, cap, 1), ConfigError);
}

TEST(Sparse, ResolvedDefaults)
{
    auto p = resolve({}, 1000, 50);
    EXPECT_NEAR(p.locally_big, 50.0 / std::log(1000.0), 1e-12);
    EXPECT_NEAR(p.almost_locally_big, 25.0 / std::log(1000.0), 1e-12);
    EXPECT_NEAR(p.heavy, 50.0 / std::log(50.0), 1e-12);
    EXPECT_NEAR(p.first_beta, 1200.0, 1e-9);
    EXPECT_NEAR(p.second_beta, 3000.0, 1e-9);
    EXPECT_NEAR(p.clique_cap, 4.0 * std::log(1000.0), 1e-12);
    EXPECT_LE(p.sample_rate, 1.0);
}

TEST(Sparse, LocallyBigMatchesRecount)
{
    auto inst = sparse_instance(600, 0.03, 3);
    const double threshold = 3.0;
    auto big = locally_big_sets(inst.g, inst.parts, threshold);
    ASSERT_EQ(big.size(), inst.parts.size());
    std::vector<char> in_union(inst.g.size(), 0);
    for (const auto & part : inst.parts)
        for (Vertex v : part)
            in_union[v] = 1;
    for (std::size_t i = 0; i < inst.parts.size(); ++i) {
        std::vector<Vertex> expected;
        for (Vertex v = 0; v < inst.g.size(); ++v) {
            if (! in_union[v])
                continue;
            std::size_t count = 0;
            for (Vertex u : inst.parts[i])
                count += inst.g.adjacent(u, v) ? 1 : 0;
            if (static_cast<double>(count) > threshold)
                expected.push_back(v);
        }
        EXPECT_EQ(big[i], expected) << "part " << i;
    }
}

TEST(Sparse, SucceedsOnModerateInstances)
{
    for (std::uint64_t s = 0; s < 5; ++s) {
        auto inst = sparse_instance(4000, 0.005, s);
        auto run = sparse_transversal(inst.g, inst.parts, {}, s);
        ASSERT_TRUE(run.transversal) << "seed " << s << ": " << run.failure;
        EXPECT_TRUE(verify_transversal(inst.g, inst.parts, *run.transversal));
        EXPECT_FALSE(run.short_circuit);
        ASSERT_FALSE(run.first_chain.empty());
        EXPECT_TRUE(run.first_chain.back().empty());
        ASSERT_FALSE(run.second_chain.empty());
        EXPECT_TRUE(run.second_chain.back().empty());
    }
}

TEST(Sparse, ChainsAreNested)
{
    auto inst = sparse_instance(4000, 0.005, 1);
    auto run = sparse_transversal(inst.g, inst.parts, {}, 1);
    for (const auto * chain : {&run.first_chain, &run.second_chain})
        for (std::size_t t = 1; t < chain->size(); ++t) {
            EXPECT_LT((*chain)[t].size(), (*chain)[t - 1].size());
            for (std::size_t i : (*chain)[t])
                EXPECT_NE(std::find((*chain)[t - 1].begin(), (*chain)[t - 1].end(), i), (*chain)[t - 1].end());
        }
}

TEST(Sparse, Deterministic)
{
    auto inst = sparse_instance(4000, 0.005, 2);
    auto a = sparse_transversal(inst.g, inst.parts, {}, 9);
    auto b = sparse_transversal(inst.g, inst.parts, {}, 9);
    EXPECT_EQ(a.transversal, b.transversal);
    EXPECT_EQ(a.failure, b.failure);
}

TEST(Sparse, SmallExampleRateIsRecordedAndSound)
{
    std::size_t ok = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        auto inst = sparse_instance(2000, 0.01, s);
        auto run = sparse_transversal(inst.g, inst.parts, {}, s);
        if (run.transversal) {
            ++ok;
            EXPECT_TRUE(verify_transversal(inst.g, inst.parts, *run.transversal));
        }
        else {
            EXPECT_FALSE(run.failure.empty());
        }
    }
    RecordProperty("successes_of_20", static_cast<int>(ok));
}
