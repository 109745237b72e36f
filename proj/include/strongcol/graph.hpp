#pragma once

#include <strongcol/errors.hpp>
#include <strongcol/random.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace strongcol {

using Vertex = std::size_t;
using Word = std::uint64_t;

namespace bits {

inline constexpr std::size_t words_for(std::size_t n) noexcept { return (n + 63) / 64; }

inline std::size_t and_count(std::span<const Word> a, std::span<const Word> b) noexcept
{
    std::size_t total = 0;
    const std::size_t m = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < m; ++i)
        total += static_cast<std::size_t>(std::popcount(a[i] & b[i]));
    return total;
}

inline std::size_t and_not_count(std::span<const Word> a, std::span<const Word> b) noexcept
{
    std::size_t total = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        total += static_cast<std::size_t>(std::popcount(a[i] & ~(i < b.size() ? b[i] : Word{0})));
    return total;
}

inline bool intersects(std::span<const Word> a, std::span<const Word> b) noexcept
{
    const std::size_t m = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < m; ++i)
        if (a[i] & b[i])
            return true;
    return false;
}

} // namespace bits

/// Fixed-universe bitset of vertices.
class VertexSet
{
public:
    VertexSet() = default;
    explicit VertexSet(std::size_t universe) : universe_(universe), words_(bits::words_for(universe), 0) {}

    static VertexSet of(std::size_t universe, std::span<const Vertex> members)
    {
        VertexSet s(universe);
        for (Vertex v : members)
            s.insert(v);
        return s;
    }

    std::size_t universe() const noexcept { return universe_; }
    std::span<const Word> words() const noexcept { return words_; }

    bool contains(Vertex v) const noexcept { return v < universe_ && ((words_[v >> 6] >> (v & 63)) & 1U); }
    void insert(Vertex v) noexcept { words_[v >> 6] |= Word{1} << (v & 63); }
    void erase(Vertex v) noexcept { words_[v >> 6] &= ~(Word{1} << (v & 63)); }
    void clear() noexcept { std::fill(words_.begin(), words_.end(), 0); }

    std::size_t count() const noexcept
    {
        std::size_t c = 0;
        for (Word w : words_)
            c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }

    bool empty() const noexcept
    {
        return std::all_of(words_.begin(), words_.end(), [](Word w) { return w == 0; });
    }

    void unite(std::span<const Word> other) noexcept
    {
        for (std::size_t i = 0; i < words_.size() && i < other.size(); ++i)
            words_[i] |= other[i];
    }

    void subtract(std::span<const Word> other) noexcept
    {
        for (std::size_t i = 0; i < words_.size() && i < other.size(); ++i)
            words_[i] &= ~other[i];
    }

    void intersect(std::span<const Word> other) noexcept
    {
        for (std::size_t i = 0; i < words_.size(); ++i)
            words_[i] &= i < other.size() ? other[i] : Word{0};
    }

    std::size_t count_and(std::span<const Word> other) const noexcept { return bits::and_count(words_, other); }
    bool intersects(std::span<const Word> other) const noexcept { return bits::intersects(words_, other); }

    template <class F>
    void for_each(F && f) const
    {
        for (std::size_t w = 0; w < words_.size(); ++w) {
            Word word = words_[w];
            while (word) {
                auto b = static_cast<std::size_t>(std::countr_zero(word));
                f(static_cast<Vertex>(w * 64 + b));
                word &= word - 1;
            }
        }
    }

    std::vector<Vertex> members() const
    {
        std::vector<Vertex> out;
        for_each([&](Vertex v) { out.push_back(v); });
        return out;
    }

    bool operator==(const VertexSet &) const = default;

private:
    std::size_t universe_ = 0;
    std::vector<Word> words_;
};

/// Largest vertex count accepted for the dense bit-row representation
/// (2^16 vertices is 512 MiB of adjacency).
inline constexpr std::size_t max_dense_vertices = std::size_t{1} << 16;

/// Undirected simple graph stored as dense adjacency bit rows.
class Graph
{
public:
    Graph() = default;

    explicit Graph(std::size_t n) : n_(n), stride_(bits::words_for(n))
    {
        if (n > max_dense_vertices)
            throw ConfigError("graph with " + std::to_string(n) + " vertices exceeds the dense limit of "
                              + std::to_string(max_dense_vertices));
        rows_.assign(n_ * stride_, 0);
    }

    std::size_t size() const noexcept { return n_; }
    std::size_t words_per_row() const noexcept { return stride_; }

    std::span<const Word> row(Vertex v) const noexcept { return {rows_.data() + v * stride_, stride_}; }

    bool adjacent(Vertex u, Vertex v) const noexcept
    {
        return (rows_[u * stride_ + (v >> 6)] >> (v & 63)) & 1U;
    }

    void add_edge(Vertex u, Vertex v)
    {
        check_pair(u, v);
        add_edge_unchecked(u, v);
    }

    void remove_edge(Vertex u, Vertex v)
    {
        check_pair(u, v);
        rows_[u * stride_ + (v >> 6)] &= ~(Word{1} << (v & 63));
        rows_[v * stride_ + (u >> 6)] &= ~(Word{1} << (u & 63));
    }

    /// Caller guarantees u != v, both < size().
    void add_edge_unchecked(Vertex u, Vertex v) noexcept
    {
        rows_[u * stride_ + (v >> 6)] |= Word{1} << (v & 63);
        rows_[v * stride_ + (u >> 6)] |= Word{1} << (u & 63);
    }

    std::size_t degree(Vertex v) const noexcept
    {
        std::size_t d = 0;
        for (Word w : row(v))
            d += static_cast<std::size_t>(std::popcount(w));
        return d;
    }

    std::size_t count_neighbors_in(Vertex v, const VertexSet & set) const noexcept
    {
        return set.count_and(row(v));
    }

    std::vector<Vertex> neighbors(Vertex v) const
    {
        std::vector<Vertex> out;
        auto r = row(v);
        for (std::size_t w = 0; w < r.size(); ++w) {
            Word word = r[w];
            while (word) {
                out.push_back(w * 64 + static_cast<std::size_t>(std::countr_zero(word)));
                word &= word - 1;
            }
        }
        return out;
    }

    std::size_t edge_count() const noexcept
    {
        std::size_t twice = 0;
        for (Word w : rows_)
            twice += static_cast<std::size_t>(std::popcount(w));
        return twice / 2;
    }

    /// Edges (u, v) with u < v in lexicographic order.
    std::vector<std::pair<Vertex, Vertex>> edges() const
    {
        std::vector<std::pair<Vertex, Vertex>> out;
        for (Vertex u = 0; u < n_; ++u)
            for (Vertex v : neighbors(u))
                if (u < v)
                    out.emplace_back(u, v);
        return out;
    }

    bool operator==(const Graph &) const = default;

private:
    void check_pair(Vertex u, Vertex v) const
    {
        if (u >= n_ || v >= n_)
            throw DomainError("edge endpoint out of range");
        if (u == v)
            throw DomainError("self-loops are not allowed");
    }

    std::size_t n_ = 0;
    std::size_t stride_ = 0;
    std::vector<Word> rows_;
};

struct GnpConfig
{
    std::size_t n = 0;
    double p = 0.0;
    std::uint64_t seed = 0;

    void validate(std::size_t limit = max_dense_vertices) const
    {
        if (! (p >= 0.0 && p <= 1.0))
            throw ConfigError("edge probability must lie in [0, 1]");
        if (n > limit)
            throw ConfigError("vertex count " + std::to_string(n) + " exceeds limit " + std::to_string(limit));
    }
};

/// Largest n accepted by gnp_degrees, which never materializes the graph.
inline constexpr std::size_t max_streamed_vertices = std::size_t{1} << 32;

/// Calls edge(u, v) for every edge of G(n, p), u < v, in lexicographic order.
///
/// Row u draws from substream mix_seed(seed, u) and walks the pairs (u, v),
/// v > u, with geometric skips of parameter p. The edge set is therefore a
/// pure function of (n, p, seed).
template <class EdgeFn>
void for_each_gnp_edge(const GnpConfig & config, EdgeFn && edge)
{
    const std::size_t n = config.n;
    if (n < 2 || config.p <= 0.0)
        return;
    if (config.p >= 1.0) {
        for (Vertex u = 0; u < n; ++u)
            for (Vertex v = u + 1; v < n; ++v)
                edge(u, v);
        return;
    }
    const double log_q = std::log1p(-config.p);
    for (Vertex u = 0; u + 1 < n; ++u) {
        Rng rng(mix_seed(config.seed, u));
        std::uint64_t v = u + 1;
        for (;;) {
            std::uint64_t skip = rng.geometric_skip(log_q);
            if (skip >= n - v)
                break;
            v += skip;
            edge(u, static_cast<Vertex>(v));
            ++v;
            if (v >= n)
                break;
        }
    }
}

inline Graph gen_gnp(const GnpConfig & config)
{
    config.validate();
    Graph g(config.n);
    for_each_gnp_edge(config, [&](Vertex u, Vertex v) { g.add_edge_unchecked(u, v); });
    return g;
}

/// Advisory label of the asymptotic regime of G(n, p): "dense" when
/// p > (log⁴ n / n)^{1/3}, "sparse" below it, "edgeless" or "complete" at the
/// ends. Nothing in the library enforces it.
inline std::string gnp_regime(std::size_t n, double p)
{
    if (p <= 0.0)
        return "edgeless";
    if (p >= 1.0)
        return "complete";
    const double ln = std::log(static_cast<double>(std::max<std::size_t>(n, 2)));
    return p > std::cbrt(ln * ln * ln * ln / static_cast<double>(std::max<std::size_t>(n, 1))) ? "dense" : "sparse";
}

/// Degree sequence of gen_gnp(config) without storing the adjacency.
inline std::vector<std::size_t> gnp_degrees(const GnpConfig & config)
{
    config.validate(max_streamed_vertices);
    std::vector<std::size_t> deg(config.n, 0);
    for_each_gnp_edge(config, [&](Vertex u, Vertex v) {
        ++deg[u];
        ++deg[v];
    });
    return deg;
}

inline std::vector<std::size_t> degrees(const Graph & g)
{
    std::vector<std::size_t> deg(g.size());
    for (Vertex v = 0; v < g.size(); ++v)
        deg[v] = g.degree(v);
    return deg;
}

struct MaxDegree
{
    std::size_t degree = 0;
    std::vector<Vertex> argmax;
};

inline MaxDegree max_degree(std::span<const std::size_t> deg)
{
    if (deg.empty())
        throw DomainError("max_degree of an empty graph");
    MaxDegree out;
    out.degree = *std::max_element(deg.begin(), deg.end());
    for (Vertex v = 0; v < deg.size(); ++v)
        if (deg[v] == out.degree)
            out.argmax.push_back(v);
    return out;
}

inline MaxDegree max_degree(const Graph & g)
{
    auto deg = degrees(g);
    return max_degree(deg);
}

/// Δ minus the largest degree below Δ; 0 when Δ is attained twice.
inline std::size_t degree_gap(std::span<const std::size_t> deg)
{
    if (deg.size() < 2)
        throw DomainError("degree_gap needs at least two vertices");
    std::size_t top = 0, second = 0, top_count = 0;
    for (std::size_t d : deg) {
        if (d > top) {
            second = top_count > 0 ? top : second;
            top = d;
            top_count = 1;
        }
        else if (d == top) {
            ++top_count;
        }
        else if (d > second) {
            second = d;
        }
    }
    if (top_count >= 2)
        return 0;
    return top - second;
}

inline std::size_t degree_gap(const Graph & g)
{
    auto deg = degrees(g);
    return degree_gap(deg);
}

inline std::size_t codegree(const Graph & g, Vertex u, Vertex v)
{
    if (u == v)
        throw DomainError("codegree needs two distinct vertices");
    if (u >= g.size() || v >= g.size())
        throw DomainError("codegree vertex out of range");
    return bits::and_count(g.row(u), g.row(v));
}

inline std::size_t max_codegree(const Graph & g)
{
    constexpr std::size_t block = 32;
    const std::size_t n = g.size();
    std::size_t best = 0;
    for (Vertex lo = 0; lo < n; lo += block) {
        const Vertex hi = std::min(n, lo + block);
        for (Vertex v = lo + 1; v < n; ++v) {
            auto rv = g.row(v);
            for (Vertex u = lo; u < hi && u < v; ++u)
                best = std::max(best, bits::and_count(g.row(u), rv));
        }
    }
    return best;
}

/// Adds k*ceil(n/k) - n isolated vertices.
inline Graph pad_isolated(const Graph & g, std::size_t k)
{
    if (k < 1)
        throw DomainError("padding needs k >= 1");
    const std::size_t n = g.size();
    const std::size_t padded = ((n + k - 1) / k) * k;
    if (padded == n)
        return g;
    Graph out(padded);
    for (Vertex u = 0; u < n; ++u)
        for (Vertex v : g.neighbors(u))
            if (u < v)
                out.add_edge_unchecked(u, v);
    return out;
}

inline void add_clique(Graph & g, std::span<const Vertex> members)
{
    for (std::size_t a = 0; a < members.size(); ++a)
        for (std::size_t b = a + 1; b < members.size(); ++b)
            g.add_edge(members[a], members[b]);
}

inline Graph complete_graph(std::size_t n)
{
    Graph g(n);
    for (Vertex u = 0; u < n; ++u)
        for (Vertex v = u + 1; v < n; ++v)
            g.add_edge_unchecked(u, v);
    return g;
}

inline Graph cycle_graph(std::size_t n)
{
    Graph g(n);
    if (n >= 3)
        for (Vertex v = 0; v < n; ++v)
            g.add_edge(v, (v + 1) % n);
    return g;
}

/// Star with `leaves` leaves; the center is vertex 0.
inline Graph star_graph(std::size_t leaves)
{
    Graph g(leaves + 1);
    for (Vertex v = 1; v <= leaves; ++v)
        g.add_edge(0, v);
    return g;
}

/// `copies` disjoint copies of K_{a,a}; copy c occupies [2ac, 2a(c+1)),
/// first side first.
inline Graph disjoint_complete_bipartite(std::size_t a, std::size_t copies)
{
    Graph g(2 * a * copies);
    for (std::size_t c = 0; c < copies; ++c) {
        const Vertex base = 2 * a * c;
        for (Vertex x = 0; x < a; ++x)
            for (Vertex y = 0; y < a; ++y)
                g.add_edge(base + x, base + a + y);
    }
    return g;
}

} // namespace strongcol
