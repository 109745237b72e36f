#pragma once

#include <strongcol/errors.hpp>
#include <strongcol/graph.hpp>
#include <strongcol/random.hpp>

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace strongcol {

using Part = std::vector<Vertex>;

/// Disjoint parts V_1..V_r. For colorings every part has exactly k vertices
/// and the parts cover the (padded) graph; transversal algorithms only need
/// disjointness.
struct VertexPartition
{
    std::size_t k = 0;
    std::vector<Part> parts;

    std::size_t size() const noexcept { return parts.size(); }

    bool operator==(const VertexPartition &) const = default;
};

/// Throws DomainError unless the parts are pairwise disjoint subsets of [0, n).
inline void validate_disjoint(std::span<const Part> parts, std::size_t n)
{
    std::vector<char> seen(n, 0);
    for (const auto & part : parts)
        for (Vertex v : part) {
            if (v >= n)
                throw DomainError("part vertex " + std::to_string(v) + " out of range");
            if (seen[v])
                throw DomainError("vertex " + std::to_string(v) + " appears in two parts");
            seen[v] = 1;
        }
}

/// Throws PreconditionError unless every part has exactly p.k vertices and the
/// parts cover [0, n).
inline void validate_equal_cover(const VertexPartition & p, std::size_t n)
{
    if (p.k == 0)
        throw PreconditionError("part size k must be positive");
    validate_disjoint(p.parts, n);
    for (const auto & part : p.parts)
        if (part.size() != p.k)
            throw PreconditionError("every part must have exactly k = " + std::to_string(p.k) + " vertices");
    if (p.parts.size() * p.k != n)
        throw PreconditionError("parts do not cover all " + std::to_string(n) + " vertices");
}

/// Part index of every vertex; -1 encoded as parts.size() for uncovered vertices.
inline std::vector<std::size_t> part_index(std::span<const Part> parts, std::size_t n)
{
    std::vector<std::size_t> index(n, parts.size());
    for (std::size_t i = 0; i < parts.size(); ++i)
        for (Vertex v : parts[i])
            index[v] = i;
    return index;
}

/// Uniformly random partition of [0, n) into parts of size k; n % k == 0.
inline VertexPartition random_equal_partition(std::size_t n, std::size_t k, std::uint64_t seed)
{
    if (k == 0 || n % k != 0)
        throw DomainError("random_equal_partition needs k >= 1 dividing n");
    std::vector<Vertex> order(n);
    for (Vertex v = 0; v < n; ++v)
        order[v] = v;
    Rng rng(seed);
    rng.shuffle(order);
    VertexPartition out{k, {}};
    for (std::size_t start = 0; start < n; start += k) {
        Part part(order.begin() + static_cast<std::ptrdiff_t>(start),
                  order.begin() + static_cast<std::ptrdiff_t>(start + k));
        std::sort(part.begin(), part.end());
        out.parts.push_back(std::move(part));
    }
    return out;
}

/// `count` disjoint parts of size k drawn from a uniformly random ordering of
/// [0, n); vertices beyond count*k stay outside every part.
inline std::vector<Part> random_disjoint_parts(std::size_t n, std::size_t k, std::size_t count, std::uint64_t seed)
{
    if (count * k > n)
        throw DomainError("not enough vertices for the requested parts");
    std::vector<Vertex> order(n);
    for (Vertex v = 0; v < n; ++v)
        order[v] = v;
    Rng rng(seed);
    rng.shuffle(order);
    std::vector<Part> parts(count);
    for (std::size_t i = 0; i < count; ++i) {
        parts[i].assign(order.begin() + static_cast<std::ptrdiff_t>(i * k),
                        order.begin() + static_cast<std::ptrdiff_t>((i + 1) * k));
        std::sort(parts[i].begin(), parts[i].end());
    }
    return parts;
}

/// Consecutive blocks {0..k-1}, {k..2k-1}, ...
inline VertexPartition block_partition(std::size_t n, std::size_t k)
{
    if (k == 0 || n % k != 0)
        throw DomainError("block_partition needs k >= 1 dividing n");
    VertexPartition out{k, {}};
    for (Vertex start = 0; start < n; start += k) {
        Part part;
        for (Vertex v = start; v < start + k; ++v)
            part.push_back(v);
        out.parts.push_back(std::move(part));
    }
    return out;
}

/// Partition of pad_isolated(g, k) whose first part is the neighborhood of the
/// lowest-index maximum-degree vertex; no strong k-coloring exists for it.
/// Vertices of the padded graph keep their indices; pads follow the original
/// vertices.
inline VertexPartition lower_bound_partition(const Graph & g, std::size_t k)
{
    if (g.size() == 0)
        throw DomainError("lower_bound_partition of an empty graph");
    auto top = max_degree(g);
    if (top.degree == 0)
        throw DomainError("lower_bound_partition needs max degree >= 1");
    if (k != top.degree)
        throw DomainError("lower_bound_partition needs k == max degree (" + std::to_string(top.degree) + ")");

    const Vertex center = top.argmax.front();
    const std::size_t padded = ((g.size() + k - 1) / k) * k;
    VertexPartition out{k, {}};
    out.parts.push_back(g.neighbors(center));

    std::vector<char> used(padded, 0);
    for (Vertex v : out.parts.front())
        used[v] = 1;
    Part current;
    for (Vertex v = 0; v < padded; ++v) {
        if (used[v])
            continue;
        current.push_back(v);
        if (current.size() == k) {
            out.parts.push_back(std::move(current));
            current.clear();
        }
    }
    return out;
}

/// Partition of pad_isolated(disjoint_complete_bipartite(side, copies), 2*side-1)
/// whose first two parts hold the two sides of copy 0, topped up with the
/// lowest remaining vertices; the rest are chunked ascending. These two
/// parts need 2*side distinct colors, so no strong (2*side-1)-coloring exists.
inline VertexPartition complete_bipartite_refutation(std::size_t side, std::size_t copies)
{
    if (side < 1 || copies < 1)
        throw DomainError("complete_bipartite_refutation needs side >= 1 and copies >= 1");
    const std::size_t k = 2 * side - 1;
    const std::size_t n = 2 * side * copies;
    const std::size_t padded = ((n + k - 1) / k) * k;
    std::vector<char> used(padded, 0);
    VertexPartition out{k, {}};
    for (std::size_t half = 0; half < 2; ++half) {
        Part part;
        for (Vertex v = half * side; v < (half + 1) * side; ++v) {
            part.push_back(v);
            used[v] = 1;
        }
        out.parts.push_back(std::move(part));
    }
    Vertex next = 0;
    for (auto & part : out.parts)
        while (part.size() < k) {
            while (used[next])
                ++next;
            used[next] = 1;
            part.push_back(next);
        }
    Part current;
    for (Vertex v = 0; v < padded; ++v) {
        if (used[v])
            continue;
        current.push_back(v);
        if (current.size() == k) {
            out.parts.push_back(std::move(current));
            current.clear();
        }
    }
    return out;
}

} // namespace strongcol
