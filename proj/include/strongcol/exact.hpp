#pragma once

#include <strongcol/coloring.hpp>
#include <strongcol/errors.hpp>
#include <strongcol/graph.hpp>
#include <strongcol/parallel.hpp>
#include <strongcol/partition.hpp>

#include <atomic>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace strongcol {

inline constexpr std::size_t default_partition_size_guard = 24;
inline constexpr std::size_t default_strong_size_guard = 8;

namespace detail {

/// Backtracking search for a coloring of g plus a k-clique on every part.
/// V_1 is fixed to colors 0..k-1 in order; the remaining vertices are picked
/// most-constrained first.
class RainbowSearch
{
public:
    RainbowSearch(const Graph & g, const VertexPartition & parts) :
        n_(g.size()), k_(parts.k), adj_(g.size(), 0), owner_(part_index(parts.parts, g.size())),
        color_(g.size(), none), part_used_(parts.size(), 0)
    {
        for (Vertex v = 0; v < n_; ++v)
            adj_[v] = g.row(v).empty() ? 0 : g.row(v)[0];
        full_ = k_ >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << k_) - 1);
        if (! parts.parts.empty())
            for (std::size_t i = 0; i < k_; ++i)
                assign(parts.parts[0][i], i);
    }

    bool solve() { return descend(n_ - colored_); }

    ColoringCertificate certificate() const { return {k_, std::vector<std::size_t>(color_.begin(), color_.end())}; }

private:
    static constexpr std::size_t none = ~std::size_t{0};

    std::uint64_t available(Vertex v) const
    {
        std::uint64_t forbidden = part_used_[owner_[v]];
        std::uint64_t nb = adj_[v];
        while (nb) {
            auto u = static_cast<Vertex>(std::countr_zero(nb));
            nb &= nb - 1;
            if (color_[u] != none)
                forbidden |= std::uint64_t{1} << color_[u];
        }
        return full_ & ~forbidden;
    }

    void assign(Vertex v, std::size_t c)
    {
        color_[v] = c;
        part_used_[owner_[v]] |= std::uint64_t{1} << c;
        ++colored_;
    }

    void unassign(Vertex v)
    {
        part_used_[owner_[v]] &= ~(std::uint64_t{1} << color_[v]);
        color_[v] = none;
        --colored_;
    }

    bool descend(std::size_t left)
    {
        if (left == 0)
            return true;
        Vertex best = n_;
        std::uint64_t best_avail = 0;
        int best_count = 65;
        for (Vertex v = 0; v < n_; ++v) {
            if (color_[v] != none)
                continue;
            std::uint64_t avail = available(v);
            int c = std::popcount(avail);
            if (c == 0)
                return false;
            if (c < best_count) {
                best_count = c;
                best = v;
                best_avail = avail;
            }
        }
        while (best_avail) {
            auto c = static_cast<std::size_t>(std::countr_zero(best_avail));
            best_avail &= best_avail - 1;
            assign(best, c);
            if (descend(left - 1))
                return true;
            unassign(best);
        }
        return false;
    }

    std::size_t n_, k_;
    std::vector<std::uint64_t> adj_;
    std::vector<std::size_t> owner_;
    std::vector<std::size_t> color_;
    std::vector<std::uint64_t> part_used_;
    std::uint64_t full_ = 0;
    std::size_t colored_ = 0;
};

inline void enumerate_partitions_rec(std::vector<char> & used, std::size_t m, std::size_t k,
                                     std::vector<Part> & current, Part & building, Vertex from,
                                     const std::function<void(const std::vector<Part> &)> & emit)
{
    if (building.size() == k) {
        current.push_back(building);
        Part saved = std::move(building);
        building.clear();
        Vertex first = 0;
        while (first < m && used[first])
            ++first;
        if (first == m) {
            emit(current);
        }
        else {
            used[first] = 1;
            building.push_back(first);
            enumerate_partitions_rec(used, m, k, current, building, first + 1, emit);
            building.pop_back();
            used[first] = 0;
        }
        building = std::move(saved);
        current.pop_back();
        return;
    }
    for (Vertex v = from; v < m; ++v) {
        if (used[v])
            continue;
        used[v] = 1;
        building.push_back(v);
        enumerate_partitions_rec(used, m, k, current, building, v + 1, emit);
        building.pop_back();
        used[v] = 0;
    }
}

} // namespace detail

/// Calls emit for every partition of [0, m) into parts of size k, once per
/// unordered partition: parts appear in order of their smallest member and
/// are sorted.
inline void for_each_equal_partition(std::size_t m, std::size_t k,
                                     const std::function<void(const std::vector<Part> &)> & emit)
{
    if (k == 0 || m % k != 0)
        throw DomainError("for_each_equal_partition needs k >= 1 dividing m");
    if (m == 0) {
        emit({});
        return;
    }
    std::vector<char> used(m, 0);
    std::vector<Part> current;
    Part building{0};
    used[0] = 1;
    detail::enumerate_partitions_rec(used, m, k, current, building, 1, emit);
}

/// Exact rainbow coloring for one partition, if any exists.
inline std::optional<ColoringCertificate> find_rainbow_coloring(const Graph & g, const VertexPartition & parts,
                                                                std::size_t size_guard = default_partition_size_guard)
{
    if (g.size() > size_guard || g.size() > 64)
        throw SizeError("exact partition check limited to " + std::to_string(std::min<std::size_t>(size_guard, 64))
                        + " vertices, got " + std::to_string(g.size()));
    validate_equal_cover(parts, g.size());
    detail::RainbowSearch search(g, parts);
    if (! search.solve())
        return std::nullopt;
    return search.certificate();
}

/// Whether g plus a k-clique on every part is k-colorable.
inline bool is_strongly_k_colorable_for_partition(const Graph & g, const VertexPartition & parts,
                                                  std::size_t size_guard = default_partition_size_guard)
{
    return find_rainbow_coloring(g, parts, size_guard).has_value();
}

struct StrongColorabilityResult
{
    bool colorable = true;
    std::size_t partitions_checked = 0;
    std::optional<VertexPartition> refutation; // lowest failing partition in enumeration order
};

/// Exhaustive strong k-colorability of g (padded with isolated vertices to a
/// multiple of k). Partitions are checked by a worker pool that stops at the
/// first failure; the reported refutation is the first failing partition in
/// enumeration order regardless of scheduling.
inline StrongColorabilityResult strongly_k_colorable(const Graph & g, std::size_t k,
                                                     std::size_t size_guard = default_strong_size_guard,
                                                     unsigned workers = default_worker_count())
{
    if (g.size() > size_guard)
        throw SizeError("exact strong colorability limited to " + std::to_string(size_guard) + " vertices, got "
                        + std::to_string(g.size()));
    if (k == 0)
        throw DomainError("k must be positive");
    Graph padded = pad_isolated(g, k);

    std::vector<std::vector<Part>> all;
    for_each_equal_partition(padded.size(), k, [&](const std::vector<Part> & parts) { all.push_back(parts); });

    std::atomic<std::size_t> first_failure{all.size()};
    std::atomic<std::size_t> checked{0};
    parallel_for(
        all.size(),
        [&](std::size_t i) {
            if (i > first_failure.load())
                return;
            checked.fetch_add(1);
            VertexPartition vp{k, all[i]};
            if (! is_strongly_k_colorable_for_partition(padded, vp, 64)) {
                std::size_t cur = first_failure.load();
                while (i < cur && ! first_failure.compare_exchange_weak(cur, i)) {
                }
            }
        },
        workers);

    StrongColorabilityResult out;
    out.partitions_checked = checked.load();
    if (first_failure.load() < all.size()) {
        out.colorable = false;
        out.refutation = VertexPartition{k, all[first_failure.load()]};
    }
    return out;
}

struct StrongChromaticResult
{
    std::size_t value = 0;
    std::optional<VertexPartition> refutation; // partition of the (value-1)-padded graph without a strong coloring
    std::size_t partitions_checked = 0;
};

/// Smallest k for which g is strongly k-colorable, searched upward from
/// Δ + 1. Also returns a partition refuting strong (value-1)-colorability when
/// value > 1.
inline StrongChromaticResult strong_chromatic_number_exact(const Graph & g,
                                                           std::size_t size_guard = default_strong_size_guard,
                                                           unsigned workers = default_worker_count())
{
    if (g.size() > size_guard)
        throw SizeError("exact strong chromatic number limited to " + std::to_string(size_guard)
                        + " vertices, got " + std::to_string(g.size()));
    StrongChromaticResult out;
    if (g.size() == 0) {
        out.value = 1;
        return out;
    }
    const std::size_t delta = max_degree(g).degree;
    const std::size_t start = delta + 1;
    for (std::size_t k = start;; ++k) {
        if (k >= g.size()) {
            // a single part: all colors distinct, always proper
            out.value = k;
            break;
        }
        auto res = strongly_k_colorable(g, k, size_guard, workers);
        out.partitions_checked += res.partitions_checked;
        if (res.colorable) {
            out.value = k;
            break;
        }
        out.refutation = std::move(res.refutation);
    }
    if (out.value == start && delta >= 1)
        out.refutation = lower_bound_partition(g, delta);
    return out;
}

} // namespace strongcol
