#pragma once

#include <strongcol/errors.hpp>

#include <algorithm>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace strongcol {

inline constexpr std::size_t unmatched = std::numeric_limits<std::size_t>::max();

struct BipartiteGraph
{
    std::size_t left_size = 0;
    std::size_t right_size = 0;
    std::vector<std::vector<std::size_t>> adjacency; // per left vertex, ascending right indices

    BipartiteGraph() = default;
    BipartiteGraph(std::size_t left, std::size_t right) : left_size(left), right_size(right), adjacency(left) {}

    void add_edge(std::size_t l, std::size_t r)
    {
        if (l >= left_size || r >= right_size)
            throw DomainError("bipartite edge out of range");
        adjacency[l].push_back(r);
    }

    /// Sorts and deduplicates neighbor lists.
    void normalize()
    {
        for (auto & nbrs : adjacency) {
            std::sort(nbrs.begin(), nbrs.end());
            nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
        }
    }
};

struct Matching
{
    std::vector<std::size_t> left_to_right; // `unmatched` when free
    std::size_t size = 0;
};

struct HallViolator
{
    std::vector<std::size_t> left;         // S
    std::vector<std::size_t> neighborhood; // N(S), |N(S)| < |S|
};

struct MatchingResult
{
    std::variant<Matching, HallViolator> outcome;

    bool perfect() const noexcept { return std::holds_alternative<Matching>(outcome); }
    const Matching & matching() const { return std::get<Matching>(outcome); }
    const HallViolator & violator() const { return std::get<HallViolator>(outcome); }
};

/// Union of the neighbor lists of `left_set`, ascending.
inline std::vector<std::size_t> neighborhood(const BipartiteGraph & h, std::span<const std::size_t> left_set)
{
    std::vector<char> hit(h.right_size, 0);
    for (std::size_t l : left_set)
        for (std::size_t r : h.adjacency.at(l))
            hit[r] = 1;
    std::vector<std::size_t> out;
    for (std::size_t r = 0; r < h.right_size; ++r)
        if (hit[r])
            out.push_back(r);
    return out;
}

namespace detail {

struct MatchingState
{
    std::vector<std::size_t> left_match;
    std::vector<std::size_t> right_match;
};

inline MatchingState kuhn(const BipartiteGraph & h)
{
    for (const auto & nbrs : h.adjacency)
        for (std::size_t r : nbrs)
            if (r >= h.right_size)
                throw DomainError("bipartite edge out of range");

    MatchingState st{std::vector<std::size_t>(h.left_size, unmatched),
                     std::vector<std::size_t>(h.right_size, unmatched)};
    std::vector<std::size_t> visited(h.right_size, 0);
    std::size_t stamp = 0;

    struct Frame
    {
        std::size_t left;
        std::size_t next;
        std::size_t via; // right vertex whose partner is `left`
    };
    std::vector<Frame> stack;

    for (std::size_t root = 0; root < h.left_size; ++root) {
        ++stamp;
        stack.clear();
        stack.push_back({root, 0, unmatched});
        while (! stack.empty()) {
            Frame & top = stack.back();
            const auto & nbrs = h.adjacency[top.left];
            if (top.next == nbrs.size()) {
                stack.pop_back();
                continue;
            }
            std::size_t r = nbrs[top.next++];
            if (visited[r] == stamp)
                continue;
            visited[r] = stamp;
            if (st.right_match[r] == unmatched) {
                std::size_t take = r;
                for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
                    st.left_match[it->left] = take;
                    st.right_match[take] = it->left;
                    take = it->via;
                }
                break;
            }
            stack.push_back({st.right_match[r], 0, r});
        }
    }
    return st;
}

} // namespace detail

/// Maximum-cardinality matching by augmenting paths, scanning left vertices
/// and their neighbor lists in ascending order.
inline Matching max_matching(const BipartiteGraph & h)
{
    auto st = detail::kuhn(h);
    Matching m{std::move(st.left_match), 0};
    for (std::size_t r : m.left_to_right)
        if (r != unmatched)
            ++m.size;
    return m;
}

/// A matching saturating the left side, or a Hall violator: the left vertices
/// reachable by alternating paths from the free left vertices of a maximum
/// matching.
inline MatchingResult perfect_matching_or_violator(const BipartiteGraph & h)
{
    if (h.left_size > h.right_size)
        throw DomainError("left side (" + std::to_string(h.left_size) + ") larger than right side ("
                          + std::to_string(h.right_size) + "): no left-perfect matching");
    auto st = detail::kuhn(h);

    std::vector<char> left_seen(h.left_size, 0), right_seen(h.right_size, 0);
    std::vector<std::size_t> queue;
    for (std::size_t l = 0; l < h.left_size; ++l)
        if (st.left_match[l] == unmatched) {
            left_seen[l] = 1;
            queue.push_back(l);
        }
    if (queue.empty()) {
        Matching m{std::move(st.left_match), h.left_size};
        return {std::move(m)};
    }
    for (std::size_t head = 0; head < queue.size(); ++head)
        for (std::size_t r : h.adjacency[queue[head]]) {
            if (right_seen[r])
                continue;
            right_seen[r] = 1;
            std::size_t partner = st.right_match[r];
            if (partner != unmatched && ! left_seen[partner]) {
                left_seen[partner] = 1;
                queue.push_back(partner);
            }
        }

    HallViolator v;
    for (std::size_t l = 0; l < h.left_size; ++l)
        if (left_seen[l])
            v.left.push_back(l);
    for (std::size_t r = 0; r < h.right_size; ++r)
        if (right_seen[r])
            v.neighborhood.push_back(r);
    return {std::move(v)};
}

} // namespace strongcol
