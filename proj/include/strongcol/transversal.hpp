#pragma once

#include <strongcol/errors.hpp>
#include <strongcol/graph.hpp>
#include <strongcol/partition.hpp>
#include <strongcol/random.hpp>

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace strongcol {

/// One chosen vertex per part (possibly partial).
struct Transversal
{
    std::vector<std::optional<Vertex>> choice;

    Transversal() = default;
    explicit Transversal(std::size_t parts) : choice(parts) {}

    bool complete() const noexcept
    {
        return std::all_of(choice.begin(), choice.end(), [](const auto & c) { return c.has_value(); });
    }

    std::vector<Vertex> vertices() const
    {
        std::vector<Vertex> out;
        for (const auto & c : choice)
            if (c)
                out.push_back(*c);
        return out;
    }

    bool operator==(const Transversal &) const = default;
};

struct Pin
{
    std::size_t part = 0;
    Vertex vertex = 0;

    bool operator==(const Pin &) const = default;
};

/// True iff t picks exactly one member of every part and the picks are
/// pairwise non-adjacent.
inline bool verify_transversal(const Graph & g, std::span<const Part> parts, const Transversal & t)
{
    if (t.choice.size() != parts.size())
        return false;
    std::vector<Vertex> picked;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (! t.choice[i])
            return false;
        Vertex v = *t.choice[i];
        if (v >= g.size() || std::find(parts[i].begin(), parts[i].end(), v) == parts[i].end())
            return false;
        picked.push_back(v);
    }
    for (std::size_t a = 0; a < picked.size(); ++a)
        for (std::size_t b = a + 1; b < picked.size(); ++b)
            if (picked[a] == picked[b] || g.adjacent(picked[a], picked[b]))
                return false;
    return true;
}

/// Edges of g with both endpoints inside the union of the parts.
inline std::size_t edges_within_union(const Graph & g, std::span<const Part> parts)
{
    VertexSet all(g.size());
    for (const auto & part : parts)
        for (Vertex v : part)
            all.insert(v);
    std::size_t twice = 0;
    all.for_each([&](Vertex v) { twice += g.count_neighbors_in(v, all); });
    return twice / 2;
}

/// Grows a partial independent transversal among `alive` vertices until at
/// most `allowed_undominated` alive vertices of the target part lack a
/// neighbor in it, always adding the vertex that dominates the most new
/// target vertices (lowest index on ties), then drops members while the
/// domination persists. Empty when growth stalls before reaching the bound.
inline std::optional<std::vector<Pin>> grow_almost_dominating(const Graph & g, std::span<const Part> parts,
                                                              const VertexSet & alive, std::size_t target,
                                                              double allowed_undominated)
{
    VertexSet target_set(g.size());
    for (Vertex v : parts[target])
        if (alive.contains(v))
            target_set.insert(v);
    const std::size_t target_size = target_set.count();
    if (static_cast<double>(target_size) <= allowed_undominated)
        return std::nullopt; // the empty set already qualifies; nothing minimal to find

    VertexSet undominated = target_set;
    VertexSet blocked(g.size());
    std::vector<char> part_used(parts.size(), 0);
    std::vector<Pin> members;

    while (static_cast<double>(undominated.count()) > allowed_undominated) {
        std::size_t best_gain = 0;
        std::optional<Pin> best;
        for (std::size_t j = 0; j < parts.size(); ++j) {
            if (part_used[j])
                continue;
            for (Vertex v : parts[j]) {
                if (! alive.contains(v) || blocked.contains(v))
                    continue;
                std::size_t gain = g.count_neighbors_in(v, undominated);
                if (gain > best_gain || (gain == best_gain && gain > 0 && best && v < best->vertex)) {
                    best_gain = gain;
                    best = Pin{j, v};
                }
            }
        }
        if (! best || best_gain == 0)
            return std::nullopt;
        members.push_back(*best);
        part_used[best->part] = 1;
        blocked.insert(best->vertex);
        blocked.unite(g.row(best->vertex));
        undominated.subtract(g.row(best->vertex));
    }

    auto undominated_without = [&](std::size_t skip) {
        VertexSet rest = target_set;
        for (std::size_t m = 0; m < members.size(); ++m)
            if (m != skip)
                rest.subtract(g.row(members[m].vertex));
        return rest.count();
    };
    for (std::size_t m = 0; m < members.size();) {
        if (static_cast<double>(undominated_without(m)) <= allowed_undominated)
            members.erase(members.begin() + static_cast<std::ptrdiff_t>(m));
        else
            ++m;
    }
    return members;
}

struct GreedyStats
{
    std::size_t dominating_sets_removed = 0;
    std::size_t vertices_removed = 0;
};

/// Default almost-domination fraction for the greedy removal phase.
inline constexpr double default_domination_fraction = 1.0 / 50.0;

/// Greedy independent transversal. First, for every part, removes a maximal
/// collection of disjoint partial independent transversals that each leave at
/// most domination_fraction*|part| vertices of that part undominated. Then
/// extends part by part with the lowest-index vertex not adjacent to the
/// previous picks.
inline std::optional<Transversal> greedy_transversal(const Graph & g, std::span<const Part> parts,
                                                     double domination_fraction = default_domination_fraction,
                                                     GreedyStats * stats = nullptr)
{
    validate_disjoint(parts, g.size());
    if (! (domination_fraction >= 0.0 && domination_fraction < 1.0))
        throw ConfigError("domination fraction must lie in [0, 1)");

    VertexSet alive(g.size());
    for (const auto & part : parts)
        for (Vertex v : part)
            alive.insert(v);

    GreedyStats local;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const double allowed = domination_fraction * static_cast<double>(parts[i].size());
        while (auto found = grow_almost_dominating(g, parts, alive, i, allowed)) {
            for (const Pin & m : *found)
                alive.erase(m.vertex);
            ++local.dominating_sets_removed;
            local.vertices_removed += found->size();
        }
    }
    if (stats)
        *stats = local;

    Transversal t(parts.size());
    VertexSet blocked(g.size());
    for (std::size_t i = 0; i < parts.size(); ++i) {
        std::optional<Vertex> pick;
        for (Vertex v : parts[i])
            if (alive.contains(v) && ! blocked.contains(v) && (! pick || v < *pick))
                pick = v;
        if (! pick)
            return std::nullopt;
        t.choice[i] = pick;
        blocked.insert(*pick);
        blocked.unite(g.row(*pick));
    }
    return t;
}

struct ResampleStats
{
    std::size_t resamples = 0;
};

/// Moser–Tardos resampling. Draws one uniform vertex per part; while some
/// drawn pair is adjacent, redraws both parts of the lowest such pair. Gives
/// up after `resample_cap` redraws.
inline std::optional<Transversal> resampling_transversal(const Graph & g, std::span<const Part> parts,
                                                         std::size_t resample_cap, std::uint64_t seed,
                                                         ResampleStats * stats = nullptr)
{
    validate_disjoint(parts, g.size());
    if (stats)
        *stats = {};
    for (const auto & part : parts)
        if (part.empty())
            return std::nullopt;

    const std::size_t r = parts.size();
    auto owner = part_index(parts, g.size());
    Rng rng(seed);
    std::vector<Vertex> pick(r);
    VertexSet selected(g.size());
    for (std::size_t i = 0; i < r; ++i) {
        pick[i] = parts[i][rng.below(parts[i].size())];
        selected.insert(pick[i]);
    }

    std::set<std::pair<std::size_t, std::size_t>> conflicts;
    auto for_each_conflict = [&](std::size_t i, auto && fn) {
        auto row = g.row(pick[i]);
        auto sel = selected.words();
        for (std::size_t w = 0; w < row.size(); ++w) {
            Word word = row[w] & sel[w];
            while (word) {
                Vertex u = w * 64 + static_cast<std::size_t>(std::countr_zero(word));
                fn(owner[u]);
                word &= word - 1;
            }
        }
    };
    auto ordered = [](std::size_t a, std::size_t b) { return std::make_pair(std::min(a, b), std::max(a, b)); };
    for (std::size_t i = 0; i < r; ++i)
        for_each_conflict(i, [&](std::size_t j) { conflicts.insert(ordered(i, j)); });

    std::size_t resamples = 0;
    while (! conflicts.empty()) {
        if (resamples >= resample_cap) {
            if (stats)
                stats->resamples = resamples;
            return std::nullopt;
        }
        auto [a, b] = *conflicts.begin();
        for (std::size_t i : {a, b}) {
            for_each_conflict(i, [&](std::size_t j) { conflicts.erase(ordered(i, j)); });
            selected.erase(pick[i]);
        }
        for (std::size_t i : {a, b}) {
            pick[i] = parts[i][rng.below(parts[i].size())];
            selected.insert(pick[i]);
        }
        for (std::size_t i : {a, b})
            for_each_conflict(i, [&](std::size_t j) { conflicts.insert(ordered(i, j)); });
        ++resamples;
    }
    if (stats)
        stats->resamples = resamples;

    Transversal t(r);
    for (std::size_t i = 0; i < r; ++i)
        t.choice[i] = pick[i];
    return t;
}

struct PinnedOptions
{
    std::optional<std::size_t> resample_cap; // default 100 * (edges in the residual union + 1)
    double domination_fraction = default_domination_fraction;
    std::vector<Vertex> excluded;            // vertices that may not be used besides the pins
};

/// Throws DomainError unless pins name distinct parts, belong to them and are
/// pairwise non-adjacent.
inline void validate_pins(const Graph & g, std::span<const Part> parts, std::span<const Pin> pins)
{
    std::vector<char> used(parts.size(), 0);
    for (const Pin & pin : pins) {
        if (pin.part >= parts.size())
            throw DomainError("pin part index out of range");
        if (used[pin.part])
            throw DomainError("two pins in part " + std::to_string(pin.part));
        used[pin.part] = 1;
        const auto & part = parts[pin.part];
        if (std::find(part.begin(), part.end(), pin.vertex) == part.end())
            throw DomainError("pinned vertex " + std::to_string(pin.vertex) + " is not in part "
                              + std::to_string(pin.part));
    }
    for (std::size_t a = 0; a < pins.size(); ++a)
        for (std::size_t b = a + 1; b < pins.size(); ++b)
            if (g.adjacent(pins[a].vertex, pins[b].vertex))
                throw DomainError("pins " + std::to_string(pins[a].vertex) + " and " + std::to_string(pins[b].vertex)
                                  + " are adjacent");
}

/// Independent transversal containing every pin: pinned parts shrink to their
/// pin, pin neighbors leave the other parts, and the residual instance goes to
/// resampling_transversal with greedy_transversal as fallback.
inline std::optional<Transversal> pinned_transversal(const Graph & g, std::span<const Part> parts,
                                                     std::span<const Pin> pins, std::uint64_t seed,
                                                     const PinnedOptions & options = {})
{
    validate_disjoint(parts, g.size());
    validate_pins(g, parts, pins);

    VertexSet forbidden(g.size());
    for (const Pin & pin : pins)
        forbidden.unite(g.row(pin.vertex));
    for (Vertex v : options.excluded)
        if (v < g.size())
            forbidden.insert(v);

    std::vector<Part> residual(parts.size());
    std::vector<char> pinned(parts.size(), 0);
    for (const Pin & pin : pins) {
        residual[pin.part] = {pin.vertex};
        pinned[pin.part] = 1;
    }
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (pinned[i])
            continue;
        for (Vertex v : parts[i])
            if (! forbidden.contains(v))
                residual[i].push_back(v);
        if (residual[i].empty())
            return std::nullopt;
    }

    std::size_t cap = options.resample_cap.value_or(100 * (edges_within_union(g, residual) + 1));
    auto t = resampling_transversal(g, residual, cap, seed);
    if (! t)
        t = greedy_transversal(g, residual, options.domination_fraction);
    if (! t)
        return std::nullopt;
    for (const Pin & pin : pins)
        if (t->choice[pin.part] != pin.vertex)
            throw std::logic_error("pinned transversal lost a pin");
    return t;
}

} // namespace strongcol
