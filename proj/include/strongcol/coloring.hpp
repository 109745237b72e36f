#pragma once

#include <strongcol/errors.hpp>
#include <strongcol/graph.hpp>
#include <strongcol/matching.hpp>
#include <strongcol/partition.hpp>
#include <strongcol/random.hpp>
#include <strongcol/transversal.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace strongcol {

/// Per-vertex colors in [0, k).
struct ColoringCertificate
{
    std::size_t k = 0;
    std::vector<std::size_t> colors;

    bool operator==(const ColoringCertificate &) const = default;
};

/// True iff c is a proper coloring of g in which every part of `parts` sees
/// each of the k colors exactly once.
inline bool verify_certificate(const Graph & g, const VertexPartition & parts, const ColoringCertificate & c)
{
    if (c.colors.size() != g.size() || c.k == 0)
        return false;
    for (std::size_t col : c.colors)
        if (col >= c.k)
            return false;
    for (Vertex u = 0; u < g.size(); ++u)
        for (Vertex v : g.neighbors(u))
            if (u < v && c.colors[u] == c.colors[v])
                return false;
    std::vector<char> covered(g.size(), 0);
    for (const auto & part : parts.parts) {
        if (part.size() != c.k)
            return false;
        std::vector<char> seen(c.k, 0);
        for (Vertex v : part) {
            if (v >= g.size() || covered[v] || seen[c.colors[v]])
                return false;
            covered[v] = 1;
            seen[c.colors[v]] = 1;
        }
    }
    return std::all_of(covered.begin(), covered.end(), [](char x) { return x != 0; });
}

/// Color class `color` of c, one vertex per part (absent entries when the
/// certificate is not rainbow).
inline Transversal color_class(const VertexPartition & parts, const ColoringCertificate & c, std::size_t color)
{
    Transversal t(parts.size());
    for (std::size_t i = 0; i < parts.size(); ++i)
        for (Vertex v : parts.parts[i])
            if (v < c.colors.size() && c.colors[v] == color)
                t.choice[i] = v;
    return t;
}

/// Knobs of the dense decomposition. Quantities written in terms of np use
/// the expected degree, estimated as the average degree of the non-isolated
/// vertices unless given.
struct DenseConfig
{
    std::optional<double> expected_degree;       // np
    std::optional<double> locally_big_threshold; // Step 2; default 0.9 np
    double step3_domination_fraction = 0.01;     // Step 3 leaves at most this * np undominated
    std::size_t hall_retry_budget = 100;         // Step 4 reshuffles per pipeline attempt
    std::size_t restart_budget = 3;              // full pipeline restarts after the first attempt
    std::optional<std::size_t> step2_budget;     // default 2r + 2 routed vertices
    std::optional<std::size_t> deletion_budget;  // default ceil(110 ceil(1/p) log n), Steps 1-3
    double epsilon = 0.1;                        // Step 1 is folded into Step 2 when k >= (1+eps) Δ
    std::optional<std::size_t> pinned_resample_cap;

    void validate() const
    {
        if (expected_degree && ! (*expected_degree > 0.0))
            throw ConfigError("expected degree must be positive");
        if (locally_big_threshold && ! (*locally_big_threshold > 0.0))
            throw ConfigError("locally-big threshold must be positive");
        if (! (step3_domination_fraction > 0.0 && step3_domination_fraction <= 1.0))
            throw ConfigError("step-3 domination fraction must lie in (0, 1]");
        if (hall_retry_budget < 1)
            throw ConfigError("hall retry budget must be at least 1");
        if (step2_budget && *step2_budget < 1)
            throw ConfigError("step-2 budget must be at least 1");
        if (deletion_budget && *deletion_budget < 1)
            throw ConfigError("deletion budget must be at least 1");
        if (! (epsilon > 0.0))
            throw ConfigError("epsilon must be positive");
    }
};

struct HallViolatorRecord
{
    std::size_t attempt = 0;
    std::size_t retry = 0;
    std::size_t part = 0;
    std::size_t left_size = 0;
    std::size_t neighborhood_size = 0;
};

struct DenseRun
{
    std::optional<ColoringCertificate> certificate;
    std::string path;    // "single-part", "complement-matching" or "steps"
    std::string failure; // reason when no certificate was produced

    std::size_t max_degree = 0;
    Vertex max_degree_vertex = 0;
    bool max_degree_tie = false;
    bool step1_skipped = false;
    double expected_degree = 0.0;

    std::size_t attempts = 0; // pipeline attempts made (1 + restarts used)
    std::size_t step1_deletions = 0;
    std::size_t step2_deletions = 0;
    std::size_t step3_iterations = 0;
    std::size_t step3_deletions = 0;
    std::size_t step4_transversals = 0;
    std::size_t hall_retries = 0;
    std::vector<HallViolatorRecord> violators;
};

namespace detail {

inline double estimate_expected_degree(const Graph & g)
{
    std::size_t active = 0, total = 0;
    for (Vertex v = 0; v < g.size(); ++v) {
        std::size_t d = g.degree(v);
        if (d > 0) {
            ++active;
            total += d;
        }
    }
    return active == 0 ? 0.0 : static_cast<double>(total) / static_cast<double>(active);
}

inline std::size_t active_vertex_count(const Graph & g)
{
    std::size_t active = 0;
    for (Vertex v = 0; v < g.size(); ++v)
        if (g.degree(v) > 0)
            ++active;
    return active;
}

/// Mutable state of one pipeline attempt: the alive part members and the
/// transversals deleted so far.
class DenseWorkspace
{
public:
    DenseWorkspace(const Graph & g, const VertexPartition & parts) :
        working_(parts.parts), alive_(g.size()), owner_(part_index(parts.parts, g.size()))
    {
        for (const auto & part : working_)
            for (Vertex v : part)
                alive_.insert(v);
    }

    const std::vector<Part> & working() const noexcept { return working_; }
    const VertexSet & alive() const noexcept { return alive_; }
    std::size_t owner(Vertex v) const { return owner_[v]; }
    std::size_t remaining() const noexcept { return working_.empty() ? 0 : working_.front().size(); }
    const std::vector<std::vector<Vertex>> & classes() const noexcept { return classes_; }

    void remove(const Transversal & t)
    {
        std::vector<Vertex> cls(working_.size());
        for (std::size_t i = 0; i < working_.size(); ++i) {
            Vertex v = t.choice.at(i).value();
            auto & part = working_[i];
            auto it = std::find(part.begin(), part.end(), v);
            if (it == part.end())
                throw std::logic_error("deleted transversal uses a vertex outside its part");
            part.erase(it);
            alive_.erase(v);
            cls[i] = v;
        }
        classes_.push_back(std::move(cls));
    }

    void add_class(std::vector<Vertex> cls) { classes_.push_back(std::move(cls)); }

private:
    std::vector<Part> working_;
    VertexSet alive_;
    std::vector<std::size_t> owner_;
    std::vector<std::vector<Vertex>> classes_;
};

inline ColoringCertificate certificate_from_classes(std::size_t n, std::size_t k,
                                                    const std::vector<std::vector<Vertex>> & classes)
{
    ColoringCertificate c{k, std::vector<std::size_t>(n, k)};
    for (std::size_t col = 0; col < classes.size(); ++col)
        for (Vertex v : classes[col])
            c.colors[v] = col;
    return c;
}

} // namespace detail

/// Strong coloring of g for the given equal partition, built as k disjoint
/// independent transversals.
///
/// One or two parts are solved exactly (two parts by a perfect matching of
/// V_1 to V_2 through non-edges). Otherwise: (1) a transversal through the
/// maximum-degree vertex, (2) transversals through every vertex with at least
/// the locally-big threshold of neighbors in one part, (3) for every minimal
/// partial transversal that almost dominates a part, completions of both of
/// its halves, (4) the remaining transversals grown simultaneously part by
/// part through perfect matchings, reshuffling the part order on Hall
/// violators. Every returned certificate has passed verify_certificate.
inline DenseRun decompose_dense(const Graph & g, const VertexPartition & parts, const DenseConfig & cfg,
                                std::uint64_t seed)
{
    cfg.validate();
    validate_equal_cover(parts, g.size());
    const std::size_t k = parts.k;
    const std::size_t r = parts.size();

    DenseRun run;
    auto top = max_degree(g);
    run.max_degree = top.degree;
    run.max_degree_vertex = top.argmax.front();
    run.max_degree_tie = top.argmax.size() > 1;
    if (k <= top.degree)
        throw PreconditionError("part size k = " + std::to_string(k) + " must exceed the maximum degree "
                                + std::to_string(top.degree));

    auto finish = [&](std::vector<std::vector<Vertex>> classes) {
        auto cert = detail::certificate_from_classes(g.size(), k, classes);
        if (! verify_certificate(g, parts, cert))
            throw std::logic_error("decompose_dense built a certificate that fails verification");
        run.certificate = std::move(cert);
    };

    if (r == 1) {
        run.path = "single-part";
        std::vector<std::vector<Vertex>> classes;
        for (Vertex v : parts.parts[0])
            classes.push_back({v});
        finish(std::move(classes));
        return run;
    }

    if (r == 2) {
        run.path = "complement-matching";
        run.attempts = 1;
        const auto & left = parts.parts[0];
        const auto & right = parts.parts[1];
        BipartiteGraph h(k, k);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j)
                if (! g.adjacent(left[i], right[j]))
                    h.add_edge(i, j);
        auto result = perfect_matching_or_violator(h);
        if (! result.perfect()) {
            const auto & viol = result.violator();
            run.violators.push_back({0, 0, 1, viol.left.size(), viol.neighborhood.size()});
            run.failure = "no perfect matching through non-edges between the two parts";
            return run;
        }
        std::vector<std::vector<Vertex>> classes;
        const auto & m = result.matching();
        for (std::size_t i = 0; i < k; ++i)
            classes.push_back({left[i], right[m.left_to_right[i]]});
        finish(std::move(classes));
        return run;
    }

    run.path = "steps";
    const double np = cfg.expected_degree.value_or(detail::estimate_expected_degree(g));
    run.expected_degree = np;
    const std::size_t n_active = std::max<std::size_t>(detail::active_vertex_count(g), 2);
    const double p_hat = np > 0.0 ? std::min(1.0, np / static_cast<double>(n_active - 1)) : 1.0;
    const double big_threshold = cfg.locally_big_threshold.value_or(0.9 * np);
    const double step3_allowed = cfg.step3_domination_fraction * np;
    const std::size_t step2_budget = cfg.step2_budget.value_or(2 * r + 2);
    const std::size_t deletion_budget = cfg.deletion_budget.value_or(static_cast<std::size_t>(
        std::ceil(110.0 * std::ceil(1.0 / p_hat) * std::log(static_cast<double>(n_active)))));
    run.step1_skipped = static_cast<double>(k) >= (1.0 + cfg.epsilon) * static_cast<double>(top.degree);

    for (std::size_t attempt = 0; attempt <= cfg.restart_budget; ++attempt) {
        run.attempts = attempt + 1;
        detail::DenseWorkspace ws(g, parts);
        std::uint64_t calls = 0;
        auto pinned = [&](std::span<const Pin> pins, std::vector<Vertex> excluded = {}) {
            PinnedOptions opt;
            opt.resample_cap = cfg.pinned_resample_cap;
            opt.excluded = std::move(excluded);
            return pinned_transversal(g, ws.working(), pins, mix_seed(seed, attempt, calls++), opt);
        };
        auto deletions = [&] { return ws.classes().size(); };
        bool failed = false;

        // Step 1
        if (! run.step1_skipped) {
            Pin pin{ws.owner(run.max_degree_vertex), run.max_degree_vertex};
            auto t = pinned(std::span<const Pin>(&pin, 1));
            if (! t) {
                run.failure = "no transversal through the maximum-degree vertex";
                continue;
            }
            ws.remove(*t);
            ++run.step1_deletions;
        }

        // Step 2
        for (std::size_t iter = 0; iter < step2_budget && ws.remaining() > 0 && deletions() < deletion_budget;
             ++iter) {
            std::vector<VertexSet> part_sets;
            for (const auto & part : ws.working())
                part_sets.push_back(VertexSet::of(g.size(), part));
            std::optional<Vertex> heavy;
            ws.alive().for_each([&](Vertex v) {
                if (heavy)
                    return;
                for (const auto & set : part_sets)
                    if (static_cast<double>(g.count_neighbors_in(v, set)) >= big_threshold) {
                        heavy = v;
                        return;
                    }
            });
            if (! heavy)
                break;
            Pin pin{ws.owner(*heavy), *heavy};
            auto t = pinned(std::span<const Pin>(&pin, 1));
            if (! t) {
                run.failure = "no transversal through locally big vertex " + std::to_string(*heavy);
                failed = true;
                break;
            }
            ws.remove(*t);
            ++run.step2_deletions;
        }
        if (failed)
            continue;

        // Step 3
        while (ws.remaining() > 0 && deletions() < deletion_budget && ! failed) {
            std::optional<std::vector<Pin>> found;
            for (std::size_t i = 0; i < r && ! found; ++i)
                found = grow_almost_dominating(g, ws.working(), ws.alive(), i, step3_allowed);
            if (! found)
                break;
            ++run.step3_iterations;
            auto & members = *found;
            if (members.size() == 1) {
                auto t = pinned(members);
                if (! t) {
                    run.failure = "no transversal through a dominating vertex";
                    failed = true;
                    break;
                }
                ws.remove(*t);
                ++run.step3_deletions;
                continue;
            }
            const std::size_t half = (members.size() + 1) / 2;
            std::vector<Pin> first(members.begin(), members.begin() + static_cast<std::ptrdiff_t>(half));
            std::vector<Pin> second(members.begin() + static_cast<std::ptrdiff_t>(half), members.end());
            std::vector<Vertex> reserved;
            for (const Pin & p : second)
                reserved.push_back(p.vertex);
            auto t1 = pinned(first, reserved);
            if (! t1) {
                run.failure = "could not complete the first half of a dominating transversal";
                failed = true;
                break;
            }
            ws.remove(*t1);
            ++run.step3_deletions;
            if (ws.remaining() == 0)
                break;
            auto t2 = pinned(second);
            if (! t2) {
                run.failure = "could not complete the second half of a dominating transversal";
                failed = true;
                break;
            }
            ws.remove(*t2);
            ++run.step3_deletions;
        }
        if (failed)
            continue;

        // Step 4
        const std::size_t s = ws.remaining();
        if (s == 0) {
            finish(ws.classes());
            return run;
        }
        Rng rng(mix_seed(seed, attempt, ~std::uint64_t{0}));
        bool extended = false;
        for (std::size_t retry = 0; retry < cfg.hall_retry_budget && ! extended; ++retry) {
            if (retry > 0)
                ++run.hall_retries;
            std::vector<std::size_t> order(r);
            std::iota(order.begin(), order.end(), std::size_t{0});
            Part seeds = ws.working()[order[0]];
            if (retry > 0) {
                rng.shuffle(order);
                seeds = ws.working()[order[0]];
                rng.shuffle(seeds);
            }
            std::vector<std::vector<Vertex>> grown(s, std::vector<Vertex>(r));
            std::vector<VertexSet> blocked(s, VertexSet(g.size()));
            for (std::size_t i = 0; i < s; ++i) {
                grown[i][order[0]] = seeds[i];
                blocked[i].unite(g.row(seeds[i]));
            }
            bool ok = true;
            for (std::size_t idx = 1; idx < r && ok; ++idx) {
                const std::size_t part_id = order[idx];
                const auto & part = ws.working()[part_id];
                BipartiteGraph h(s, s);
                for (std::size_t i = 0; i < s; ++i)
                    for (std::size_t j = 0; j < s; ++j)
                        if (! blocked[i].contains(part[j]))
                            h.add_edge(i, j);
                auto result = perfect_matching_or_violator(h);
                if (! result.perfect()) {
                    const auto & viol = result.violator();
                    run.violators.push_back({attempt, retry, part_id, viol.left.size(), viol.neighborhood.size()});
                    ok = false;
                    break;
                }
                const auto & m = result.matching();
                for (std::size_t i = 0; i < s; ++i) {
                    Vertex v = part[m.left_to_right[i]];
                    for (std::size_t prev = 0; prev < idx; ++prev)
                        if (g.adjacent(grown[i][order[prev]], v))
                            throw std::logic_error("step-4 extension produced a dependent transversal");
                    grown[i][part_id] = v;
                    blocked[i].unite(g.row(v));
                }
            }
            if (ok) {
                for (auto & cls : grown)
                    ws.add_class(std::move(cls));
                run.step4_transversals = s;
                extended = true;
            }
        }
        if (! extended) {
            run.failure = "hall retry budget exhausted";
            continue;
        }
        run.failure.clear();
        finish(ws.classes());
        return run;
    }
    if (run.failure.empty())
        run.failure = "restart budget exhausted";
    return run;
}

} // namespace strongcol
