#pragma once

#include <strongcol/errors.hpp>
#include <strongcol/graph.hpp>
#include <strongcol/partition.hpp>
#include <strongcol/random.hpp>
#include <strongcol/transversal.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace strongcol {

/// Thresholds of the sparse construction. Unset values default to their
/// asymptotic expressions evaluated at the instance's n and Δ (logs natural).
struct SparseConfig
{
    double epsilon = 0.2;
    std::optional<double> locally_big_threshold;        // Δ / log n
    std::optional<double> almost_locally_big_threshold; // Δ / (2 log n)
    std::optional<double> heavy_threshold;              // Δ / log Δ
    std::optional<double> sample_rate;                  // log³Δ / Δ, clamped to 1
    std::optional<double> min_sample_size;              // A_i: (ε/8) log³Δ
    std::optional<double> max_sample_neighbors;         // B_v: 2 log²Δ
    std::optional<double> max_sample_neighborhood;      // C_j: 300 Δ / log n
    std::optional<double> first_chain_beta;             // 240 / ε
    std::optional<double> second_chain_beta;            // 600 / ε
    double clique_size_factor = 4.0;                    // |B_i| < factor * log n
    std::size_t resample_cap = 1000;                    // stage resamples per attempt
    std::size_t restart_cap = 20;                       // attempts after the first
    std::optional<std::size_t> transversal_resample_cap; // per resampling_transversal call

    void validate() const
    {
        auto positive = [](const std::optional<double> & x, const char * name) {
            if (x && ! (*x > 0.0))
                throw ConfigError(std::string(name) + " must be positive");
        };
        if (! (epsilon > 0.0))
            throw ConfigError("epsilon must be positive");
        positive(locally_big_threshold, "locally-big threshold");
        positive(almost_locally_big_threshold, "almost-locally-big threshold");
        positive(heavy_threshold, "heavy threshold");
        positive(sample_rate, "sample rate");
        positive(min_sample_size, "minimum sample size");
        positive(max_sample_neighbors, "maximum sample neighbors");
        positive(max_sample_neighborhood, "maximum sample neighborhood");
        positive(first_chain_beta, "first chain beta");
        positive(second_chain_beta, "second chain beta");
        if (! (clique_size_factor > 0.0))
            throw ConfigError("clique size factor must be positive");
        if (resample_cap < 1)
            throw ConfigError("resample cap must be at least 1");
    }
};

/// SparseConfig with every default evaluated.
struct SparseParams
{
    double epsilon = 0;
    double log_n = 0;
    double log_delta = 0;
    double delta = 0;
    double locally_big = 0;
    double almost_locally_big = 0;
    double heavy = 0;
    double sample_rate = 0;
    double min_sample_size = 0;
    double max_sample_neighbors = 0;
    double max_sample_neighborhood = 0; // per stage; the bookkeeping bound is this times the stage count
    double first_beta = 0;
    double second_beta = 0;
    double clique_cap = 0;
};

inline SparseParams resolve(const SparseConfig & cfg, std::size_t n, std::size_t delta)
{
    SparseParams p;
    p.epsilon = cfg.epsilon;
    p.delta = static_cast<double>(delta);
    p.log_n = std::log(static_cast<double>(std::max<std::size_t>(n, 2)));
    p.log_delta = std::log(std::max(p.delta, 1.0));
    p.locally_big = cfg.locally_big_threshold.value_or(p.delta / p.log_n);
    p.almost_locally_big = cfg.almost_locally_big_threshold.value_or(p.delta / (2.0 * p.log_n));
    p.heavy = cfg.heavy_threshold.value_or(p.log_delta > 0 ? p.delta / p.log_delta : p.delta);
    const double log3 = p.log_delta * p.log_delta * p.log_delta;
    p.sample_rate = std::min(1.0, cfg.sample_rate.value_or(p.delta > 0 ? log3 / p.delta : 1.0));
    p.min_sample_size = cfg.min_sample_size.value_or(cfg.epsilon / 8.0 * log3);
    p.max_sample_neighbors = cfg.max_sample_neighbors.value_or(2.0 * p.log_delta * p.log_delta);
    p.max_sample_neighborhood = cfg.max_sample_neighborhood.value_or(300.0 * p.delta / p.log_n);
    p.first_beta = cfg.first_chain_beta.value_or(240.0 / cfg.epsilon);
    p.second_beta = cfg.second_chain_beta.value_or(600.0 / cfg.epsilon);
    p.clique_cap = cfg.clique_size_factor * p.log_n;
    return p;
}

/// Vertices of the union of `parts` with more than `threshold` neighbors in
/// part i, for every i.
inline std::vector<std::vector<Vertex>> locally_big_sets(const Graph & g, std::span<const Part> parts,
                                                         double threshold)
{
    VertexSet all(g.size());
    for (const auto & part : parts)
        for (Vertex v : part)
            all.insert(v);
    std::vector<std::vector<Vertex>> out(parts.size());
    for (std::size_t i = 0; i < parts.size(); ++i) {
        auto mask = VertexSet::of(g.size(), parts[i]);
        all.for_each([&](Vertex v) {
            if (static_cast<double>(g.count_neighbors_in(v, mask)) > threshold)
                out[i].push_back(v);
        });
    }
    return out;
}

struct SparseStageRecord
{
    char chain = 'I';         // 'I' for T-stages, 'J' for U-stages
    std::size_t level = 0;    // t of the extension T_t -> T_{t-1}
    std::size_t new_parts = 0;
    std::size_t resamples = 0;
    std::size_t bookkeeping_failures = 0;
};

struct SparseRun
{
    std::optional<Transversal> transversal;
    std::string failure;
    bool short_circuit = false; // Δ = 0 or log Δ <= 1: answered by greedy_transversal
    std::size_t delta = 0;
    SparseParams params;

    std::vector<std::vector<Vertex>> almost_big; // B_i
    std::size_t clique_edges_added = 0;
    std::size_t locally_big_vertices = 0;
    std::vector<std::vector<std::size_t>> first_chain;  // I_1 ... I_sigma (last one empty)
    std::vector<std::vector<std::size_t>> second_chain; // J_1 ... J_tau (last one empty)
    std::size_t attempts = 0;
    std::vector<SparseStageRecord> stages; // of the successful (or last) attempt
    std::size_t final_resamples = 0;
};

namespace detail {

class SparseBuilder
{
public:
    SparseBuilder(const Graph & g, std::span<const Part> parts, const SparseConfig & cfg, SparseParams params,
                  SparseRun & run) :
        g_(g), parts_(parts), cfg_(cfg), prm_(params), run_(run), r_(parts.size())
    {
    }

    /// Classification and clique completion; false on an oversized B_i.
    bool prepare()
    {
        run_.almost_big = locally_big_sets(g_, parts_, prm_.almost_locally_big);
        std::size_t largest = 0;
        for (std::size_t i = 0; i < r_; ++i) {
            largest = std::max(largest, run_.almost_big[i].size());
            if (static_cast<double>(run_.almost_big[i].size()) >= prm_.clique_cap) {
                run_.failure = "almost-locally-big set of part " + std::to_string(i) + " has "
                               + std::to_string(run_.almost_big[i].size()) + " vertices, limit "
                               + std::to_string(prm_.clique_cap);
                return false;
            }
        }

        work_ = g_;
        std::vector<std::size_t> added(g_.size(), 0), memberships(g_.size(), 0);
        for (const auto & b : run_.almost_big) {
            for (Vertex v : b)
                ++memberships[v];
            for (std::size_t x = 0; x < b.size(); ++x)
                for (std::size_t y = x + 1; y < b.size(); ++y)
                    if (! work_.adjacent(b[x], b[y])) {
                        work_.add_edge_unchecked(b[x], b[y]);
                        ++added[b[x]];
                        ++added[b[y]];
                        ++run_.clique_edges_added;
                    }
        }
        for (Vertex v = 0; v < g_.size(); ++v)
            if (added[v] > 0 && added[v] >= 2 * memberships[v] * largest)
                throw std::logic_error("clique completion added more edges than the per-vertex bound");

        part_masks_.clear();
        for (const auto & part : parts_)
            part_masks_.push_back(VertexSet::of(g_.size(), part));
        auto big = locally_big_sets(work_, parts_, prm_.locally_big);
        big_wrt_.assign(r_, VertexSet(g_.size()));
        big_any_ = VertexSet(g_.size());
        for (std::size_t i = 0; i < r_; ++i)
            for (Vertex v : big[i]) {
                big_wrt_[i].insert(v);
                big_any_.insert(v);
            }
        run_.locally_big_vertices = big_any_.count();
        return true;
    }

    /// Builds I_1 ... I_sigma; false when a level fails to shrink.
    bool build_first_chain()
    {
        std::vector<std::size_t> level;
        for (std::size_t i = 0; i < r_; ++i)
            if (static_cast<double>(part_masks_[i].count_and(big_any_.words())) > prm_.epsilon / 4.0 * prm_.delta)
                level.push_back(i);
        std::vector<char> allowed(r_, 1);
        absorb(level, allowed, prm_.first_beta);
        return build_chain(level, run_.first_chain, 'I');
    }

    bool build_second_chain(const std::vector<std::size_t> & first)
    {
        std::vector<char> in_first(r_, 0);
        for (std::size_t i : first)
            in_first[i] = 1;
        std::vector<std::size_t> level;
        for (std::size_t j = 0; j < r_; ++j) {
            if (in_first[j])
                continue;
            bool hit = false;
            for (Vertex v : t1_)
                if (big_wrt_[j].contains(v))
                    hit = true;
            if (hit)
                level.push_back(j);
        }
        std::vector<char> allowed(r_, 1);
        for (std::size_t i : first)
            allowed[i] = 0;
        absorb(level, allowed, prm_.second_beta);
        return build_chain(level, run_.second_chain, 'J');
    }

    /// Steps after the deterministic prefix; one randomized attempt.
    std::optional<Transversal> attempt(std::uint64_t seed)
    {
        run_.stages.clear();
        Rng rng(seed);
        std::uint64_t calls = 0;
        auto next_seed = [&] { return mix_seed(seed, ++calls); };

        // T-stages
        const auto & ichain = run_.first_chain;
        const std::size_t sigma = ichain.size();
        std::vector<std::optional<Vertex>> pick(r_);
        for (std::size_t t = sigma; t >= 2; --t) {
            const auto & cur = ichain[t - 1];
            const auto & prev = ichain[t - 2];
            std::vector<Vertex> chosen = picked(pick);
            if (! extend_stage('I', t, prev, cur, part_list(), chosen, chosen, complement(prev),
                               sigma - (t - 1), rng, next_seed, pick))
                return std::nullopt;
        }
        t1_ = picked(pick);

        // J chain depends on T_1
        run_.second_chain.clear();
        if (! build_second_chain(ichain.front()))
            return std::nullopt;
        const auto & jchain = run_.second_chain;
        const std::size_t tau = jchain.size();

        // V'_j for j in J_1
        VertexSet t1_nbrs(g_.size());
        for (Vertex v : t1_)
            t1_nbrs.unite(work_.row(v));
        VertexSet big_outside_first(g_.size());
        {
            std::vector<char> in_first(r_, 0);
            for (std::size_t i : ichain.front())
                in_first[i] = 1;
            for (std::size_t k = 0; k < r_; ++k)
                if (! in_first[k])
                    big_outside_first.unite(big_wrt_[k].words());
        }
        std::vector<Part> trimmed = part_list();
        for (std::size_t j : jchain.front()) {
            Part kept;
            for (Vertex v : parts_[j])
                if (! t1_nbrs.contains(v) && ! big_outside_first.contains(v))
                    kept.push_back(v);
            if (kept.empty()) {
                run_.failure = "trimmed part " + std::to_string(j) + " of the second chain is empty";
                return std::nullopt;
            }
            trimmed[j] = std::move(kept);
        }

        // U-stages
        std::vector<std::optional<Vertex>> upick(r_);
        std::vector<std::size_t> first_plus;
        for (std::size_t t = tau; t >= 2; --t) {
            const auto & cur = jchain[t - 1];
            const auto & prev = jchain[t - 2];
            std::vector<Vertex> property = picked(upick);
            std::vector<Vertex> avoid = property;
            avoid.insert(avoid.end(), t1_.begin(), t1_.end());
            std::vector<std::size_t> excluded = ichain.front();
            excluded.insert(excluded.end(), prev.begin(), prev.end());
            if (! extend_stage('J', t, prev, cur, trimmed, avoid, property, complement(excluded), tau - (t - 1), rng,
                               next_seed, upick))
                return std::nullopt;
        }
        for (std::size_t j = 0; j < r_; ++j)
            if (upick[j])
                pick[j] = upick[j];

        // remaining parts
        std::vector<char> covered(r_, 0);
        for (std::size_t i : ichain.front())
            covered[i] = 1;
        for (std::size_t j : jchain.front())
            covered[j] = 1;
        VertexSet blocked(g_.size());
        for (Vertex v : picked(pick))
            blocked.unite(work_.row(v));
        blocked.unite(big_any_.words());
        std::vector<std::size_t> rest;
        std::vector<Part> final_parts;
        for (std::size_t k = 0; k < r_; ++k) {
            if (covered[k])
                continue;
            Part kept;
            for (Vertex v : parts_[k])
                if (! blocked.contains(v))
                    kept.push_back(v);
            if (kept.empty()) {
                run_.failure = "part " + std::to_string(k) + " emptied before the final transversal";
                return std::nullopt;
            }
            rest.push_back(k);
            final_parts.push_back(std::move(kept));
        }
        ResampleStats stats;
        auto tail = resampling_transversal(work_, final_parts, transversal_cap(final_parts), next_seed(), &stats);
        run_.final_resamples = stats.resamples;
        if (! tail) {
            run_.failure = "final resampling exhausted its cap";
            return std::nullopt;
        }
        for (std::size_t idx = 0; idx < rest.size(); ++idx)
            pick[rest[idx]] = tail->choice[idx];

        Transversal out(r_);
        out.choice = pick;
        return out;
    }

private:
    std::vector<Part> part_list() const { return {parts_.begin(), parts_.end()}; }

    static std::vector<Vertex> picked(const std::vector<std::optional<Vertex>> & pick)
    {
        std::vector<Vertex> out;
        for (const auto & v : pick)
            if (v)
                out.push_back(*v);
        return out;
    }

    std::vector<std::size_t> complement(const std::vector<std::size_t> & indices) const
    {
        std::vector<char> in(r_, 0);
        for (std::size_t i : indices)
            in[i] = 1;
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < r_; ++i)
            if (! in[i])
                out.push_back(i);
        return out;
    }

    VertexSet union_mask(const std::vector<std::size_t> & indices) const
    {
        VertexSet mask(g_.size());
        for (std::size_t i : indices)
            mask.unite(part_masks_[i].words());
        return mask;
    }

    std::size_t crossing_edges(std::size_t i, const VertexSet & mask) const
    {
        std::size_t total = 0;
        for (Vertex v : parts_[i])
            total += work_.count_neighbors_in(v, mask);
        return total;
    }

    /// Adds allowed indices outside `level` while some part sends more than
    /// beta log²n |V_i| edges into the current union, lowest index first.
    void absorb(std::vector<std::size_t> & level, const std::vector<char> & allowed, double beta) const
    {
        std::vector<char> in(r_, 0);
        for (std::size_t i : level)
            in[i] = 1;
        const double factor = beta * prm_.log_n * prm_.log_n;
        bool grew = true;
        while (grew) {
            grew = false;
            VertexSet mask = union_mask(level);
            for (std::size_t i = 0; i < r_; ++i) {
                if (in[i] || ! allowed[i])
                    continue;
                if (static_cast<double>(crossing_edges(i, mask)) > factor * static_cast<double>(parts_[i].size())) {
                    in[i] = 1;
                    level.push_back(i);
                    std::sort(level.begin(), level.end());
                    grew = true;
                    break;
                }
            }
        }
    }

    bool build_chain(std::vector<std::size_t> level, std::vector<std::vector<std::size_t>> & chain, char name)
    {
        chain.clear();
        chain.push_back(level);
        const double beta = name == 'I' ? prm_.first_beta : prm_.second_beta;
        while (! level.empty()) {
            VertexSet mask = union_mask(level);
            std::vector<std::size_t> next;
            for (std::size_t i : level) {
                std::size_t heavy = 0;
                for (Vertex v : parts_[i])
                    if (static_cast<double>(work_.count_neighbors_in(v, mask)) > prm_.heavy)
                        ++heavy;
                if (static_cast<double>(heavy) > prm_.epsilon / 4.0 * prm_.delta)
                    next.push_back(i);
            }
            std::vector<char> allowed(r_, 0);
            for (std::size_t i : level)
                allowed[i] = 1;
            absorb(next, allowed, beta);
            if (next.size() >= level.size()) {
                run_.failure = std::string("index chain ") + name + " stalled at size " + std::to_string(level.size());
                return false;
            }
            level = next;
            chain.push_back(level);
        }
        return true;
    }

    std::size_t transversal_cap(std::span<const Part> parts) const
    {
        return cfg_.transversal_resample_cap.value_or(100 * (edges_within_union(work_, parts) + 1));
    }

    /// |∪_{v in set, v not locally big wrt V_j} N(v) ∩ V_j|.
    std::size_t neighborhood_in(std::size_t j, std::span<const Vertex> set) const
    {
        VertexSet acc(g_.size());
        for (Vertex v : set)
            if (! big_wrt_[j].contains(v))
                acc.unite(work_.row(v));
        return part_masks_[j].count_and(acc.words());
    }

    /// Extends the picks from the parts in `cur` to those in `prev`: trims the
    /// new parts, samples W until no A/B/C event holds, takes a transversal of
    /// W, and rechecks the neighborhood bookkeeping bound for the parts in
    /// `targets`.
    template <class SeedFn>
    bool extend_stage(char chain, std::size_t level, const std::vector<std::size_t> & prev,
                      const std::vector<std::size_t> & cur, const std::vector<Part> & base,
                      const std::vector<Vertex> & avoid, const std::vector<Vertex> & property,
                      const std::vector<std::size_t> & targets, std::size_t stages_done, Rng & rng, SeedFn && next_seed,
                      std::vector<std::optional<Vertex>> & pick)
    {
        SparseStageRecord record{chain, level, 0, 0, 0};
        std::vector<char> in_cur(r_, 0);
        for (std::size_t i : cur)
            in_cur[i] = 1;
        std::vector<std::size_t> fresh;
        for (std::size_t i : prev)
            if (! in_cur[i])
                fresh.push_back(i);
        record.new_parts = fresh.size();

        VertexSet prev_mask(g_.size());
        for (std::size_t i : prev)
            for (Vertex v : base[i])
                prev_mask.insert(v);
        VertexSet avoid_nbrs(g_.size());
        for (Vertex v : avoid) {
            avoid_nbrs.unite(work_.row(v));
            avoid_nbrs.insert(v);
        }

        std::vector<Part> trimmed;
        VertexSet trimmed_all(g_.size());
        for (std::size_t i : fresh) {
            Part kept;
            for (Vertex v : base[i])
                if (! avoid_nbrs.contains(v)
                    && static_cast<double>(work_.count_neighbors_in(v, prev_mask)) <= prm_.heavy) {
                    kept.push_back(v);
                    trimmed_all.insert(v);
                }
            if (kept.empty()) {
                run_.failure = std::string("stage ") + chain + std::to_string(level) + ": part "
                               + std::to_string(i) + " emptied by trimming";
                run_.stages.push_back(record);
                return false;
            }
            trimmed.push_back(std::move(kept));
        }

        const double bound = prm_.max_sample_neighborhood * static_cast<double>(stages_done);
        std::size_t used = 0;
        while (used < cfg_.resample_cap) {
            std::vector<Part> sample(trimmed.size());
            VertexSet sample_all(g_.size());
            for (std::size_t x = 0; x < trimmed.size(); ++x)
                for (Vertex v : trimmed[x])
                    if (rng.bernoulli(prm_.sample_rate)) {
                        sample[x].push_back(v);
                        sample_all.insert(v);
                    }

            bool bad = false;
            for (const auto & w : sample) // A_i
                if (static_cast<double>(w.size()) < prm_.min_sample_size || w.empty())
                    bad = true;
            if (! bad) // B_v
                trimmed_all.for_each([&](Vertex v) {
                    if (! bad && static_cast<double>(work_.count_neighbors_in(v, sample_all)) > prm_.max_sample_neighbors)
                        bad = true;
                });
            if (! bad) { // C_j
                std::vector<Vertex> members = sample_all.members();
                for (std::size_t j : targets)
                    if (static_cast<double>(neighborhood_in(j, members)) > prm_.max_sample_neighborhood) {
                        bad = true;
                        break;
                    }
            }
            if (bad) {
                ++used;
                continue;
            }

            auto t = resampling_transversal(work_, sample, transversal_cap(sample), next_seed());
            if (! t) {
                ++used;
                continue;
            }
            std::vector<Vertex> extended = property;
            for (const auto & c : t->choice)
                extended.push_back(*c);
            bool within = true;
            for (std::size_t j : targets)
                if (static_cast<double>(neighborhood_in(j, extended)) > bound) {
                    within = false;
                    break;
                }
            if (! within) {
                ++record.bookkeeping_failures;
                ++used;
                continue;
            }
            for (std::size_t x = 0; x < fresh.size(); ++x)
                pick[fresh[x]] = t->choice[x];
            record.resamples = used;
            run_.stages.push_back(record);
            return true;
        }
        record.resamples = used;
        run_.stages.push_back(record);
        run_.failure = std::string("stage ") + chain + std::to_string(level) + " exhausted its resample cap";
        return false;
    }

    const Graph & g_;
    std::span<const Part> parts_;
    const SparseConfig & cfg_;
    SparseParams prm_;
    SparseRun & run_;
    std::size_t r_;

    Graph work_;
    std::vector<VertexSet> part_masks_;
    std::vector<VertexSet> big_wrt_;
    VertexSet big_any_;
    std::vector<Vertex> t1_;
};

} // namespace detail

/// Independent transversal for parts of size at least (1+ε)Δ.
///
/// Classifies (almost) locally big vertices, turns every B_i into a clique on
/// a working copy, builds the index chains I_1 ⊃ ... ⊃ I_σ = ∅ and
/// J_1 ⊃ ... ⊃ J_τ = ∅, extends the partial transversals backward along each
/// chain with sampled sets W free of A/B/C events, and finishes the remaining
/// parts with resampling_transversal. Attempts restart with fresh seeds up to
/// restart_cap times. A returned transversal has passed verify_transversal.
inline SparseRun sparse_transversal(const Graph & g, std::span<const Part> parts, const SparseConfig & cfg,
                                    std::uint64_t seed)
{
    cfg.validate();
    validate_disjoint(parts, g.size());
    SparseRun run;
    if (parts.empty()) {
        run.transversal = Transversal(0);
        return run;
    }
    run.delta = g.size() == 0 ? 0 : max_degree(g).degree;
    run.params = resolve(cfg, g.size(), run.delta);

    for (std::size_t i = 0; i < parts.size(); ++i)
        if (static_cast<double>(parts[i].size()) + 1e-9 < (1.0 + cfg.epsilon) * static_cast<double>(run.delta))
            throw PreconditionError("part " + std::to_string(i) + " has " + std::to_string(parts[i].size())
                                    + " vertices, fewer than (1+eps) * max degree");

    auto accept = [&](std::optional<Transversal> t) {
        if (t && ! verify_transversal(g, parts, *t))
            throw std::logic_error("sparse_transversal built an invalid transversal");
        run.transversal = std::move(t);
    };

    if (run.delta == 0 || std::log(static_cast<double>(run.delta)) <= 1.0) {
        run.short_circuit = true;
        run.first_chain = {{}};
        run.attempts = 1;
        accept(greedy_transversal(g, parts));
        if (! run.transversal)
            run.failure = "greedy transversal failed";
        return run;
    }

    detail::SparseBuilder builder(g, parts, cfg, run.params, run);
    if (! builder.prepare() || ! builder.build_first_chain())
        return run;

    for (std::size_t attempt = 0; attempt <= cfg.restart_cap; ++attempt) {
        run.attempts = attempt + 1;
        run.failure.clear();
        auto t = builder.attempt(mix_seed(seed, attempt));
        if (t) {
            accept(std::move(t));
            return run;
        }
    }
    if (run.failure.empty())
        run.failure = "restart cap exhausted";
    return run;
}

} // namespace strongcol
