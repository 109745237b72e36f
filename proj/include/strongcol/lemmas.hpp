#pragma once

#include <strongcol/errors.hpp>
#include <strongcol/graph.hpp>
#include <strongcol/parallel.hpp>
#include <strongcol/random.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace strongcol {

/// Outcome of one trial. `inconclusive` is used by one-sided checks whose
/// sufficient condition did not apply; `observed` by checks with no threshold.
enum class Verdict { pass, fail, inconclusive, observed };

inline const char * to_string(Verdict v)
{
    switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
    case Verdict::observed: return "observed";
    }
    return "?";
}

inline Verdict verdict_from_string(const std::string & s)
{
    if (s == "pass")
        return Verdict::pass;
    if (s == "fail")
        return Verdict::fail;
    if (s == "inconclusive")
        return Verdict::inconclusive;
    if (s == "observed")
        return Verdict::observed;
    throw FormatError("unknown verdict '" + s + "'");
}

struct LemmaTrial
{
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    Verdict verdict = Verdict::observed;
    double statistic = 0;
    std::map<std::string, double> observations;

    bool operator==(const LemmaTrial &) const = default;
};

/// Agreement between the fast statistic and a naive recount on one instance.
struct LemmaAudit
{
    std::string label;
    std::size_t n = 0;
    double fast = 0;
    double naive = 0;

    bool agreed() const noexcept { return fast == naive; }
    bool operator==(const LemmaAudit &) const = default;
};

struct LemmaReport
{
    std::string lemma_id;
    std::size_t n = 0;
    double p = 0;
    std::optional<double> c;
    std::map<std::string, double> parameters;
    std::uint64_t seed = 0;
    double threshold = 0;
    bool one_sided = false;     // a pass certifies the property; a fail only flags the sample
    bool observational = false; // no trial asserts anything
    std::vector<LemmaTrial> records;
    std::vector<std::string> notes;
    std::vector<LemmaAudit> audits;

    std::size_t trials() const noexcept { return records.size(); }

    std::size_t count(Verdict v) const noexcept
    {
        return static_cast<std::size_t>(
            std::count_if(records.begin(), records.end(), [&](const LemmaTrial & t) { return t.verdict == v; }));
    }

    std::size_t passes() const noexcept { return count(Verdict::pass); }

    double pass_rate() const noexcept
    {
        return records.empty() ? 0.0 : static_cast<double>(passes()) / static_cast<double>(records.size());
    }

    double extreme() const noexcept
    {
        double best = 0;
        for (const auto & t : records)
            best = std::max(best, t.statistic);
        return best;
    }

    /// Mean of an observation over the trials that recorded it.
    std::optional<double> mean_observation(const std::string & key) const
    {
        double sum = 0;
        std::size_t seen = 0;
        for (const auto & t : records)
            if (auto it = t.observations.find(key); it != t.observations.end()) {
                sum += it->second;
                ++seen;
            }
        if (seen == 0)
            return std::nullopt;
        return sum / static_cast<double>(seen);
    }

    std::vector<std::uint64_t> seeds() const
    {
        std::vector<std::uint64_t> out;
        for (const auto & t : records)
            out.push_back(t.seed);
        return out;
    }

    bool operator==(const LemmaReport &) const = default;
};

/// Combines two reports of the same check over disjoint trial sets. The result
/// does not depend on argument order or grouping.
inline LemmaReport merge(const LemmaReport & a, const LemmaReport & b)
{
    if (a.lemma_id != b.lemma_id || a.n != b.n || a.p != b.p || a.c != b.c || a.parameters != b.parameters
        || a.seed != b.seed || a.threshold != b.threshold || a.one_sided != b.one_sided
        || a.observational != b.observational)
        throw DomainError("cannot merge reports of different checks");
    LemmaReport out = a;
    out.records.insert(out.records.end(), b.records.begin(), b.records.end());
    std::sort(out.records.begin(), out.records.end(),
              [](const LemmaTrial & x, const LemmaTrial & y) { return x.trial < y.trial; });
    for (std::size_t i = 1; i < out.records.size(); ++i)
        if (out.records[i].trial == out.records[i - 1].trial)
            throw DomainError("trial " + std::to_string(out.records[i].trial) + " present in both reports");

    out.notes.insert(out.notes.end(), b.notes.begin(), b.notes.end());
    std::sort(out.notes.begin(), out.notes.end());
    out.notes.erase(std::unique(out.notes.begin(), out.notes.end()), out.notes.end());

    out.audits.insert(out.audits.end(), b.audits.begin(), b.audits.end());
    auto key = [](const LemmaAudit & x) { return std::tie(x.label, x.n, x.fast, x.naive); };
    std::sort(out.audits.begin(), out.audits.end(), [&](const auto & x, const auto & y) { return key(x) < key(y); });
    out.audits.erase(std::unique(out.audits.begin(), out.audits.end()), out.audits.end());
    return out;
}

inline nlohmann::json to_json(const LemmaReport & r)
{
    using nlohmann::json;
    json records = json::array();
    for (const auto & t : r.records)
        records.push_back({{"trial", t.trial},
                           {"seed", t.seed},
                           {"verdict", to_string(t.verdict)},
                           {"statistic", t.statistic},
                           {"observations", t.observations}});
    json audits = json::array();
    for (const auto & a : r.audits)
        audits.push_back({{"label", a.label}, {"n", a.n}, {"fast", a.fast}, {"naive", a.naive}});
    return {{"lemma_id", r.lemma_id},
            {"n", r.n},
            {"p", r.p},
            {"c", r.c ? json(*r.c) : json(nullptr)},
            {"parameters", r.parameters},
            {"seed", r.seed},
            {"threshold", r.threshold},
            {"one_sided", r.one_sided},
            {"observational", r.observational},
            {"trials", r.trials()},
            {"passes", r.passes()},
            {"extreme", r.extreme()},
            {"seeds", r.seeds()},
            {"records", std::move(records)},
            {"notes", r.notes},
            {"audits", std::move(audits)}};
}

inline LemmaReport lemma_report_from_json(const nlohmann::json & j)
{
    try {
        LemmaReport r;
        r.lemma_id = j.at("lemma_id").get<std::string>();
        r.n = j.at("n").get<std::size_t>();
        r.p = j.at("p").get<double>();
        if (! j.at("c").is_null())
            r.c = j.at("c").get<double>();
        r.parameters = j.at("parameters").get<std::map<std::string, double>>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.threshold = j.at("threshold").get<double>();
        r.one_sided = j.at("one_sided").get<bool>();
        r.observational = j.at("observational").get<bool>();
        for (const auto & t : j.at("records"))
            r.records.push_back({t.at("trial").get<std::size_t>(), t.at("seed").get<std::uint64_t>(),
                                 verdict_from_string(t.at("verdict").get<std::string>()),
                                 t.at("statistic").get<double>(),
                                 t.at("observations").get<std::map<std::string, double>>()});
        r.notes = j.at("notes").get<std::vector<std::string>>();
        for (const auto & a : j.at("audits"))
            r.audits.push_back({a.at("label").get<std::string>(), a.at("n").get<std::size_t>(),
                                a.at("fast").get<double>(), a.at("naive").get<double>()});
        if (j.at("trials").get<std::size_t>() != r.trials() || j.at("passes").get<std::size_t>() != r.passes())
            throw FormatError("report counts disagree with its records");
        return r;
    }
    catch (const nlohmann::json::exception & e) {
        throw FormatError(std::string("lemma report json: ") + e.what());
    }
}

inline std::string format_number(double x)
{
    std::ostringstream out;
    out.precision(17);
    out << x;
    return out.str();
}

/// One row per trial plus a summary row; observations go in a single
/// `key=value;...` column.
inline std::string to_csv(const LemmaReport & r)
{
    std::ostringstream out;
    out << "lemma_id,trial,seed,verdict,statistic,threshold,observations\n";
    for (const auto & t : r.records) {
        out << r.lemma_id << ',' << t.trial << ',' << t.seed << ',' << to_string(t.verdict) << ','
            << format_number(t.statistic) << ',' << format_number(r.threshold) << ',';
        bool first = true;
        for (const auto & [k, v] : t.observations) {
            out << (first ? "" : ";") << k << '=' << format_number(v);
            first = false;
        }
        out << '\n';
    }
    out << r.lemma_id << ",summary," << r.seed << ',' << r.passes() << '/' << r.trials() << ','
        << format_number(r.extreme()) << ',' << format_number(r.threshold) << ",one_sided="
        << (r.one_sided ? 1 : 0) << ";observational=" << (r.observational ? 1 : 0) << '\n';
    return out.str();
}

namespace detail {

inline double log_n(std::size_t n) { return std::log(static_cast<double>(std::max<std::size_t>(n, 2))); }

inline void validate_common(std::size_t n, double p, std::size_t trials)
{
    if (n < 2)
        throw ConfigError("lemma checks need n >= 2");
    if (! (p >= 0.0 && p <= 1.0))
        throw ConfigError("p must lie in [0, 1]");
    if (trials < 1)
        throw ConfigError("trials must be at least 1");
}

inline void validate_c(double c)
{
    if (! (c >= 0.0))
        throw ConfigError("tolerance multiplier c must be non-negative");
}

template <class Eval>
std::vector<LemmaTrial> run_trials(std::size_t trials, std::uint64_t seed, unsigned workers, Eval && eval)
{
    std::vector<LemmaTrial> out(trials);
    parallel_for(
        trials,
        [&](std::size_t t) {
            const std::uint64_t s = mix_seed(seed, t);
            LemmaTrial rec = eval(t, s);
            rec.trial = t;
            rec.seed = s;
            out[t] = std::move(rec);
        },
        workers);
    return out;
}

inline void require_agreement(const LemmaAudit & a)
{
    if (! a.agreed())
        throw std::logic_error("self-audit '" + a.label + "' disagrees: fast " + format_number(a.fast) + ", naive "
                               + format_number(a.naive));
}

/// Uniformly random order of [0, n).
inline std::vector<Vertex> shuffled_vertices(std::size_t n, std::uint64_t seed)
{
    std::vector<Vertex> order(n);
    for (Vertex v = 0; v < n; ++v)
        order[v] = v;
    Rng rng(seed);
    rng.shuffle(order);
    return order;
}

inline std::size_t naive_codegree_max(const Graph & g)
{
    std::size_t best = 0;
    for (Vertex u = 0; u < g.size(); ++u)
        for (Vertex v = u + 1; v < g.size(); ++v) {
            std::size_t common = 0;
            for (Vertex w = 0; w < g.size(); ++w)
                if (g.adjacent(u, w) && g.adjacent(v, w))
                    ++common;
            best = std::max(best, common);
        }
    return best;
}

inline std::vector<std::size_t> naive_degrees(const Graph & g)
{
    std::vector<std::size_t> out(g.size(), 0);
    for (Vertex u = 0; u < g.size(); ++u)
        for (Vertex v = 0; v < g.size(); ++v)
            if (g.adjacent(u, v))
                ++out[u];
    return out;
}

} // namespace detail

inline constexpr std::size_t codegree_audit_size = 192;
inline constexpr std::size_t degree_audit_size = 2000;

// ---------------------------------------------------------------- codegree

struct CodegreeThreshold
{
    double value = 0;
    bool sparse = false;
};

/// np² + c·sqrt(2np² log n), or 3 log^{3/2} n when np² falls below that.
inline CodegreeThreshold codegree_threshold(std::size_t n, double p, double c)
{
    const double ln = detail::log_n(n);
    const double mean = static_cast<double>(n) * p * p;
    const double sparse = 3.0 * std::pow(ln, 1.5);
    if (mean < sparse)
        return {sparse, true};
    return {mean + c * std::sqrt(2.0 * mean * ln), false};
}

inline LemmaTrial evaluate_codegree(const Graph & g, double threshold)
{
    LemmaTrial t;
    t.statistic = static_cast<double>(max_codegree(g));
    t.verdict = t.statistic <= threshold ? Verdict::pass : Verdict::fail;
    return t;
}

inline LemmaReport check_codegree(std::size_t n, double p, std::size_t trials, double c, std::uint64_t seed,
                                  unsigned workers = default_worker_count())
{
    detail::validate_common(n, p, trials);
    detail::validate_c(c);
    GnpConfig{n, p, seed}.validate(max_dense_vertices);
    const auto th = codegree_threshold(n, p, c);

    LemmaReport r;
    r.lemma_id = "codegree";
    r.n = n;
    r.p = p;
    r.c = c;
    r.seed = seed;
    r.threshold = th.value;
    r.records = detail::run_trials(trials, seed, workers, [&](std::size_t, std::uint64_t s) {
        auto t = evaluate_codegree(gen_gnp({n, p, s}), th.value);
        t.observations["sparse_branch"] = th.sparse ? 1 : 0;
        return t;
    });

    const std::size_t na = std::min(n, codegree_audit_size);
    Graph small = gen_gnp({na, p, mix_seed(seed, 0)});
    LemmaAudit audit{"max_codegree", na, static_cast<double>(max_codegree(small)),
                     static_cast<double>(detail::naive_codegree_max(small))};
    detail::require_agreement(audit);
    r.audits.push_back(audit);
    return r;
}

// ---------------------------------------------------------------- max degree

struct DegreeWindow
{
    double lower = 0; // np, exclusive
    double upper = 0; // np + c·sqrt(2np(1-p) log n), inclusive
    double literal_upper = 0; // 1.01 np
};

inline DegreeWindow maxdegree_window(std::size_t n, double p, double c)
{
    const double np = static_cast<double>(n) * p;
    return {np, np + c * std::sqrt(2.0 * np * (1.0 - p) * detail::log_n(n)), 1.01 * np};
}

inline LemmaTrial evaluate_maxdegree_window(std::span<const std::size_t> degrees, const DegreeWindow & w)
{
    LemmaTrial t;
    const auto delta = static_cast<double>(max_degree(degrees).degree);
    t.statistic = delta;
    t.verdict = (delta > w.lower && delta <= w.upper) ? Verdict::pass : Verdict::fail;
    t.observations["literal_window"] = (delta > w.lower && delta <= w.literal_upper) ? 1 : 0;
    return t;
}

inline LemmaReport check_maxdegree_window(std::size_t n, double p, std::size_t trials, double c,
                                          std::uint64_t seed, unsigned workers = default_worker_count())
{
    detail::validate_common(n, p, trials);
    detail::validate_c(c);
    GnpConfig{n, p, seed}.validate(max_streamed_vertices);
    const auto w = maxdegree_window(n, p, c);

    LemmaReport r;
    r.lemma_id = "maxdegree_window";
    r.n = n;
    r.p = p;
    r.c = c;
    r.seed = seed;
    r.threshold = w.upper;
    r.parameters = {{"lower", w.lower}, {"literal_upper", w.literal_upper}};
    r.records = detail::run_trials(trials, seed, workers, [&](std::size_t, std::uint64_t s) {
        auto deg = gnp_degrees({n, p, s});
        return evaluate_maxdegree_window(deg, w);
    });

    const std::size_t na = std::min(n, degree_audit_size);
    auto streamed = gnp_degrees({na, p, mix_seed(seed, 0)});
    auto naive = detail::naive_degrees(gen_gnp({na, p, mix_seed(seed, 0)}));
    LemmaAudit audit{"max_degree", na, static_cast<double>(max_degree(streamed).degree),
                     static_cast<double>(max_degree(naive).degree)};
    detail::require_agreement(audit);
    r.audits.push_back(audit);
    return r;
}

// ---------------------------------------------------------------- degree gap

/// Observational: records uniqueness of the maximum degree and the gap to
/// the second largest degree against sqrt(np)/log n.
inline LemmaTrial evaluate_degree_gap(std::span<const std::size_t> degrees, double expected_degree)
{
    LemmaTrial t;
    t.verdict = Verdict::observed;
    const auto top = max_degree(degrees);
    const auto gap = degree_gap(degrees);
    const double target = std::sqrt(std::max(expected_degree, 0.0)) / detail::log_n(degrees.size());
    t.statistic = static_cast<double>(gap);
    t.observations["max_degree"] = static_cast<double>(top.degree);
    t.observations["unique"] = top.argmax.size() == 1 ? 1 : 0;
    t.observations["gap_meets_target"] = static_cast<double>(gap) >= target ? 1 : 0;
    return t;
}

inline LemmaReport check_degree_gap_uniqueness(std::size_t n, double p, std::size_t trials, std::uint64_t seed,
                                               unsigned workers = default_worker_count())
{
    detail::validate_common(n, p, trials);
    GnpConfig{n, p, seed}.validate(max_streamed_vertices);
    const double np = static_cast<double>(n) * p;

    LemmaReport r;
    r.lemma_id = "degree_gap";
    r.n = n;
    r.p = p;
    r.seed = seed;
    r.threshold = std::sqrt(np) / detail::log_n(n);
    r.observational = true;
    r.records = detail::run_trials(trials, seed, workers, [&](std::size_t, std::uint64_t s) {
        auto deg = gnp_degrees({n, p, s});
        return evaluate_degree_gap(deg, np);
    });

    const std::size_t na = std::min(n, degree_audit_size);
    auto streamed = gnp_degrees({na, p, mix_seed(seed, 0)});
    auto naive = detail::naive_degrees(gen_gnp({na, p, mix_seed(seed, 0)}));
    LemmaAudit audit{"degree_gap", na, static_cast<double>(degree_gap(streamed)),
                     static_cast<double>(degree_gap(naive))};
    detail::require_agreement(audit);
    r.audits.push_back(audit);
    return r;
}

// ---------------------------------------------------------------- domination

struct DominationSizes
{
    std::size_t target = 0;    // |U| = ceil(alpha n p)
    std::size_t sets = 0;      // ceil(50 log n)
    std::size_t set_size = 0;  // ceil(1/p)
    double allowance = 0;      // alpha n p / 50 undominated vertices
    double reference = 0;      // 3^{-alpha n p / 50}
};

inline DominationSizes domination_sizes(std::size_t n, double p, double alpha)
{
    if (! (alpha > 0.0))
        throw ConfigError("alpha must be positive");
    if (! (p > 0.0 && p <= 1.0))
        throw ConfigError("domination check needs 0 < p <= 1");
    const double anp = alpha * static_cast<double>(n) * p;
    DominationSizes s;
    s.target = static_cast<std::size_t>(std::ceil(anp));
    s.sets = static_cast<std::size_t>(std::ceil(50.0 * detail::log_n(n)));
    s.set_size = static_cast<std::size_t>(std::ceil(1.0 / p));
    s.allowance = anp / 50.0;
    s.reference = std::pow(3.0, -anp / 50.0);
    if (s.target == 0 || s.target + s.sets * s.set_size > n)
        throw ConfigError("domination sizes infeasible: " + std::to_string(s.target) + " + "
                          + std::to_string(s.sets) + " * " + std::to_string(s.set_size) + " > n = "
                          + std::to_string(n));
    return s;
}

/// Vertices of `target` with no neighbor in `set`.
inline std::size_t undominated(const Graph & g, std::span<const Vertex> target, std::span<const Vertex> set)
{
    VertexSet nb(g.size());
    for (Vertex v : set)
        nb.unite(g.row(v));
    std::size_t out = 0;
    for (Vertex u : target)
        if (! nb.contains(u))
            ++out;
    return out;
}

/// Pass iff some set fails to almost dominate the target.
inline LemmaTrial evaluate_domination(const Graph & g, std::span<const Vertex> target,
                                      const std::vector<std::vector<Vertex>> & sets, double allowance)
{
    LemmaTrial t;
    std::size_t dominating = 0;
    std::size_t fewest = target.size();
    for (const auto & set : sets) {
        const std::size_t left = undominated(g, target, set);
        fewest = std::min(fewest, left);
        if (static_cast<double>(left) <= allowance)
            ++dominating;
    }
    t.statistic = sets.empty() ? 0.0 : static_cast<double>(dominating) / static_cast<double>(sets.size());
    t.verdict = (sets.empty() || dominating < sets.size()) ? Verdict::pass : Verdict::fail;
    t.observations["dominating_sets"] = static_cast<double>(dominating);
    t.observations["fewest_undominated"] = static_cast<double>(fewest);
    return t;
}

struct SampledSets
{
    std::vector<Vertex> target;
    std::vector<std::vector<Vertex>> sets;
};

/// Disjoint uniformly random target of size `target` and `count` sets of size `size`.
inline SampledSets sample_disjoint_sets(std::size_t n, std::size_t target, std::size_t count, std::size_t size,
                                        std::uint64_t seed)
{
    if (target + count * size > n)
        throw ConfigError("sampled sets do not fit in n vertices");
    auto order = detail::shuffled_vertices(n, seed);
    SampledSets out;
    out.target.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(target));
    std::size_t pos = target;
    for (std::size_t i = 0; i < count; ++i, pos += size)
        out.sets.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(pos),
                              order.begin() + static_cast<std::ptrdiff_t>(pos + size));
    return out;
}

inline LemmaReport check_domination(std::size_t n, double p, double alpha, std::size_t trials, std::uint64_t seed,
                                    unsigned workers = default_worker_count())
{
    detail::validate_common(n, p, trials);
    GnpConfig{n, p, seed}.validate(max_dense_vertices);
    const auto sz = domination_sizes(n, p, alpha);

    LemmaReport r;
    r.lemma_id = "domination";
    r.n = n;
    r.p = p;
    r.seed = seed;
    r.threshold = 1.0;
    r.parameters = {{"alpha", alpha},
                    {"target_size", static_cast<double>(sz.target)},
                    {"sets", static_cast<double>(sz.sets)},
                    {"set_size", static_cast<double>(sz.set_size)},
                    {"allowance", sz.allowance},
                    {"reference_bound", sz.reference}};
    r.records = detail::run_trials(trials, seed, workers, [&](std::size_t, std::uint64_t s) {
        Graph g = gen_gnp({n, p, s});
        auto pick = sample_disjoint_sets(n, sz.target, sz.sets, sz.set_size, mix_seed(s, 1));
        return evaluate_domination(g, pick.target, pick.sets, sz.allowance);
    });

    Graph g = gen_gnp({n, p, mix_seed(seed, 0)});
    auto pick = sample_disjoint_sets(n, sz.target, sz.sets, sz.set_size, mix_seed(mix_seed(seed, 0), 1));
    std::size_t naive = 0;
    for (const auto & set : pick.sets) {
        std::size_t left = 0;
        for (Vertex u : pick.target) {
            bool hit = false;
            for (Vertex v : set)
                hit = hit || g.adjacent(u, v);
            left += hit ? 0 : 1;
        }
        if (static_cast<double>(left) <= sz.allowance)
            ++naive;
    }
    LemmaAudit audit{"dominating_sets", n, r.records.front().observations.at("dominating_sets"),
                     static_cast<double>(naive)};
    detail::require_agreement(audit);
    r.audits.push_back(audit);
    return r;
}

// ---------------------------------------------------------------- Hall configurations

struct HallPoint
{
    std::size_t s = 0;
    std::size_t t = 0;

    std::string label() const { return "s=" + std::to_string(s) + ",t=" + std::to_string(t); }
};

struct HallGrid
{
    std::size_t set_size = 0;
    std::vector<HallPoint> points;
    std::vector<std::string> skipped;
};

/// s at np/2, np and 2np; t at both ends of [40 log n, s - 40 ceil(1/p) log n].
/// Points with t outside [1, s] or that do not fit in n vertices are skipped.
inline HallGrid hall_grid(std::size_t n, double p)
{
    if (! (p > 0.0) || p > 0.6)
        throw ConfigError("Hall configuration check needs 0 < p <= 3/5");
    const double np = static_cast<double>(n) * p;
    const double ln = detail::log_n(n);
    HallGrid grid;
    grid.set_size = static_cast<std::size_t>(std::ceil(1.0 / p));
    const double tail = std::ceil(40.0 * static_cast<double>(grid.set_size) * ln);
    for (double sd : {std::ceil(np / 2.0), std::ceil(np), std::floor(2.0 * np)}) {
        for (double td : {std::ceil(40.0 * ln), sd - tail}) {
            const std::string label = "s=" + format_number(sd) + ",t=" + format_number(td);
            if (td <= 0) {
                grid.skipped.push_back(label + ": t <= 0");
                continue;
            }
            if (td > sd) {
                grid.skipped.push_back(label + ": t > s");
                continue;
            }
            const auto s = static_cast<std::size_t>(sd);
            const auto t = static_cast<std::size_t>(td);
            if (s + t * grid.set_size > n) {
                grid.skipped.push_back(label + ": sets do not fit in n");
                continue;
            }
            HallPoint pt{s, t};
            bool dup = false;
            for (const auto & q : grid.points)
                dup = dup || (q.s == s && q.t == t);
            if (! dup)
                grid.points.push_back(pt);
        }
    }
    if (grid.points.empty())
        throw ConfigError("every Hall grid point is infeasible");
    return grid;
}

/// Number of target vertices with a neighbor in every set.
inline std::size_t covered_by_all(const Graph & g, std::span<const Vertex> target,
                                  const std::vector<std::vector<Vertex>> & sets)
{
    VertexSet alive = VertexSet::of(g.size(), target);
    for (const auto & set : sets) {
        VertexSet nb(g.size());
        for (Vertex v : set)
            nb.unite(g.row(v));
        alive.intersect(nb.words());
    }
    return alive.count();
}

/// statistic = max over points of covered / (s - t); a point fails at >= 1.
inline LemmaTrial evaluate_hall(const Graph & g, const HallGrid & grid, std::uint64_t seed)
{
    LemmaTrial rec;
    rec.verdict = Verdict::pass;
    for (std::size_t i = 0; i < grid.points.size(); ++i) {
        const auto & pt = grid.points[i];
        auto pick = sample_disjoint_sets(g.size(), pt.s, pt.t, grid.set_size, mix_seed(seed, i));
        const std::size_t covered = covered_by_all(g, pick.target, pick.sets);
        const std::size_t limit = pt.s - pt.t;
        const bool ok = covered < limit;
        const double ratio = limit == 0 ? (covered > 0 ? 1.0 : 0.0)
                                        : static_cast<double>(covered) / static_cast<double>(limit);
        rec.statistic = std::max(rec.statistic, ratio);
        rec.observations["pass[" + pt.label() + "]"] = ok ? 1 : 0;
        rec.observations["covered[" + pt.label() + "]"] = static_cast<double>(covered);
        if (! ok)
            rec.verdict = Verdict::fail;
    }
    return rec;
}

inline LemmaReport check_hall_configs(std::size_t n, double p, std::size_t trials, std::uint64_t seed,
                                      unsigned workers = default_worker_count())
{
    detail::validate_common(n, p, trials);
    GnpConfig{n, p, seed}.validate(max_dense_vertices);
    const auto grid = hall_grid(n, p);

    LemmaReport r;
    r.lemma_id = "hall_configs";
    r.n = n;
    r.p = p;
    r.seed = seed;
    r.threshold = 1.0;
    r.parameters = {{"set_size", static_cast<double>(grid.set_size)},
                    {"grid_points", static_cast<double>(grid.points.size())}};
    r.notes = grid.skipped;
    std::sort(r.notes.begin(), r.notes.end());
    r.records = detail::run_trials(trials, seed, workers, [&](std::size_t, std::uint64_t s) {
        return evaluate_hall(gen_gnp({n, p, s}), grid, mix_seed(s, 1));
    });

    const std::uint64_t s0 = mix_seed(seed, 0);
    Graph g = gen_gnp({n, p, s0});
    const auto & pt = grid.points.front();
    auto pick = sample_disjoint_sets(n, pt.s, pt.t, grid.set_size, mix_seed(mix_seed(s0, 1), 0));
    std::size_t naive = 0;
    for (Vertex u : pick.target) {
        bool all = true;
        for (const auto & set : pick.sets) {
            bool hit = false;
            for (Vertex v : set)
                hit = hit || g.adjacent(u, v);
            all = all && hit;
        }
        naive += all ? 1 : 0;
    }
    LemmaAudit audit{"covered[" + pt.label() + "]", n, r.records.front().observations.at("covered[" + pt.label() + "]"),
                     static_cast<double>(naive)};
    detail::require_agreement(audit);
    r.audits.push_back(audit);
    return r;
}

// ---------------------------------------------------------------- sparse subsets

struct SparseSubsetThresholds
{
    std::size_t core_degree = 0;     // ceil(3 C log² n)
    double size_bound = 0;           // C log² n / p
    std::size_t extra_neighbors = 0; // floor(8 log² n)
};

inline SparseSubsetThresholds sparse_subset_thresholds(std::size_t n, double p, double C)
{
    if (! (C >= 20.0))
        throw ConfigError("C must be at least 20");
    if (! (p > 0.0 && p <= 1.0))
        throw ConfigError("sparse subset check needs 0 < p <= 1");
    const double l2 = detail::log_n(n) * detail::log_n(n);
    return {static_cast<std::size_t>(std::ceil(3.0 * C * l2)),
            C * l2 / p,
            static_cast<std::size_t>(std::floor(8.0 * l2))};
}

/// Vertices of the k-core (maximal subgraph of minimum degree >= k), ascending.
inline std::vector<Vertex> k_core(const Graph & g, std::size_t k)
{
    const std::size_t n = g.size();
    auto deg = degrees(g);
    VertexSet alive(n);
    std::vector<Vertex> stack;
    for (Vertex v = 0; v < n; ++v) {
        if (deg[v] < k)
            stack.push_back(v);
        else
            alive.insert(v);
    }
    std::vector<char> queued(n, 0);
    for (Vertex v : stack)
        queued[v] = 1;
    while (! stack.empty()) {
        Vertex v = stack.back();
        stack.pop_back();
        for (Vertex u : g.neighbors(v)) {
            if (! alive.contains(u))
                continue;
            if (--deg[u] < k && ! queued[u]) {
                queued[u] = 1;
                alive.erase(u);
                stack.push_back(u);
            }
        }
    }
    return alive.members();
}

/// Up to `rounds` random perfect matchings of new edges; every vertex gains
/// at most `rounds` neighbors. Returns the number of edges added.
inline std::size_t add_extra_neighbors(Graph & g, std::size_t rounds, std::uint64_t seed)
{
    std::size_t added = 0;
    for (std::size_t round = 0; round < rounds; ++round) {
        auto order = detail::shuffled_vertices(g.size(), mix_seed(seed, round));
        for (std::size_t i = 0; i + 1 < order.size(); i += 2)
            if (! g.adjacent(order[i], order[i + 1])) {
                g.add_edge_unchecked(order[i], order[i + 1]);
                ++added;
            }
    }
    return added;
}

/// Pass iff the core is empty. A nonempty core is a fail when it is no larger
/// than the size bound and inconclusive otherwise.
inline LemmaTrial evaluate_sparse_subsets(const Graph & g, const SparseSubsetThresholds & th)
{
    LemmaTrial t;
    const auto core = k_core(g, th.core_degree);
    t.statistic = static_cast<double>(core.size());
    if (core.empty())
        t.verdict = Verdict::pass;
    else if (static_cast<double>(core.size()) <= th.size_bound)
        t.verdict = Verdict::fail;
    else
        t.verdict = Verdict::inconclusive;
    return t;
}

inline LemmaReport check_sparse_subsets(std::size_t n, double p, double C, std::size_t trials, std::uint64_t seed,
                                        unsigned workers = default_worker_count())
{
    detail::validate_common(n, p, trials);
    GnpConfig{n, p, seed}.validate(max_dense_vertices);
    const auto th = sparse_subset_thresholds(n, p, C);

    LemmaReport r;
    r.lemma_id = "sparse_subsets";
    r.n = n;
    r.p = p;
    r.seed = seed;
    r.threshold = static_cast<double>(th.core_degree);
    r.one_sided = true;
    r.parameters = {{"C", C},
                    {"size_bound", th.size_bound},
                    {"extra_neighbors", static_cast<double>(th.extra_neighbors)}};
    auto build = [&](std::uint64_t s, std::size_t & added) {
        Graph g = gen_gnp({n, p, s});
        added = add_extra_neighbors(g, th.extra_neighbors, mix_seed(s, 1));
        return g;
    };
    r.records = detail::run_trials(trials, seed, workers, [&](std::size_t, std::uint64_t s) {
        std::size_t added = 0;
        auto t = evaluate_sparse_subsets(build(s, added), th);
        t.observations["extra_edges"] = static_cast<double>(added);
        return t;
    });

    std::size_t added = 0;
    Graph g = build(mix_seed(seed, 0), added);
    VertexSet alive(g.size());
    for (Vertex v = 0; v < g.size(); ++v)
        alive.insert(v);
    for (bool changed = true; changed;) {
        changed = false;
        for (Vertex v = 0; v < g.size(); ++v)
            if (alive.contains(v) && g.count_neighbors_in(v, alive) < th.core_degree) {
                alive.erase(v);
                changed = true;
            }
    }
    LemmaAudit audit{"core_size", n, r.records.front().statistic, static_cast<double>(alive.count())};
    detail::require_agreement(audit);
    r.audits.push_back(audit);
    return r;
}

} // namespace strongcol
