// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "oracles.hpp"

#include <strongcol/io.hpp>
#include <strongcol/strongcol.hpp>

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

using namespace strongcol;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double exact_time_limit_seconds = 600.0;
constexpr std::size_t corpus_size = 50;
constexpr std::size_t soundness_runs = 200;
constexpr std::size_t completeness_seeds = 20;
constexpr double completeness_target = 0.90;
constexpr std::size_t resampling_instances = 100;
constexpr std::size_t resampling_min_successes = 95;
constexpr std::size_t tiny_instances = 200;
constexpr std::size_t matching_instances = 100;
constexpr std::size_t calibration_trials = 20;
constexpr double calibration_pass_rate = 0.95;
constexpr double calibration_c = 3.0;
constexpr double tail_budget = 0.01; // per-trial exceedance probability allowed by the oracle

const std::string cli = STRONGCOL_CLI_PATH;
const fs::path data = STRONGCOL_DATA_DIR;

struct Outcome
{
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string & what)
    {
        if (! ok) {
            pass = false;
            detail << " [violated: " << what << "]";
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ------------------------------------------------------------------ 1

Outcome exact_values()
{
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    const auto c6 = strong_chromatic_number_exact(cycle_graph(6)).value;
    const auto c9 = strong_chromatic_number_exact(cycle_graph(9), 9).value;
    const auto k4 = strong_chromatic_number_exact(complete_graph(4)).value;
    o.require(c6 == 3, "C6 = 3");
    o.require(c9 == 3, "C9 = 3");
    o.require(k4 == 4, "K4 = 4");
    for (std::size_t n = 1; n <= 8; ++n)
        o.require(strong_chromatic_number_exact(Graph(n)).value == 1, "edgeless n=" + std::to_string(n) + " = 1");

    Graph pair = disjoint_complete_bipartite(2, 2);
    auto res = strong_chromatic_number_exact(pair);
    o.require(res.value == 4, "two K22 = 4");
    Graph padded = pad_isolated(pair, 3);
    auto construction = complete_bipartite_refutation(2, 2);
    o.require(! is_strongly_k_colorable_for_partition(padded, construction), "construction partition refutes k=3");
    o.require(! oracle::rainbow_coloring_exists(padded, construction), "oracle agrees on construction partition");
    o.require(res.refutation && res.refutation->k == 3 && ! is_strongly_k_colorable_for_partition(padded, *res.refutation),
              "reported refutation rechecks");
    const double secs = seconds_since(t0);
    o.require(secs < exact_time_limit_seconds, "runtime below limit");
    o.detail << "C6=" << c6 << " C9=" << c9 << " K4=" << k4 << " 2xK22=" << res.value << " in " << secs << "s";
    return o;
}

// ------------------------------------------------------------------ 2, 3

struct CorpusGraph
{
    Graph g;
    double p;
};

std::vector<CorpusGraph> small_corpus()
{
    const double ps[] = {0.3, 0.5, 0.7};
    std::vector<CorpusGraph> out;
    for (std::size_t i = 0; i < corpus_size; ++i) {
        Rng rng(mix_seed(2024, i));
        const std::size_t n = 2 + rng.below(6);
        const double p = ps[i % 3];
        out.push_back({gen_gnp({n, p, mix_seed(2025, i)}), p});
    }
    return out;
}

Outcome oracle_equivalence(const std::vector<CorpusGraph> & corpus)
{
    Outcome o;
    std::size_t triples = 0, agree = 0;
    for (const auto & [g, p] : corpus) {
        const std::size_t delta = max_degree(g).degree;
        for (std::size_t k = std::max<std::size_t>(1, delta); k <= g.size(); ++k) {
            Graph padded = pad_isolated(g, k);
            for_each_equal_partition(padded.size(), k, [&](const std::vector<Part> & parts) {
                VertexPartition vp{k, parts};
                ++triples;
                if (is_strongly_k_colorable_for_partition(padded, vp) == oracle::rainbow_coloring_exists(padded, vp))
                    ++agree;
            });
        }
    }
    o.require(agree == triples, "all triples agree");
    o.detail << agree << "/" << triples << " (graph, partition, k) triples agree";
    return o;
}

Outcome monotonicity(const std::vector<CorpusGraph> & corpus)
{
    Outcome o;
    std::size_t steps = 0, monotone = 0, bounded = 0, with_edges = 0, witness_fails = 0;
    for (const auto & [g, p] : corpus) {
        const std::size_t delta = max_degree(g).degree;
        const std::size_t top = g.size() + 1;
        std::vector<bool> colorable(top + 1, false);
        for (std::size_t k = std::max<std::size_t>(1, delta); k <= top; ++k)
            colorable[k] = strongly_k_colorable(g, k).colorable;
        for (std::size_t k = std::max<std::size_t>(1, delta); k < top; ++k) {
            ++steps;
            if (! colorable[k] || colorable[k + 1])
                ++monotone;
        }
        if (delta >= 1) {
            ++with_edges;
            if (strong_chromatic_number_exact(g).value >= delta + 1)
                ++bounded;
            auto witness = lower_bound_partition(g, delta);
            if (! is_strongly_k_colorable_for_partition(pad_isolated(g, delta), witness))
                ++witness_fails;
        }
    }
    o.require(monotone == steps, "monotone in k");
    o.require(bounded == with_edges, "value >= max degree + 1");
    o.require(witness_fails == with_edges, "lower-bound witness fails at k = max degree");
    o.detail << "monotone " << monotone << "/" << steps << ", lower bound " << bounded << "/" << with_edges
             << ", witness fails " << witness_fails << "/" << with_edges;
    return o;
}

// ------------------------------------------------------------------ 4, 5

Outcome pipeline_soundness()
{
    Outcome o;
    std::size_t emitted = 0, verified = 0;
    for (std::size_t i = 0; i < soundness_runs; ++i) {
        Rng rng(mix_seed(77, i));
        const std::size_t n = 50 + rng.below(451);
        const double p = 0.2 + 0.5 * rng.uniform();
        const std::uint64_t s = mix_seed(78, i);
        Graph g = gen_gnp({n, p, s});
        const std::size_t k = max_degree(g).degree + 1;
        Graph padded = pad_isolated(g, k);
        auto vp = random_equal_partition(padded.size(), k, mix_seed(s, 1));
        auto run = decompose_dense(padded, vp, {}, mix_seed(s, 2));
        if (run.certificate) {
            ++emitted;
            bool ok = verify_certificate(padded, vp, *run.certificate);
            for (std::size_t c = 0; c < k && ok; ++c)
                ok = verify_transversal(padded, vp.parts, color_class(vp, *run.certificate, c));
            verified += ok ? 1 : 0;
        }
    }
    o.require(verified == emitted, "every certificate verifies");
    o.detail << verified << "/" << emitted << " certificates verify over " << soundness_runs << " runs";
    return o;
}

Outcome pipeline_completeness()
{
    Outcome o;
    std::size_t ok = 0;
    DenseConfig cfg;
    cfg.hall_retry_budget = 100;
    for (std::uint64_t s = 0; s < completeness_seeds; ++s) {
        Graph g = gen_gnp({200, 0.5, s});
        const std::size_t k = max_degree(g).degree + 1;
        Graph padded = pad_isolated(g, k);
        auto vp = random_equal_partition(padded.size(), k, mix_seed(s, 1));
        auto run = decompose_dense(padded, vp, cfg, mix_seed(s, 2));
        if (run.certificate && verify_certificate(padded, vp, *run.certificate))
            ++ok;
    }
    const double rate = static_cast<double>(ok) / static_cast<double>(completeness_seeds);
    o.require(rate >= completeness_target, "success rate >= target");
    o.detail << ok << "/" << completeness_seeds << " succeed (target " << completeness_target << ")";
    return o;
}

// ------------------------------------------------------------------ 6, 7, 8

Outcome resampling_regime()
{
    Outcome o;
    std::size_t success = 0, verified = 0, regime = 0;
    for (std::size_t i = 0; i < resampling_instances; ++i) {
        Rng rng(mix_seed(91, i));
        const std::size_t n = 300 + rng.below(301);
        const double p = 0.005 + 0.02 * rng.uniform();
        const std::uint64_t s = mix_seed(92, i);
        Graph g = gen_gnp({n, p, s});
        const std::size_t delta = std::max<std::size_t>(1, max_degree(g).degree);
        const auto size = static_cast<std::size_t>(std::ceil(2.0 * std::exp(1.0) * static_cast<double>(delta)));
        const std::size_t r = std::max<std::size_t>(1, n / size);
        auto parts = random_disjoint_parts(n, size, r, mix_seed(s, 1));

        Graph induced(n);
        std::vector<char> in_union(n, 0);
        for (const auto & part : parts)
            for (Vertex v : part)
                in_union[v] = 1;
        for (auto [u, v] : g.edges())
            if (in_union[u] && in_union[v])
                induced.add_edge(u, v);
        const auto need = static_cast<std::size_t>(
            std::ceil(2.0 * std::exp(1.0) * static_cast<double>(max_degree(induced).degree)));
        regime += size >= need ? 1 : 0;

        const std::size_t m = edges_within_union(g, parts);
        auto t = resampling_transversal(g, parts, 100 * std::max<std::size_t>(m, 1), mix_seed(s, 2));
        if (t) {
            ++success;
            verified += verify_transversal(g, parts, *t) ? 1 : 0;
        }
    }
    o.require(regime == resampling_instances, "every instance in regime");
    o.require(success >= resampling_min_successes, "successes >= minimum");
    o.require(verified == success, "every success verifies");
    o.detail << success << "/" << resampling_instances << " succeed, " << verified << " verify";
    return o;
}

Outcome transversal_equivalence()
{
    Outcome o;
    std::size_t infeasible = 0, all_absent = 0;
    for (std::uint64_t s = 0; s < tiny_instances; ++s) {
        Rng rng(mix_seed(31, s));
        const std::size_t r = 1 + rng.below(5);
        const std::size_t size = 1 + rng.below(4);
        const std::size_t n = std::min<std::size_t>(20, r * size + rng.below(5));
        const double p = 0.15 + 0.6 * rng.uniform();
        Graph g = gen_gnp({n, p, mix_seed(32, s)});
        auto parts = random_disjoint_parts(n, size, r, mix_seed(33, s));
        if (oracle::transversal_exists(g, parts))
            continue;
        ++infeasible;
        const bool absent = ! greedy_transversal(g, parts) && ! resampling_transversal(g, parts, 10000, s)
                            && ! pinned_transversal(g, parts, {}, s);
        all_absent += absent ? 1 : 0;
    }
    o.require(infeasible > 0, "suite contains infeasible instances");
    o.require(all_absent == infeasible, "all algorithms absent when none exists");
    o.detail << all_absent << "/" << infeasible << " infeasible instances answered absent by all three";
    return o;
}

Outcome matching_correctness()
{
    Outcome o;
    std::size_t agree = 0, violators = 0, rechecked = 0;
    for (std::uint64_t s = 0; s < matching_instances; ++s) {
        Rng rng(mix_seed(51, s));
        const std::size_t left = 1 + rng.below(15);
        const std::size_t right = left + rng.below(3);
        const double p = 0.05 + 0.4 * rng.uniform();
        BipartiteGraph h(left, right);
        for (std::size_t l = 0; l < left; ++l)
            for (std::size_t r = 0; r < right; ++r)
                if (rng.bernoulli(p))
                    h.add_edge(l, r);
        agree += max_matching(h).size == oracle::max_flow_matching(h) ? 1 : 0;
        auto res = perfect_matching_or_violator(h);
        if (! res.perfect()) {
            ++violators;
            const auto & v = res.violator();
            rechecked += neighborhood(h, v.left).size() < v.left.size() ? 1 : 0;
        }
    }
    o.require(agree == matching_instances, "sizes agree with max flow");
    o.require(rechecked == violators, "violators recheck");
    o.detail << agree << "/" << matching_instances << " sizes agree, " << rechecked << "/" << violators
             << " violators recheck";
    return o;
}

// ------------------------------------------------------------------ 9

Outcome lemma_calibration()
{
    Outcome o;
    const std::size_t n = 10000;
    const double log_pairs = std::log(static_cast<double>(n) * static_cast<double>(n - 1) / 2.0);
    for (double p : {0.05, 0.1}) {
        auto th = codegree_threshold(n, p, calibration_c);
        const auto beyond = static_cast<std::size_t>(std::floor(th.value)) + 1;
        const double codegree_tail = log_pairs + oracle::log_binomial_upper_tail(n - 2, p * p, beyond);
        auto w = maxdegree_window(n, p, calibration_c);
        const auto over = static_cast<std::size_t>(std::floor(w.upper)) + 1;
        const double degree_tail = std::log(double(n)) + oracle::log_binomial_upper_tail(n - 1, p, over);
        o.require(codegree_tail < std::log(tail_budget), "codegree threshold pre-validated at p=" + std::to_string(p));
        o.require(degree_tail < std::log(tail_budget), "degree window pre-validated at p=" + std::to_string(p));

        auto cg = check_codegree(n, p, calibration_trials, calibration_c, mix_seed(9, 1));
        auto md = check_maxdegree_window(n, p, calibration_trials, calibration_c, mix_seed(9, 2));
        o.require(cg.pass_rate() >= calibration_pass_rate, "codegree pass rate at p=" + std::to_string(p));
        o.require(md.pass_rate() >= calibration_pass_rate, "max degree pass rate at p=" + std::to_string(p));
        o.detail << "p=" << p << ": codegree " << cg.passes() << "/" << cg.trials() << " (max " << cg.extreme()
                 << " <= " << th.value << "), maxdegree " << md.passes() << "/" << md.trials() << "; ";
    }

    const std::size_t sn = 5000;
    const double sp = 0.02, big_c = 20.0;
    auto sub = check_sparse_subsets(sn, sp, big_c, calibration_trials, mix_seed(9, 3));
    o.require(sub.passes() == calibration_trials, "sparse subsets pass every trial");

    const auto th = sparse_subset_thresholds(sn, sp, big_c);
    std::size_t control_fails = 0;
    for (std::size_t t = 0; t < calibration_trials; ++t) {
        const std::uint64_t s = mix_seed(mix_seed(9, 4), t);
        Graph g = gen_gnp({sn, sp, s});
        add_extra_neighbors(g, th.extra_neighbors, mix_seed(s, 1));
        auto order = detail::shuffled_vertices(sn, mix_seed(s, 2));
        order.resize(th.core_degree + 1);
        add_clique(g, order);
        control_fails += evaluate_sparse_subsets(g, th).verdict == Verdict::fail ? 1 : 0;
    }
    o.require(control_fails == calibration_trials, "injected clique fails every trial");
    o.detail << "sparse subsets " << sub.passes() << "/" << sub.trials() << ", injected clique fails "
             << control_fails << "/" << calibration_trials;
    return o;
}

// ------------------------------------------------------------------ 10

int run_cli(const std::string & args, const fs::path & stdout_file)
{
    const std::string cmd = cli + " " + args + " >" + stdout_file.string() + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome determinism()
{
    Outcome o;
    const fs::path dir = fs::temp_directory_path() / "strongcol_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    auto sample = [](const std::string & name) { return (data / name).string(); };
    const fs::path graph = dir / "g.txt";
    run_cli("gen --n 120 --p 0.3 --seed 8 --out " + graph.string(), dir / "gen0.out");

    struct Case
    {
        std::string name;
        std::function<std::string(const fs::path &)> args;
        std::vector<std::string> files;
        bool compare_stdout;
        int expected = 0;
    };
    auto out = [](const fs::path & run, const std::string & f) { return (run / f).string(); };
    std::vector<Case> cases = {
        {"gen", [&](const fs::path & r) { return "gen --n 300 --p 0.2 --seed 3 --out " + out(r, "g.txt"); }, {"g.txt"},
         false, 0},
        {"color",
         [&](const fs::path & r) {
             return "color --graph " + graph.string() + " --random-partition 60 --seed 4 --out " + out(r, "c.json");
         },
         {"c.json"}, false, 0},
        {"transversal-greedy",
         [&](const fs::path & r) {
             return "transversal --algo greedy --graph " + sample("c6.txt") + " --partition "
                    + sample("c6_alternating.json") + " --seed 5 --out " + out(r, "t.json");
         },
         {"t.json"}, false, 0},
        {"transversal-lll",
         [&](const fs::path & r) {
             return "transversal --algo lll --graph " + sample("c6.txt") + " --partition "
                    + sample("c6_alternating.json") + " --seed 5 --out " + out(r, "t.json");
         },
         {"t.json"}, false, 0},
        {"transversal-sparse",
         [&](const fs::path & r) {
             return "transversal --algo sparse --graph " + sample("c6.txt") + " --partition "
                    + sample("c6_alternating.json") + " --seed 5 --out " + out(r, "t.json");
         },
         {"t.json"}, false, 0},
        {"schrom-exact",
         [&](const fs::path & r) { return "schrom-exact --graph " + sample("two_k22.txt") + " --out " + out(r, "s.json"); },
         {"s.json"}, true, 0},
        {"lemmas",
         [&](const fs::path & r) {
             return "lemmas --lemma maxdegree --n 2000 --p 0.1 --trials 4 --seed 6 --out " + out(r, "l.csv")
                    + " --json " + out(r, "l.json");
         },
         {"l.csv", "l.json"}, false, 0},
        {"experiment",
         [&](const fs::path & r) {
             return "experiment --n 60,90 --p 0.3,0.5 --reps 2 --seed 7 --out " + out(r, "x.csv");
         },
         {"x.csv"}, false, 0},
    };

    std::size_t identical = 0;
    for (const auto & c : cases) {
        std::vector<std::string> captured[2];
        bool codes_ok = true;
        for (int rep = 0; rep < 2; ++rep) {
            const fs::path run = dir / (c.name + "_" + std::to_string(rep));
            fs::create_directories(run);
            const int code = run_cli(c.args(run), run / "stdout");
            codes_ok = codes_ok && code == c.expected;
            for (const auto & f : c.files)
                captured[rep].push_back(io::read_text(run / f));
            if (c.compare_stdout)
                captured[rep].push_back(io::read_text(run / "stdout"));
        }
        const bool same = codes_ok && captured[0] == captured[1];
        o.require(same, c.name + " reproduces");
        identical += same ? 1 : 0;
    }
    fs::remove_all(dir);
    o.detail << identical << "/" << cases.size() << " subcommand runs byte-identical";
    return o;
}

} // namespace

int main()
{
    struct Criterion
    {
        int id;
        std::string title;
        std::function<Outcome()> run;
    };
    const auto corpus = small_corpus();
    std::vector<Criterion> criteria = {
        {1, "exact known values", exact_values},
        {2, "oracle equivalence", [&] { return oracle_equivalence(corpus); }},
        {3, "monotonicity and lower bound", [&] { return monotonicity(corpus); }},
        {4, "pipeline soundness", pipeline_soundness},
        {5, "pipeline completeness", pipeline_completeness},
        {6, "resampling guarantee regime", resampling_regime},
        {7, "transversal exhaustive equivalence", transversal_equivalence},
        {8, "matching correctness", matching_correctness},
        {9, "lemma harness calibration", lemma_calibration},
        {10, "determinism", determinism},
    };
    int failed = 0;
    for (const auto & c : criteria) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        }
        catch (const std::exception & e) {
            o.pass = false;
            o.detail << "exception: " << e.what();
        }
        std::cout << "criterion " << c.id << " " << (o.pass ? "PASS" : "FAIL") << ": " << c.title << ": "
                  << o.detail.str() << " (" << seconds_since(t0) << "s)" << std::endl;
        failed += o.pass ? 0 : 1;
    }
    std::cout << (failed == 0 ? "all criteria pass" : std::to_string(failed) + " criteria failed") << std::endl;
    return failed == 0 ? 0 : 1;
}
