#include <strongcol/strongcol.hpp>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace strongcol;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_error = 1;
constexpr int exit_failure = 2;

/// Structured "no object produced" outcome, reported with exit code 2.
struct Failure
{
    std::string reason;
};

std::uint64_t default_seed()
{
    const char * env = std::getenv("STRONGCOL_SEED");
    if (! env || ! *env)
        return 1;
    try {
        std::size_t used = 0;
        auto value = std::stoull(env, &used, 0);
        if (used != std::string(env).size())
            throw std::invalid_argument(env);
        return value;
    }
    catch (const std::exception &) {
        throw ConfigError(std::string("STRONGCOL_SEED is not an unsigned integer: ") + env);
    }
}

void note_regime(std::size_t n, double p)
{
    const auto regime = gnp_regime(n, p);
    if (regime != "dense")
        std::cerr << "note: n = " << n << ", p = " << p << " lies in the " << regime
                  << " regime; the dense-case guarantees are asymptotic and advisory only\n";
}

class Metadata
{
public:
    Metadata(std::string command, std::vector<std::string> argv, std::uint64_t seed) :
        start_(std::chrono::steady_clock::now())
    {
        doc_["command"] = std::move(command);
        doc_["argv"] = std::move(argv);
        doc_["seed"] = seed;
        doc_["parameters"] = json::object();
        doc_["budgets"] = json::object();
        doc_["version"] = "0.1.0";
    }

    json & parameters() { return doc_["parameters"]; }
    json & budgets() { return doc_["budgets"]; }

    void write(const fs::path & out, const std::string & outcome, const std::string & reason = {})
    {
        doc_["outcome"] = outcome;
        if (! reason.empty())
            doc_["reason"] = reason;
        doc_["wall_time_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        io::write_text(fs::path(out.string() + ".meta.json"), doc_.dump(2) + "\n");
    }

private:
    std::chrono::steady_clock::time_point start_;
    json doc_;
};

struct Options
{
    std::uint64_t seed = 0;
    // gen
    std::size_t n = 0;
    double p = 0;
    std::string out;
    // color / transversal / schrom-exact
    std::string graph;
    std::string partition;
    std::optional<std::size_t> random_partition;
    std::size_t hall_retries = 100;
    std::size_t restarts = 3;
    std::optional<double> expected_degree;
    double dense_epsilon = 0.1;
    std::string algo = "lll";
    std::vector<std::string> pins;
    std::optional<std::size_t> cap;
    double sparse_epsilon = 0.2;
    std::size_t guard = default_strong_size_guard;
    // lemmas
    std::string lemma = "codegree";
    std::size_t trials = 20;
    double c = 3.0;
    double alpha = 1.0;
    double big_c = 20.0;
    std::string json_out;
    // experiment
    std::vector<std::size_t> grid_n;
    std::vector<double> grid_p;
    std::size_t reps = 1;
    unsigned workers = default_worker_count();
};

VertexPartition load_or_draw_partition(const Options & o, Graph & g)
{
    VertexPartition parts;
    if (o.random_partition) {
        const std::size_t k = *o.random_partition;
        if (k == 0)
            throw ConfigError("--random-partition needs k >= 1");
        g = pad_isolated(g, k);
        parts = random_equal_partition(g.size(), k, mix_seed(o.seed, 0x9a27));
    }
    else {
        parts = io::read_partition(o.partition);
        if (parts.k == 0)
            throw FormatError("partition file must give k for colorings");
        g = pad_isolated(g, parts.k);
    }
    return parts;
}

int run_gen(const Options & o, const std::vector<std::string> & argv)
{
    Metadata meta("gen", argv, o.seed);
    meta.parameters() = {{"n", o.n}, {"p", o.p}, {"out", o.out}, {"regime", gnp_regime(o.n, o.p)}};
    note_regime(o.n, o.p);
    Graph g = gen_gnp({o.n, o.p, o.seed});
    io::write_graph(o.out, g);
    meta.budgets() = {{"edges", g.edge_count()}};
    meta.write(o.out, "success");
    std::cout << "wrote " << o.out << " (" << g.size() << " vertices, " << g.edge_count() << " edges)\n";
    return exit_ok;
}

int run_color(const Options & o, const std::vector<std::string> & argv)
{
    Metadata meta("color", argv, o.seed);
    Graph g = io::read_graph(o.graph);
    VertexPartition parts = load_or_draw_partition(o, g);

    DenseConfig cfg;
    cfg.hall_retry_budget = o.hall_retries;
    cfg.restart_budget = o.restarts;
    cfg.expected_degree = o.expected_degree;
    cfg.epsilon = o.dense_epsilon;
    meta.parameters() = {{"graph", o.graph},
                         {"partition", o.partition},
                         {"random_partition", o.random_partition ? json(*o.random_partition) : json(nullptr)},
                         {"k", parts.k},
                         {"hall_retry_budget", cfg.hall_retry_budget},
                         {"restart_budget", cfg.restart_budget},
                         {"expected_degree", cfg.expected_degree ? json(*cfg.expected_degree) : json(nullptr)},
                         {"epsilon", cfg.epsilon},
                         {"out", o.out}};

    DenseRun run = decompose_dense(g, parts, cfg, o.seed);
    meta.budgets() = {{"path", run.path},
                      {"attempts", run.attempts},
                      {"hall_retries", run.hall_retries},
                      {"hall_violators", run.violators.size()},
                      {"step1_deletions", run.step1_deletions},
                      {"step2_deletions", run.step2_deletions},
                      {"step3_iterations", run.step3_iterations},
                      {"step3_deletions", run.step3_deletions},
                      {"step4_transversals", run.step4_transversals},
                      {"max_degree", run.max_degree},
                      {"max_degree_vertex", run.max_degree_vertex},
                      {"max_degree_tie", run.max_degree_tie}};
    if (! run.certificate) {
        meta.write(o.out, "failure", run.failure);
        throw Failure{run.failure};
    }
    if (! verify_certificate(g, parts, *run.certificate))
        throw std::logic_error("refusing to write an unverified certificate");
    json doc = io::to_json(*run.certificate);
    doc["partition"] = io::to_json(parts);
    io::write_text(o.out, io::dump(doc));
    meta.write(o.out, "success");
    std::cout << "verified strong " << parts.k << "-coloring written to " << o.out << "\n";
    return exit_ok;
}

Pin parse_pin(const std::string & text)
{
    auto colon = text.find(':');
    try {
        if (colon == std::string::npos)
            throw std::invalid_argument(text);
        std::size_t a = 0, b = 0;
        Pin pin{std::stoul(text.substr(0, colon), &a), std::stoul(text.substr(colon + 1), &b)};
        if (a != colon || b != text.size() - colon - 1)
            throw std::invalid_argument(text);
        return pin;
    }
    catch (const std::logic_error &) {
        throw ConfigError("pin must look like part:vertex, got '" + text + "'");
    }
}

int run_transversal(const Options & o, const std::vector<std::string> & argv)
{
    Metadata meta("transversal", argv, o.seed);
    Graph g = io::read_graph(o.graph);
    VertexPartition vp = io::read_partition(o.partition);
    const auto & parts = vp.parts;
    validate_disjoint(parts, g.size());

    std::vector<Pin> pins;
    for (const auto & text : o.pins)
        pins.push_back(parse_pin(text));
    validate_pins(g, parts, pins);

    meta.parameters() = {{"graph", o.graph}, {"partition", o.partition}, {"algo", o.algo},
                         {"pins", o.pins},   {"cap", o.cap ? json(*o.cap) : json(nullptr)},
                         {"sparse_epsilon", o.sparse_epsilon}, {"out", o.out}};

    // pinned parts shrink to their pin; the chosen algorithm runs on the rest
    VertexSet blocked(g.size());
    for (const Pin & pin : pins)
        blocked.unite(g.row(pin.vertex));
    std::vector<Part> residual(parts.size());
    for (std::size_t i = 0; i < parts.size(); ++i)
        for (Vertex v : parts[i])
            if (! blocked.contains(v))
                residual[i].push_back(v);
    for (const Pin & pin : pins)
        residual[pin.part] = {pin.vertex};

    std::optional<Transversal> result;
    std::string reason;
    json budgets = json::object();
    if (o.algo == "greedy") {
        GreedyStats stats;
        result = greedy_transversal(g, residual, default_domination_fraction, &stats);
        budgets = {{"dominating_sets_removed", stats.dominating_sets_removed},
                   {"vertices_removed", stats.vertices_removed}};
        if (! result)
            reason = "greedy extension blocked";
    }
    else if (o.algo == "lll") {
        const std::size_t cap = o.cap.value_or(100 * (edges_within_union(g, residual) + 1));
        ResampleStats stats;
        result = resampling_transversal(g, residual, cap, o.seed, &stats);
        budgets = {{"resample_cap", cap}, {"resamples", stats.resamples}};
        if (! result)
            reason = "resampling cap exhausted";
    }
    else {
        SparseConfig cfg;
        cfg.epsilon = o.sparse_epsilon;
        cfg.transversal_resample_cap = o.cap;
        try {
            SparseRun run = sparse_transversal(g, residual, cfg, o.seed);
            result = run.transversal;
            reason = run.failure;
            budgets = {{"attempts", run.attempts},
                       {"short_circuit", run.short_circuit},
                       {"clique_edges_added", run.clique_edges_added},
                       {"first_chain_levels", run.first_chain.size()},
                       {"second_chain_levels", run.second_chain.size()},
                       {"stages", run.stages.size()},
                       {"final_resamples", run.final_resamples}};
        }
        catch (const PreconditionError & e) {
            reason = std::string("precondition not met: ") + e.what();
        }
    }
    meta.budgets() = budgets;
    if (! result) {
        meta.write(o.out, "failure", reason);
        throw Failure{reason};
    }
    if (! verify_transversal(g, parts, *result))
        throw std::logic_error("refusing to write an unverified transversal");
    for (const Pin & pin : pins)
        if (result->choice[pin.part] != pin.vertex)
            throw std::logic_error("transversal lost a pin");
    io::write_text(o.out, io::dump(io::to_json(*result)));
    meta.write(o.out, "success");
    std::cout << "verified independent transversal written to " << o.out << "\n";
    return exit_ok;
}

int run_schrom(const Options & o, const std::vector<std::string> & argv)
{
    Metadata meta("schrom-exact", argv, o.seed);
    Graph g = io::read_graph(o.graph);
    meta.parameters() = {{"graph", o.graph}, {"guard", o.guard}, {"out", o.out}};
    auto res = strong_chromatic_number_exact(g, o.guard, 1);
    std::cout << res.value << "\n";
    if (! o.out.empty()) {
        json doc = {{"value", res.value},
                    {"partitions_checked", res.partitions_checked},
                    {"refutation", res.refutation ? io::to_json(*res.refutation) : json(nullptr)}};
        io::write_text(o.out, io::dump(doc));
        meta.budgets() = {{"partitions_checked", res.partitions_checked}};
        meta.write(o.out, "success");
    }
    return exit_ok;
}

int run_lemmas(const Options & o, const std::vector<std::string> & argv)
{
    Metadata meta("lemmas", argv, o.seed);
    note_regime(o.n, o.p);
    LemmaReport r;
    const std::string & id = o.lemma;
    if (id == "codegree")
        r = check_codegree(o.n, o.p, o.trials, o.c, o.seed, 1);
    else if (id == "maxdegree")
        r = check_maxdegree_window(o.n, o.p, o.trials, o.c, o.seed, 1);
    else if (id == "gap")
        r = check_degree_gap_uniqueness(o.n, o.p, o.trials, o.seed, 1);
    else if (id == "domination")
        r = check_domination(o.n, o.p, o.alpha, o.trials, o.seed, 1);
    else if (id == "hall")
        r = check_hall_configs(o.n, o.p, o.trials, o.seed, 1);
    else
        r = check_sparse_subsets(o.n, o.p, o.big_c, o.trials, o.seed, 1);

    const std::string csv = to_csv(r);
    if (o.out.empty())
        std::cout << csv;
    else
        io::write_text(o.out, csv);
    if (! o.json_out.empty())
        io::write_text(o.json_out, io::dump(to_json(r)));
    if (! o.out.empty()) {
        meta.parameters() = {{"lemma", id},   {"n", o.n},         {"p", o.p},       {"trials", o.trials},
                             {"c", o.c},      {"alpha", o.alpha}, {"C", o.big_c},   {"out", o.out},
                             {"json", o.json_out}, {"regime", gnp_regime(o.n, o.p)}};
        meta.budgets() = {{"trials", r.trials()}, {"passes", r.passes()}};
        meta.write(o.out, "success");
        std::cout << id << ": " << r.passes() << "/" << r.trials() << " pass, extreme " << r.extreme()
                  << ", threshold " << r.threshold << "\n";
    }
    return exit_ok;
}

int run_experiment(const Options & o, const std::vector<std::string> & argv)
{
    Metadata meta("experiment", argv, o.seed);
    struct Cell
    {
        std::size_t n;
        double p;
        std::size_t rep;
    };
    std::vector<Cell> cells;
    for (std::size_t n : o.grid_n)
        for (double p : o.grid_p)
            for (std::size_t rep = 0; rep < o.reps; ++rep)
                cells.push_back({n, p, rep});
    for (const auto & cell : cells)
        GnpConfig{cell.n, cell.p, 0}.validate(max_dense_vertices);

    std::vector<std::string> rows(cells.size());
    parallel_for(
        cells.size(),
        [&](std::size_t i) {
            const auto & cell = cells[i];
            const std::uint64_t s = mix_seed(o.seed, i);
            Graph g = gen_gnp({cell.n, cell.p, s});
            const std::size_t k = (g.size() == 0 ? 0 : max_degree(g).degree) + 1;
            Graph padded = pad_isolated(g, k);
            auto parts = random_equal_partition(padded.size(), k, mix_seed(s, 1));
            DenseConfig cfg;
            cfg.hall_retry_budget = o.hall_retries;
            cfg.restart_budget = o.restarts;
            DenseRun run = decompose_dense(padded, parts, cfg, mix_seed(s, 2));
            const bool verified = run.certificate && verify_certificate(padded, parts, *run.certificate);
            std::ostringstream row;
            row << cell.n << ',' << format_number(cell.p) << ',' << cell.rep << ',' << s << ',' << k - 1 << ',' << k
                << ',' << (run.certificate ? 1 : 0) << ',' << (verified ? 1 : 0) << ',' << run.path << ','
                << run.attempts << ',' << run.hall_retries << ',' << '"' << run.failure << '"';
            rows[i] = row.str();
        },
        o.workers);

    std::ostringstream csv;
    csv << "n,p,rep,seed,max_degree,k,success,verified,path,attempts,hall_retries,failure\n";
    for (const auto & row : rows)
        csv << row << '\n';
    if (o.out.empty()) {
        std::cout << csv.str();
        return exit_ok;
    }
    io::write_text(o.out, csv.str());
    meta.parameters() = {{"n", o.grid_n},
                         {"p", o.grid_p},
                         {"reps", o.reps},
                         {"hall_retry_budget", o.hall_retries},
                         {"restart_budget", o.restarts},
                         {"out", o.out}};
    meta.budgets() = {{"runs", cells.size()}};
    meta.write(o.out, "success");
    std::cout << "wrote " << cells.size() << " rows to " << o.out << "\n";
    return exit_ok;
}

} // namespace

int main(int argc, char ** argv)
{
    std::vector<std::string> args(argv, argv + argc);
    Options o;
    try {
        o.seed = default_seed();
    }
    catch (const Error & e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_error;
    }

    CLI::App app{"Strong colorings and independent transversals of graphs"};
    app.require_subcommand(1);
    auto add_seed = [&](CLI::App * sub) {
        sub->add_option("--seed", o.seed, "Root seed (default: $STRONGCOL_SEED or 1)");
    };

    auto * gen = app.add_subcommand("gen", "Sample G(n,p) and write it as an edge list or .json");
    gen->add_option("--n", o.n, "Vertex count")->required();
    gen->add_option("--p", o.p, "Edge probability")->required();
    gen->add_option("--out", o.out, "Output graph file")->required();
    add_seed(gen);

    auto * color = app.add_subcommand("color", "Strong coloring for one partition");
    color->add_option("--graph", o.graph, "Graph file")->required()->check(CLI::ExistingFile);
    auto * part_opt = color->add_option("--partition", o.partition, "Partition JSON file")->check(CLI::ExistingFile);
    auto * rand_opt = color->add_option("--random-partition", o.random_partition, "Draw a random partition with part size k");
    part_opt->excludes(rand_opt);
    color->add_option("--out", o.out, "Certificate output file")->required();
    color->add_option("--hall-retries", o.hall_retries, "Step-4 reshuffles per attempt");
    color->add_option("--restarts", o.restarts, "Pipeline restarts after the first attempt");
    color->add_option("--expected-degree", o.expected_degree, "Override the estimate of np");
    color->add_option("--epsilon", o.dense_epsilon, "Skip Step 1 when k >= (1+epsilon) * max degree");
    add_seed(color);

    auto * trans = app.add_subcommand("transversal", "Independent transversal of a vertex partition");
    trans->add_option("--graph", o.graph, "Graph file")->required()->check(CLI::ExistingFile);
    trans->add_option("--partition", o.partition, "Partition JSON file")->required()->check(CLI::ExistingFile);
    trans->add_option("--algo", o.algo, "greedy, lll or sparse")->check(CLI::IsMember({"greedy", "lll", "sparse"}));
    trans->add_option("--pin", o.pins, "Required vertex as part:vertex (repeatable)");
    trans->add_option("--cap", o.cap, "Resample cap");
    trans->add_option("--epsilon", o.sparse_epsilon, "Slack of the sparse construction");
    trans->add_option("--out", o.out, "Transversal output file")->required();
    add_seed(trans);

    auto * schrom = app.add_subcommand("schrom-exact", "Exact strong chromatic number of a small graph");
    schrom->add_option("--graph", o.graph, "Graph file")->required()->check(CLI::ExistingFile);
    schrom->add_option("--guard", o.guard, "Largest vertex count accepted");
    schrom->add_option("--out", o.out, "Optional JSON output with the refuting partition");

    auto * lemmas = app.add_subcommand("lemmas", "Monte Carlo checks of random-graph properties");
    lemmas->add_option("--lemma", o.lemma, "codegree, maxdegree, gap, domination, hall or sparse-subsets")
        ->check(CLI::IsMember({"codegree", "maxdegree", "gap", "domination", "hall", "sparse-subsets"}));
    lemmas->add_option("--n", o.n, "Vertex count")->required();
    lemmas->add_option("--p", o.p, "Edge probability")->required();
    lemmas->add_option("--trials", o.trials, "Number of trials");
    lemmas->add_option("--c", o.c, "Tolerance multiplier");
    lemmas->add_option("--alpha", o.alpha, "Target-set scale for domination");
    lemmas->add_option("--C", o.big_c, "Subset-size constant for sparse-subsets");
    lemmas->add_option("--out", o.out, "CSV output file (stdout if omitted)");
    lemmas->add_option("--json", o.json_out, "JSON summary output file");
    add_seed(lemmas);

    auto * exp = app.add_subcommand("experiment", "Dense pipeline success at k = max degree + 1 over a grid");
    exp->add_option("--n", o.grid_n, "Vertex counts")->required()->delimiter(',');
    exp->add_option("--p", o.grid_p, "Edge probabilities")->required()->delimiter(',');
    exp->add_option("--reps", o.reps, "Repetitions per cell");
    exp->add_option("--hall-retries", o.hall_retries, "Step-4 reshuffles per attempt");
    exp->add_option("--restarts", o.restarts, "Pipeline restarts after the first attempt");
    exp->add_option("--workers", o.workers, "Worker threads");
    exp->add_option("--out", o.out, "CSV output file (stdout if omitted)");
    add_seed(exp);

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp & e) {
        return app.exit(e);
    }
    catch (const CLI::ParseError & e) {
        app.exit(e);
        return exit_error;
    }

    try {
        if (color->parsed() && o.partition.empty() && ! o.random_partition)
            throw ConfigError("color needs --partition or --random-partition");
        if (gen->parsed())
            return run_gen(o, args);
        if (color->parsed())
            return run_color(o, args);
        if (trans->parsed())
            return run_transversal(o, args);
        if (schrom->parsed())
            return run_schrom(o, args);
        if (lemmas->parsed())
            return run_lemmas(o, args);
        return run_experiment(o, args);
    }
    catch (const Failure & f) {
        std::cerr << "failure: " << f.reason << "\n";
        return exit_failure;
    }
    catch (const Error & e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_error;
    }
    catch (const std::exception & e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return exit_error;
    }
}
