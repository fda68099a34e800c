#include "cli.hpp"

#include "treepack/error.hpp"
#include "treepack/io.hpp"
#include "treepack/limping.hpp"
#include "treepack/pipeline.hpp"
#include "treepack/quasirandom.hpp"
#include "treepack/rng.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

namespace treepack::cli {

namespace {

using json = nlohmann::ordered_json;

// CLI11 wants argc/argv; the first entry is a program name it skips.
int parse(CLI::App& app, const std::string& name, const std::vector<std::string>& args, std::ostream& out,
          std::ostream& err, bool& done)
{
    std::vector<const char*> argv{name.c_str()};
    for (const auto& a : args)
        argv.push_back(a.c_str());
    done = false;
    try {
        app.parse(int(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        done = true;
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << name << ": " << e.what() << '\n';
        done = true;
        return kExitInput;
    }
    return kExitOk;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw InputError("cannot write " + path);
    out << content;
}

void require(bool ok, const std::string& message)
{
    if (!ok)
        throw InputError(message);
}

} // namespace

std::string git_blob_sha1(const std::string& content)
{
    const std::string blob = "blob " + std::to_string(content.size()) + std::string(1, '\0') + content;
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(blob.data(), blob.size(), md, &len, EVP_sha1(), nullptr) != 1)
        throw std::runtime_error("SHA-1 digest failed");
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i)
        hex << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return hex.str();
}

int default_threads()
{
    if (const char* env = std::getenv("TREEPACK_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1)
            return int(v);
    }
    return int(std::max(1U, std::thread::hardware_concurrency()));
}

int cmd_pack(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Pack a family of bounded-degree trees into a clique", "pack"};
    std::string trees_path, generate, out_path, report_path, manifest_path;
    std::optional<int> n, rounds, groups;
    double epsilon = 0.5;
    int delta = 0;
    PipelineConfig cfg;
    std::optional<double> z_threshold, correction_eps;
    int threads = 0;

    auto* trees_opt = app.add_option("--trees", trees_path, "tree family file (JSON lines)");
    auto* gen_opt = app.add_option("--generate", generate, "generator descriptor, e.g. random:n=200,delta=3,count=40");
    trees_opt->excludes(gen_opt);
    app.add_option("--n", n, "family order bound n");
    app.add_option("--epsilon", epsilon, "slack: host order is floor((1+eps) n)")->required();
    app.add_option("--delta", delta, "maximum degree bound")->required();
    app.add_option("--rounds", rounds, "number of nibble rounds r");
    app.add_option("--groups", groups, "number of order groups c");
    app.add_option("--rho", cfg.rho, "cutting threshold");
    app.add_option("--gamma", cfg.gamma, "extraction tolerance");
    app.add_option("--alpha", cfg.alpha, "sampler skip tolerance");
    app.add_option("--beta", cfg.beta, "conformance tolerance");
    app.add_option("--core-share", cfg.core_share, "core order is floor((1 + share*eps) n)");
    app.add_option("--correction-epsilon", correction_eps, "epsilon of the correction step");
    app.add_option("--z-threshold", z_threshold, "reserve-degree threshold of the correction step");
    app.add_option("--defect-samples", cfg.defect_samples, "subsets sampled for residual defects");
    app.add_option("--seed", cfg.seed, "master seed");
    app.add_option("--retries", cfg.retries, "extra attempts with derived seeds");
    app.add_option("--threads", threads, "worker threads (default TREEPACK_THREADS or all cores)");
    app.add_flag("--paper-faithful", cfg.paper_faithful, "use the proof's constants");
    app.add_option("--out", out_path, "packing JSON (default stdout)");
    app.add_option("--report", report_path, "metrics JSON");
    app.add_option("--manifest", manifest_path, "run manifest (default <out>.manifest.json)");

    bool done = false;
    const int code = parse(app, "pack", args, out, err, done);
    if (done)
        return code;

    const auto start = std::chrono::steady_clock::now();
    try {
        require(epsilon > 0.0, "--epsilon must be positive");
        require(delta >= 1, "--delta must be at least 1");
        require(!n || *n >= 1, "--n must be at least 1");
        require(!rounds || *rounds >= 1, "--rounds must be at least 1");
        require(!groups || *groups >= 1, "--groups must be at least 1");
        require(cfg.rho > 0.0 && cfg.rho < 2.0, "--rho must lie in (0, 2)");
        require(cfg.gamma > 0.0 && cfg.alpha > 0.0 && cfg.beta > 0.0, "--gamma, --alpha and --beta must be positive");
        require(cfg.core_share > 0.0 && cfg.core_share <= 1.0, "--core-share must lie in (0, 1]");
        require(!correction_eps || *correction_eps > 0.0, "--correction-epsilon must be positive");
        require(!z_threshold || *z_threshold > 0.0, "--z-threshold must be positive");
        require(cfg.retries >= 0, "--retries must be non-negative");
        require(threads >= 0, "--threads must be non-negative");

        // The size requirement is checked first so it is reported even without a family.
        if (cfg.paper_faithful && n) {
            const PaperConstants pc = paper_constants(epsilon, delta);
            if (double(*n) < pc.n0_lower) {
                err << "pack: paper-faithful constants require n >= n_0; n_0 >= " << std::setprecision(6)
                    << pc.n0_lower << " (r = " << pc.r << ", rho = " << pc.rho << "), got n = " << *n << '\n';
                return kExitInput;
            }
        }
        require(!trees_path.empty() || !generate.empty(), "one of --trees or --generate is required");

        cfg.epsilon = epsilon;
        cfg.delta = delta;
        if (rounds)
            cfg.r = *rounds;
        cfg.c = groups;
        cfg.correction_epsilon = correction_eps;
        cfg.z_threshold = z_threshold;
        cfg.threads = threads > 0 ? threads : default_threads();

        std::string input_text;
        TreeFamily fam;
        if (!trees_path.empty()) {
            input_text = read_file(trees_path);
            std::istringstream in(input_text);
            fam = read_family_jsonl(in);
        } else {
            fam = generate_family(generate, derive_seed(cfg.seed, {0x67656eULL}));
            input_text = generate;
        }
        if (n) {
            fam.n = *n;
            check_family_bounds(fam);
        }

        json echo;
        echo["trees"] = trees_path;
        echo["generate"] = generate;
        echo["n"] = fam.n;
        echo["epsilon"] = cfg.epsilon;
        echo["delta"] = cfg.delta;
        echo["r"] = cfg.r;
        echo["c"] = cfg.c ? json(*cfg.c) : json(nullptr);
        echo["rho"] = cfg.rho;
        echo["gamma"] = cfg.gamma;
        echo["alpha"] = cfg.alpha;
        echo["beta"] = cfg.beta;
        echo["core_share"] = cfg.core_share;
        echo["correction_epsilon"] = correction_eps ? json(*correction_eps) : json(nullptr);
        echo["z_threshold"] = z_threshold ? json(*z_threshold) : json(nullptr);
        echo["defect_samples"] = cfg.defect_samples;
        echo["seed"] = cfg.seed;
        echo["retries"] = cfg.retries;
        echo["paper_faithful"] = cfg.paper_faithful;
        std::ostringstream family_text;
        write_family_jsonl(family_text, fam);
        const std::string hash = git_blob_sha1(echo.dump() + "\n" + input_text + "\n" + family_text.str());

        const PackingResult res = pack_family(fam, cfg);

        json packing = json::parse(res.to_json());
        json tagged;
        tagged["manifest_hash"] = hash;
        for (auto it = packing.begin(); it != packing.end(); ++it)
            tagged[it.key()] = it.value();
        const std::string packing_text = tagged.dump() + "\n";
        if (out_path.empty())
            out << packing_text;
        else
            write_file(out_path, packing_text);
        if (!report_path.empty()) {
            json report;
            report["manifest_hash"] = hash;
            report["metrics"] = json::parse(res.metrics_json());
            write_file(report_path, report.dump() + "\n");
        }
        if (manifest_path.empty() && !out_path.empty())
            manifest_path = out_path + ".manifest.json";
        if (!manifest_path.empty()) {
            json manifest;
            manifest["hash"] = hash;
            manifest["config"] = echo;
            manifest["outputs"] = {{"packing", out_path.empty() ? "-" : out_path}, {"report", report_path}};
            manifest["threads"] = cfg.threads;
            manifest["timings"] = {
                {"pipeline_seconds", res.seconds},
                {"total_seconds",
                 std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
            write_file(manifest_path, manifest.dump(2) + "\n");
        }
        if (!res.ok) {
            err << "pack: failed at " << res.failure_stage << ": " << res.failure_message << '\n';
            return kExitRetryable;
        }
        return kExitOk;
    } catch (const InputError& e) {
        err << "pack: " << e.what() << '\n';
        return kExitInput;
    } catch (const CapabilityError& e) {
        err << "pack: " << e.what() << '\n';
        return kExitInput;
    }
}

namespace {

HostGraph random_graph(int m, double p, std::uint64_t seed)
{
    HostGraph g = HostGraph::empty(m);
    Engine rng = make_engine(seed);
    for (int u = 0; u < m; ++u)
        for (int v = u + 1; v < m; ++v)
            if (uniform_unit(rng) < p)
                g.add_edge(u, v);
    return g;
}

json lemma_suite(std::uint64_t seed, std::uint64_t trials)
{
    json reports = json::array();
    bool all = true;
    auto run = [&](const std::string& name, const HostGraph& host, const LevelForest& f, double alpha,
                   std::uint64_t s) {
        LimpingConfig cfg;
        cfg.alpha = alpha;
        cfg.density = host.density();
        cfg.seed = s;
        cfg.host = &host;
        cfg.forest = &f;
        const DistributionReport rep = estimate_lemma_bounds(cfg, trials);
        all = all && rep.all_pass();
        json j = json::parse(rep.to_json());
        json named;
        named["fixture"] = name;
        for (auto it = j.begin(); it != j.end(); ++it)
            named[it.key()] = it.value();
        reports.push_back(named);
    };
    const HostGraph k10 = HostGraph::complete(10);
    const LevelForest edge = make_forest(2, {{0, 1}}, {VertexRole::Primary, VertexRole::Secondary});
    run("single_edge_K10", k10, edge, 0.15, derive_seed(seed, {1}));

    const HostGraph k100 = HostGraph::complete(100);
    std::vector<VertexPair> path_edges;
    for (int i = 0; i + 1 < 10; ++i)
        path_edges.emplace_back(i, i + 1);
    const LevelForest path = make_forest_from_roots(10, path_edges, {0});
    run("rooted_path10_K100", k100, path, 0.05, derive_seed(seed, {2}));

    const HostGraph dense = random_graph(80, 0.8, derive_seed(seed, {3}));
    const LevelForest cherry = make_forest(3, {{0, 1}, {1, 2}},
                                           {VertexRole::Primary, VertexRole::Secondary, VertexRole::Primary});
    run("cherry_G80", dense, cherry, 0.2, derive_seed(seed, {4}));

    json out;
    out["trials"] = trials;
    out["all_pass"] = all;
    out["reports"] = reports;
    return out;
}

} // namespace

int cmd_diagnose(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Quasirandomness and sampler diagnostics", "diagnose"};
    std::string graph_path, out_path;
    double gamma = 0.1;
    int delta = 2;
    bool exact = false, lemma = false;
    std::uint64_t seed = 0, samples = 10000, bad_samples = 256, trials = 20000;
    auto* graph_opt = app.add_option("--graph", graph_path, "edge list with an m=<order> header");
    auto* lemma_opt = app.add_flag("--lemma-suite", lemma, "run the sampler distribution suite");
    graph_opt->excludes(lemma_opt);
    app.add_option("--gamma", gamma, "badness tolerance");
    app.add_option("--delta", delta, "largest tuple size p");
    app.add_flag("--exact", exact, "exhaustive defect and bad-set counts");
    app.add_option("--samples", samples, "sampled subsets for the defect");
    app.add_option("--bad-samples", bad_samples, "sampled tuples per vertex for badness");
    app.add_option("--trials", trials, "sampler trials per fixture");
    app.add_option("--seed", seed, "master seed");
    app.add_option("--out", out_path, "output JSON (default stdout)");

    bool done = false;
    const int code = parse(app, "diagnose", args, out, err, done);
    if (done)
        return code;
    try {
        json result;
        int status = kExitOk;
        if (lemma) {
            require(trials >= 1000, "--trials must be at least 1000");
            result = lemma_suite(seed, trials);
            if (!result["all_pass"].get<bool>())
                status = kExitRetryable;
        } else {
            require(!graph_path.empty(), "one of --graph or --lemma-suite is required");
            require(gamma > 0.0, "--gamma must be positive");
            require(delta >= 1, "--delta must be at least 1");
            require(samples >= 1 && bad_samples >= 1, "sample counts must be positive");
            std::istringstream in(read_file(graph_path));
            const HostGraph g = read_edge_list(in);
            DefectMode dmode = exact ? DefectMode{ExactMode{}} : DefectMode{SampledMode{samples, derive_seed(seed, {1})}};
            const DefectReport d = quasirandom_defect(g, dmode);
            BadOptions bo;
            if (!exact)
                bo.mode = SampledBad{bad_samples, derive_seed(seed, {2})};
            const BadProfile bp = bad_profile(g, gamma, delta, bo);
            result["order"] = g.order();
            result["edges"] = g.edge_count();
            result["defect"] = {{"mode", to_string(d.mode)},
                                {"density", d.density_used},
                                {"max_abs_defect", d.max_abs_defect},
                                {"subsets_tested", d.subsets_tested},
                                {"witness", d.worst_subset}};
            result["bad_profile"] = {{"gamma", bp.gamma},
                                     {"delta_cap", bp.delta_cap},
                                     {"density", bp.density_used},
                                     {"exact", bp.exact},
                                     {"samples_per_vertex", bp.samples_per_vertex},
                                     {"per_vertex", bp.per_vertex},
                                     {"bad_vertex_set", bp.bad_vertex_set}};
        }
        const std::string text = result.dump() + "\n";
        if (out_path.empty())
            out << text;
        else
            write_file(out_path, text);
        return status;
    } catch (const InputError& e) {
        err << "diagnose: " << e.what() << '\n';
        return kExitInput;
    } catch (const CapabilityError& e) {
        err << "diagnose: " << e.what() << '\n';
        return kExitInput;
    }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    const std::string usage = "usage: treepack <pack|diagnose> [options]; use --help on a subcommand\n";
    if (args.empty()) {
        err << usage;
        return kExitInput;
    }
    const std::vector<std::string> rest(args.begin() + 1, args.end());
    if (args[0] == "pack")
        return cmd_pack(rest, out, err);
    if (args[0] == "diagnose")
        return cmd_diagnose(rest, out, err);
    if (args[0] == "--help" || args[0] == "-h") {
        out << usage;
        return kExitOk;
    }
    err << "unknown command '" << args[0] << "'\n" << usage;
    return kExitInput;
}

} // namespace treepack::cli
