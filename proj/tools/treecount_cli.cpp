// Command-line driver: count / verify / bench / model / generate.
// Exit codes: 0 ok, 1 input or usage error, 2 memory-budget refusal.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include "treecount/cost_model.hpp"
#include "treecount/estimator.hpp"
#include "treecount/json_io.hpp"
#include "treecount/oracle.hpp"
#include "treecount/synthgen.hpp"

namespace tc = treecount;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitMemory = 2;

struct RunConfig {
    std::string graph_path;
    std::string template_path;
    std::string engine = "vectorized";
    int iterations = 1;
    std::uint64_t seed = 0;
    int batch = 16;
    int workers = 0;  // 0 = hardware concurrency
    std::int64_t mem_budget = 0;
    std::string out_path;  // empty = stdout
    std::string format = "json";
    int template_root = -1;
};

int effective_workers(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

tc::EngineConfig engine_config(const RunConfig& cfg) {
    tc::EngineConfig ec;
    ec.workers = effective_workers(cfg.workers);
    ec.batch = cfg.batch;
    ec.memory_budget = cfg.mem_budget;
    return ec;
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write output file: " + path);
    out << content;
}

std::string count_csv(const tc::EstimateResult& r) {
    std::ostringstream out;
    out << "iteration,rooted_total,estimate,stderr\n";
    double sum = 0.0, sumsq = 0.0;
    const double scale = r.scale();
    for (std::size_t i = 0; i < r.rooted_totals.size(); ++i) {
        const double x = r.rooted_totals[i];
        sum += x;
        sumsq += x * x;
        const double count = static_cast<double>(i + 1);
        const double mean = sum / count;
        double stderr_running = 0.0;
        if (i > 0) {
            const double var = std::max(0.0, (sumsq - sum * sum / count) / (count - 1.0));
            stderr_running = std::sqrt(var / count) * scale;
        }
        out << (i + 1) << ',' << x << ',' << mean * scale << ',' << stderr_running << '\n';
    }
    return out.str();
}

json graph_json(const tc::Graph& g) {
    const auto stats = tc::degree_stats(g);
    return {{"n", g.n}, {"m", g.m}, {"avg_degree", stats.avg}, {"max_degree", stats.max}};
}

int cmd_count(const RunConfig& cfg) {
    const tc::Graph g = tc::load_edge_list(cfg.graph_path);
    const tc::TemplateTree t = tc::parse_template(cfg.template_path, cfg.template_root);
    const tc::EngineKind kind = tc::engine_from_name(cfg.engine);
    const auto t0 = std::chrono::steady_clock::now();
    const tc::EstimateResult r =
        tc::estimate(g, t, kind, cfg.iterations, cfg.seed, engine_config(cfg));
    const double total_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (cfg.format == "csv") {
        write_output(cfg.out_path, count_csv(r));
        return kExitOk;
    }
    json out{
        {"config",
         {{"graph", cfg.graph_path},
          {"template", cfg.template_path},
          {"engine", cfg.engine},
          {"iterations", cfg.iterations},
          {"seed", cfg.seed},
          {"batch", cfg.batch},
          {"workers", effective_workers(cfg.workers)}}},
        {"graph", graph_json(g)},
        {"template", {{"k", t.k}, {"root", t.root}, {"aut", tc::automorphism_count(t)}}},
        {"result", tc::to_json(r)},
        {"counters",
         {{"neighbor_passes", r.neighbor_passes},
          {"traversals", r.traversals},
          {"flops", r.flops}}},
        {"timing",
         {{"total_seconds", total_seconds},
          {"mean_iteration_seconds",
           r.iterations > 0 ? total_seconds / r.iterations : 0.0},
          {"per_node_seconds", r.per_node_seconds}}},
    };
    write_output(cfg.out_path, out.dump(2) + "\n");
    return kExitOk;
}

int cmd_verify(const RunConfig& cfg, bool force) {
    const tc::Graph g = tc::load_edge_list(cfg.graph_path);
    const tc::TemplateTree t = tc::parse_template(cfg.template_path, cfg.template_root);
    const bool within_limits = g.n <= tc::kOracleMaxVertices && t.k <= tc::kOracleMaxTemplate;
    if (!within_limits && !force) {
        std::cerr << "instance above oracle limits (n <= " << tc::kOracleMaxVertices
                  << ", k <= " << tc::kOracleMaxTemplate << "); pass --force to override\n";
        return kExitInput;
    }
    const tc::ExactCount exact = tc::count_exact(g, t, force);
    const tc::EstimateResult r = tc::estimate(g, t, tc::engine_from_name(cfg.engine),
                                              cfg.iterations, cfg.seed, engine_config(cfg));
    const double denom = exact.embeddings > 0 ? static_cast<double>(exact.embeddings) : 1.0;
    const double rel_error = std::abs(r.estimate - static_cast<double>(exact.embeddings)) / denom;
    std::cout << "exact_count " << exact.embeddings << "\n"
              << "estimate " << r.estimate << "\n"
              << "stderr " << r.stderr_of_mean << "\n"
              << "relative_error " << rel_error << "\n";
    return within_limits ? kExitOk : kExitInput;
}

// --- bench -----------------------------------------------------------------

struct BenchConfig {
    std::vector<std::string> graphs;
    std::vector<std::string> templates;
    std::vector<std::string> engines{"baseline", "pruned", "vectorized"};
    int iterations = 1;
    std::uint64_t seed = 0;
    int workers = 0;
    int batch = 16;
    std::string output;
};

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> items;
    std::string token;
    std::istringstream ss(value);
    while (ss >> token) {
        while (!token.empty() && token.back() == ',') token.pop_back();
        if (!token.empty()) items.push_back(token);
    }
    return items;
}

BenchConfig parse_bench_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw tc::parse_error("cannot open bench config: " + path);
    BenchConfig cfg;
    std::string line;
    std::int64_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw tc::parse_error(path + ": expected 'key = value' at line " +
                                  std::to_string(lineno));
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        key.erase(std::remove_if(key.begin(), key.end(), ::isspace), key.end());
        if (key == "graphs") cfg.graphs = split_list(value);
        else if (key == "templates") cfg.templates = split_list(value);
        else if (key == "engines") cfg.engines = split_list(value);
        else if (key == "iterations") cfg.iterations = std::stoi(value);
        else if (key == "seed") cfg.seed = std::stoull(value);
        else if (key == "workers") cfg.workers = std::stoi(value);
        else if (key == "batch") cfg.batch = std::stoi(value);
        else if (key == "output") cfg.output = split_list(value).at(0);
        else throw tc::parse_error(path + ": unknown key '" + key + "' at line " +
                                   std::to_string(lineno));
    }
    if (cfg.graphs.empty() || cfg.templates.empty())
        throw tc::parse_error(path + ": bench config needs graphs and templates");
    return cfg;
}

tc::CostKind model_for_engine(tc::EngineKind kind) {
    switch (kind) {
        case tc::EngineKind::baseline: return tc::CostKind::fascia;
        case tc::EngineKind::pruned: return tc::CostKind::pfascia;
        case tc::EngineKind::vectorized: return tc::CostKind::pgbsc;
    }
    return tc::CostKind::pgbsc;
}

int cmd_bench(const std::string& config_path, std::string out_path) {
    const BenchConfig cfg = parse_bench_config(config_path);
    if (out_path.empty()) out_path = cfg.output;

    struct Row {
        std::string graph, template_path, engine;
        tc::CostKind model;
        int k = 0;
        tc::vertex_t n = 0;
        std::int64_t m = 0;
        double avg_degree = 0, seconds = 0, rooted_total = 0;
        std::uint64_t passes = 0, flops = 0;
        tc::CostCoefficients coef;
    };
    std::vector<Row> rows;

    for (const std::string& graph_path : cfg.graphs) {
        const tc::Graph g = tc::load_edge_list(graph_path);
        const auto stats = tc::degree_stats(g);
        for (const std::string& template_path : cfg.templates) {
            const tc::TemplateTree t = tc::parse_template(template_path);
            const tc::PartitionPlan plan = tc::partition(t);
            for (const std::string& engine : cfg.engines) {
                const tc::EngineKind kind = tc::engine_from_name(engine);
                tc::EngineConfig ec;
                ec.workers = effective_workers(cfg.workers);
                ec.batch = cfg.batch;
                const tc::EstimateResult r =
                    tc::estimate(g, t, kind, cfg.iterations, cfg.seed, ec);
                Row row;
                row.graph = graph_path;
                row.template_path = template_path;
                row.engine = engine;
                row.model = model_for_engine(kind);
                row.k = t.k;
                row.n = g.n;
                row.m = g.m;
                row.avg_degree = stats.avg;
                double mean_secs = 0.0;
                for (double s : r.iteration_seconds) mean_secs += s;
                row.seconds = mean_secs / static_cast<double>(r.iterations);
                double mean_total = 0.0;
                for (double x : r.rooted_totals) mean_total += x;
                row.rooted_total = mean_total / static_cast<double>(r.iterations);
                row.passes = r.neighbor_passes / static_cast<std::uint64_t>(r.iterations);
                row.flops = r.flops / static_cast<std::uint64_t>(r.iterations);
                row.coef = tc::iteration_coefficients(plan, g.n, g.m, row.model);
                std::cerr << graph_path << " x " << template_path << " x " << engine << ": "
                          << row.seconds << " s/iter\n";
                rows.push_back(std::move(row));
            }
        }
    }

    std::map<std::pair<std::string, std::string>, double> baseline_seconds;
    for (const Row& row : rows)
        if (row.engine == "baseline") baseline_seconds[{row.graph, row.template_path}] = row.seconds;

    std::ostringstream out;
    out << "graph,template,engine,model,k,n,m,avg_degree,iterations,seconds,rooted_total,"
           "neighbor_passes,flops,edge_coef,vertex_coef,speedup_vs_baseline\n";
    for (const Row& row : rows) {
        out << row.graph << ',' << row.template_path << ',' << row.engine << ','
            << tc::cost_kind_name(row.model) << ',' << row.k << ',' << row.n << ',' << row.m
            << ',' << row.avg_degree << ',' << cfg.iterations << ',' << row.seconds << ','
            << row.rooted_total << ',' << row.passes << ',' << row.flops << ','
            << row.coef.edge_coef << ',' << row.coef.vertex_coef << ',';
        const auto it = baseline_seconds.find({row.graph, row.template_path});
        if (it != baseline_seconds.end() && row.seconds > 0.0)
            out << it->second / row.seconds;
        out << '\n';
    }
    write_output(out_path, out.str());
    return kExitOk;
}

// --- model -----------------------------------------------------------------

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

int cmd_model(const std::string& csv_path, const std::string& out_path) {
    std::ifstream in(csv_path);
    if (!in) throw tc::parse_error("cannot open bench csv: " + csv_path);
    std::string line;
    if (!std::getline(in, line)) throw tc::parse_error(csv_path + ": empty csv");
    const auto header = split_csv_line(line);
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
    for (const char* need : {"graph", "template", "model", "k", "avg_degree", "seconds",
                             "edge_coef", "vertex_coef"})
        if (!col.count(need))
            throw tc::parse_error(csv_path + ": missing column '" + std::string(need) + "'");

    struct Row {
        std::string graph, template_path;
        tc::CostKind kind;
        int k;
        double d, seconds;
        tc::Measurement meas;
    };
    std::vector<Row> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        Row row;
        row.graph = fields.at(col["graph"]);
        row.template_path = fields.at(col["template"]);
        row.kind = tc::cost_kind_from_name(fields.at(col["model"]));
        row.k = std::stoi(fields.at(col["k"]));
        row.d = std::stod(fields.at(col["avg_degree"]));
        row.seconds = std::stod(fields.at(col["seconds"]));
        row.meas.kind = row.kind;
        row.meas.seconds = row.seconds;
        row.meas.coefficients.edge_coef = std::stod(fields.at(col["edge_coef"]));
        row.meas.coefficients.vertex_coef = std::stod(fields.at(col["vertex_coef"]));
        rows.push_back(std::move(row));
    }
    std::vector<tc::Measurement> measurements;
    measurements.reserve(rows.size());
    for (const Row& row : rows) measurements.push_back(row.meas);
    const tc::ModelParams params = tc::fit_constants(measurements);

    json predicted = json::array();
    std::cout << "fitted constants: alpha=" << params.alpha << " beta=" << params.beta
              << " gamma=" << params.gamma << "\n";
    std::cout << "graph,template,model,measured_s,predicted_s\n";
    for (const Row& row : rows) {
        const double edge_constant =
            row.kind == tc::CostKind::fascia ? params.gamma : params.alpha;
        const double pred = edge_constant * row.meas.coefficients.edge_coef +
                            params.beta * row.meas.coefficients.vertex_coef;
        std::cout << row.graph << ',' << row.template_path << ','
                  << tc::cost_kind_name(row.kind) << ',' << row.seconds << ',' << pred << "\n";
        predicted.push_back({{"graph", row.graph},
                             {"template", row.template_path},
                             {"model", tc::cost_kind_name(row.kind)},
                             {"measured_seconds", row.seconds},
                             {"predicted_seconds", pred}});
    }

    json bounds = json::array();
    std::map<std::pair<int, std::int64_t>, bool> seen;
    for (const Row& row : rows) {
        const auto key = std::make_pair(row.k, static_cast<std::int64_t>(row.d * 1000));
        if (seen.count(key)) continue;
        seen[key] = true;
        const auto b = tc::improvement_bounds(params, row.k, row.d);
        bounds.push_back(
            {{"k", row.k}, {"d", row.d}, {"lower", b.lower}, {"upper", b.upper}});
        std::cout << "improvement bounds k=" << row.k << " d=" << row.d << ": [" << b.lower
                  << ", " << b.upper << "]\n";
    }

    json out{{"constants", tc::to_json(params)},
             {"rows", predicted},
             {"improvement_bounds", bounds}};
    if (!out_path.empty()) write_output(out_path, out.dump(2) + "\n");
    return kExitOk;
}

// --- generate ----------------------------------------------------------------

int cmd_generate(const std::string& type, int scale, std::int64_t edges, int skew,
                 std::vector<double> probs, tc::vertex_t n, double p, std::uint64_t seed,
                 const std::string& out_path) {
    tc::Graph g;
    if (type == "rmat") {
        tc::RmatSpec spec;
        if (!probs.empty()) {
            if (probs.size() != 4)
                throw tc::parse_error("--probs needs exactly four values a b c d");
            spec.scale = scale;
            spec.edges = edges;
            spec.a = probs[0];
            spec.b = probs[1];
            spec.c = probs[2];
            spec.d = probs[3];
            spec.seed = seed;
        } else {
            spec = tc::rmat_skew_spec(scale, edges, skew, seed);
        }
        g = tc::generate_rmat(spec);
    } else if (type == "er") {
        g = tc::generate_erdos_renyi(n, p, seed);
    } else {
        throw tc::parse_error("unknown generator type '" + type + "' (rmat|er)");
    }
    tc::save_edge_list(g, out_path);
    const auto stats = tc::degree_stats(g);
    std::cerr << "wrote " << out_path << ": n=" << g.n << " m=" << g.m
              << " avg_deg=" << stats.avg << " max_deg=" << stats.max << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"approximate tree-template counting via color coding"};
    app.require_subcommand(1);

    RunConfig cfg;
    bool force = false;

    auto add_run_flags = [&](CLI::App* cmd, bool with_engine_flags) {
        cmd->add_option("--graph", cfg.graph_path, "edge-list graph file")->required();
        cmd->add_option("--template", cfg.template_path, "template edge-list file")->required();
        cmd->add_option("--iters", cfg.iterations, "color-coding iterations");
        cmd->add_option("--seed", cfg.seed, "base RNG seed");
        cmd->add_option("--workers", cfg.workers, "worker threads (0 = hardware)");
        cmd->add_option("--template-root", cfg.template_root,
                        "override the template root vertex");
        if (with_engine_flags) {
            cmd->add_option("--engine", cfg.engine, "baseline|pruned|vectorized");
            cmd->add_option("--batch", cfg.batch, "column batch size Z (vectorized)");
            cmd->add_option("--mem-budget", cfg.mem_budget,
                            "count-table budget in bytes (0 = unlimited)");
        }
    };

    CLI::App* count = app.add_subcommand("count", "estimate the template count");
    add_run_flags(count, true);
    count->add_option("--out", cfg.out_path, "output file (default stdout)");
    count->add_option("--format", cfg.format, "json|csv")
        ->check(CLI::IsMember({"json", "csv"}));

    CLI::App* verify = app.add_subcommand("verify", "compare the estimate to the exact oracle");
    add_run_flags(verify, true);
    verify->add_flag("--force", force, "run the oracle beyond its safety limits");

    CLI::App* bench = app.add_subcommand("bench", "run a (graph x template x engine) grid");
    std::string bench_config, bench_out;
    bench->add_option("--config", bench_config, "key = value grid file")->required();
    bench->add_option("--out", bench_out, "output csv (default from config, else stdout)");

    CLI::App* model = app.add_subcommand("model", "fit cost-model constants from a bench csv");
    std::string model_csv, model_out;
    model->add_option("--bench", model_csv, "bench csv file")->required();
    model->add_option("--out", model_out, "report json file");

    CLI::App* generate = app.add_subcommand("generate", "write a synthetic graph");
    std::string gen_type = "rmat", gen_out;
    int gen_scale = 14, gen_skew = 0;
    std::int64_t gen_edges = 8 << 14;
    tc::vertex_t gen_n = 1000;
    double gen_p = 0.01;
    std::uint64_t gen_seed = 0;
    std::vector<double> gen_probs;
    generate->add_option("--type", gen_type, "rmat|er");
    generate->add_option("--scale", gen_scale, "rmat: n = 2^scale");
    generate->add_option("--edges", gen_edges, "rmat: target edge count");
    generate->add_option("--skew", gen_skew, "rmat: skew ladder level 0..8");
    generate->add_option("--probs", gen_probs, "rmat: explicit quadrant probabilities a b c d")
        ->expected(4);
    generate->add_option("--n", gen_n, "er: vertex count");
    generate->add_option("--p", gen_p, "er: edge probability");
    generate->add_option("--seed", gen_seed, "generator seed");
    generate->add_option("--out", gen_out, "output edge-list file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);  // prints help text or the parse error
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (count->parsed()) return cmd_count(cfg);
        if (verify->parsed()) return cmd_verify(cfg, force);
        if (bench->parsed()) return cmd_bench(bench_config, bench_out);
        if (model->parsed()) return cmd_model(model_csv, model_out);
        if (generate->parsed())
            return cmd_generate(gen_type, gen_scale, gen_edges, gen_skew, gen_probs, gen_n,
                                gen_p, gen_seed, gen_out);
    } catch (const tc::memory_budget_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitMemory;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}
