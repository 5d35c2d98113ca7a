// Acceptance suite: one criterion per --criterion value, one PASS/FAIL line
// each. Running without arguments executes the whole list. Exit status is 0
// only if every executed criterion passed.

#include <chrono>
#include <cmath>
#include <cstring>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "treecount/cost_model.hpp"
#include "treecount/engines.hpp"
#include "treecount/estimator.hpp"
#include "treecount/oracle.hpp"
#include "treecount/synthgen.hpp"
#include "../support/test_util.hpp"

using namespace treecount;

namespace {

struct Check {
    bool ok = true;
    std::ostringstream detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            if (detail.tellp() > 0) detail << "; ";
            detail << what;
        }
    }
    void note(const std::string& what) {
        if (detail.tellp() > 0) detail << "; ";
        detail << what;
    }
};

// --- 1. oracle equivalence ---------------------------------------------------

bool oracle_equivalence() {
    Check check;
    std::mt19937_64 gen(20240601);
    int pair_count = 0;
    while (pair_count < 20) {
        const auto n = static_cast<vertex_t>(8 + gen() % 23);           // <= 30
        const double avg_degree = 2.0 + static_cast<double>(gen() % 60) / 10.0;  // <= 8
        Graph g = test_util::random_graph(gen, n, avg_degree);
        const int k = 2 + static_cast<int>(gen() % 5);                  // <= 6
        TemplateTree t = test_util::random_tree(gen, k);
        const double exact = static_cast<double>(count_exact(g, t).embeddings);
        if (exact < 1.0) continue;  // only instances where the template occurs
        ++pair_count;
        for (EngineKind kind :
             {EngineKind::baseline, EngineKind::pruned, EngineKind::vectorized}) {
            EstimateResult r = estimate(g, t, kind, 10000, 555 + pair_count);
            const double err = std::abs(r.estimate - exact);
            const bool sigma_ok =
                r.stderr_of_mean > 0.0 ? err <= 3.0 * r.stderr_of_mean : err == 0.0;
            const bool rel_ok = err / exact <= 0.10;
            if (!sigma_ok || !rel_ok) {
                std::ostringstream what;
                what << "pair " << pair_count << " engine " << engine_name(kind) << ": exact "
                     << exact << " estimate " << r.estimate << " stderr " << r.stderr_of_mean;
                check.require(false, what.str());
            }
        }
    }
    std::cout << "  [1] 20 (G,T) pairs x 3 engines x 10^4 iterations vs exact oracle"
              << (check.ok ? "" : ": " + check.detail.str()) << "\n";
    return check.ok;
}

// --- 2. engine agreement -----------------------------------------------------

bool engine_agreement() {
    Check check;
    std::mt19937_64 gen(77001);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto n = static_cast<vertex_t>(10 + gen() % 191);  // <= 200
        Graph g = test_util::random_graph(gen, n, 1.0 + static_cast<double>(gen() % 90) / 10.0);
        const int k = 2 + static_cast<int>(gen() % 6);  // <= 7
        TemplateTree t = test_util::random_tree(gen, k);
        PartitionPlan plan = partition(t);
        ColorIndexer idx(k);
        Coloring c = random_coloring(g, k, 9000 + static_cast<std::uint64_t>(trial));
        const double base = run_iteration_baseline(g, plan, c, idx).rooted_total;
        const double pruned = run_iteration_pruned(g, plan, c, idx).rooted_total;
        const double vec = run_iteration_vectorized(g, plan, c, idx).rooted_total;
        const double scale = std::max({1.0, std::abs(base), std::abs(pruned), std::abs(vec)});
        const double diff = std::max(std::abs(base - pruned), std::abs(base - vec)) / scale;
        worst = std::max(worst, diff);
        check.require(diff <= 1e-9, "trial " + std::to_string(trial) + " relative diff " +
                                        std::to_string(diff));
    }
    std::ostringstream line;
    line << "  [2] 100 random triples, three engines agree (worst relative diff " << worst
         << ")";
    std::cout << line.str() << (check.ok ? "" : ": " + check.detail.str()) << "\n";
    return check.ok;
}

// --- 3. indexer bijectivity ---------------------------------------------------

bool indexer_bijectivity() {
    Check check;
    for (int k = 1; k <= 12 && check.ok; ++k) {
        ColorIndexer idx(k);
        for (int h = 1; h <= k && check.ok; ++h) {
            std::vector<char> seen(static_cast<std::size_t>(idx.num_sets(h)), 0);
            std::vector<int> subset(static_cast<std::size_t>(h));
            for (int i = 0; i < h; ++i) subset[static_cast<std::size_t>(i)] = i;
            std::int64_t count = 0;
            while (true) {
                const std::int64_t index = idx.index_of(subset);
                if (index < 0 || index >= idx.num_sets(h) ||
                    seen[static_cast<std::size_t>(index)]) {
                    check.require(false, "collision or range fault at k=" + std::to_string(k) +
                                             " h=" + std::to_string(h));
                    break;
                }
                seen[static_cast<std::size_t>(index)] = 1;
                ++count;
                if (idx.set_of(index, h) != subset) {
                    check.require(false, "round-trip fault at k=" + std::to_string(k));
                    break;
                }
                int move = h - 1;
                while (move >= 0 && subset[static_cast<std::size_t>(move)] == k - h + move)
                    --move;
                if (move < 0) break;
                ++subset[static_cast<std::size_t>(move)];
                for (int j = move + 1; j < h; ++j)
                    subset[static_cast<std::size_t>(j)] =
                        subset[static_cast<std::size_t>(j - 1)] + 1;
            }
            check.require(count == idx.num_sets(h), "subset count mismatch");
        }
    }
    std::cout << "  [3] color-set indexing bijective and invertible for all k <= 12"
              << (check.ok ? "" : ": " + check.detail.str()) << "\n";
    return check.ok;
}

// --- 4. determinism ------------------------------------------------------------

bool determinism() {
    Check check;
    Graph g = generate_erdos_renyi(400, 0.02, 99);
    std::mt19937_64 gen(424242);
    TemplateTree t = test_util::random_tree(gen, 6);
    PartitionPlan plan = partition(t);
    ColorIndexer idx(6);
    Coloring c = random_coloring(g, 6, 31);

    for (EngineKind kind : {EngineKind::baseline, EngineKind::pruned, EngineKind::vectorized}) {
        EngineConfig ref_cfg;
        ref_cfg.workers = 1;
        ref_cfg.keep_full_table = true;
        IterationResult ref = run_iteration(kind, g, plan, c, idx, ref_cfg);
        for (int workers : {2, 8}) {
            EngineConfig cfg = ref_cfg;
            cfg.workers = workers;
            IterationResult r = run_iteration(kind, g, plan, c, idx, cfg);
            check.require(r.rooted_total == ref.rooted_total &&
                              *r.full_table == *ref.full_table,
                          std::string(engine_name(kind)) + " differs at workers=" +
                              std::to_string(workers));
        }
        if (kind == EngineKind::vectorized) {
            for (int batch : {1, 4, 16}) {
                EngineConfig cfg = ref_cfg;
                cfg.workers = 2;
                cfg.batch = batch;
                IterationResult r = run_iteration(kind, g, plan, c, idx, cfg);
                check.require(r.rooted_total == ref.rooted_total &&
                                  *r.full_table == *ref.full_table,
                              "vectorized differs at batch=" + std::to_string(batch));
            }
        }
    }
    std::cout << "  [4] rooted totals and tables bit-identical over workers {1,2,8} and "
                 "batches {1,4,16}"
              << (check.ok ? "" : ": " + check.detail.str()) << "\n";
    return check.ok;
}

// --- 5. pruning work reduction --------------------------------------------------

bool pruning_work_reduction() {
    Check check;
    Graph g = generate_rmat(rmat_skew_spec(14, 140000, 3, 7));
    const auto stats = degree_stats(g);
    TemplateTree t = test_util::path_template(10);
    PartitionPlan plan = partition(t);
    ColorIndexer idx(10);
    Coloring c = random_coloring(g, 10, 12345);
    const std::vector<SplitTable> splits = build_plan_splits(plan, idx);
    EngineConfig cfg;
    cfg.workers = 2;
    WorkerPool pool(cfg.workers);

    auto timed = [&](EngineKind kind) {
        const auto t0 = std::chrono::steady_clock::now();
        IterationResult r = run_iteration(kind, g, plan, splits, c, idx, pool, cfg);
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return std::pair<IterationResult, double>{std::move(r), secs};
    };

    auto [base, base_secs] = timed(EngineKind::baseline);
    auto [pruned, pruned_secs] = timed(EngineKind::pruned);
    auto [vec, vec_secs] = timed(EngineKind::vectorized);

    std::uint64_t expect_passes = 0;
    for (const PlanNode& node : plan.nodes)
        if (!node.is_leaf())
            expect_passes += static_cast<std::uint64_t>(
                idx.binom(10, plan.node(node.passive_child).size));

    check.require(pruned.neighbor_passes() == expect_passes,
                  "pruned passes " + std::to_string(pruned.neighbor_passes()) + " != " +
                      std::to_string(expect_passes));
    check.require(pruned.neighbor_passes() < base.neighbor_passes(),
                  "pruned passes not below baseline");
    const double pruned_speedup = base_secs / pruned_secs;
    const double vec_speedup = base_secs / vec_secs;
    check.require(pruned_speedup >= 2.0,
                  "pruned speedup " + std::to_string(pruned_speedup) + " < 2");
    check.require(vec_speedup >= 3.0, "vectorized speedup " + std::to_string(vec_speedup) +
                                          " < 3");
    std::ostringstream line;
    line << "  [5] rmat-14 (n=" << g.n << ", avg deg " << stats.avg << "), u10 path: passes "
         << pruned.neighbor_passes() << "/" << base.neighbor_passes() << ", speedups pruned "
         << pruned_speedup << "x, vectorized " << vec_speedup << "x";
    std::cout << line.str() << (check.ok ? "" : ": " + check.detail.str()) << "\n";
    return check.ok;
}

// --- 6. kernel correctness -------------------------------------------------------

bool kernel_correctness() {
    Check check;
    std::mt19937_64 gen(6100);
    for (int trial = 0; trial < 200 && check.ok; ++trial) {
        const auto n = static_cast<vertex_t>(2 + gen() % 63);
        Graph g = test_util::random_graph(gen, n, 5.0);
        const int width = 1 + static_cast<int>(gen() % 8);
        std::vector<std::vector<double>> x_cols(static_cast<std::size_t>(width));
        for (auto& col : x_cols) {
            col.resize(static_cast<std::size_t>(n));
            for (auto& v : col) v = static_cast<double>(gen() % 32);
        }
        const auto expect = test_util::dense_spmm_reference(g, x_cols);

        CountTable table(n, width, Layout::column_major);
        for (int z = 0; z < width; ++z)
            for (vertex_t i = 0; i < n; ++i)
                table.at(i, z) = x_cols[static_cast<std::size_t>(z)][static_cast<std::size_t>(i)];
        RowBatch staged(n, width);
        load_batch(table, 0, width, staged, 0, n);
        ColumnBlock block{&table, 0, width};
        spmm_csc(g, staged, block, 0, n);
        for (int z = 0; z < width && check.ok; ++z)
            for (vertex_t i = 0; i < n; ++i)
                if (table.at(i, z) !=
                    expect[static_cast<std::size_t>(z)][static_cast<std::size_t>(i)]) {
                    check.require(false, "mismatch at trial " + std::to_string(trial));
                    break;
                }
    }
    std::cout << "  [6] spmm_csc equals the dense reference exactly on 200 integer instances"
              << (check.ok ? "" : ": " + check.detail.str()) << "\n";
    return check.ok;
}

// --- 7. colorful probability ------------------------------------------------------

bool colorful_probability_check() {
    Check check;
    for (int k : {3, 4, 5}) {
        // H is the vertex set of the complete graph K_k; colorfulness of a
        // fixed k-vertex embedding depends only on its vertices' colors.
        std::vector<std::pair<vertex_t, vertex_t>> edges;
        for (vertex_t u = 0; u < k; ++u)
            for (vertex_t v = u + 1; v < k; ++v) edges.emplace_back(u, v);
        Graph g = from_edges(std::move(edges), static_cast<vertex_t>(k));
        const int trials = 100000;
        int colorful = 0;
        for (int trial = 0; trial < trials; ++trial) {
            Coloring c = random_coloring(g, k, 70000 + static_cast<std::uint64_t>(trial));
            std::set<std::uint8_t> colors(c.color.begin(), c.color.end());
            if (static_cast<int>(colors.size()) == k) ++colorful;
        }
        const double p = colorful_probability(k);
        const double sigma = std::sqrt(p * (1.0 - p) / trials);
        const double observed = static_cast<double>(colorful) / trials;
        std::ostringstream what;
        what << "k=" << k << " observed " << observed << " expected " << p << " (3 sigma "
             << 3.0 * sigma << ")";
        check.require(std::abs(observed - p) <= 3.0 * sigma, what.str());
    }
    std::cout << "  [7] colorful fraction matches k!/k^k within 3 sigma for k in {3,4,5}"
              << (check.ok ? "" : ": " + check.detail.str()) << "\n";
    return check.ok;
}

// --- 8. cost model -----------------------------------------------------------------

// Stars on sparse graphs are vertex-term dominated, paths on dense graphs
// edge-term dominated; together they keep the fit well conditioned.
std::vector<Measurement> synthetic_rows(const ModelParams& truth, double noise,
                                        std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> jitter(0.0, 1.0);
    std::vector<Measurement> rows;
    const std::vector<std::pair<std::int64_t, std::int64_t>> graphs{
        {1 << 12, 2 << 12}, {1 << 14, 32 << 14}, {1 << 16, 4 << 16}};
    for (int k : {5, 7, 9}) {
        for (const TemplateTree& t :
             {test_util::path_template(k), test_util::star_template(k - 1)}) {
            PartitionPlan plan = partition(t);
            for (auto [n, m] : graphs)
                for (CostKind kind : {CostKind::fascia, CostKind::pfascia, CostKind::pgbsc}) {
                    double seconds = iteration_cost(plan, n, m, kind, truth);
                    if (noise > 0.0) seconds *= 1.0 + noise * jitter(gen);
                    rows.push_back(make_measurement(plan, n, m, kind, seconds));
                }
        }
    }
    return rows;
}

bool cost_model_roundtrip() {
    Check check;
    const ModelParams truth{2e-9, 3e-9, 5e-9};
    ModelParams clean = fit_constants(synthetic_rows(truth, 0.0, 1));
    check.require(std::abs(clean.alpha - truth.alpha) / truth.alpha < 1e-6 &&
                      std::abs(clean.beta - truth.beta) / truth.beta < 1e-6 &&
                      std::abs(clean.gamma - truth.gamma) / truth.gamma < 1e-6,
                  "noiseless fit drifted");
    for (std::uint64_t trial = 0; trial < 100; ++trial) {
        ModelParams noisy = fit_constants(synthetic_rows(truth, 0.05, 33000 + trial));
        check.require(std::abs(noisy.alpha - truth.alpha) / truth.alpha < 0.15 &&
                          std::abs(noisy.beta - truth.beta) / truth.beta < 0.15 &&
                          std::abs(noisy.gamma - truth.gamma) / truth.gamma < 0.15,
                      "noisy fit outside 15% at trial " + std::to_string(trial));
        if (!check.ok) break;
    }
    ImprovementBounds b = improvement_bounds(ModelParams{1, 1, 1}, 10, 50.0);
    check.require(std::abs(b.lower - 4.545) / 4.545 <= 1e-3,
                  "lower bound " + std::to_string(b.lower));
    check.require(std::abs(b.upper - 26.78) / 26.78 <= 1e-3,
                  "upper bound " + std::to_string(b.upper));
    std::cout << "  [8] constants recovered (exact / 5% noise) and Eq-bounds 4.545 / 26.78"
              << (check.ok ? "" : ": " + check.detail.str()) << "\n";
    return check.ok;
}

// --- 9. automorphisms ----------------------------------------------------------------

TemplateTree prufer_tree(int k, const std::vector<int>& code) {
    std::vector<int> degree(static_cast<std::size_t>(k), 1);
    for (int v : code) ++degree[static_cast<std::size_t>(v)];
    std::vector<std::pair<int, int>> edges;
    std::set<int> leaves;
    for (int v = 0; v < k; ++v)
        if (degree[static_cast<std::size_t>(v)] == 1) leaves.insert(v);
    std::vector<int> work = code;
    for (int v : work) {
        const int leaf = *leaves.begin();
        leaves.erase(leaves.begin());
        edges.emplace_back(leaf, v);
        if (--degree[static_cast<std::size_t>(v)] == 1) leaves.insert(v);
    }
    const int a = *leaves.begin();
    const int b = *std::next(leaves.begin());
    edges.emplace_back(a, b);
    return make_template(std::move(edges));
}

bool automorphism_exhaustive() {
    Check check;
    int free_trees = 0;
    for (int k = 1; k <= 7; ++k) {
        std::map<std::string, TemplateTree> canon;
        if (k == 1) {
            canon.emplace(canonical_form(single_vertex_template()), single_vertex_template());
        } else if (k == 2) {
            TemplateTree edge = make_template({{0, 1}});
            canon.emplace(canonical_form(edge), edge);
        } else {
            std::vector<int> code(static_cast<std::size_t>(k - 2), 0);
            while (true) {
                TemplateTree t = prufer_tree(k, code);
                canon.emplace(canonical_form(t), t);
                int pos = k - 3;
                while (pos >= 0 && code[static_cast<std::size_t>(pos)] == k - 1) {
                    code[static_cast<std::size_t>(pos)] = 0;
                    --pos;
                }
                if (pos < 0) break;
                ++code[static_cast<std::size_t>(pos)];
            }
        }
        for (const auto& [form, tree] : canon) {
            ++free_trees;
            const auto fast = automorphism_count(tree);
            const auto slow = test_util::brute_force_automorphisms(tree);
            if (fast != slow) {
                check.require(false, "k=" + std::to_string(k) + " tree " + form + ": " +
                                         std::to_string(fast) + " vs " + std::to_string(slow));
            }
        }
    }
    check.require(free_trees == 25, "expected 25 free trees up to k=7, saw " +
                                        std::to_string(free_trees));
    std::cout << "  [9] AHU automorphism counts match permutation brute force on all "
              << free_trees << " free trees k <= 7"
              << (check.ok ? "" : ": " + check.detail.str()) << "\n";
    return check.ok;
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
    }
    struct Criterion {
        int id;
        const char* name;
        bool (*fn)();
    };
    const std::vector<Criterion> criteria{
        {1, "oracle equivalence", oracle_equivalence},
        {2, "engine agreement", engine_agreement},
        {3, "indexer bijectivity", indexer_bijectivity},
        {4, "determinism", determinism},
        {5, "pruning work reduction", pruning_work_reduction},
        {6, "kernel correctness", kernel_correctness},
        {7, "colorful probability", colorful_probability_check},
        {8, "cost model round-trip", cost_model_roundtrip},
        {9, "automorphism correctness", automorphism_exhaustive},
    };
    bool all_ok = true;
    for (const Criterion& c : criteria) {
        if (only != 0 && c.id != only) continue;
        const bool ok = c.fn();
        std::cout << (ok ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.name << "\n";
        all_ok = all_ok && ok;
    }
    return all_ok ? 0 : 1;
}
