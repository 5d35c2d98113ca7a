#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "treecount/engines.hpp"
#include "treecount/synthgen.hpp"
#include "../support/test_util.hpp"

using namespace treecount;

namespace {

Coloring fixed_coloring(std::vector<std::uint8_t> colors) {
    Coloring c;
    c.color = std::move(colors);
    return c;
}

EngineConfig with_table() {
    EngineConfig cfg;
    cfg.keep_full_table = true;
    return cfg;
}

}  // namespace

TEST_CASE("baseline reproduces the hand-evaluated K3 edge count") {
    Graph g = from_edges({{0, 1}, {1, 2}, {2, 0}});
    TemplateTree edge = make_template({{0, 1}}, 0);
    PartitionPlan plan = partition(edge);
    ColorIndexer idx(2);
    Coloring c = fixed_coloring({0, 1, 0});

    IterationResult r = run_iteration_baseline(g, plan, c, idx, with_table());
    CHECK(r.rooted_total == 4.0);
    REQUIRE(r.full_table.has_value());
    CHECK(r.full_table->at(0, 0) == 1.0);
    CHECK(r.full_table->at(1, 0) == 2.0);
    CHECK(r.full_table->at(2, 0) == 1.0);
}

TEST_CASE("single-vertex template counts every vertex") {
    std::mt19937_64 gen(2);
    Graph g = test_util::random_graph(gen, 37, 3.0);
    TemplateTree t = single_vertex_template();
    PartitionPlan plan = partition(t);
    ColorIndexer idx(1);
    Coloring c = random_coloring(g, 1, 5);
    for (EngineKind kind : {EngineKind::baseline, EngineKind::pruned, EngineKind::vectorized}) {
        IterationResult r = run_iteration(kind, g, plan, c, idx);
        CHECK(r.rooted_total == 37.0);
    }
}

TEST_CASE("K3 with the 3-path and rainbow coloring counts 6 rooted maps") {
    Graph g = from_edges({{0, 1}, {1, 2}, {2, 0}});
    TemplateTree path3 = test_util::path_template(3);
    PartitionPlan plan = partition(path3);
    ColorIndexer idx(3);
    Coloring c = fixed_coloring({0, 1, 2});
    CHECK(test_util::brute_force_colorful_maps(g, path3, c) == 6.0);
    for (EngineKind kind : {EngineKind::baseline, EngineKind::pruned, EngineKind::vectorized}) {
        IterationResult r = run_iteration(kind, g, plan, c, idx);
        CHECK(r.rooted_total == Catch::Approx(6.0).epsilon(1e-12));
    }
}

TEST_CASE("every engine equals the brute-force colorful-map count") {
    std::mt19937_64 gen(23);
    for (int trial = 0; trial < 15; ++trial) {
        const auto n = static_cast<vertex_t>(4 + gen() % 12);
        Graph g = test_util::random_graph(gen, n, 3.0);
        const int k = 2 + static_cast<int>(gen() % 3);
        TemplateTree t = test_util::random_tree(gen, k);
        PartitionPlan plan = partition(t);
        ColorIndexer idx(k);
        Coloring c = random_coloring(g, k, 100 + static_cast<std::uint64_t>(trial));
        const double expect = test_util::brute_force_colorful_maps(g, t, c);
        for (EngineKind kind :
             {EngineKind::baseline, EngineKind::pruned, EngineKind::vectorized}) {
            IterationResult r = run_iteration(kind, g, plan, c, idx);
            CHECK(r.rooted_total == Catch::Approx(expect).margin(1e-9));
        }
    }
}

TEST_CASE("engines agree within 1e-9 relative on larger random instances") {
    std::mt19937_64 gen(31);
    for (int trial = 0; trial < 10; ++trial) {
        const auto n = static_cast<vertex_t>(50 + gen() % 151);
        Graph g = test_util::random_graph(gen, n, 8.0);
        const int k = 2 + static_cast<int>(gen() % 6);
        TemplateTree t = test_util::random_tree(gen, k);
        PartitionPlan plan = partition(t);
        ColorIndexer idx(k);
        Coloring c = random_coloring(g, k, 7 + static_cast<std::uint64_t>(trial));
        const double base = run_iteration_baseline(g, plan, c, idx).rooted_total;
        const double pruned = run_iteration_pruned(g, plan, c, idx).rooted_total;
        const double vec = run_iteration_vectorized(g, plan, c, idx).rooted_total;
        const double scale = std::max(1.0, std::abs(base));
        CHECK(std::abs(base - pruned) / scale <= 1e-9);
        CHECK(std::abs(base - vec) / scale <= 1e-9);
    }
}

TEST_CASE("rooted totals and tables are bit-identical across workers and batches") {
    Graph g = generate_erdos_renyi(300, 0.03, 77);
    std::mt19937_64 gen(41);
    TemplateTree t = test_util::random_tree(gen, 6);
    PartitionPlan plan = partition(t);
    ColorIndexer idx(6);
    Coloring c = random_coloring(g, 6, 3);

    for (EngineKind kind : {EngineKind::baseline, EngineKind::pruned, EngineKind::vectorized}) {
        EngineConfig ref_cfg = with_table();
        ref_cfg.workers = 1;
        IterationResult ref = run_iteration(kind, g, plan, c, idx, ref_cfg);
        for (int workers : {2, 3, 8}) {
            EngineConfig cfg = with_table();
            cfg.workers = workers;
            IterationResult r = run_iteration(kind, g, plan, c, idx, cfg);
            CHECK(r.rooted_total == ref.rooted_total);
            CHECK(*r.full_table == *ref.full_table);
        }
    }
    // batch size must not change a single bit of the vectorized result
    EngineConfig z1 = with_table();
    z1.batch = 1;
    IterationResult ref = run_iteration(EngineKind::vectorized, g, plan, c, idx, z1);
    for (int batch : {2, 4, 16, 1000}) {
        EngineConfig cfg = with_table();
        cfg.batch = batch;
        IterationResult r = run_iteration(EngineKind::vectorized, g, plan, c, idx, cfg);
        CHECK(r.rooted_total == ref.rooted_total);
        CHECK(*r.full_table == *ref.full_table);
    }
}

TEST_CASE("tables stay finite and non-negative") {
    std::mt19937_64 gen(53);
    Graph g = test_util::random_graph(gen, 60, 6.0);
    TemplateTree t = test_util::random_tree(gen, 5);
    PartitionPlan plan = partition(t);
    ColorIndexer idx(5);
    Coloring c = random_coloring(g, 5, 11);
    for (EngineKind kind : {EngineKind::baseline, EngineKind::pruned, EngineKind::vectorized}) {
        IterationResult r = run_iteration(kind, g, plan, c, idx, with_table());
        CHECK(std::isfinite(r.rooted_total));
        CHECK(r.rooted_total >= 0.0);
        for (double v : r.full_table->raw()) {
            CHECK(std::isfinite(v));
            CHECK(v >= 0.0);
        }
    }
}

TEST_CASE("instrumented pass counts follow the Table-2 shapes") {
    std::mt19937_64 gen(59);
    Graph g = test_util::random_graph(gen, 40, 4.0);
    const int k = 5;
    TemplateTree t = test_util::path_template(k);
    PartitionPlan plan = partition(t);
    ColorIndexer idx(k);
    Coloring c = random_coloring(g, k, 19);

    IterationResult base = run_iteration_baseline(g, plan, c, idx);
    IterationResult pruned = run_iteration_pruned(g, plan, c, idx);
    IterationResult vec = run_iteration_vectorized(g, plan, c, idx);

    std::uint64_t expect_pruned = 0, expect_base = 0;
    for (const PlanNode& node : plan.nodes) {
        if (node.is_leaf()) continue;
        const int hs = node.size;
        const int hp = plan.node(node.passive_child).size;
        expect_pruned += static_cast<std::uint64_t>(idx.binom(k, hp));
        expect_base += static_cast<std::uint64_t>(idx.binom(k, hs) * idx.binom(hs, hp));
    }
    CHECK(pruned.neighbor_passes() == expect_pruned);
    CHECK(vec.neighbor_passes() == expect_pruned);
    CHECK(base.neighbor_passes() == expect_base);
    CHECK(pruned.neighbor_passes() < base.neighbor_passes());
    // per-vertex traversal counters scale with |V|
    CHECK(base.traversals() == expect_base * static_cast<std::uint64_t>(g.n));
    CHECK(pruned.traversals() == expect_pruned * static_cast<std::uint64_t>(g.n));
}

TEST_CASE("neighbor-sum column example from the spec") {
    Graph g = from_edges({{0, 1}, {1, 2}, {2, 0}});
    // pruned phase 1 on a K3 passive column [1,2,3] -> [5,4,3]
    std::vector<double> col{1, 2, 3}, buf(3);
    spmv_csc(g, col, buf, 0, g.n);
    CHECK(buf == std::vector<double>{5, 4, 3});
}

TEST_CASE("memory budget refusal happens before any work") {
    Graph g = generate_erdos_renyi(100, 0.05, 5);
    TemplateTree t = test_util::path_template(6);
    PartitionPlan plan = partition(t);
    ColorIndexer idx(6);
    Coloring c = random_coloring(g, 6, 1);
    EngineConfig cfg;
    cfg.memory_budget = 64;  // bytes: absurdly small
    for (EngineKind kind : {EngineKind::baseline, EngineKind::pruned, EngineKind::vectorized}) {
        CHECK_THROWS_AS(run_iteration(kind, g, plan, c, idx, cfg), memory_budget_error);
    }
    cfg.memory_budget = estimate_bytes(plan, g.n, 6);
    CHECK_NOTHROW(run_iteration(EngineKind::pruned, g, plan, c, idx, cfg));
}
