#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "treecount/color_index.hpp"
#include "treecount/count_table.hpp"
#include "treecount/graph.hpp"
#include "treecount/la_kernels.hpp"
#include "treecount/parallel.hpp"
#include "treecount/templates.hpp"

namespace treecount {

enum class EngineKind { baseline, pruned, vectorized };

inline const char* engine_name(EngineKind k) {
    switch (k) {
        case EngineKind::baseline: return "baseline";
        case EngineKind::pruned: return "pruned";
        case EngineKind::vectorized: return "vectorized";
    }
    return "?";
}

inline EngineKind engine_from_name(const std::string& s) {
    if (s == "baseline") return EngineKind::baseline;
    if (s == "pruned") return EngineKind::pruned;
    if (s == "vectorized") return EngineKind::vectorized;
    throw std::invalid_argument("unknown engine '" + s + "'");
}

class memory_budget_error : public std::runtime_error {
public:
    memory_budget_error(std::int64_t required, std::int64_t budget)
        : std::runtime_error("count tables need " + std::to_string(required) +
                             " bytes, over the budget of " + std::to_string(budget)),
          required_bytes(required) {}
    std::int64_t required_bytes;
};

struct EngineConfig {
    int workers = 1;
    int batch = 16;                    // Z, vectorized engine only
    std::int64_t memory_budget = 0;    // bytes; 0 = unlimited
    bool keep_full_table = false;
};

struct NodeStats {
    double seconds = 0.0;
    // Whole-graph neighbor-sum passes: one per (color set, split) for the
    // baseline, one per passive column for pruned/vectorized.
    std::uint64_t neighbor_passes = 0;
    // Per-vertex neighbor-list traversals (passes expressed per vertex).
    std::uint64_t traversals = 0;
    std::uint64_t flops = 0;
};

struct IterationResult {
    EngineKind engine = EngineKind::baseline;
    double rooted_total = 0.0;
    std::vector<NodeStats> per_node;  // indexed by plan node id
    std::optional<CountTable> full_table;

    std::uint64_t neighbor_passes() const {
        std::uint64_t s = 0;
        for (const auto& n : per_node) s += n.neighbor_passes;
        return s;
    }
    std::uint64_t traversals() const {
        std::uint64_t s = 0;
        for (const auto& n : per_node) s += n.traversals;
        return s;
    }
    std::uint64_t flops() const {
        std::uint64_t s = 0;
        for (const auto& n : per_node) s += n.flops;
        return s;
    }
};

namespace detail {

class IterationRun {
public:
    IterationRun(const Graph& g, const PartitionPlan& plan, const std::vector<SplitTable>& splits,
                 const Coloring& coloring, const ColorIndexer& indexer, WorkerPool& pool,
                 const EngineConfig& cfg, EngineKind kind)
        : g_(g), plan_(plan), splits_(splits), coloring_(coloring), indexer_(indexer),
          pool_(pool), cfg_(cfg), kind_(kind),
          layout_(kind == EngineKind::baseline ? Layout::row_major : Layout::column_major),
          tables_(plan.nodes.size()), worker_flops_(static_cast<std::size_t>(pool.workers())),
          worker_traversals_(static_cast<std::size_t>(pool.workers())) {
        if (static_cast<std::size_t>(coloring.color.size()) != static_cast<std::size_t>(g.n))
            throw std::invalid_argument("coloring size does not match graph");
        if (indexer.k() != plan.k) throw std::invalid_argument("indexer and plan disagree on k");
        const std::int64_t required = estimate_bytes(plan, g.n, plan.k);
        if (cfg.memory_budget > 0 && required > cfg.memory_budget)
            throw memory_budget_error(required, cfg.memory_budget);
    }

    IterationResult run() {
        IterationResult result;
        result.engine = kind_;
        result.per_node.resize(plan_.nodes.size());
        for (int id : plan_.dp_order) {
            const PlanNode& node = plan_.node(id);
            const auto t0 = std::chrono::steady_clock::now();
            reset_worker_counters();
            if (node.is_leaf()) {
                tables_[static_cast<std::size_t>(id)] =
                    init_leaf_table(coloring_, plan_.k, layout_);
            } else {
                compute_internal(node, result.per_node[static_cast<std::size_t>(id)]);
            }
            auto& stats = result.per_node[static_cast<std::size_t>(id)];
            merge_worker_counters(stats);
            stats.seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        }
        const int full = plan_.full_node();
        CountTable& table = expect_table(full);
        double total = 0.0;
        for (vertex_t i = 0; i < g_.n; ++i) total += table.at(i, 0);
        result.rooted_total = total;
        if (cfg_.keep_full_table) result.full_table = std::move(table);
        return result;
    }

private:
    void compute_internal(const PlanNode& node, NodeStats& stats) {
        const SplitTable& st = splits_[static_cast<std::size_t>(node.id)];
        CountTable& active = expect_table(node.active_child);
        CountTable& passive = expect_table(node.passive_child);
        tables_[static_cast<std::size_t>(node.id)] =
            CountTable(g_.n, st.parent_cols, layout_);
        CountTable& out = *tables_[static_cast<std::size_t>(node.id)];

        switch (kind_) {
            case EngineKind::baseline: baseline_node(st, active, passive, out, stats); break;
            case EngineKind::pruned: pruned_node(st, active, passive, out, stats); break;
            case EngineKind::vectorized: vectorized_node(st, active, passive, out, stats); break;
        }

        // liveness rule: children are dead once their parent's step is done
        tables_[static_cast<std::size_t>(node.active_child)].reset();
        tables_[static_cast<std::size_t>(node.passive_child)].reset();
    }

    // Reference semantics of Algorithm-1-style counting: thread-per-vertex,
    // row-major tables, one neighbor traversal per (color set, split).
    void baseline_node(const SplitTable& st, const CountTable& active, const CountTable& passive,
                       CountTable& out, NodeStats& stats) {
        const double* passive_raw = passive.raw().data();
        const auto passive_cols = static_cast<std::size_t>(passive.cols());
        const std::int32_t parent_cols = st.parent_cols;
        const int pairs = st.pairs_per_parent;
        pool_.for_range(static_cast<std::size_t>(g_.n), [&](std::size_t b, std::size_t e, int w) {
            for (std::size_t iu = b; iu < e; ++iu) {
                const auto i = static_cast<vertex_t>(iu);
                std::span<const vertex_t> nbrs = g_.neighbors(i);
                std::span<const double> row_a = active.row(i);
                std::span<double> row_s = out.row(i);
                for (std::int32_t is = 0; is < parent_cols; ++is) {
                    const std::size_t base =
                        static_cast<std::size_t>(is) * static_cast<std::size_t>(pairs);
                    double total = 0.0;
                    for (int p = 0; p < pairs; ++p) {
                        const double a = row_a[static_cast<std::size_t>(st.active_index[base + p])];
                        const std::size_t ip =
                            static_cast<std::size_t>(st.passive_index[base + p]);
                        double sum = 0.0;
                        for (vertex_t j : nbrs)
                            sum += passive_raw[static_cast<std::size_t>(j) * passive_cols + ip];
                        total += a * sum;
                    }
                    row_s[static_cast<std::size_t>(is)] = total;
                }
            }
            const std::uint64_t range_deg = static_cast<std::uint64_t>(
                g_.csc_col_ptr[e] - g_.csc_col_ptr[b]);
            const auto work = static_cast<std::uint64_t>(parent_cols) *
                              static_cast<std::uint64_t>(pairs);
            worker_traversals_[static_cast<std::size_t>(w)] += work * (e - b);
            worker_flops_[static_cast<std::size_t>(w)] += work * (range_deg + 2 * (e - b));
        });
        stats.neighbor_passes += static_cast<std::uint64_t>(parent_cols) *
                                 static_cast<std::uint64_t>(pairs);
    }

    // Eq.-2 order: neighbor sums per passive column first (through a |V|
    // buffer, written back in place), then multiply-accumulate over the
    // grouped splits so each passive column is traversed exactly once.
    void pruned_node(const SplitTable& st, const CountTable& active, CountTable& passive,
                     CountTable& out, NodeStats& stats) {
        std::vector<double> buffer(static_cast<std::size_t>(g_.n));
        for (std::int32_t ip = 0; ip < st.passive_cols; ++ip) {
            std::span<double> col = passive.column(ip);
            pool_.for_range(static_cast<std::size_t>(g_.n),
                            [&](std::size_t b, std::size_t e, int w) {
                spmv_csc(g_, col, buffer, static_cast<vertex_t>(b), static_cast<vertex_t>(e));
                worker_flops_[static_cast<std::size_t>(w)] += static_cast<std::uint64_t>(
                    g_.csc_col_ptr[e] - g_.csc_col_ptr[b]);
                worker_traversals_[static_cast<std::size_t>(w)] += e - b;
            });
            pool_.for_range(static_cast<std::size_t>(g_.n),
                            [&](std::size_t b, std::size_t e, int) {
                std::copy(buffer.begin() + static_cast<std::ptrdiff_t>(b),
                          buffer.begin() + static_cast<std::ptrdiff_t>(e),
                          col.begin() + static_cast<std::ptrdiff_t>(b));
            });
            ++stats.neighbor_passes;
        }
        accumulate_grouped(st, active, passive, out);
    }

    // Same two phases with the batched kernels: stage Z columns into the
    // row-major buffer, one SpMM writes the neighbor sums back, then eMA
    // per grouped split over contiguous row ranges.
    void vectorized_node(const SplitTable& st, const CountTable& active, CountTable& passive,
                         CountTable& out, NodeStats& stats) {
        const int z_max = std::max(1, cfg_.batch);
        for (std::int32_t c0 = 0; c0 < st.passive_cols; c0 += z_max) {
            const int zc = static_cast<int>(std::min<std::int32_t>(z_max, st.passive_cols - c0));
            RowBatch staged(g_.n, zc);
            pool_.for_range(static_cast<std::size_t>(g_.n),
                            [&](std::size_t b, std::size_t e, int) {
                load_batch(passive, c0, zc, staged, static_cast<vertex_t>(b),
                           static_cast<vertex_t>(e));
            });
            ColumnBlock block{&passive, c0, zc};
            pool_.for_range(static_cast<std::size_t>(g_.n),
                            [&](std::size_t b, std::size_t e, int w) {
                spmm_csc(g_, staged, block, static_cast<vertex_t>(b), static_cast<vertex_t>(e));
                worker_flops_[static_cast<std::size_t>(w)] +=
                    static_cast<std::uint64_t>(zc) *
                    static_cast<std::uint64_t>(g_.csc_col_ptr[e] - g_.csc_col_ptr[b]);
                worker_traversals_[static_cast<std::size_t>(w)] +=
                    static_cast<std::uint64_t>(zc) * (e - b);
            });
            stats.neighbor_passes += static_cast<std::uint64_t>(zc);
        }
        accumulate_grouped(st, active, passive, out);
    }

    // Phase 2 shared by pruned/vectorized: barrier between color
    // combinations, contiguous row ranges within one.
    void accumulate_grouped(const SplitTable& st, const CountTable& active,
                            const CountTable& passive, CountTable& out) {
        for (std::int32_t ip = 0; ip < st.passive_cols; ++ip) {
            std::span<const double> col_p = passive.column(ip);
            const std::size_t base = static_cast<std::size_t>(ip) *
                                     static_cast<std::size_t>(st.partners_per_passive);
            for (int q = 0; q < st.partners_per_passive; ++q) {
                std::span<double> col_s = out.column(st.grouped_parent[base + q]);
                std::span<const double> col_a = active.column(st.grouped_active[base + q]);
                pool_.for_range(static_cast<std::size_t>(g_.n),
                                [&](std::size_t b, std::size_t e, int w) {
                    ema(col_s, col_a, col_p, b, e);
                    worker_flops_[static_cast<std::size_t>(w)] += 2 * (e - b);
                });
            }
        }
    }

    CountTable& expect_table(int id) {
        auto& slot = tables_[static_cast<std::size_t>(id)];
        if (!slot.has_value())
            throw std::logic_error("count table read after its liveness window");
        return *slot;
    }

    void reset_worker_counters() {
        std::fill(worker_flops_.begin(), worker_flops_.end(), 0);
        std::fill(worker_traversals_.begin(), worker_traversals_.end(), 0);
    }
    void merge_worker_counters(NodeStats& stats) {
        for (std::uint64_t f : worker_flops_) stats.flops += f;
        for (std::uint64_t t : worker_traversals_) stats.traversals += t;
    }

    const Graph& g_;
    const PartitionPlan& plan_;
    const std::vector<SplitTable>& splits_;
    const Coloring& coloring_;
    const ColorIndexer& indexer_;
    WorkerPool& pool_;
    EngineConfig cfg_;
    EngineKind kind_;
    Layout layout_;
    std::vector<std::optional<CountTable>> tables_;
    std::vector<std::uint64_t> worker_flops_;
    std::vector<std::uint64_t> worker_traversals_;
};

}  // namespace detail

inline IterationResult run_iteration(EngineKind kind, const Graph& g, const PartitionPlan& plan,
                                     const std::vector<SplitTable>& splits,
                                     const Coloring& coloring, const ColorIndexer& indexer,
                                     WorkerPool& pool, const EngineConfig& cfg = {}) {
    return detail::IterationRun(g, plan, splits, coloring, indexer, pool, cfg, kind).run();
}

// Convenience single-shot variants that build the split tables and pool.
inline IterationResult run_iteration(EngineKind kind, const Graph& g, const PartitionPlan& plan,
                                     const Coloring& coloring, const ColorIndexer& indexer,
                                     const EngineConfig& cfg = {}) {
    const std::vector<SplitTable> splits = build_plan_splits(plan, indexer);
    WorkerPool pool(cfg.workers);
    return run_iteration(kind, g, plan, splits, coloring, indexer, pool, cfg);
}

inline IterationResult run_iteration_baseline(const Graph& g, const PartitionPlan& plan,
                                              const Coloring& coloring,
                                              const ColorIndexer& indexer,
                                              const EngineConfig& cfg = {}) {
    return run_iteration(EngineKind::baseline, g, plan, coloring, indexer, cfg);
}

inline IterationResult run_iteration_pruned(const Graph& g, const PartitionPlan& plan,
                                            const Coloring& coloring, const ColorIndexer& indexer,
                                            const EngineConfig& cfg = {}) {
    return run_iteration(EngineKind::pruned, g, plan, coloring, indexer, cfg);
}

inline IterationResult run_iteration_vectorized(const Graph& g, const PartitionPlan& plan,
                                                const Coloring& coloring,
                                                const ColorIndexer& indexer,
                                                const EngineConfig& cfg = {}) {
    return run_iteration(EngineKind::vectorized, g, plan, coloring, indexer, cfg);
}

}  // namespace treecount
