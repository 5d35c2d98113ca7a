#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "treecount/color_index.hpp"
#include "treecount/graph.hpp"
#include "treecount/rng.hpp"
#include "treecount/templates.hpp"

namespace treecount {

enum class Layout { row_major, column_major };

// Dense |V| x C(k,|T_s|) matrix of embedding counts for one sub-template.
// The baseline engine keeps rows contiguous (per-vertex access); the pruned
// and vectorized engines keep columns contiguous (per-color-set access).
class CountTable {
public:
    CountTable() = default;
    CountTable(vertex_t rows, std::int32_t cols, Layout layout)
        : rows_(rows), cols_(cols), layout_(layout),
          values_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0.0) {}

    vertex_t rows() const { return rows_; }
    std::int32_t cols() const { return cols_; }
    Layout layout() const { return layout_; }

    double& at(vertex_t i, std::int32_t c) {
        return values_[offset(i, c)];
    }
    double at(vertex_t i, std::int32_t c) const { return values_[offset(i, c)]; }

    // Contiguous views; layout-checked.
    std::span<double> column(std::int32_t c) {
        check(layout_ == Layout::column_major, "column() needs column-major layout");
        return {values_.data() + static_cast<std::size_t>(c) * static_cast<std::size_t>(rows_),
                static_cast<std::size_t>(rows_)};
    }
    std::span<const double> column(std::int32_t c) const {
        check(layout_ == Layout::column_major, "column() needs column-major layout");
        return {values_.data() + static_cast<std::size_t>(c) * static_cast<std::size_t>(rows_),
                static_cast<std::size_t>(rows_)};
    }
    std::span<double> row(vertex_t i) {
        check(layout_ == Layout::row_major, "row() needs row-major layout");
        return {values_.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(cols_),
                static_cast<std::size_t>(cols_)};
    }
    std::span<const double> row(vertex_t i) const {
        check(layout_ == Layout::row_major, "row() needs row-major layout");
        return {values_.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(cols_),
                static_cast<std::size_t>(cols_)};
    }

    std::span<const double> raw() const { return {values_}; }

    bool operator==(const CountTable& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_ && values_ == other.values_;
    }

private:
    std::size_t offset(vertex_t i, std::int32_t c) const {
        return layout_ == Layout::row_major
                   ? static_cast<std::size_t>(i) * static_cast<std::size_t>(cols_) +
                         static_cast<std::size_t>(c)
                   : static_cast<std::size_t>(c) * static_cast<std::size_t>(rows_) +
                         static_cast<std::size_t>(i);
    }
    static void check(bool ok, const char* what) {
        if (!ok) throw std::logic_error(what);
    }

    vertex_t rows_ = 0;
    std::int32_t cols_ = 0;
    Layout layout_ = Layout::row_major;
    std::vector<double> values_;
};

// One random coloring of the graph: colors are i.i.d. uniform over [0, k),
// drawn from Rng (mt19937_64 + rejection) so a seed fully determines them.
struct Coloring {
    std::vector<std::uint8_t> color;
    std::uint64_t seed = 0;
};

inline Coloring random_coloring(const Graph& g, int k, std::uint64_t seed) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    Coloring c;
    c.seed = seed;
    c.color.resize(static_cast<std::size_t>(g.n));
    Rng rng(seed);
    for (auto& x : c.color)
        x = static_cast<std::uint8_t>(k == 1 ? 0 : rng.below(static_cast<std::uint32_t>(k)));
    return c;
}

// Leaf table: k columns, entry (i, c) = 1 iff vertex i was colored c.
inline CountTable init_leaf_table(const Coloring& coloring, int k, Layout layout) {
    CountTable t(static_cast<vertex_t>(coloring.color.size()), k, layout);
    for (vertex_t i = 0; i < t.rows(); ++i)
        t.at(i, coloring.color[static_cast<std::size_t>(i)]) = 1.0;
    return t;
}

// Peak table footprint in bytes under the liveness rule the engines follow:
// a node's table is allocated at its own dp step and freed as soon as its
// parent's step completes. During a step the node's table and both children
// (if any) are live together.
inline std::int64_t estimate_bytes(const PartitionPlan& plan, std::int64_t n, int k) {
    ColorIndexer indexer(k);
    std::vector<char> live(plan.nodes.size(), 0);
    auto live_cols = [&] {
        std::int64_t cols = 0;
        for (const PlanNode& node : plan.nodes)
            if (live[static_cast<std::size_t>(node.id)]) cols += indexer.num_sets(node.size);
        return cols;
    };
    std::int64_t peak = 0;
    for (int id : plan.dp_order) {
        const PlanNode& node = plan.node(id);
        live[static_cast<std::size_t>(id)] = 1;
        peak = std::max(peak, live_cols());
        if (!node.is_leaf()) {
            live[static_cast<std::size_t>(node.active_child)] = 0;
            live[static_cast<std::size_t>(node.passive_child)] = 0;
        }
    }
    return 8 * n * peak;
}

// Debug dump: one "vertex,column,value" row per entry.
inline void dump_csv(const CountTable& t, std::ostream& out) {
    out << "vertex,column,value\n";
    for (vertex_t i = 0; i < t.rows(); ++i)
        for (std::int32_t c = 0; c < t.cols(); ++c)
            out << i << ',' << c << ',' << t.at(i, c) << '\n';
}

}  // namespace treecount
