#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "treecount/count_table.hpp"
#include "treecount/graph.hpp"

namespace treecount {

// Row-major |V| x Z staging buffer for the batched neighbor-sum kernel.
// Keeping the batch row-contiguous makes the per-neighbor inner loop a
// stride-1 sweep of Z doubles.
class RowBatch {
public:
    RowBatch() = default;
    RowBatch(vertex_t rows, int width)
        : rows_(rows), width_(width),
          values_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(width), 0.0) {}

    vertex_t rows() const { return rows_; }
    int width() const { return width_; }

    double* row(vertex_t i) {
        return values_.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(width_);
    }
    const double* row(vertex_t i) const {
        return values_.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(width_);
    }

private:
    vertex_t rows_ = 0;
    int width_ = 0;
    std::vector<double> values_;
};

// View of Z consecutive columns of a column-major count table.
struct ColumnBlock {
    CountTable* table = nullptr;
    std::int32_t first_col = 0;
    int width = 0;

    std::span<double> column(int z) const { return table->column(first_col + z); }
};

// Stages rows [row_begin, row_end) of the block into the row-major batch:
// x(i, z) = table(i, first_col + z).
inline void load_batch(const CountTable& src, std::int32_t first_col, int width, RowBatch& dst,
                       vertex_t row_begin, vertex_t row_end) {
    for (int z = 0; z < width; ++z) {
        std::span<const double> col = src.column(first_col + z);
        for (vertex_t i = row_begin; i < row_end; ++i)
            dst.row(i)[z] = col[static_cast<std::size_t>(i)];
    }
}

// Neighbor sum of a single column: y[i] = sum over j in N(i) of x[j], rows
// [row_begin, row_end), neighbors visited in ascending id order. x and y
// must be distinct storage.
inline void spmv_csc(const Graph& g, std::span<const double> x, std::span<double> y,
                     vertex_t row_begin, vertex_t row_end) {
    if (x.size() != static_cast<std::size_t>(g.n) || y.size() != static_cast<std::size_t>(g.n))
        throw std::invalid_argument("spmv_csc: vector length must equal vertex count");
    if (x.data() == y.data()) throw std::invalid_argument("spmv_csc: x and y must not alias");
    const std::int64_t* col_ptr = g.csc_col_ptr.data();
    const vertex_t* rows = g.csc_rows.data();
    for (vertex_t i = row_begin; i < row_end; ++i) {
        double acc = 0.0;
        for (std::int64_t e = col_ptr[i]; e < col_ptr[i + 1]; ++e)
            acc += x[static_cast<std::size_t>(rows[e])];
        y[static_cast<std::size_t>(i)] = acc;
    }
}

// Batched neighbor sum (SpMV over Z columns at once): for every row i in
// [row_begin, row_end) and z < width, y(i, z) = sum over j in N(i) of
// x(j, z). x is the staged copy of the same columns, so writes to y never
// feed back into the sums. Per-entry accumulation order is the ascending
// neighbor order, independent of width, which keeps results bit-identical
// for any batch size.
inline void spmm_csc(const Graph& g, const RowBatch& x, const ColumnBlock& y,
                     vertex_t row_begin, vertex_t row_end) {
    const int width = y.width;
    if (x.width() != width) throw std::invalid_argument("spmm_csc: batch width mismatch");
    if (x.rows() != g.n || y.table->rows() != g.n)
        throw std::invalid_argument("spmm_csc: row count must equal vertex count");
    const std::int64_t* col_ptr = g.csc_col_ptr.data();
    const vertex_t* rows = g.csc_rows.data();
    std::vector<double> acc(static_cast<std::size_t>(width));
    std::vector<double*> out(static_cast<std::size_t>(width));
    for (int z = 0; z < width; ++z) out[static_cast<std::size_t>(z)] = y.column(z).data();
    for (vertex_t i = row_begin; i < row_end; ++i) {
        for (int z = 0; z < width; ++z) acc[static_cast<std::size_t>(z)] = 0.0;
        for (std::int64_t e = col_ptr[i]; e < col_ptr[i + 1]; ++e) {
            const double* xr = x.row(rows[e]);
            for (int z = 0; z < width; ++z) acc[static_cast<std::size_t>(z)] += xr[z];
        }
        for (int z = 0; z < width; ++z) out[static_cast<std::size_t>(z)][i] = acc[static_cast<std::size_t>(z)];
    }
}

// Element-wise multiply-accumulate: out[i] += a[i] * p[i] over the index
// range. a and p are read-only; all three spans must have equal length.
inline void ema(std::span<double> out, std::span<const double> a, std::span<const double> p,
                std::size_t begin, std::size_t end) {
    if (out.size() != a.size() || a.size() != p.size())
        throw std::invalid_argument("ema: length mismatch");
    double* o = out.data();
    const double* av = a.data();
    const double* pv = p.data();
    for (std::size_t i = begin; i < end; ++i) o[i] += av[i] * pv[i];
}

inline void ema(std::span<double> out, std::span<const double> a, std::span<const double> p) {
    ema(out, a, p, 0, out.size());
}

}  // namespace treecount
