#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "treecount/color_index.hpp"
#include "treecount/templates.hpp"

namespace treecount {

// Which analytical runtime model a measurement (or prediction) belongs to.
// fascia: gamma * |E| * C(k,|T_s|) * C(|T_s|,|T_s,p|) per internal node.
// pgbsc:  alpha * |E| * C(k,|T_s,p|) + beta * |V| * C(k,|T_s|) * C(|T_s|,|T_s,p|).
// pfascia: like pgbsc but the |V| term gains an extra C(k,|T_s,p|) summand.
// |E| means the stored nonzeros of the adjacency matrix, i.e. 2m.
enum class CostKind { fascia, pfascia, pgbsc };

inline const char* cost_kind_name(CostKind k) {
    switch (k) {
        case CostKind::fascia: return "fascia";
        case CostKind::pfascia: return "pfascia";
        case CostKind::pgbsc: return "pgbsc";
    }
    return "?";
}

inline CostKind cost_kind_from_name(const std::string& s) {
    if (s == "fascia") return CostKind::fascia;
    if (s == "pfascia") return CostKind::pfascia;
    if (s == "pgbsc") return CostKind::pgbsc;
    throw std::invalid_argument("unknown cost model '" + s + "'");
}

struct ModelParams {
    double alpha = 1.0;
    double beta = 1.0;
    double gamma = 1.0;
};

// Per-measurement coefficients of the constants: seconds ~= alpha*edge_coef
// + beta*vertex_coef for pgbsc/pfascia rows, gamma*edge_coef for fascia.
struct CostCoefficients {
    double edge_coef = 0.0;
    double vertex_coef = 0.0;
};

inline CostCoefficients node_coefficients(const PlanNode& node, const PartitionPlan& plan,
                                          std::int64_t n, std::int64_t m, CostKind kind) {
    CostCoefficients c;
    if (node.is_leaf()) return c;
    ColorIndexer indexer(plan.k);
    const int hs = node.size;
    const int hp = plan.node(node.passive_child).size;
    const double nnz = 2.0 * static_cast<double>(m);
    const double comb_sp = static_cast<double>(indexer.binom(plan.k, hp));
    const double comb_sides =
        static_cast<double>(indexer.binom(plan.k, hs)) * static_cast<double>(indexer.binom(hs, hp));
    switch (kind) {
        case CostKind::fascia:
            c.edge_coef = nnz * comb_sides;
            break;
        case CostKind::pgbsc:
            c.edge_coef = nnz * comb_sp;
            c.vertex_coef = static_cast<double>(n) * comb_sides;
            break;
        case CostKind::pfascia:
            c.edge_coef = nnz * comb_sp;
            c.vertex_coef = static_cast<double>(n) * (comb_sides + comb_sp);
            break;
    }
    return c;
}

inline double node_cost(const PlanNode& node, const PartitionPlan& plan, std::int64_t n,
                        std::int64_t m, CostKind kind, const ModelParams& params = {}) {
    const CostCoefficients c = node_coefficients(node, plan, n, m, kind);
    const double edge_constant = kind == CostKind::fascia ? params.gamma : params.alpha;
    return edge_constant * c.edge_coef + params.beta * c.vertex_coef;
}

inline CostCoefficients iteration_coefficients(const PartitionPlan& plan, std::int64_t n,
                                               std::int64_t m, CostKind kind) {
    CostCoefficients total;
    for (int id : plan.dp_order) {
        const CostCoefficients c = node_coefficients(plan.node(id), plan, n, m, kind);
        total.edge_coef += c.edge_coef;
        total.vertex_coef += c.vertex_coef;
    }
    return total;
}

inline double iteration_cost(const PartitionPlan& plan, std::int64_t n, std::int64_t m,
                             CostKind kind, const ModelParams& params = {}) {
    double total = 0.0;
    for (int id : plan.dp_order)
        total += node_cost(plan.node(id), plan, n, m, kind, params);
    return total;
}

struct Measurement {
    CostCoefficients coefficients;
    CostKind kind = CostKind::pgbsc;
    double seconds = 0.0;
};

inline Measurement make_measurement(const PartitionPlan& plan, std::int64_t n, std::int64_t m,
                                    CostKind kind, double seconds) {
    return {iteration_coefficients(plan, n, m, kind), kind, seconds};
}

namespace detail {

// Non-negative least squares for the 2-variable system: solve the normal
// equations, and if a coefficient comes out negative take the best
// single-variable boundary solution instead (exact for two unknowns).
inline std::pair<double, double> nnls2(double saa, double sab, double sbb, double say,
                                       double sby) {
    auto sse_terms = [&](double x, double y) {
        return x * x * saa + 2 * x * y * sab + y * y * sbb - 2 * x * say - 2 * y * sby;
    };
    const double det = saa * sbb - sab * sab;
    if (det > 1e-12 * saa * sbb) {
        const double a = (say * sbb - sby * sab) / det;
        const double b = (sby * saa - say * sab) / det;
        if (a >= 0 && b >= 0) return {a, b};
    }
    const double a_only = saa > 0 ? std::max(0.0, say / saa) : 0.0;
    const double b_only = sbb > 0 ? std::max(0.0, sby / sbb) : 0.0;
    return sse_terms(a_only, 0.0) <= sse_terms(0.0, b_only)
               ? std::pair{a_only, 0.0}
               : std::pair{0.0, b_only};
}

}  // namespace detail

// Fits (alpha, beta) from the pgbsc/pfascia rows and gamma from the fascia
// rows by non-negative least squares on raw seconds. Throws when the rows
// cannot pin the constants down.
inline ModelParams fit_constants(std::span<const Measurement> measurements) {
    double saa = 0, sab = 0, sbb = 0, say = 0, sby = 0;
    double sgg = 0, sgy = 0;
    int ab_rows = 0, g_rows = 0;
    for (const Measurement& meas : measurements) {
        const double e = meas.coefficients.edge_coef;
        const double v = meas.coefficients.vertex_coef;
        if (meas.kind == CostKind::fascia) {
            sgg += e * e;
            sgy += e * meas.seconds;
            ++g_rows;
        } else {
            saa += e * e;
            sab += e * v;
            sbb += v * v;
            say += e * meas.seconds;
            sby += v * meas.seconds;
            ++ab_rows;
        }
    }
    if (g_rows < 1 || sgg <= 0.0)
        throw std::invalid_argument(
            "rank-deficient fit: need at least one fascia measurement with nonzero cost to fit "
            "gamma");
    if (ab_rows < 2)
        throw std::invalid_argument(
            "rank-deficient fit: need at least two pgbsc/pfascia measurements to fit alpha and "
            "beta");
    const double det = saa * sbb - sab * sab;
    if (!(det > 1e-12 * saa * sbb))
        throw std::invalid_argument(
            "rank-deficient fit: pgbsc/pfascia measurements are collinear; vary the template "
            "shape or the graph size/degree");
    ModelParams params;
    auto [a, b] = detail::nnls2(saa, sab, sbb, say, sby);
    params.alpha = a;
    params.beta = b;
    params.gamma = std::max(0.0, sgy / sgg);
    return params;
}

struct ImprovementBounds {
    double lower = 0.0;
    double upper = 0.0;
};

// Closed-form speedup envelope of the pruned+vectorized execution over the
// baseline: gamma / (alpha*2/k + beta/d) <= improvement <= gamma /
// (alpha*(2/3)^k + beta/d), d the average degree.
inline ImprovementBounds improvement_bounds(const ModelParams& params, int k, double d) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    if (!(d > 0.0)) throw std::invalid_argument("average degree must be positive");
    ImprovementBounds b;
    b.lower = params.gamma / (params.alpha * 2.0 / static_cast<double>(k) + params.beta / d);
    b.upper = params.gamma /
              (params.alpha * std::pow(2.0 / 3.0, static_cast<double>(k)) + params.beta / d);
    return b;
}

}  // namespace treecount
