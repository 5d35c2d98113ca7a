#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "treecount/graph.hpp"
#include "treecount/rng.hpp"

namespace treecount {

// RMAT recursive-quadrant generator spec. n = 2^scale vertices; each edge
// lands by descending `scale` levels, picking quadrant (a,b,c,d) each time.
struct RmatSpec {
    int scale = 10;
    std::int64_t edges = 0;  // target count before dedup / self-loop removal
    double a = 0.25, b = 0.25, c = 0.25, d = 0.25;
    std::uint64_t seed = 0;
};

inline constexpr int kRmatMaxScale = 26;

// The paper-style skew ladder: skew 0 is the uniform quadrant split and
// each level shifts mass from d to a, reaching (0.57, 0.19, 0.19, 0.05) at
// level 8. Documented in the README; levels outside [0, 8] are rejected.
inline RmatSpec rmat_skew_spec(int scale, std::int64_t edges, int skew, std::uint64_t seed) {
    if (skew < 0 || skew > 8) throw std::invalid_argument("skew level must be in [0, 8]");
    RmatSpec spec;
    spec.scale = scale;
    spec.edges = edges;
    spec.seed = seed;
    spec.a = 0.25 + 0.04 * skew;
    spec.d = 0.25 - 0.025 * skew;
    spec.b = spec.c = (1.0 - spec.a - spec.d) / 2.0;
    return spec;
}

inline Graph generate_rmat(const RmatSpec& spec) {
    if (spec.scale < 1 || spec.scale > kRmatMaxScale)
        throw std::invalid_argument("rmat scale must be in [1, " +
                                    std::to_string(kRmatMaxScale) + "]");
    if (spec.edges < 1) throw std::invalid_argument("rmat edge target must be >= 1");
    if (std::abs(spec.a + spec.b + spec.c + spec.d - 1.0) > 1e-9)
        throw std::invalid_argument("rmat quadrant probabilities must sum to 1");

    const vertex_t n = static_cast<vertex_t>(std::int64_t{1} << spec.scale);
    Rng rng(spec.seed);
    std::vector<std::pair<vertex_t, vertex_t>> edges;
    edges.reserve(static_cast<std::size_t>(spec.edges));
    const double ab = spec.a + spec.b;
    const double abc = ab + spec.c;
    for (std::int64_t e = 0; e < spec.edges; ++e) {
        vertex_t row = 0, col = 0;
        for (int level = 0; level < spec.scale; ++level) {
            const double u = rng.unit();
            row <<= 1;
            col <<= 1;
            if (u < spec.a) {
                // top-left
            } else if (u < ab) {
                col |= 1;
            } else if (u < abc) {
                row |= 1;
            } else {
                row |= 1;
                col |= 1;
            }
        }
        edges.emplace_back(row, col);
    }
    return from_edges(std::move(edges), n);  // drops self-loops, dedups, symmetrizes
}

inline Graph generate_erdos_renyi(vertex_t n, double p, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("p must be in [0, 1]");
    Rng rng(seed);
    std::vector<std::pair<vertex_t, vertex_t>> edges;
    for (vertex_t u = 0; u < n; ++u)
        for (vertex_t v = u + 1; v < n; ++v)
            if (rng.bernoulli(p)) edges.emplace_back(u, v);
    return from_edges(std::move(edges), n);  // p = 0 yields the empty graph
}

}  // namespace treecount
