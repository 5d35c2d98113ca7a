#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "treecount/engines.hpp"

namespace treecount {

struct EstimateResult {
    int iterations = 0;
    std::vector<double> rooted_totals;       // one per iteration
    double colorful_probability = 0.0;       // k!/k^k
    std::uint64_t aut = 1;                   // |Aut(T)|
    double estimate = 0.0;                   // mean rooted_total / (aut * P)
    double stderr_of_mean = 0.0;
    std::uint64_t neighbor_passes = 0;       // summed over iterations
    std::uint64_t traversals = 0;
    std::uint64_t flops = 0;
    std::vector<double> iteration_seconds;
    std::vector<double> per_node_seconds;    // by plan node id, summed over iterations

    // Running per-iteration view used by the CSV/JSON emitters.
    double scale() const { return 1.0 / (static_cast<double>(aut) * colorful_probability); }
};

inline double colorful_probability(int k) {
    double p = 1.0;
    for (int i = 1; i <= k; ++i) p *= static_cast<double>(i) / static_cast<double>(k);
    return p;  // k!/k^k, computed as a product of i/k factors to stay in range
}

// Lemma-style iteration bound ceil(e^k * ln(1/delta) / eps^2). Advisory: it
// is astronomically conservative and never enforced.
inline std::int64_t required_iterations(int k, double epsilon, double delta) {
    if (!(epsilon > 0.0 && epsilon <= 1.0) || !(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("epsilon must lie in (0, 1] and delta in (0, 1)");
    const double raw = std::exp(static_cast<double>(k)) * std::log(1.0 / delta) /
                       (epsilon * epsilon);
    return static_cast<std::int64_t>(std::ceil(raw));
}

// Runs `iterations` independent colorings (seeds seed, seed+1, ...) through
// the chosen engine and rescales: each colorful rooted count is divided by
// |Aut(T)| (rooted mappings per embedding) and by k!/k^k (probability a
// fixed embedding is colorful).
inline EstimateResult estimate(const Graph& g, const TemplateTree& t, EngineKind kind,
                               int iterations, std::uint64_t seed,
                               const EngineConfig& cfg = {}) {
    if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
    const PartitionPlan plan = partition(t);
    const ColorIndexer indexer(t.k);
    const std::vector<SplitTable> splits = build_plan_splits(plan, indexer);
    WorkerPool pool(cfg.workers);

    EstimateResult r;
    r.iterations = iterations;
    r.aut = automorphism_count(t);
    r.colorful_probability = colorful_probability(t.k);
    r.rooted_totals.reserve(static_cast<std::size_t>(iterations));
    r.iteration_seconds.reserve(static_cast<std::size_t>(iterations));
    r.per_node_seconds.assign(plan.nodes.size(), 0.0);
    for (int i = 0; i < iterations; ++i) {
        const Coloring coloring = random_coloring(g, t.k, seed + static_cast<std::uint64_t>(i));
        IterationResult it = run_iteration(kind, g, plan, splits, coloring, indexer, pool, cfg);
        r.rooted_totals.push_back(it.rooted_total);
        r.neighbor_passes += it.neighbor_passes();
        r.traversals += it.traversals();
        r.flops += it.flops();
        double secs = 0.0;
        for (std::size_t node = 0; node < it.per_node.size(); ++node) {
            secs += it.per_node[node].seconds;
            r.per_node_seconds[node] += it.per_node[node].seconds;
        }
        r.iteration_seconds.push_back(secs);
    }

    double mean = 0.0;
    for (double x : r.rooted_totals) mean += x;
    mean /= static_cast<double>(iterations);
    double var = 0.0;
    for (double x : r.rooted_totals) var += (x - mean) * (x - mean);
    const double scale = r.scale();
    r.estimate = mean * scale;
    r.stderr_of_mean =
        iterations > 1
            ? std::sqrt(var / (static_cast<double>(iterations) *
                               static_cast<double>(iterations - 1))) * scale
            : 0.0;
    return r;
}

}  // namespace treecount
