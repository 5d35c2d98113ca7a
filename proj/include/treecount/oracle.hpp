#pragma once

#include <chrono>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "treecount/graph.hpp"
#include "treecount/templates.hpp"

namespace treecount {

struct ExactCount {
    std::uint64_t embeddings = 0;      // distinct non-induced copies of T
    std::uint64_t injective_maps = 0;  // = embeddings * |Aut(T)|
    double seconds = 0.0;
};

inline constexpr vertex_t kOracleMaxVertices = 50;
inline constexpr int kOracleMaxTemplate = 7;

namespace detail {

// Template vertices in DFS order from the root, each paired with the
// position of its parent in the order (so a partial map always constrains
// the next vertex to the neighbors of an already-mapped one).
inline std::vector<std::pair<int, int>> dfs_order(const TemplateTree& t) {
    auto adj = t.adjacency();
    std::vector<std::pair<int, int>> order;
    std::vector<char> seen(static_cast<std::size_t>(t.k), 0);
    std::vector<std::pair<int, int>> stack{{t.root, -1}};
    seen[static_cast<std::size_t>(t.root)] = 1;
    std::vector<int> position(static_cast<std::size_t>(t.k), -1);
    while (!stack.empty()) {
        auto [v, parent_pos] = stack.back();
        stack.pop_back();
        position[static_cast<std::size_t>(v)] = static_cast<int>(order.size());
        order.emplace_back(v, parent_pos);
        for (int w : adj[static_cast<std::size_t>(v)]) {
            if (!seen[static_cast<std::size_t>(w)]) {
                seen[static_cast<std::size_t>(w)] = 1;
                stack.emplace_back(w, position[static_cast<std::size_t>(v)]);
            }
        }
    }
    return order;
}

inline std::uint64_t count_injective(const Graph& g, const TemplateTree& t) {
    const auto order = dfs_order(t);
    // earlier DFS positions each vertex is template-adjacent to
    std::vector<std::vector<int>> back_edges(order.size());
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        for (std::size_t q = 0; q < pos; ++q) {
            const int tv = order[pos].first, tu = order[q].first;
            for (auto [a, b] : t.edges)
                if ((a == tu && b == tv) || (a == tv && b == tu)) {
                    back_edges[pos].push_back(static_cast<int>(q));
                    break;
                }
        }
    }

    std::vector<vertex_t> image(static_cast<std::size_t>(t.k), -1);
    std::vector<char> used(static_cast<std::size_t>(g.n), 0);
    std::uint64_t count = 0;

    // image[p] is the graph vertex assigned to the p-th template vertex in
    // DFS order; backtracking over candidates = neighbors of the parent's
    // image (all of V for the root).
    auto recurse = [&](auto&& self, std::size_t pos) -> void {
        if (pos == order.size()) {
            ++count;
            return;
        }
        const int parent_pos = order[pos].second;
        auto try_vertex = [&](vertex_t cand) {
            if (used[static_cast<std::size_t>(cand)]) return;
            for (int q : back_edges[pos]) {
                const vertex_t gu = image[static_cast<std::size_t>(q)];
                if (!std::binary_search(g.neighbors(gu).begin(), g.neighbors(gu).end(), cand))
                    return;
            }
            used[static_cast<std::size_t>(cand)] = 1;
            image[pos] = cand;
            self(self, pos + 1);
            used[static_cast<std::size_t>(cand)] = 0;
        };
        if (parent_pos < 0) {
            for (vertex_t v = 0; v < g.n; ++v) try_vertex(v);
        } else {
            for (vertex_t v : g.neighbors(image[static_cast<std::size_t>(parent_pos)]))
                try_vertex(v);
        }
    };
    recurse(recurse, 0);
    return count;
}

}  // namespace detail

// Exact non-induced embedding count by backtracking over injective maps.
// Ground truth for the statistical tests; refuses instances beyond the
// safety limits unless forced.
inline ExactCount count_exact(const Graph& g, const TemplateTree& t, bool force = false) {
    if (!force && (g.n > kOracleMaxVertices || t.k > kOracleMaxTemplate))
        throw std::invalid_argument(
            "instance above oracle limits (n <= " + std::to_string(kOracleMaxVertices) +
            ", k <= " + std::to_string(kOracleMaxTemplate) + "); pass force to override");
    const auto t0 = std::chrono::steady_clock::now();
    ExactCount r;
    r.injective_maps = detail::count_injective(g, t);
    const std::uint64_t aut = automorphism_count(t);
    if (r.injective_maps % aut != 0)
        throw std::logic_error("injective map count not divisible by automorphism count");
    r.embeddings = r.injective_maps / aut;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

}  // namespace treecount
