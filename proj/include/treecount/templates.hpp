#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "treecount/graph.hpp"

namespace treecount {

// The tree template being counted: k vertices with ids 0..k-1, k-1 edges,
// and a root vertex that anchors the partition.
struct TemplateTree {
    int k = 0;
    std::vector<std::pair<int, int>> edges;
    int root = 0;

    std::vector<std::vector<int>> adjacency() const {
        std::vector<std::vector<int>> adj(static_cast<std::size_t>(k));
        for (auto [u, v] : edges) {
            adj[static_cast<std::size_t>(u)].push_back(v);
            adj[static_cast<std::size_t>(v)].push_back(u);
        }
        for (auto& nb : adj) std::sort(nb.begin(), nb.end());
        return adj;
    }
};

namespace detail {

inline void validate_tree(const TemplateTree& t) {
    if (t.k < 1) throw parse_error("not a tree: empty template");
    if (static_cast<int>(t.edges.size()) != t.k - 1)
        throw parse_error("not a tree: " + std::to_string(t.edges.size()) +
                          " edges for " + std::to_string(t.k) + " vertices");
    for (auto [u, v] : t.edges) {
        if (u < 0 || v < 0 || u >= t.k || v >= t.k || u == v)
            throw parse_error("not a tree: bad edge " + std::to_string(u) + " " +
                              std::to_string(v));
    }
    // connectivity check; k-1 edges + connected => acyclic
    auto adj = t.adjacency();
    std::vector<char> seen(static_cast<std::size_t>(t.k), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int w : adj[static_cast<std::size_t>(v)]) {
            if (!seen[static_cast<std::size_t>(w)]) {
                seen[static_cast<std::size_t>(w)] = 1;
                ++count;
                stack.push_back(w);
            }
        }
    }
    if (count != t.k) throw parse_error("not a tree: disconnected");
}

inline int default_root(const TemplateTree& t) {
    auto adj = t.adjacency();
    int best = 0;
    for (int v = 1; v < t.k; ++v)
        if (adj[static_cast<std::size_t>(v)].size() > adj[static_cast<std::size_t>(best)].size())
            best = v;
    return best;
}

}  // namespace detail

// Builds a validated template from raw edges. root = -1 picks the default:
// the max-degree vertex, ties broken by smallest id.
inline TemplateTree make_template(std::vector<std::pair<int, int>> edges, int root = -1) {
    TemplateTree t;
    int max_id = -1;
    for (auto [u, v] : edges) max_id = std::max({max_id, u, v});
    t.k = max_id + 1;
    t.edges = std::move(edges);
    detail::validate_tree(t);
    t.root = root >= 0 ? root : detail::default_root(t);
    if (t.root >= t.k) throw parse_error("template root out of range");
    return t;
}

inline TemplateTree single_vertex_template() { return TemplateTree{1, {}, 0}; }

// Template files are edge lists of k-1 lines "u v". A file whose only
// non-comment content is a single integer declares the one-vertex template.
inline TemplateTree parse_template(std::istream& in, const std::string& name = "<stream>",
                                   int root = -1) {
    std::vector<std::pair<int, int>> edges;
    std::string line;
    std::int64_t lineno = 0;
    bool lone_vertex = false;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ss(line);
        int u = 0, v = 0;
        if (!(ss >> u)) throw parse_error(name + ": parse error at line " + std::to_string(lineno));
        if (!(ss >> v)) {
            if (u == 0 && edges.empty() && !lone_vertex) {
                lone_vertex = true;
                continue;
            }
            throw parse_error(name + ": parse error at line " + std::to_string(lineno));
        }
        std::string rest;
        if (ss >> rest)
            throw parse_error(name + ": parse error at line " + std::to_string(lineno));
        edges.emplace_back(u, v);
    }
    if (lone_vertex) {
        if (!edges.empty()) throw parse_error(name + ": stray vertex line in edge list");
        return single_vertex_template();
    }
    if (edges.empty()) throw parse_error(name + ": empty template");
    return make_template(std::move(edges), root);
}

inline TemplateTree parse_template(const std::string& path, int root = -1) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open template file: " + path);
    return parse_template(in, path, root);
}

// ---------------------------------------------------------------------------
// Partition plan
// ---------------------------------------------------------------------------

// One sub-template in the recursive active/passive decomposition. Leaves
// have size 1 and no children; an internal node is split by cutting the
// edge (root, tau): the piece keeping the root is the active child, the
// piece rooted at tau is the passive child.
struct PlanNode {
    int id = -1;
    std::vector<int> vertices;  // sorted template vertex ids
    int root = -1;
    int size = 0;
    int active_child = -1;
    int passive_child = -1;
    std::pair<int, int> cut_edge{-1, -1};  // (root, tau), (-1,-1) for leaves
    int parent = -1;

    bool is_leaf() const { return size == 1; }
    int active_size(const std::vector<PlanNode>& nodes) const {
        return nodes[static_cast<std::size_t>(active_child)].size;
    }
    int passive_size(const std::vector<PlanNode>& nodes) const {
        return nodes[static_cast<std::size_t>(passive_child)].size;
    }
};

struct PartitionPlan {
    int k = 0;
    int root = 0;
    std::vector<PlanNode> nodes;  // indexed by node id
    std::vector<int> dp_order;    // post-order; children precede parents; last = full template

    const PlanNode& node(int id) const { return nodes[static_cast<std::size_t>(id)]; }
    int full_node() const { return dp_order.back(); }
};

namespace detail {

struct PlanBuilder {
    const std::vector<std::vector<int>>& adj;
    PartitionPlan& plan;

    // Returns the id of the node for (vertices, root); appends children to
    // dp_order before the node itself.
    int build(std::vector<int> vertices, int root) {
        const int id = static_cast<int>(plan.nodes.size());
        plan.nodes.push_back({});
        plan.nodes[static_cast<std::size_t>(id)].id = id;
        plan.nodes[static_cast<std::size_t>(id)].vertices = vertices;
        plan.nodes[static_cast<std::size_t>(id)].root = root;
        plan.nodes[static_cast<std::size_t>(id)].size = static_cast<int>(vertices.size());

        if (vertices.size() > 1) {
            // cut rule: the edge from the root to its smallest-id neighbor
            // inside this sub-template
            int tau = -1;
            for (int w : adj[static_cast<std::size_t>(root)]) {
                if (std::binary_search(vertices.begin(), vertices.end(), w)) {
                    tau = w;
                    break;
                }
            }
            auto [active_set, passive_set] = split_on_edge(vertices, root, tau);
            int a = build(std::move(active_set), root);
            int p = build(std::move(passive_set), tau);
            auto& n = plan.nodes[static_cast<std::size_t>(id)];
            n.active_child = a;
            n.passive_child = p;
            n.cut_edge = {root, tau};
            plan.nodes[static_cast<std::size_t>(a)].parent = id;
            plan.nodes[static_cast<std::size_t>(p)].parent = id;
        }
        plan.dp_order.push_back(id);
        return id;
    }

    // Removes edge (root, tau) and returns the two components, root-side first.
    std::pair<std::vector<int>, std::vector<int>> split_on_edge(
        const std::vector<int>& vertices, int root, int tau) const {
        std::vector<int> side = reachable(vertices, root, tau);
        std::vector<int> other;
        other.reserve(vertices.size() - side.size());
        std::set_difference(vertices.begin(), vertices.end(), side.begin(), side.end(),
                            std::back_inserter(other));
        return {std::move(side), std::move(other)};
    }

    // DFS side of the cut: the sub-template is a tree, so skipping the cut
    // edge itself is enough to separate the two components.
    std::vector<int> reachable(const std::vector<int>& vertices, int from, int blocked) const {
        std::vector<int> out{from};
        std::vector<int> stack{from};
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int w : adj[static_cast<std::size_t>(v)]) {
                if (v == from && w == blocked) continue;
                if (!std::binary_search(vertices.begin(), vertices.end(), w)) continue;
                if (std::find(out.begin(), out.end(), w) != out.end()) continue;
                out.push_back(w);
                stack.push_back(w);
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    }
};

}  // namespace detail

// Recursively cuts the template into the strict binary plan that fixes the
// DP evaluation order. Deterministic: the cut edge is always (root,
// smallest-id in-template neighbor of root).
inline PartitionPlan partition(const TemplateTree& t) {
    detail::validate_tree(t);
    PartitionPlan plan;
    plan.k = t.k;
    plan.root = t.root;
    auto adj = t.adjacency();
    std::vector<int> all(static_cast<std::size_t>(t.k));
    for (int i = 0; i < t.k; ++i) all[static_cast<std::size_t>(i)] = i;
    detail::PlanBuilder{adj, plan}.build(std::move(all), t.root);
    return plan;
}

// ---------------------------------------------------------------------------
// Automorphisms
// ---------------------------------------------------------------------------

namespace detail {

// AHU canonical string of the subtree rooted at v, and the rooted
// automorphism count: the product over nodes of (multiplicity of each
// identical child class)!.
inline std::pair<std::string, std::uint64_t> ahu_rooted(
    const std::vector<std::vector<int>>& adj, int v, int parent) {
    std::vector<std::pair<std::string, std::uint64_t>> children;
    for (int w : adj[static_cast<std::size_t>(v)]) {
        if (w == parent) continue;
        children.push_back(ahu_rooted(adj, w, v));
    }
    std::sort(children.begin(), children.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::uint64_t aut = 1;
    std::string canon = "(";
    std::size_t i = 0;
    while (i < children.size()) {
        std::size_t j = i;
        while (j < children.size() && children[j].first == children[i].first) ++j;
        for (std::size_t run = 2; run <= j - i; ++run) aut *= run;  // multiplicity!
        for (std::size_t c = i; c < j; ++c) {
            canon += children[c].first;
            aut *= children[c].second;
        }
        i = j;
    }
    canon += ")";
    return {std::move(canon), aut};
}

// Tree center(s): peel leaves until 1 or 2 vertices remain.
inline std::vector<int> tree_centers(const std::vector<std::vector<int>>& adj) {
    const int k = static_cast<int>(adj.size());
    if (k == 1) return {0};
    std::vector<int> degree(static_cast<std::size_t>(k));
    std::vector<int> frontier;
    for (int v = 0; v < k; ++v) {
        degree[static_cast<std::size_t>(v)] = static_cast<int>(adj[static_cast<std::size_t>(v)].size());
        if (degree[static_cast<std::size_t>(v)] == 1) frontier.push_back(v);
    }
    int remaining = k;
    while (remaining > 2) {
        std::vector<int> next;
        remaining -= static_cast<int>(frontier.size());
        for (int v : frontier) {
            degree[static_cast<std::size_t>(v)] = 0;
            for (int w : adj[static_cast<std::size_t>(v)]) {
                if (--degree[static_cast<std::size_t>(w)] == 1) next.push_back(w);
            }
        }
        frontier = std::move(next);
    }
    std::sort(frontier.begin(), frontier.end());
    return frontier;
}

}  // namespace detail

// |Aut(T)| via AHU canonical forms anchored at the tree center. With two
// centers the halves across the center edge may additionally swap.
inline std::uint64_t automorphism_count(const TemplateTree& t) {
    detail::validate_tree(t);
    if (t.k == 1) return 1;
    auto adj = t.adjacency();
    auto centers = detail::tree_centers(adj);
    if (centers.size() == 1) {
        return detail::ahu_rooted(adj, centers[0], -1).second;
    }
    auto [canon_a, aut_a] = detail::ahu_rooted(adj, centers[0], centers[1]);
    auto [canon_b, aut_b] = detail::ahu_rooted(adj, centers[1], centers[0]);
    std::uint64_t aut = aut_a * aut_b;
    if (canon_a == canon_b) aut *= 2;
    return aut;
}

// Canonical string for whole-tree isomorphism tests (center-anchored AHU).
inline std::string canonical_form(const TemplateTree& t) {
    auto adj = t.adjacency();
    auto centers = detail::tree_centers(adj);
    if (centers.size() == 1) return detail::ahu_rooted(adj, centers[0], -1).first;
    auto a = detail::ahu_rooted(adj, centers[0], centers[1]).first;
    auto b = detail::ahu_rooted(adj, centers[1], centers[0]).first;
    if (b < a) std::swap(a, b);
    return "{" + a + b + "}";
}

}  // namespace treecount
