#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace treecount {

using vertex_t = std::int32_t;

class parse_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Undirected simple graph stored twice: per-vertex sorted neighbor lists
// (the traversal form) and a CSC adjacency matrix (the kernel form). The
// matrix is symmetric 0/1, so CSC and CSR coincide; column j holds the
// sorted neighbors of vertex j.
struct Graph {
    vertex_t n = 0;
    std::int64_t m = 0;  // undirected edge count
    std::vector<std::vector<vertex_t>> adj;

    std::vector<std::int64_t> csc_col_ptr;  // length n+1
    std::vector<vertex_t> csc_rows;         // length 2m, sorted per column

    std::span<const vertex_t> neighbors(vertex_t v) const {
        return {adj[static_cast<std::size_t>(v)]};
    }
    vertex_t degree(vertex_t v) const {
        return static_cast<vertex_t>(adj[static_cast<std::size_t>(v)].size());
    }
    std::int64_t nnz() const { return 2 * m; }
};

// Fills the CSC form from the neighbor lists. Idempotent; neighbor lists
// must already be sorted and deduplicated.
inline void build_csc(Graph& g) {
    g.csc_col_ptr.assign(static_cast<std::size_t>(g.n) + 1, 0);
    std::int64_t total = 0;
    for (vertex_t v = 0; v < g.n; ++v) {
        g.csc_col_ptr[static_cast<std::size_t>(v)] = total;
        total += g.degree(v);
    }
    g.csc_col_ptr[static_cast<std::size_t>(g.n)] = total;
    g.csc_rows.resize(static_cast<std::size_t>(total));
    for (vertex_t v = 0; v < g.n; ++v) {
        std::copy(g.adj[static_cast<std::size_t>(v)].begin(),
                  g.adj[static_cast<std::size_t>(v)].end(),
                  g.csc_rows.begin() + g.csc_col_ptr[static_cast<std::size_t>(v)]);
    }
}

// Builds a graph from raw (possibly directed, duplicated, self-looped)
// edges: symmetrize by union, drop self-loops, dedup, sort. n_hint of -1
// means "max id + 1".
inline Graph from_edges(std::vector<std::pair<vertex_t, vertex_t>> edges,
                        vertex_t n_hint = -1) {
    vertex_t n = n_hint;
    if (n < 0) {
        vertex_t max_id = -1;
        for (auto [u, v] : edges) max_id = std::max({max_id, u, v});
        n = max_id + 1;
    }
    for (auto [u, v] : edges) {
        if (u < 0 || v < 0 || u >= n || v >= n)
            throw parse_error("vertex id out of range [0, " + std::to_string(n) + ")");
    }
    for (auto& [u, v] : edges) {
        if (u > v) std::swap(u, v);
    }
    std::erase_if(edges, [](const auto& e) { return e.first == e.second; });
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    Graph g;
    g.n = n;
    g.m = static_cast<std::int64_t>(edges.size());
    g.adj.assign(static_cast<std::size_t>(n), {});
    for (auto [u, v] : edges) {
        g.adj[static_cast<std::size_t>(u)].push_back(v);
        g.adj[static_cast<std::size_t>(v)].push_back(u);
    }
    for (auto& nb : g.adj) std::sort(nb.begin(), nb.end());
    build_csc(g);
    return g;
}

namespace detail {

// Header lines have the exact shape "# n m". Any other '#' line is a
// comment. Bare "u v" lines are always edges, never a header.
inline bool parse_header(const std::string& line, vertex_t& n, std::int64_t& m) {
    std::istringstream ss(line);
    char hash = 0;
    ss >> hash;
    if (hash != '#') return false;
    std::int64_t a = 0, b = 0;
    if (!(ss >> a >> b)) return false;
    std::string rest;
    if (ss >> rest) return false;
    if (a <= 0 || b < 0) return false;
    n = static_cast<vertex_t>(a);
    m = b;
    return true;
}

}  // namespace detail

inline Graph load_edge_list(std::istream& in, const std::string& name = "<stream>") {
    std::vector<std::pair<vertex_t, vertex_t>> edges;
    vertex_t declared_n = -1;
    std::string line;
    std::int64_t lineno = 0;
    bool saw_content = false;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        if (line[first] == '#') {
            vertex_t hn;
            std::int64_t hm;
            if (!saw_content && declared_n < 0 && detail::parse_header(line, hn, hm))
                declared_n = hn;
            continue;
        }
        saw_content = true;
        std::istringstream ss(line);
        std::int64_t u = 0, v = 0;
        if (!(ss >> u >> v)) {
            throw parse_error(name + ": parse error at line " + std::to_string(lineno));
        }
        std::string rest;
        if (ss >> rest)
            throw parse_error(name + ": parse error at line " + std::to_string(lineno) +
                              " (trailing token '" + rest + "')");
        if (u < 0 || v < 0)
            throw parse_error(name + ": negative vertex id at line " + std::to_string(lineno));
        if (declared_n >= 0 && (u >= declared_n || v >= declared_n))
            throw parse_error(name + ": vertex id " + std::to_string(std::max(u, v)) +
                              " outside declared n=" + std::to_string(declared_n) +
                              " at line " + std::to_string(lineno));
        edges.emplace_back(static_cast<vertex_t>(u), static_cast<vertex_t>(v));
    }
    if (edges.empty()) throw parse_error(name + ": empty graph");
    return from_edges(std::move(edges), declared_n);
}

inline Graph load_edge_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open graph file: " + path);
    return load_edge_list(in, path);
}

// Canonical form: "# n m" header, then sorted "u v" edges with u < v.
inline void save_edge_list(const Graph& g, std::ostream& out) {
    out << "# " << g.n << ' ' << g.m << '\n';
    for (vertex_t u = 0; u < g.n; ++u)
        for (vertex_t v : g.neighbors(u))
            if (u < v) out << u << ' ' << v << '\n';
}

inline void save_edge_list(const Graph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write graph file: " + path);
    save_edge_list(g, out);
}

struct DegreeStats {
    double avg = 0.0;
    vertex_t max = 0;
};

inline DegreeStats degree_stats(const Graph& g) {
    DegreeStats s;
    s.avg = g.n > 0 ? 2.0 * static_cast<double>(g.m) / static_cast<double>(g.n) : 0.0;
    for (vertex_t v = 0; v < g.n; ++v) s.max = std::max(s.max, g.degree(v));
    return s;
}

// Hook for an externally computed bandwidth-reducing permutation (e.g. RCM).
// perm maps old vertex id -> new vertex id and must be a bijection.
inline Graph apply_permutation(const Graph& g, std::span<const vertex_t> perm) {
    if (static_cast<vertex_t>(perm.size()) != g.n)
        throw std::invalid_argument("permutation size does not match vertex count");
    std::vector<char> seen(static_cast<std::size_t>(g.n), 0);
    for (vertex_t p : perm) {
        if (p < 0 || p >= g.n || seen[static_cast<std::size_t>(p)])
            throw std::invalid_argument("not a permutation");
        seen[static_cast<std::size_t>(p)] = 1;
    }
    std::vector<std::pair<vertex_t, vertex_t>> edges;
    edges.reserve(static_cast<std::size_t>(g.m));
    for (vertex_t u = 0; u < g.n; ++u)
        for (vertex_t v : g.neighbors(u))
            if (u < v) edges.emplace_back(perm[static_cast<std::size_t>(u)],
                                          perm[static_cast<std::size_t>(v)]);
    return from_edges(std::move(edges), g.n);
}

}  // namespace treecount
