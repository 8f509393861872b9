// Undirected multigraphs with an incidence-matrix view, spanning trees,
// cycle bases, path-product thickening, and chord-fan cellulation. Parallel
// edges are legal throughout (a parallel pair forms a length-2 cycle);
// self-loops are not.
#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qdeform/gf2.hpp"

namespace qdeform {

class Graph {
public:
    Graph() = default;
    explicit Graph(std::size_t n_vertices) : n_vertices_(n_vertices) {}

    std::size_t n_vertices() const { return n_vertices_; }
    std::size_t n_edges() const { return edges_.size(); }

    Index add_edge(Index u, Index v) {
        if (u >= n_vertices_ || v >= n_vertices_) {
            throw std::invalid_argument("edge endpoint out of range");
        }
        if (u == v) throw std::invalid_argument("self-loops are not allowed");
        edges_.emplace_back(std::min(u, v), std::max(u, v));
        return static_cast<Index>(edges_.size() - 1);
    }

    Index add_vertex() {
        ++n_vertices_;
        return static_cast<Index>(n_vertices_ - 1);
    }

    const std::vector<std::pair<Index, Index>>& edges() const { return edges_; }

    const std::pair<Index, Index>& edge(std::size_t e) const { return edges_.at(e); }

    // Per-vertex list of (neighbor, edge index), in edge-list order.
    std::vector<std::vector<std::pair<Index, Index>>> adjacency() const {
        std::vector<std::vector<std::pair<Index, Index>>> adj(n_vertices_);
        for (std::size_t e = 0; e < edges_.size(); ++e) {
            auto [u, v] = edges_[e];
            adj[u].emplace_back(v, static_cast<Index>(e));
            adj[v].emplace_back(u, static_cast<Index>(e));
        }
        return adj;
    }

    bool operator==(const Graph& other) const {
        return n_vertices_ == other.n_vertices_ && edges_ == other.edges_;
    }

private:
    std::size_t n_vertices_ = 0;
    std::vector<std::pair<Index, Index>> edges_;
};

// Rows are edges, columns vertices; every row has weight exactly two.
inline SparseBitMatrix incidence_matrix(const Graph& g) {
    SparseBitMatrix m(g.n_edges(), g.n_vertices());
    for (std::size_t e = 0; e < g.n_edges(); ++e) {
        auto [u, v] = g.edge(e);
        m.set_row(e, {u, v});
    }
    return m;
}

// Component id per vertex; ids count up from 0 in order of the lowest vertex
// of each component.
inline std::vector<Index> connected_components(const Graph& g) {
    std::vector<Index> comp(g.n_vertices(), std::numeric_limits<Index>::max());
    auto adj = g.adjacency();
    Index next = 0;
    for (std::size_t s = 0; s < g.n_vertices(); ++s) {
        if (comp[s] != std::numeric_limits<Index>::max()) continue;
        comp[s] = next;
        std::deque<Index> queue{static_cast<Index>(s)};
        while (!queue.empty()) {
            Index v = queue.front();
            queue.pop_front();
            for (auto [w, e] : adj[v]) {
                (void)e;
                if (comp[w] == std::numeric_limits<Index>::max()) {
                    comp[w] = next;
                    queue.push_back(w);
                }
            }
        }
        ++next;
    }
    return comp;
}

inline bool is_connected(const Graph& g) {
    if (g.n_vertices() == 0) return true;
    auto comp = connected_components(g);
    return std::all_of(comp.begin(), comp.end(), [](Index c) { return c == 0; });
}

struct SpanningTree {
    Index root = 0;
    std::vector<long> parent;               // -1 at the root
    std::vector<long> parent_edge;          // edge index, -1 at the root
    std::vector<std::vector<Index>> children;  // BFS discovery order
    std::vector<Index> tree_edges;          // discovery order
    std::vector<bool> edge_in_tree;         // per host edge
    std::vector<Index> depth;
};

// BFS tree; children are ordered by first appearance in the edge list, which
// fixes every downstream labeling deterministically.
inline SpanningTree spanning_tree(const Graph& g, Index root) {
    if (root >= g.n_vertices()) throw std::invalid_argument("root out of range");
    SpanningTree t;
    t.root = root;
    std::size_t n = g.n_vertices();
    t.parent.assign(n, -1);
    t.parent_edge.assign(n, -1);
    t.children.assign(n, {});
    t.edge_in_tree.assign(g.n_edges(), false);
    t.depth.assign(n, 0);
    std::vector<bool> seen(n, false);
    auto adj = g.adjacency();
    std::deque<Index> queue{root};
    seen[root] = true;
    std::size_t reached = 1;
    while (!queue.empty()) {
        Index v = queue.front();
        queue.pop_front();
        for (auto [w, e] : adj[v]) {
            if (seen[w]) continue;
            seen[w] = true;
            ++reached;
            t.parent[w] = v;
            t.parent_edge[w] = e;
            t.children[v].push_back(w);
            t.tree_edges.push_back(e);
            t.edge_in_tree[e] = true;
            t.depth[w] = t.depth[v] + 1;
            queue.push_back(w);
        }
    }
    if (reached != n) {
        for (std::size_t v = 0; v < n; ++v) {
            if (!seen[v]) {
                throw std::invalid_argument("graph is disconnected: vertex " +
                                            std::to_string(v) +
                                            " is unreachable from the root");
            }
        }
    }
    return t;
}

inline void validate_tree(const Graph& g, const SpanningTree& t) {
    if (t.parent.size() != g.n_vertices() || t.parent_edge.size() != g.n_vertices() ||
        t.edge_in_tree.size() != g.n_edges() || t.root >= g.n_vertices()) {
        throw std::invalid_argument("spanning tree does not match the graph");
    }
    for (std::size_t v = 0; v < g.n_vertices(); ++v) {
        if (v == t.root) continue;
        long e = t.parent_edge[v];
        if (t.parent[v] < 0 || e < 0 || e >= static_cast<long>(g.n_edges())) {
            throw std::invalid_argument("spanning tree does not match the graph");
        }
        auto [a, b] = g.edge(static_cast<std::size_t>(e));
        Index p = static_cast<Index>(t.parent[v]);
        if (!((a == v && b == p) || (a == p && b == v))) {
            throw std::invalid_argument("spanning tree does not match the graph");
        }
    }
}

// Edge set of the unique tree path between two vertices.
inline std::vector<Index> tree_path(const SpanningTree& t, Index u, Index v) {
    std::vector<Index> path;
    Index a = u, b = v;
    while (t.depth[a] > t.depth[b]) {
        path.push_back(static_cast<Index>(t.parent_edge[a]));
        a = static_cast<Index>(t.parent[a]);
    }
    while (t.depth[b] > t.depth[a]) {
        path.push_back(static_cast<Index>(t.parent_edge[b]));
        b = static_cast<Index>(t.parent[b]);
    }
    while (a != b) {
        path.push_back(static_cast<Index>(t.parent_edge[a]));
        path.push_back(static_cast<Index>(t.parent_edge[b]));
        a = static_cast<Index>(t.parent[a]);
        b = static_cast<Index>(t.parent[b]);
    }
    std::sort(path.begin(), path.end());
    return path;
}

struct CycleBasis {
    SparseBitMatrix cycles;  // rows over the host's edge index space

    SparsityProfile profile() const { return cycles.profile(); }
};

// Every basis constructor funnels through here: the rows must annihilate the
// incidence matrix and span the whole cycle space (rank = m - n + p).
inline CycleBasis make_cycle_basis(const Graph& g, SparseBitMatrix rows) {
    if (rows.n_cols() != g.n_edges()) {
        throw std::invalid_argument("cycle rows must live over the edge space");
    }
    auto inc = incidence_matrix(g);
    if (!multiply(rows, inc).is_zero()) {
        throw std::logic_error("cycle basis rows do not annihilate the incidence matrix");
    }
    auto comp = connected_components(g);
    std::size_t p = comp.empty() ? 0 : (*std::max_element(comp.begin(), comp.end()) + 1);
    std::size_t expected = g.n_edges() - g.n_vertices() + p;
    if (rank(rows) != expected) {
        throw std::logic_error("cycle basis does not span the cycle space");
    }
    return CycleBasis{std::move(rows)};
}

// One cycle per non-tree edge: the edge plus the tree path between its ends.
inline CycleBasis fundamental_cycle_basis(const Graph& g, const SpanningTree& t) {
    validate_tree(g, t);
    std::vector<std::vector<Index>> rows;
    for (std::size_t e = 0; e < g.n_edges(); ++e) {
        if (t.edge_in_tree[e]) continue;
        auto [u, v] = g.edge(e);
        std::vector<Index> cycle = tree_path(t, u, v);
        cycle.push_back(static_cast<Index>(e));
        rows.push_back(std::move(cycle));
    }
    std::size_t n_rows = rows.size();
    auto m = SparseBitMatrix::from_rows(n_rows, g.n_edges(), std::move(rows));
    return make_cycle_basis(g, std::move(m));
}

// Product with a path of L vertices. Layer l keeps a full copy of the base
// graph; rung edges join the same vertex in consecutive layers.
struct ThickenedGraph {
    Graph graph;
    std::size_t layers = 1;
    std::size_t base_vertices = 0;
    std::size_t base_edges = 0;

    Index vertex_at(std::size_t layer, Index v) const {
        return static_cast<Index>(layer * base_vertices + v);
    }
    Index base_edge_copy(std::size_t layer, Index e) const {
        return static_cast<Index>(layer * base_edges + e);
    }
    Index rung_edge(std::size_t layer, Index v) const {
        return static_cast<Index>(layers * base_edges + layer * base_vertices + v);
    }
    std::vector<Index> layer_vertices(std::size_t layer) const {
        std::vector<Index> out;
        out.reserve(base_vertices);
        for (std::size_t v = 0; v < base_vertices; ++v) {
            out.push_back(vertex_at(layer, static_cast<Index>(v)));
        }
        return out;
    }
};

inline ThickenedGraph thicken(const Graph& g, std::size_t layers) {
    if (layers == 0) throw std::invalid_argument("thickening needs at least one layer");
    ThickenedGraph t;
    t.layers = layers;
    t.base_vertices = g.n_vertices();
    t.base_edges = g.n_edges();
    t.graph = Graph(g.n_vertices() * layers);
    for (std::size_t l = 0; l < layers; ++l) {
        for (const auto& [u, v] : g.edges()) {
            t.graph.add_edge(t.vertex_at(l, u), t.vertex_at(l, v));
        }
    }
    for (std::size_t l = 0; l + 1 < layers; ++l) {
        for (std::size_t v = 0; v < g.n_vertices(); ++v) {
            t.graph.add_edge(t.vertex_at(l, static_cast<Index>(v)),
                             t.vertex_at(l + 1, static_cast<Index>(v)));
        }
    }
    return t;
}

// Basis of the thickened graph: every length-4 cycle made of one base edge in
// two consecutive layers plus the two rungs joining them, and one copy of each
// base cycle embedded in its assigned layer (round-robin by default).
inline CycleBasis layered_cycle_basis(const ThickenedGraph& t, const CycleBasis& base,
                                      std::vector<std::size_t> layer_assignment = {}) {
    std::size_t n_base_cycles = base.cycles.n_rows();
    if (layer_assignment.empty()) {
        layer_assignment.resize(n_base_cycles);
        for (std::size_t i = 0; i < n_base_cycles; ++i) layer_assignment[i] = i % t.layers;
    }
    if (layer_assignment.size() != n_base_cycles) {
        throw std::invalid_argument("one layer per base cycle required");
    }
    for (std::size_t l : layer_assignment) {
        if (l >= t.layers) throw std::invalid_argument("layer index out of range");
    }
    std::vector<std::vector<Index>> rows;
    for (std::size_t l = 0; l + 1 < t.layers; ++l) {
        for (std::size_t e = 0; e < t.base_edges; ++e) {
            auto [u, v] = t.graph.edge(t.base_edge_copy(l, static_cast<Index>(e)));
            // Endpoints of the layer-l copy are layer-l vertices; derive the
            // base endpoints to pick the rungs.
            Index bu = static_cast<Index>(u - l * t.base_vertices);
            Index bv = static_cast<Index>(v - l * t.base_vertices);
            rows.push_back({t.base_edge_copy(l, static_cast<Index>(e)),
                            t.base_edge_copy(l + 1, static_cast<Index>(e)),
                            t.rung_edge(l, bu), t.rung_edge(l, bv)});
        }
    }
    for (std::size_t i = 0; i < n_base_cycles; ++i) {
        std::vector<Index> row;
        for (Index e : base.cycles.row(i)) {
            row.push_back(t.base_edge_copy(layer_assignment[i], e));
        }
        rows.push_back(std::move(row));
    }
    std::size_t n_rows = rows.size();
    auto m = SparseBitMatrix::from_rows(n_rows, t.graph.n_edges(), std::move(rows));
    return make_cycle_basis(t.graph, std::move(m));
}

inline std::pair<ThickenedGraph, CycleBasis> layered_cycle_basis(
    const Graph& g, const CycleBasis& base, std::size_t layers,
    std::vector<std::size_t> layer_assignment = {}) {
    auto t = thicken(g, layers);
    auto basis = layered_cycle_basis(t, base, std::move(layer_assignment));
    return {std::move(t), std::move(basis)};
}

namespace detail {

// Orders a simple cycle's edges into a closed vertex walk starting from its
// lowest vertex, stepping first toward the smaller neighbor (lower edge index
// on ties, which parallel edges can produce).
inline std::vector<std::pair<Index, Index>> cycle_walk(const Graph& g,
                                                       const std::vector<Index>& cycle_edges) {
    std::vector<std::pair<Index, std::vector<Index>>> incident;  // vertex -> edges
    auto find_vertex = [&](Index v) -> std::vector<Index>& {
        for (auto& [u, list] : incident) {
            if (u == v) return list;
        }
        incident.emplace_back(v, std::vector<Index>{});
        return incident.back().second;
    };
    for (Index e : cycle_edges) {
        auto [u, v] = g.edge(e);
        find_vertex(u).push_back(e);
        find_vertex(v).push_back(e);
    }
    Index start = incident.front().first;
    for (auto& [v, list] : incident) {
        if (list.size() != 2) {
            throw std::logic_error("cycle is not a simple closed walk");
        }
        start = std::min(start, v);
    }
    auto other_end = [&](Index e, Index v) {
        auto [u, w] = g.edge(e);
        return u == v ? w : u;
    };
    std::vector<std::pair<Index, Index>> walk;  // (vertex, departing edge)
    Index at = start;
    Index e0 = find_vertex(start)[0];
    Index e1 = find_vertex(start)[1];
    Index n0 = other_end(e0, start);
    Index n1 = other_end(e1, start);
    Index via = (n0 < n1 || (n0 == n1 && e0 < e1)) ? e0 : e1;
    for (std::size_t step = 0; step < cycle_edges.size(); ++step) {
        walk.emplace_back(at, via);
        auto [u, v] = g.edge(via);
        Index next = (u == at) ? v : u;
        auto& list = find_vertex(next);
        via = (list[0] == via) ? list[1] : list[0];
        at = next;
    }
    if (at != start) throw std::logic_error("cycle walk failed to close");
    return walk;
}

}  // namespace detail

struct CellulationResult {
    Graph graph;        // host graph plus appended chord edges
    CycleBasis basis;   // all cycles of length <= max_len
    std::size_t chords_added = 0;
    std::size_t cycles_replaced = 0;
};

// Replaces every basis cycle longer than max_len by short cycles on new chord
// edges. Each long cycle is split recursively at the halfway vertex, which
// keeps every vertex's degree increase within ceil(len/max_len) per cycle
// through it; a k-gon cut down to triangles still spends exactly k-3 chords
// for k-2 triangles.
inline CellulationResult cellulate(const Graph& g, const CycleBasis& basis,
                                   std::size_t max_len) {
    if (max_len < 3) throw std::invalid_argument("cellulation needs max_len >= 3");
    CellulationResult res;
    res.graph = g;
    std::vector<std::vector<Index>> rows;
    struct Piece {
        std::vector<Index> vertices;  // vertices[p] -- edges[p] -- vertices[p+1 mod len]
        std::vector<Index> edges;
    };
    for (std::size_t i = 0; i < basis.cycles.n_rows(); ++i) {
        const auto& cycle = basis.cycles.row(i);
        if (cycle.size() <= max_len) {
            rows.push_back(cycle);
            continue;
        }
        auto walk = detail::cycle_walk(g, cycle);
        ++res.cycles_replaced;
        Piece whole;
        for (auto [v, e] : walk) {
            whole.vertices.push_back(v);
            whole.edges.push_back(e);
        }
        std::vector<Piece> stack;
        stack.push_back(std::move(whole));
        while (!stack.empty()) {
            Piece p = std::move(stack.back());
            stack.pop_back();
            std::size_t len = p.edges.size();
            if (len <= max_len) {
                std::sort(p.edges.begin(), p.edges.end());
                rows.push_back(std::move(p.edges));
                continue;
            }
            std::size_t h = len / 2;
            Index chord = res.graph.add_edge(p.vertices[0], p.vertices[h]);
            ++res.chords_added;
            Piece a;
            a.vertices.assign(p.vertices.begin(), p.vertices.begin() + h + 1);
            a.edges.assign(p.edges.begin(), p.edges.begin() + h);
            a.edges.push_back(chord);
            Piece b;
            b.vertices.assign(p.vertices.begin() + h, p.vertices.end());
            b.vertices.push_back(p.vertices[0]);
            b.edges.assign(p.edges.begin() + h, p.edges.end());
            b.edges.push_back(chord);
            stack.push_back(std::move(b));
            stack.push_back(std::move(a));
        }
    }
    std::size_t n_rows = rows.size();
    auto m = SparseBitMatrix::from_rows(n_rows, res.graph.n_edges(), std::move(rows));
    res.basis = make_cycle_basis(res.graph, std::move(m));
    return res;
}

// Text format: header "n m", then m lines "u v" in edge order.
inline void write_graph(const Graph& g, std::ostream& os) {
    os << g.n_vertices() << ' ' << g.n_edges() << '\n';
    for (const auto& [u, v] : g.edges()) os << u << ' ' << v << '\n';
}

inline Graph read_graph(std::istream& is) {
    std::string line;
    std::size_t line_no = 0;
    auto next_line = [&](bool required) {
        while (std::getline(is, line)) {
            ++line_no;
            if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
        }
        if (required) throw ParseError(line_no + 1, "unexpected end of file");
        return false;
    };
    auto parse_fields = [&](std::size_t count) {
        std::istringstream ss(line);
        std::vector<long long> vals;
        long long v;
        while (ss >> v) vals.push_back(v);
        std::string rest;
        if (!ss.eof() && ss.fail()) {
            ss.clear();
            ss >> rest;
        }
        if (!rest.empty() || vals.size() != count) {
            throw ParseError(line_no, "expected " + std::to_string(count) + " integer fields");
        }
        for (long long x : vals) {
            if (x < 0) throw ParseError(line_no, "negative value");
        }
        return vals;
    };
    next_line(true);
    auto header = parse_fields(2);
    auto n = static_cast<std::size_t>(header[0]);
    auto m = static_cast<std::size_t>(header[1]);
    Graph g(n);
    for (std::size_t i = 0; i < m; ++i) {
        next_line(true);
        auto entry = parse_fields(2);
        if (entry[0] >= static_cast<long long>(n) || entry[1] >= static_cast<long long>(n)) {
            throw ParseError(line_no, "vertex index out of range");
        }
        if (entry[0] == entry[1]) throw ParseError(line_no, "self-loop");
        g.add_edge(static_cast<Index>(entry[0]), static_cast<Index>(entry[1]));
    }
    if (next_line(false)) throw ParseError(line_no, "trailing content after the last edge");
    return g;
}

// DOT export preserving edge order; isolated vertices are listed explicitly.
inline std::string to_dot(const Graph& g) {
    std::ostringstream os;
    os << "graph g {\n";
    std::vector<bool> touched(g.n_vertices(), false);
    for (const auto& [u, v] : g.edges()) touched[u] = touched[v] = true;
    for (std::size_t v = 0; v < g.n_vertices(); ++v) {
        if (!touched[v]) os << "  " << v << ";\n";
    }
    for (const auto& [u, v] : g.edges()) os << "  " << u << " -- " << v << ";\n";
    os << "}\n";
    return os.str();
}

}  // namespace qdeform
