// Sparse change of basis for graph incidence matrices: finds T and a
// permutation P with T*G*P equal to the cyclic or full-rank repetition check
// matrix. T rows are short spanning-tree paths between consecutively labeled
// vertices, so T stays (3,2)-sparse no matter how large the graph is.
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qdeform/gf2.hpp"
#include "qdeform/graph.hpp"

namespace qdeform {

enum class SkipTreeVariant { cyclic, full_rank };

enum class NodeKind : std::uint8_t { first, last };

struct SkipTreeResult {
    SparseBitMatrix T;                  // n x m (cyclic) or (n-1) x m (full rank)
    SparseBitMatrix P;                  // n x n permutation, row v has a 1 at label(v)
    std::vector<Index> label_of_vertex;
    std::vector<Index> vertex_of_label;
    std::vector<NodeKind> kind;         // labeled at entry (first) or at exit (last)
    SpanningTree tree;
};

namespace detail {

// Shortest tree path between two vertices, expecting it to be short; falls
// back to the generic walk if the ancestor window misses.
inline std::vector<Index> short_tree_path(const SpanningTree& t, Index a, Index b) {
    constexpr int kWindow = 4;
    long av[kWindow + 1];
    long ae[kWindow + 1];
    long bv[kWindow + 1];
    long be[kWindow + 1];
    int an = 0, bn = 0;
    long v = a;
    for (int s = 0; s <= kWindow && v >= 0; ++s) {
        av[an] = v;
        ae[an] = (v >= 0) ? t.parent_edge[static_cast<std::size_t>(v)] : -1;
        ++an;
        v = t.parent[static_cast<std::size_t>(v)];
    }
    v = b;
    for (int s = 0; s <= kWindow && v >= 0; ++s) {
        bv[bn] = v;
        be[bn] = (v >= 0) ? t.parent_edge[static_cast<std::size_t>(v)] : -1;
        ++bn;
        v = t.parent[static_cast<std::size_t>(v)];
    }
    int best_i = -1, best_j = -1;
    for (int i = 0; i < an; ++i) {
        for (int j = 0; j < bn; ++j) {
            if (av[i] == bv[j]) {
                if (best_i < 0 || i + j < best_i + best_j) {
                    best_i = i;
                    best_j = j;
                }
            }
        }
    }
    if (best_i < 0) return tree_path(t, a, b);
    std::vector<Index> path;
    for (int i = 0; i < best_i; ++i) path.push_back(static_cast<Index>(ae[i]));
    for (int j = 0; j < best_j; ++j) path.push_back(static_cast<Index>(be[j]));
    std::sort(path.begin(), path.end());
    return path;
}

struct LabelOrder {
    std::vector<Index> label_of_vertex;
    std::vector<Index> vertex_of_label;
    std::vector<NodeKind> kind;
};

// Iterative form of the mutually recursive labeling. First-kind frames label
// on entry, last-kind on exit. In the full-rank variant a first-kind frame
// with skip unset forwards first-kind (skip unset) to its youngest child;
// last-kind frames always spawn first-kind children with skip set.
inline LabelOrder run_labeling(const SpanningTree& tree, std::size_t n, bool full_rank) {
    LabelOrder out;
    out.label_of_vertex.assign(n, 0);
    out.vertex_of_label.assign(n, 0);
    out.kind.assign(n, NodeKind::first);
    Index next = 0;
    auto assign = [&](Index v) {
        out.label_of_vertex[v] = next;
        out.vertex_of_label[next] = v;
        ++next;
    };
    struct Frame {
        Index v;
        bool first;
        bool skip;
        std::uint32_t child;
    };
    std::vector<Frame> stack;
    stack.push_back({tree.root, true, false, 0});
    while (!stack.empty()) {
        Frame& f = stack.back();
        const auto& kids = tree.children[f.v];
        if (f.first && f.child == 0) {
            assign(f.v);
            out.kind[f.v] = NodeKind::first;
        }
        if (f.child < kids.size()) {
            std::uint32_t idx = f.child++;
            Index c = kids[idx];
            bool child_first;
            bool child_skip = false;
            if (f.first) {
                bool youngest = (idx + 1 == kids.size());
                child_first = full_rank && youngest && !f.skip;
            } else {
                child_first = true;
                child_skip = true;
            }
            stack.push_back({c, child_first, child_skip, 0});
        } else {
            if (!f.first) {
                assign(f.v);
                out.kind[f.v] = NodeKind::last;
            }
            stack.pop_back();
        }
    }
    return out;
}

}  // namespace detail

inline SkipTreeResult skiptree_impl(const Graph& g, SkipTreeVariant variant) {
    std::size_t n = g.n_vertices();
    if (n < 2 || g.n_edges() == 0) {
        throw std::invalid_argument("need a connected graph with at least two vertices");
    }
    SkipTreeResult res;
    res.tree = spanning_tree(g, 0);
    bool full_rank = variant == SkipTreeVariant::full_rank;
    auto order = detail::run_labeling(res.tree, n, full_rank);
    res.label_of_vertex = std::move(order.label_of_vertex);
    res.vertex_of_label = std::move(order.vertex_of_label);
    res.kind = std::move(order.kind);

    std::size_t n_paths = full_rank ? n - 1 : n;
    std::vector<std::vector<Index>> rows;
    rows.reserve(n_paths);
    for (std::size_t l = 0; l < n_paths; ++l) {
        Index a = res.vertex_of_label[l];
        Index b = res.vertex_of_label[(l + 1) % n];
        rows.push_back(detail::short_tree_path(res.tree, a, b));
    }
    res.T = SparseBitMatrix::from_rows(n_paths, g.n_edges(), std::move(rows));
    std::vector<std::vector<Index>> p_rows(n);
    for (std::size_t v = 0; v < n; ++v) p_rows[v] = {res.label_of_vertex[v]};
    res.P = SparseBitMatrix::from_rows(n, n, std::move(p_rows));
    return res;
}

inline SkipTreeResult skiptree(const Graph& g) {
    return skiptree_impl(g, SkipTreeVariant::cyclic);
}

inline SkipTreeResult skiptree_hr(const Graph& g) {
    return skiptree_impl(g, SkipTreeVariant::full_rank);
}

struct SkipTreeReport {
    bool verified = false;
    SparsityProfile t_profile;
    std::size_t max_path_len = 0;
    std::optional<std::pair<Index, Index>> first_mismatch;  // in T*G*P vs target
};

// Recomputes T*G*P from scratch and diffs it against the canonical target;
// trusts nothing about how the inputs were produced.
inline SkipTreeReport verify_skiptree(const Graph& g, const SparseBitMatrix& t,
                                      const SparseBitMatrix& p, SkipTreeVariant variant) {
    std::size_t n = g.n_vertices();
    bool full_rank = variant == SkipTreeVariant::full_rank;
    std::size_t want_rows = full_rank ? n - 1 : n;
    if (t.n_rows() != want_rows || t.n_cols() != g.n_edges() || p.n_rows() != n ||
        p.n_cols() != n) {
        throw std::invalid_argument("shapes do not match the graph and variant");
    }
    SkipTreeReport report;
    report.t_profile = t.profile();
    report.max_path_len = report.t_profile.max_row_weight;

    bool p_valid = true;
    std::vector<std::size_t> col_count(n, 0);
    for (std::size_t r = 0; r < n; ++r) {
        if (p.row(r).size() != 1) {
            p_valid = false;
            break;
        }
        ++col_count[p.row(r)[0]];
    }
    if (p_valid) {
        for (std::size_t c = 0; c < n; ++c) {
            if (col_count[c] != 1) p_valid = false;
        }
    }

    auto product = multiply(multiply(t, incidence_matrix(g)), p);
    auto target = canonical_matrix(
        full_rank ? CanonicalKind::full_rank_check : CanonicalKind::cyclic_check, n);
    for (std::size_t r = 0; r < product.n_rows(); ++r) {
        const auto& got = product.row(r);
        const auto& want = target.row(r);
        if (got == want) continue;
        std::vector<Index> diff;
        std::set_symmetric_difference(got.begin(), got.end(), want.begin(), want.end(),
                                      std::back_inserter(diff));
        report.first_mismatch = {static_cast<Index>(r), diff.front()};
        break;
    }
    report.verified = p_valid && !report.first_mismatch.has_value();
    return report;
}

inline SkipTreeReport verify_skiptree(const Graph& g, const SkipTreeResult& r,
                                      SkipTreeVariant variant) {
    return verify_skiptree(g, r.T, r.P, variant);
}

}  // namespace qdeform
