#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qdeform/gf2.hpp"
#include "qdeform/graph.hpp"
#include "qdeform/skiptree.hpp"
#include "qdeform/stabilizer.hpp"
#include "qdeform/surgery.hpp"

namespace qdeform {

namespace detail {

// Subgraph on a sorted vertex subset, keeping the host id of every edge.
struct InducedSubgraph {
    Graph graph;
    std::vector<Index> host_edges;
};

inline InducedSubgraph induce(const Graph& g, const std::vector<Index>& verts) {
    InducedSubgraph out;
    out.graph = Graph(verts.size());
    for (std::size_t e = 0; e < g.n_edges(); ++e) {
        auto [u, v] = g.edge(e);
        auto iu = std::lower_bound(verts.begin(), verts.end(), u);
        auto iv = std::lower_bound(verts.begin(), verts.end(), v);
        if (iu == verts.end() || *iu != u) continue;
        if (iv == verts.end() || *iv != v) continue;
        out.graph.add_edge(static_cast<Index>(iu - verts.begin()),
                           static_cast<Index>(iv - verts.begin()));
        out.host_edges.push_back(static_cast<Index>(e));
    }
    return out;
}

}  // namespace detail

// A bridge between equal-size port subsets of two graphs: one edge per label,
// pairing the traversal labels of the induced subgraphs, plus the label
// structure embedded into host coordinates. Row i of each t matrix is the
// label-i path as host edges; column i of each p matrix marks the host vertex
// carrying label i.
struct AdapterPlan {
    std::vector<Index> left_ports, right_ports;
    std::vector<std::pair<Index, Index>> bridge;
    SparseBitMatrix t_left, t_right;
    SparseBitMatrix p_left, p_right;
};

inline AdapterPlan plan_adapter(const Graph& gl, std::vector<Index> left_ports,
                                const Graph& gr, std::vector<Index> right_ports) {
    auto prepare = [](std::vector<Index>& ports, const Graph& g, const char* side) {
        std::sort(ports.begin(), ports.end());
        ports.erase(std::unique(ports.begin(), ports.end()), ports.end());
        for (Index v : ports) {
            if (v >= g.n_vertices()) {
                throw std::invalid_argument(std::string(side) + " port vertex out of range");
            }
        }
    };
    prepare(left_ports, gl, "left");
    prepare(right_ports, gr, "right");
    if (left_ports.size() != right_ports.size()) {
        throw std::invalid_argument("port subsets differ in size");
    }
    if (left_ports.size() < 2) {
        throw std::invalid_argument("an adapter needs at least two ports per side");
    }

    auto left = detail::induce(gl, left_ports);
    auto right = detail::induce(gr, right_ports);
    if (!is_connected(left.graph)) {
        throw std::invalid_argument("left ports induce a disconnected subgraph");
    }
    if (!is_connected(right.graph)) {
        throw std::invalid_argument("right ports induce a disconnected subgraph");
    }

    auto sl = skiptree(left.graph);
    auto sr = skiptree(right.graph);

    auto embed_t = [](const SkipTreeResult& s, const detail::InducedSubgraph& ind,
                      std::size_t host_edges) {
        std::vector<std::vector<Index>> rows(s.T.n_rows());
        for (std::size_t r = 0; r < s.T.n_rows(); ++r) {
            for (Index c : s.T.row(r)) rows[r].push_back(ind.host_edges[c]);
            std::sort(rows[r].begin(), rows[r].end());
        }
        std::size_t n_rows = rows.size();
        return SparseBitMatrix::from_rows(n_rows, host_edges, std::move(rows));
    };
    auto embed_p = [](const SkipTreeResult& s, const std::vector<Index>& ports,
                      std::size_t host_verts) {
        std::vector<std::vector<Index>> rows(host_verts);
        for (std::size_t v = 0; v < ports.size(); ++v) rows[ports[v]] = s.P.row(v);
        std::size_t n_rows = rows.size();
        return SparseBitMatrix::from_rows(n_rows, s.P.n_cols(), std::move(rows));
    };

    AdapterPlan plan;
    plan.t_left = embed_t(sl, left, gl.n_edges());
    plan.t_right = embed_t(sr, right, gr.n_edges());
    plan.p_left = embed_p(sl, left_ports, gl.n_vertices());
    plan.p_right = embed_p(sr, right_ports, gr.n_vertices());
    for (std::size_t i = 0; i < left_ports.size(); ++i) {
        plan.bridge.emplace_back(left_ports[sl.vertex_of_label[i]],
                                 right_ports[sr.vertex_of_label[i]]);
    }
    plan.left_ports = std::move(left_ports);
    plan.right_ports = std::move(right_ports);
    return plan;
}

struct JoinedGraph {
    Graph graph;
    CycleBasis basis;
    std::size_t left_edges = 0;    // edge order: left block, bridge, right block
    std::size_t bridge_edges = 0;
};

// Glues the graphs with one edge per label. The basis keeps both old blocks
// and adds one ladder cycle per label: the label-i path on each side plus
// bridges i and i+1, which closes because consecutive labels sit one step
// apart on both sides.
inline JoinedGraph join(const Graph& gl, const CycleBasis& basis_l, const Graph& gr,
                        const CycleBasis& basis_r, const AdapterPlan& plan) {
    make_cycle_basis(gl, basis_l.cycles);  // rejects stale or foreign bases
    make_cycle_basis(gr, basis_r.cycles);
    std::size_t a = plan.bridge.size();
    if (plan.t_left.n_cols() != gl.n_edges() || plan.t_right.n_cols() != gr.n_edges() ||
        plan.p_left.n_rows() != gl.n_vertices() || plan.p_right.n_rows() != gr.n_vertices() ||
        plan.t_left.n_rows() != a || plan.t_right.n_rows() != a) {
        throw std::invalid_argument("plan and graphs disagree on dimensions");
    }

    std::size_t nl = gl.n_vertices();
    std::size_t ml = gl.n_edges();
    Graph j(nl + gr.n_vertices());
    for (auto [u, v] : gl.edges()) j.add_edge(u, v);
    for (auto [lv, rv] : plan.bridge) j.add_edge(lv, static_cast<Index>(nl) + rv);
    for (auto [u, v] : gr.edges()) {
        j.add_edge(static_cast<Index>(nl) + u, static_cast<Index>(nl) + v);
    }

    std::vector<std::vector<Index>> rows;
    for (std::size_t i = 0; i < basis_l.cycles.n_rows(); ++i) rows.push_back(basis_l.cycles.row(i));
    for (std::size_t i = 0; i < a; ++i) {
        std::vector<Index> row = plan.t_left.row(i);
        row.push_back(static_cast<Index>(ml + i));
        row.push_back(static_cast<Index>(ml + (i + 1) % a));
        for (Index c : plan.t_right.row(i)) row.push_back(static_cast<Index>(ml + a) + c);
        std::sort(row.begin(), row.end());
        row.erase(std::unique(row.begin(), row.end()), row.end());
        rows.push_back(std::move(row));
    }
    for (std::size_t i = 0; i < basis_r.cycles.n_rows(); ++i) {
        std::vector<Index> row;
        for (Index c : basis_r.cycles.row(i)) row.push_back(static_cast<Index>(ml + a) + c);
        rows.push_back(std::move(row));
    }
    std::size_t n_rows = rows.size();
    auto m = SparseBitMatrix::from_rows(n_rows, ml + a + gr.n_edges(), std::move(rows));
    auto basis = make_cycle_basis(j, std::move(m));
    return {std::move(j), std::move(basis), ml, a};
}

namespace detail {

// X parts of every check as one matrix; for an X/Z split this carries the
// same nullspace information as the X block alone.
inline SparseBitMatrix x_part_matrix(const StabilizerCode& c) {
    if (c.is_css()) return c.hx();
    std::vector<std::vector<Index>> rows(c.checks().n_rows());
    for (std::size_t r = 0; r < rows.size(); ++r) rows[r] = c.check_as_pauli(r).x_part;
    std::size_t n_rows = rows.size();
    return SparseBitMatrix::from_rows(n_rows, c.n_qubits(), std::move(rows));
}

}  // namespace detail

// Finds a subset of the support that carries a nontrivial Z operator no
// proper part of which commutes with every check. Small supports are scanned
// for the smallest, lexicographically first answer; larger ones descend
// through proper commuting splits, which is deterministic but not minimal.
inline std::vector<Index> find_irreducible_subsupport(const StabilizerCode& c,
                                                      std::vector<Index> support,
                                                      std::size_t scan_cap = 12) {
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end()), support.end());
    if (!is_nontrivial_logical(c, make_pauli({}, support))) {
        throw std::invalid_argument("support does not carry a nontrivial operator");
    }
    auto hx = detail::x_part_matrix(c);

    if (support.size() <= scan_cap) {
        std::size_t s = support.size();
        for (std::size_t size = 1; size <= s; ++size) {
            std::vector<std::size_t> pick(size);
            for (std::size_t i = 0; i < size; ++i) pick[i] = i;
            while (true) {
                std::vector<Index> subset(size);
                for (std::size_t i = 0; i < size; ++i) subset[i] = support[pick[i]];
                auto z = make_pauli({}, subset);
                if (c.commutes_with_checks(z) && is_nontrivial_logical(c, z) &&
                    nullspace_basis(restrict_columns(hx, subset)).n_rows() == 1) {
                    return subset;
                }
                std::size_t i = size;
                while (i > 0 && pick[i - 1] == s - size + i - 1) --i;
                if (i == 0) break;
                ++pick[i - 1];
                for (std::size_t k = i; k < size; ++k) pick[k] = pick[k - 1] + 1;
            }
        }
        throw std::logic_error("support scan found no irreducible subset");
    }

    while (true) {
        auto basis = nullspace_basis(restrict_columns(hx, support));
        if (basis.n_rows() == 1) return support;
        std::size_t s = support.size();
        std::optional<std::size_t> split;
        for (std::size_t r = 0; r < basis.n_rows(); ++r) {
            if (!basis.row(r).empty() && basis.row(r).size() < s) {
                split = r;
                break;
            }
        }
        if (!split) throw std::logic_error("degenerate nullspace has no proper split");
        std::vector<Index> half;
        for (Index local : basis.row(*split)) half.push_back(support[local]);
        std::vector<Index> rest;
        std::set_difference(support.begin(), support.end(), half.begin(), half.end(),
                            std::back_inserter(rest));
        bool half_ok = is_nontrivial_logical(c, make_pauli({}, half));
        bool rest_ok = is_nontrivial_logical(c, make_pauli({}, rest));
        if (half_ok && rest_ok) {
            support = half.size() <= rest.size() ? std::move(half) : std::move(rest);
        } else if (half_ok) {
            support = std::move(half);
        } else if (rest_ok) {
            support = std::move(rest);
        } else {
            throw std::logic_error("a nontrivial operator split into two trivial halves");
        }
    }
}

// One leg of a joint measurement: a Z support on the host code and the
// auxiliary graph prepared to measure it alone.
struct MeasurementLeg {
    std::vector<Index> support;
    Graph aux;
    PortMap port;
    CycleBasis basis;
};

struct PortConnection {
    std::vector<Index> sub_ports;
    std::size_t edges_added = 0;
};

// Promotes matched pairs to direct edges so the ports of the sub-support
// induce a connected subgraph. Every new edge carries a companion basis cycle
// made of the edge and its former path, so cycle sparsity follows matching
// sparsity.
inline PortConnection connect_leg_ports(const StabilizerCode& host, MeasurementLeg& leg,
                                        const std::vector<Index>& sub_support) {
    std::vector<Index> sub_ports;
    for (Index q : sub_support) {
        const auto& s = leg.port.sets.at(q);
        sub_ports.insert(sub_ports.end(), s.begin(), s.end());
    }
    std::sort(sub_ports.begin(), sub_ports.end());
    sub_ports.erase(std::unique(sub_ports.begin(), sub_ports.end()), sub_ports.end());
    if (sub_ports.empty()) {
        throw std::invalid_argument("sub-support has no ports");
    }

    std::set<std::pair<Index, Index>> present(leg.aux.edges().begin(), leg.aux.edges().end());
    std::vector<std::vector<Index>> rows;
    for (std::size_t i = 0; i < leg.basis.cycles.n_rows(); ++i) {
        rows.push_back(leg.basis.cycles.row(i));
    }

    std::size_t added = 0;
    std::vector<std::uint8_t> parity(leg.aux.n_vertices(), 0);
    for (std::size_t r = 0; r < host.checks().n_rows(); ++r) {
        for (Index q : host.check_as_pauli(r).x_part) {
            if (!std::binary_search(sub_support.begin(), sub_support.end(), q)) continue;
            for (Index v : leg.port.sets[q]) parity[v] ^= 1;
        }
        std::vector<Index> touched;
        for (std::size_t v = 0; v < parity.size(); ++v) {
            if (parity[v]) touched.push_back(static_cast<Index>(v));
            parity[v] = 0;
        }
        if (touched.size() % 2 != 0) {
            throw std::logic_error("sub-support overlap has odd port parity");
        }
        if (touched.empty()) continue;
        auto matching = match_ports_detailed(leg.aux, std::move(touched));
        for (auto [x, y] : matching.pairs) {
            auto key = std::minmax(x, y);
            if (present.count({key.first, key.second})) continue;
            auto adj = leg.aux.adjacency();
            auto tree = detail::bfs_from(leg.aux, x, adj);
            std::vector<std::uint8_t> mask(leg.aux.n_edges(), 0);
            detail::xor_path(mask, tree, x, y);
            std::vector<Index> row;
            for (std::size_t e = 0; e < mask.size(); ++e) {
                if (mask[e]) row.push_back(static_cast<Index>(e));
            }
            row.push_back(leg.aux.add_edge(x, y));
            present.insert({key.first, key.second});
            rows.push_back(std::move(row));
            ++added;
        }
    }

    std::size_t n_rows = rows.size();
    auto m = SparseBitMatrix::from_rows(n_rows, leg.aux.n_edges(), std::move(rows));
    leg.basis = make_cycle_basis(leg.aux, std::move(m));
    if (!is_connected(detail::induce(leg.aux, sub_ports).graph)) {
        throw std::logic_error("augmented ports still induce a disconnected subgraph");
    }
    return {std::move(sub_ports), added};
}

struct JointOptions {
    std::size_t max_overlap = 4;  // legs allowed to share one qubit
    std::size_t scan_cap = 12;    // exhaustive sub-support search limit
};

struct JointMeasurement {
    DeformedCode code;
    std::vector<std::vector<Index>> sub_supports;
    std::vector<std::vector<Index>> sub_ports;
    std::vector<AdapterPlan> adapters;
    std::vector<std::size_t> vertex_offsets;  // leg blocks in the joined graph
};

// Measures the product of the leg operators: each leg keeps its own graph,
// consecutive legs are bridged through adapters on connected port subsets,
// and the union port map leaves exactly the symmetric difference of the
// supports with odd parity.
inline JointMeasurement joint_measurement(const StabilizerCode& host,
                                          std::vector<MeasurementLeg> legs,
                                          const JointOptions& opts = {}) {
    if (legs.empty()) throw std::invalid_argument("no measurement legs");
    for (auto& leg : legs) {
        std::sort(leg.support.begin(), leg.support.end());
        leg.support.erase(std::unique(leg.support.begin(), leg.support.end()),
                          leg.support.end());
        validate_port_map(leg.port);
        if (leg.port.n_qubits != host.n_qubits()) {
            throw std::invalid_argument("leg port map and host disagree on the qubit count");
        }
        if (leg.port.n_vertices != leg.aux.n_vertices()) {
            throw std::invalid_argument("leg port map and graph disagree on the vertex count");
        }
        if (leg.port.measured_support() != leg.support) {
            throw std::invalid_argument("leg port parity disagrees with its support");
        }
        make_cycle_basis(leg.aux, leg.basis.cycles);
        auto z = make_pauli({}, leg.support);
        if (!host.commutes_with_checks(z)) {
            throw std::invalid_argument("a leg operator anticommutes with a check");
        }
        if (!is_nontrivial_logical(host, z)) {
            throw std::invalid_argument("a leg operator is not a nontrivial logical");
        }
    }
    std::vector<std::size_t> hit(host.n_qubits(), 0);
    for (const auto& leg : legs) {
        for (Index q : leg.support) ++hit[q];
    }
    for (std::size_t q = 0; q < hit.size(); ++q) {
        if (hit[q] > opts.max_overlap) {
            throw std::invalid_argument("qubit " + std::to_string(q) + " lies on " +
                                        std::to_string(hit[q]) + " legs, above the bound " +
                                        std::to_string(opts.max_overlap));
        }
    }

    if (legs.size() == 1) {
        auto dc = assemble_deformed(host, legs[0].aux, legs[0].port, legs[0].basis);
        return {std::move(dc), {legs[0].support}, {}, {}, {0}};
    }

    std::size_t t = legs.size();
    std::vector<std::vector<Index>> subs(t), ports(t);
    for (std::size_t i = 0; i < t; ++i) {
        subs[i] = find_irreducible_subsupport(host, legs[i].support, opts.scan_cap);
        ports[i] = connect_leg_ports(host, legs[i], subs[i]).sub_ports;
    }

    // Prefix of a breadth-first walk over the induced port subgraph; every
    // prefix stays connected.
    auto star = [&](std::size_t i, std::size_t size) {
        auto ind = detail::induce(legs[i].aux, ports[i]);
        auto adj = ind.graph.adjacency();
        std::vector<Index> order{0};
        std::vector<std::uint8_t> seen(ind.graph.n_vertices(), 0);
        seen[0] = 1;
        for (std::size_t head = 0; head < order.size() && order.size() < size; ++head) {
            for (auto [w, e] : adj[order[head]]) {
                if (!seen[w]) {
                    seen[w] = 1;
                    order.push_back(w);
                    if (order.size() == size) break;
                }
            }
        }
        std::vector<Index> out;
        for (Index local : order) out.push_back(ports[i][local]);
        std::sort(out.begin(), out.end());
        return out;
    };

    Graph acc = legs[0].aux;
    CycleBasis acc_basis = legs[0].basis;
    std::vector<std::size_t> offsets{0};
    std::vector<AdapterPlan> plans;
    for (std::size_t i = 1; i < t; ++i) {
        std::size_t a = std::min(ports[i - 1].size(), ports[i].size());
        if (a < 2) {
            throw std::invalid_argument("adjacent legs need at least two ports each");
        }
        auto left_star = star(i - 1, a);
        for (auto& v : left_star) v += static_cast<Index>(offsets[i - 1]);
        auto plan = plan_adapter(acc, std::move(left_star), legs[i].aux, star(i, a));
        std::size_t off = acc.n_vertices();
        auto joined = join(acc, acc_basis, legs[i].aux, legs[i].basis, plan);
        acc = std::move(joined.graph);
        acc_basis = std::move(joined.basis);
        offsets.push_back(off);
        plans.push_back(std::move(plan));
    }

    PortMap pm;
    pm.n_qubits = host.n_qubits();
    pm.n_vertices = acc.n_vertices();
    pm.sets.resize(pm.n_qubits);
    for (std::size_t i = 0; i < t; ++i) {
        for (std::size_t q = 0; q < pm.n_qubits; ++q) {
            for (Index v : legs[i].port.sets[q]) {
                pm.sets[q].push_back(v + static_cast<Index>(offsets[i]));
            }
        }
    }

    auto dc = assemble_deformed(host, acc, pm, acc_basis);
    return {std::move(dc), std::move(subs), std::move(ports), std::move(plans),
            std::move(offsets)};
}

// Separate code blocks glued by a disjoint union before the joint
// measurement; each block brings its own graph against its own qubit count.
struct JointBlock {
    StabilizerCode code;
    std::vector<Index> support;
    Graph aux;
    PortMap port;
    CycleBasis basis;
};

inline JointMeasurement joint_measurement(const std::vector<JointBlock>& blocks,
                                          const JointOptions& opts = {}) {
    if (blocks.empty()) throw std::invalid_argument("no measurement blocks");
    for (const auto& b : blocks) {
        if (b.port.n_qubits != b.code.n_qubits()) {
            throw std::invalid_argument("block port map and code disagree on the qubit count");
        }
    }
    StabilizerCode host = blocks[0].code;
    std::vector<std::size_t> qubit_offsets{0};
    for (std::size_t i = 1; i < blocks.size(); ++i) {
        qubit_offsets.push_back(host.n_qubits());
        host = direct_sum(host, blocks[i].code);
    }
    std::vector<MeasurementLeg> legs;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        MeasurementLeg leg;
        for (Index q : blocks[i].support) {
            leg.support.push_back(q + static_cast<Index>(qubit_offsets[i]));
        }
        leg.aux = blocks[i].aux;
        leg.basis = blocks[i].basis;
        leg.port.n_qubits = host.n_qubits();
        leg.port.n_vertices = blocks[i].port.n_vertices;
        leg.port.sets.resize(host.n_qubits());
        for (std::size_t q = 0; q < blocks[i].port.sets.size(); ++q) {
            leg.port.sets[q + qubit_offsets[i]] = blocks[i].port.sets[q];
        }
        legs.push_back(std::move(leg));
    }
    return joint_measurement(host, std::move(legs), opts);
}

// Swaps the Pauli type of every check, exchanging the roles of the two bases.
inline StabilizerCode dual_code(const StabilizerCode& c) {
    if (c.is_css()) return css_code(c.hz(), c.hx());
    std::size_t n = c.n_qubits();
    std::vector<std::vector<Index>> rows(c.checks().n_rows());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (Index col : c.checks().row(r)) {
            rows[r].push_back(col < n ? col + static_cast<Index>(n)
                                      : col - static_cast<Index>(n));
        }
        std::sort(rows[r].begin(), rows[r].end());
    }
    std::size_t n_rows = rows.size();
    return StabilizerCode::from_checks(
        n, SparseBitMatrix::from_rows(n_rows, 2 * n, std::move(rows)));
}

enum class PairingMode { single, dual_zx };

// What to measure across the two blocks. Single mode joins one Z pair; dual
// mode also joins an X pair and needs the complementary left logicals as
// witnesses for the compression scan.
struct ExpansionlessRequest {
    PairingMode pairing = PairingMode::single;
    std::vector<Index> left_z, right_z;
    std::vector<Index> left_x, right_x;
    PauliOperator left_x_partner, left_z_partner;
};

struct ExpansionlessOptions {
    std::size_t distance_budget = std::size_t{1} << 26;
    std::size_t cellulate_len = 4;
    std::size_t scan_guard = 22;  // generator count limit for the compression scan
};

struct ExpansionlessJoint {
    StabilizerCode combined;
    DeformedCode z_stage;
    std::optional<DeformedCode> x_stage;  // dual mode second surgery
    StabilizerCode final_code;
    std::size_t claimed_distance = 0;
    bool swapped = false;  // blocks exchanged to put the heavier support left
};

namespace detail {

// Consecutive pairing of the ports each check touches, then a chain joining
// leftover components.
inline Graph pairing_graph(const StabilizerCode& c, const PortMap& pm) {
    Graph g(pm.n_vertices);
    std::vector<std::uint8_t> parity(pm.n_vertices, 0);
    for (std::size_t r = 0; r < c.checks().n_rows(); ++r) {
        for (Index q : c.check_as_pauli(r).x_part) {
            for (Index v : pm.sets[q]) parity[v] ^= 1;
        }
        std::vector<Index> touched;
        for (std::size_t v = 0; v < parity.size(); ++v) {
            if (parity[v]) touched.push_back(static_cast<Index>(v));
            parity[v] = 0;
        }
        if (touched.size() % 2 != 0) {
            throw std::logic_error("a check has odd port parity");
        }
        for (std::size_t i = 0; i + 1 < touched.size(); i += 2) {
            g.add_edge(touched[i], touched[i + 1]);
        }
    }
    auto comp = connected_components(g);
    if (!comp.empty()) {
        Index n_comp = *std::max_element(comp.begin(), comp.end()) + 1;
        std::vector<Index> reps(n_comp, std::numeric_limits<Index>::max());
        for (std::size_t v = 0; v < comp.size(); ++v) {
            reps[comp[v]] = std::min(reps[comp[v]], static_cast<Index>(v));
        }
        for (Index k = 1; k < n_comp; ++k) g.add_edge(reps[k - 1], reps[k]);
    }
    return g;
}

// Singleton ports shared between the two blocks: the heavier support claims
// one vertex per qubit and the lighter one doubles up on a prefix.
inline PortMap shared_ports(std::size_t n_qubits, const std::vector<Index>& heavy,
                            const std::vector<Index>& light, std::size_t light_shift) {
    PortMap pm;
    pm.n_qubits = n_qubits;
    pm.n_vertices = heavy.size();
    pm.sets.resize(n_qubits);
    for (std::size_t i = 0; i < heavy.size(); ++i) {
        pm.sets[heavy[i]] = {static_cast<Index>(i)};
    }
    for (std::size_t j = 0; j < light.size(); ++j) {
        pm.sets[light[j] + light_shift] = {static_cast<Index>(j)};
    }
    return pm;
}

inline DeformedCode expansionless_stage(const StabilizerCode& code, const PortMap& pm,
                                        std::size_t cellulate_len) {
    auto g = pairing_graph(code, pm);
    CellulationResult cell = [&] {
        if (g.n_edges() == 0) {
            std::size_t n_rows = 0;
            auto empty = make_cycle_basis(g, SparseBitMatrix(n_rows, 0));
            return CellulationResult{g, std::move(empty), 0, 0};
        }
        auto basis = fundamental_cycle_basis(g, spanning_tree(g, 0));
        return cellulate(g, basis, cellulate_len);
    }();
    return assemble_deformed(code, cell.graph, pm, cell.basis);
}

}  // namespace detail

// Joins one logical from each of two separate blocks without any expansion
// work on the auxiliary graph: the shared ports let the heavier side screen
// the lighter one, so the merged distance never falls below the smaller
// block distance.
inline ExpansionlessJoint expansionless_joint(const StabilizerCode& left,
                                              const StabilizerCode& right,
                                              ExpansionlessRequest req,
                                              const ExpansionlessOptions& opts = {}) {
    auto tidy = [](std::vector<Index>& s, const StabilizerCode& c, const char* what) {
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
        for (Index q : s) {
            if (q >= c.n_qubits()) {
                throw std::invalid_argument(std::string(what) + " leaves the qubit range");
            }
        }
    };
    auto require_logical = [](const StabilizerCode& c, const PauliOperator& p,
                              const char* what) {
        if (!c.commutes_with_checks(p)) {
            throw std::invalid_argument(std::string(what) + " anticommutes with a check");
        }
        if (!is_nontrivial_logical(c, p)) {
            throw std::invalid_argument(std::string(what) + " is not a nontrivial logical");
        }
    };
    tidy(req.left_z, left, "the left Z support");
    tidy(req.right_z, right, "the right Z support");
    require_logical(left, make_pauli({}, req.left_z), "the left Z operator");
    require_logical(right, make_pauli({}, req.right_z), "the right Z operator");

    auto mode = DistanceMode::exhaustive(opts.distance_budget);
    std::size_t dl = *distance(left, mode).distance;
    std::size_t dr = *distance(right, mode).distance;

    if (req.pairing == PairingMode::single) {
        const StabilizerCode* heavy = &left;
        const StabilizerCode* light = &right;
        std::vector<Index>* heavy_z = &req.left_z;
        std::vector<Index>* light_z = &req.right_z;
        std::size_t d_heavy = dl, d_light = dr;
        bool swapped = req.left_z.size() < req.right_z.size() ||
                       (req.left_z.size() == req.right_z.size() &&
                        req.left_z.size() != dl && req.right_z.size() == dr);
        if (swapped) {
            std::swap(heavy, light);
            std::swap(heavy_z, light_z);
            std::swap(d_heavy, d_light);
        }
        if (heavy_z->size() != d_heavy) {
            throw std::invalid_argument(
                "the heavier measured operator is not minimum weight in its block");
        }
        auto combined = direct_sum(*heavy, *light);
        auto pm = detail::shared_ports(combined.n_qubits(), *heavy_z, *light_z,
                                       heavy->n_qubits());
        auto stage = detail::expansionless_stage(combined, pm, opts.cellulate_len);
        StabilizerCode fin = stage.assembled;
        return {std::move(combined), std::move(stage), std::nullopt, std::move(fin),
                std::min(dl, dr), swapped};
    }

    tidy(req.left_x, left, "the left X support");
    tidy(req.right_x, right, "the right X support");
    require_logical(left, make_pauli(req.left_x, {}), "the left X operator");
    require_logical(right, make_pauli(req.right_x, {}), "the right X operator");
    if (detail::intersection_size(req.left_z, req.left_x) != 0) {
        throw std::invalid_argument("the measured left pair must not overlap");
    }
    if (detail::intersection_size(req.right_z, req.right_x) != 0) {
        throw std::invalid_argument("the measured right pair must not overlap");
    }
    if (logical_qubit_count(left) != 2) {
        throw std::invalid_argument("the left block must encode exactly two logical qubits");
    }
    if (req.left_z.size() != dl || req.left_x.size() != dl) {
        throw std::invalid_argument("the measured left pair must have minimum weight");
    }
    if (dl < std::max(req.right_z.size(), req.right_x.size())) {
        throw std::invalid_argument("the left distance must cover the right supports");
    }
    require_logical(left, req.left_x_partner, "the X partner");
    require_logical(left, req.left_z_partner, "the Z partner");
    auto zl = make_pauli({}, req.left_z);
    auto xl = make_pauli(req.left_x, {});
    if (commutes(req.left_x_partner, zl) || !commutes(req.left_x_partner, xl)) {
        throw std::invalid_argument("the X partner must anticommute with the measured Z only");
    }
    if (commutes(req.left_z_partner, xl) || !commutes(req.left_z_partner, zl)) {
        throw std::invalid_argument("the Z partner must anticommute with the measured X only");
    }

    // The measured pair times anything generated by the checks and the two
    // partners must stay at least twice the block distance wide; otherwise
    // the merged code could host a short undetected operator.
    std::size_t n_gens = left.checks().n_rows() + 2;
    if (n_gens > opts.scan_guard || n_gens >= 63) {
        throw BudgetExceeded(n_gens, opts.scan_guard);
    }
    {
        std::size_t nl = left.n_qubits();
        std::size_t n_words = (nl + 63) / 64;
        auto to_words = [&](const PauliOperator& p) {
            std::vector<std::uint64_t> w(2 * n_words, 0);
            for (Index q : p.x_part) w[q / 64] |= std::uint64_t{1} << (q % 64);
            for (Index q : p.z_part) {
                w[n_words + q / 64] |= std::uint64_t{1} << (q % 64);
            }
            return w;
        };
        std::vector<std::vector<std::uint64_t>> gens;
        for (std::size_t r = 0; r < left.checks().n_rows(); ++r) {
            gens.push_back(to_words(left.check_as_pauli(r)));
        }
        gens.push_back(to_words(req.left_x_partner));
        gens.push_back(to_words(req.left_z_partner));
        auto cur = to_words(multiply(zl, xl));
        auto count = [&] {
            std::size_t w = 0;
            for (std::size_t i = 0; i < n_words; ++i) {
                w += static_cast<std::size_t>(std::popcount(cur[i] | cur[n_words + i]));
            }
            return w;
        };
        std::size_t best = count();
        for (std::uint64_t k = 1; k < (std::uint64_t{1} << n_gens); ++k) {
            const auto& flip = gens[static_cast<std::size_t>(std::countr_zero(k))];
            for (std::size_t i = 0; i < cur.size(); ++i) cur[i] ^= flip[i];
            best = std::min(best, count());
        }
        if (best < 2 * dl) {
            throw std::invalid_argument(
                "the combined left pair compresses below twice the block distance");
        }
    }

    auto combined = direct_sum(left, right);
    std::size_t nl = left.n_qubits();
    auto pz = detail::shared_ports(combined.n_qubits(), req.left_z, req.right_z, nl);
    auto z_stage = detail::expansionless_stage(combined, pz, opts.cellulate_len);

    auto dual1 = dual_code(z_stage.assembled);
    auto px = detail::shared_ports(dual1.n_qubits(), req.left_x, req.right_x, nl);
    auto x_dual = detail::expansionless_stage(dual1, px, opts.cellulate_len);
    StabilizerCode fin = dual_code(x_dual.assembled);
    DeformedCode x_stage{z_stage.assembled, x_dual.aux,      x_dual.port, x_dual.basis,
                         x_dual.matchings,  fin,             x_dual.blocks};
    return {std::move(combined), std::move(z_stage), std::move(x_stage), std::move(fin),
            dr, false};
}

}  // namespace qdeform
