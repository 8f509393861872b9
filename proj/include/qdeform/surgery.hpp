#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <qdeform/expansion.hpp>
#include <qdeform/gf2.hpp>
#include <qdeform/graph.hpp>
#include <qdeform/stabilizer.hpp>

namespace qdeform {

// Set-valued port function: each qubit owns a sorted vertex set on the aux
// graph; the odd-size sets are exactly the measured support. The plain
// construction keeps the sets pairwise disjoint; a shared vertex is legal and
// makes its vertex check act on every owner at once.
struct PortMap {
    std::size_t n_qubits = 0;
    std::size_t n_vertices = 0;
    std::vector<std::vector<Index>> sets;  // indexed by qubit, each sorted

    // Qubits with odd-size sets, i.e. the support of the measured operator.
    std::vector<Index> measured_support() const {
        std::vector<Index> out;
        for (std::size_t q = 0; q < sets.size(); ++q) {
            if (sets[q].size() % 2 == 1) out.push_back(static_cast<Index>(q));
        }
        return out;
    }

    // Sorted union of all sets.
    std::vector<Index> image() const {
        std::vector<Index> out;
        for (const auto& s : sets) out.insert(out.end(), s.begin(), s.end());
        std::sort(out.begin(), out.end());
        return out;
    }

    // Owner qubits per vertex, sorted; disjoint maps have at most one each.
    std::vector<std::vector<Index>> owners() const {
        std::vector<std::vector<Index>> own(n_vertices);
        for (std::size_t q = 0; q < sets.size(); ++q) {
            for (Index v : sets[q]) own[v].push_back(static_cast<Index>(q));
        }
        return own;
    }
};

// Shape validation only: one sorted unique in-range set per qubit.
inline void validate_port_sets(const PortMap& pm) {
    if (pm.sets.size() != pm.n_qubits) {
        throw std::invalid_argument("port map needs one vertex set per qubit");
    }
    for (std::size_t q = 0; q < pm.sets.size(); ++q) {
        const auto& s = pm.sets[q];
        if (!std::is_sorted(s.begin(), s.end()) ||
            std::adjacent_find(s.begin(), s.end()) != s.end()) {
            throw std::invalid_argument("port set of qubit " + std::to_string(q) +
                                        " is not sorted and unique");
        }
        for (Index v : s) {
            if (v >= pm.n_vertices) {
                throw std::invalid_argument("port set of qubit " + std::to_string(q) +
                                            " leaves the vertex range");
            }
        }
    }
}

// Shape validation plus pairwise disjointness of the sets.
inline void validate_port_map(const PortMap& pm) {
    validate_port_sets(pm);
    std::vector<bool> seen(pm.n_vertices, false);
    for (const auto& s : pm.sets) {
        for (Index v : s) {
            if (seen[v]) {
                throw std::invalid_argument("vertex " + std::to_string(v) +
                                            " appears in two port sets");
            }
            seen[v] = true;
        }
    }
}

// Vertex i hosts the i-th support qubit; all other qubits map to nothing.
inline PortMap singleton_ports(std::size_t n_qubits, const std::vector<Index>& support) {
    PortMap pm;
    pm.n_qubits = n_qubits;
    pm.n_vertices = support.size();
    pm.sets.resize(n_qubits);
    for (std::size_t i = 0; i < support.size(); ++i) {
        if (support[i] >= n_qubits) {
            throw std::invalid_argument("support qubit out of range");
        }
        pm.sets[support[i]] = {static_cast<Index>(i)};
    }
    PortMap check = pm;
    validate_port_map(check);
    return pm;
}

// Qubit-by-vertex membership matrix.
inline SparseBitMatrix port_matrix(const PortMap& pm) {
    std::vector<std::vector<Index>> rows = pm.sets;
    std::size_t n_rows = rows.size();
    return SparseBitMatrix::from_rows(n_rows, pm.n_vertices, std::move(rows));
}

struct AuxOptions {
    enum class Expansion { edges, thicken, none };

    std::size_t target_t = 0;  // 0 picks the measured support size
    Expansion expansion = Expansion::edges;
    std::optional<std::size_t> layer_override;  // forces the thickening depth
    std::size_t cellulate_len = 4;
    std::size_t degree_cap = 8;
    std::uint64_t seed = 0;
    ExpansionOptions expansion_opts{};  // brute-force cap and threads
};

struct AuxBuild {
    Graph graph;
    PortMap port;
    CycleBasis basis;
    std::vector<std::string> log;
};

namespace detail {

struct BfsTree {
    std::vector<long long> dist;  // -1 marks unreachable
    std::vector<Index> parent_vertex;
    std::vector<Index> parent_edge;
};

inline BfsTree bfs_from(const Graph& g, Index source,
                        const std::vector<std::vector<std::pair<Index, Index>>>& adj) {
    BfsTree t;
    t.dist.assign(g.n_vertices(), -1);
    t.parent_vertex.assign(g.n_vertices(), 0);
    t.parent_edge.assign(g.n_vertices(), 0);
    std::deque<Index> queue{source};
    t.dist[source] = 0;
    while (!queue.empty()) {
        Index u = queue.front();
        queue.pop_front();
        for (auto [w, e] : adj[u]) {
            if (t.dist[w] >= 0) continue;
            t.dist[w] = t.dist[u] + 1;
            t.parent_vertex[w] = u;
            t.parent_edge[w] = e;
            queue.push_back(w);
        }
    }
    return t;
}

// Flips the edges of the tree path source..v into the parity mask.
inline void xor_path(std::vector<std::uint8_t>& mask, const BfsTree& t, Index source, Index v) {
    while (v != source) {
        mask[t.parent_edge[v]] ^= 1;
        v = t.parent_vertex[v];
    }
}

}  // namespace detail

// A pairing of port vertices: the XOR of the connecting paths as a sorted
// edge set, plus the chosen endpoint pairs.
struct Matching {
    std::vector<Index> edges;
    std::vector<std::pair<Index, Index>> pairs;
};

// Pairs the port vertices a check touches and connects each pair by a BFS
// shortest path; the symmetric difference of the paths has odd edge degree
// exactly at the paired vertices. Greedy: lowest unpaired vertex first, then
// its nearest unpaired partner, ties broken by vertex index.
inline Matching match_ports_detailed(const Graph& g, std::vector<Index> ports) {
    if (ports.size() % 2 != 0) {
        throw std::invalid_argument("cannot match an odd number of port vertices");
    }
    auto adj = g.adjacency();
    std::vector<std::uint8_t> mask(g.n_edges(), 0);
    Matching out;
    std::vector<Index> open = std::move(ports);
    while (!open.empty()) {
        Index a = open.front();
        open.erase(open.begin());
        auto tree = detail::bfs_from(g, a, adj);
        std::optional<Index> best;
        for (Index b : open) {
            if (tree.dist[b] < 0) continue;
            if (!best || tree.dist[b] < tree.dist[*best] ||
                (tree.dist[b] == tree.dist[*best] && b < *best)) {
                best = b;
            }
        }
        if (!best) {
            throw std::invalid_argument(
                "a connected component isolates an odd number of port vertices");
        }
        detail::xor_path(mask, tree, a, *best);
        out.pairs.emplace_back(a, *best);
        open.erase(std::find(open.begin(), open.end(), *best));
    }
    for (std::size_t e = 0; e < mask.size(); ++e) {
        if (mask[e]) out.edges.push_back(static_cast<Index>(e));
    }
    return out;
}

inline std::vector<Index> match_ports(const Graph& g, std::vector<Index> ports) {
    return match_ports_detailed(g, std::move(ports)).edges;
}

// Labeled sub-matrices of the deformed check matrix: graph incidence rows,
// cycle rows over edges, per-check gained X-support over edges, and the
// qubit-by-vertex port membership.
struct DeformedBlocks {
    SparseBitMatrix G;  // edges by vertices
    SparseBitMatrix N;  // cycles by edges
    SparseBitMatrix M;  // base checks by edges
    SparseBitMatrix F;  // qubits by vertices
};

struct DeformedCode {
    StabilizerCode base;
    Graph aux;
    PortMap port;
    CycleBasis basis;
    std::vector<std::vector<Index>> matchings;  // per base check row, sorted edge ids
    StabilizerCode assembled;
    DeformedBlocks blocks;
};

// Builds the measured code: base qubits 0..n-1 keep their index, edge e
// becomes qubit n+e. Vertex checks act as Z on every owner qubit and the
// incident edges; cycle checks act as X on their edges; base checks whose
// X-support meets the ports gain the X-support of a matching. Port sets may
// share vertices; a shared vertex touched through both owners cancels out of
// the matching boundary.
inline DeformedCode assemble_deformed(const StabilizerCode& base, const Graph& g,
                                      const PortMap& port, const CycleBasis& basis) {
    validate_port_sets(port);
    if (port.n_qubits != base.n_qubits()) {
        throw std::invalid_argument("port map and code disagree on the qubit count");
    }
    if (port.n_vertices != g.n_vertices()) {
        throw std::invalid_argument("port map and graph disagree on the vertex count");
    }
    make_cycle_basis(g, basis.cycles);  // rejects stale or foreign bases

    auto zl = make_pauli({}, port.measured_support());
    if (!base.commutes_with_checks(zl)) {
        throw std::invalid_argument("the measured operator anticommutes with a check");
    }

    std::size_t n = base.n_qubits();
    std::size_t m = g.n_edges();
    std::size_t n_checks = base.checks().n_rows();

    std::vector<std::vector<Index>> matchings(n_checks);
    std::vector<std::uint8_t> parity(g.n_vertices(), 0);
    for (std::size_t r = 0; r < n_checks; ++r) {
        for (Index q : base.check_as_pauli(r).x_part) {
            for (Index v : port.sets[q]) parity[v] ^= 1;
        }
        std::vector<Index> touched;
        for (std::size_t v = 0; v < parity.size(); ++v) {
            if (parity[v]) touched.push_back(static_cast<Index>(v));
            parity[v] = 0;
        }
        if (touched.empty()) continue;
        matchings[r] = match_ports(g, std::move(touched));
    }

    auto owners = port.owners();
    auto adj = g.adjacency();
    std::vector<std::vector<Index>> vertex_rows(g.n_vertices());
    for (std::size_t v = 0; v < g.n_vertices(); ++v) {
        std::vector<Index>& row = vertex_rows[v];
        for (Index q : owners[v]) row.push_back(q);
        for (auto [w, e] : adj[v]) row.push_back(static_cast<Index>(n + e));
        std::sort(row.begin(), row.end());
    }

    std::size_t n2 = n + m;
    StabilizerCode assembled = [&]() -> StabilizerCode {
        if (base.is_css()) {
            std::size_t n_hx = base.hx().n_rows();
            std::vector<std::vector<Index>> hx_gain(matchings.begin(),
                                                    matchings.begin() + n_hx);
            auto gain = SparseBitMatrix::from_rows(n_hx, m, std::move(hx_gain));
            std::vector<std::vector<Index>> cycle_rows;
            for (std::size_t i = 0; i < basis.cycles.n_rows(); ++i) {
                std::vector<Index> row;
                for (Index e : basis.cycles.row(i)) row.push_back(static_cast<Index>(n + e));
                cycle_rows.push_back(std::move(row));
            }
            std::size_t n_cycles = cycle_rows.size();
            auto hx2 = vstack(hstack(base.hx(), gain),
                              SparseBitMatrix::from_rows(n_cycles, n2, std::move(cycle_rows)));
            std::size_t n_vertices = vertex_rows.size();
            auto hz2 = vstack(hstack(base.hz(), SparseBitMatrix(base.hz().n_rows(), m)),
                              SparseBitMatrix::from_rows(n_vertices, n2, std::move(vertex_rows)));
            return css_code(std::move(hx2), std::move(hz2));
        }
        std::vector<std::vector<Index>> rows;
        for (std::size_t r = 0; r < n_checks; ++r) {
            auto p = base.check_as_pauli(r);
            std::vector<Index> row;
            for (Index q : p.x_part) row.push_back(q);
            for (Index e : matchings[r]) row.push_back(static_cast<Index>(n + e));
            for (Index q : p.z_part) row.push_back(static_cast<Index>(n2 + q));
            std::sort(row.begin(), row.end());
            rows.push_back(std::move(row));
        }
        for (std::size_t i = 0; i < basis.cycles.n_rows(); ++i) {
            std::vector<Index> row;
            for (Index e : basis.cycles.row(i)) row.push_back(static_cast<Index>(n + e));
            rows.push_back(std::move(row));
        }
        for (auto& vr : vertex_rows) {
            std::vector<Index> row;
            for (Index q : vr) row.push_back(static_cast<Index>(n2 + q));
            rows.push_back(std::move(row));
        }
        std::size_t n_rows = rows.size();
        return StabilizerCode::from_checks(
            n2, SparseBitMatrix::from_rows(n_rows, 2 * n2, std::move(rows)));
    }();

    DeformedBlocks blocks;
    blocks.G = incidence_matrix(g);
    blocks.N = basis.cycles;
    {
        std::vector<std::vector<Index>> m_rows = matchings;
        blocks.M = SparseBitMatrix::from_rows(n_checks, m, std::move(m_rows));
    }
    blocks.F = port_matrix(port);
    return DeformedCode{base,           g,        port,
                        basis,          std::move(matchings),
                        std::move(assembled),    std::move(blocks)};
}

// Builds the aux graph for measuring a Z-type logical: one vertex per support
// qubit, edges pairing each check's overlap in index order, components joined
// by a chain, then the chosen expansion step and a cellulated cycle basis.
inline AuxBuild build_aux_graph(const StabilizerCode& c, const std::vector<Index>& zl_support,
                                const AuxOptions& opts = {}) {
    auto zl = make_pauli({}, zl_support);
    if (zl.z_part.size() != zl_support.size()) {
        throw std::invalid_argument("measured support has repeated qubits");
    }
    if (!zl.z_part.empty() && zl.z_part.back() >= c.n_qubits()) {
        throw std::invalid_argument("measured support leaves the qubit range");
    }
    if (!c.commutes_with_checks(zl)) {
        throw std::invalid_argument("measured operator anticommutes with a check");
    }
    if (!is_nontrivial_logical(c, zl)) {
        throw std::invalid_argument("measured operator is not a nontrivial logical");
    }

    AuxBuild out;
    out.port = singleton_ports(c.n_qubits(), zl.z_part);
    Graph g(zl.z_part.size());
    std::ostringstream line;
    line << "ports: " << g.n_vertices() << " singleton vertices";
    out.log.push_back(line.str());

    std::vector<std::optional<Index>> vertex_of(c.n_qubits());
    for (std::size_t i = 0; i < zl.z_part.size(); ++i) {
        vertex_of[zl.z_part[i]] = static_cast<Index>(i);
    }
    std::size_t paired_edges = 0;
    for (std::size_t r = 0; r < c.checks().n_rows(); ++r) {
        std::vector<Index> locals;
        for (Index q : c.check_as_pauli(r).x_part) {
            if (vertex_of[q]) locals.push_back(*vertex_of[q]);
        }
        // Commutation with a Z-type operator forces an even overlap.
        for (std::size_t i = 0; i + 1 < locals.size(); i += 2) {
            g.add_edge(locals[i], locals[i + 1]);
            ++paired_edges;
        }
    }
    out.log.push_back("paired check overlaps: " + std::to_string(paired_edges) + " edges");

    auto comp = connected_components(g);
    std::size_t n_comp =
        comp.empty() ? 0 : static_cast<std::size_t>(*std::max_element(comp.begin(), comp.end())) + 1;
    if (n_comp > 1) {
        std::vector<std::optional<Index>> rep(n_comp);
        for (std::size_t v = 0; v < g.n_vertices(); ++v) {
            if (!rep[comp[v]]) rep[comp[v]] = static_cast<Index>(v);
        }
        std::vector<Index> reps;
        for (auto& r : rep) reps.push_back(*r);
        std::sort(reps.begin(), reps.end());
        for (std::size_t i = 0; i + 1 < reps.size(); ++i) {
            g.add_edge(reps[i], reps[i + 1]);
        }
        out.log.push_back("joined " + std::to_string(n_comp) +
                          " components with a chain of " + std::to_string(n_comp - 1) +
                          " edges");
    }

    std::size_t t = opts.target_t ? opts.target_t : zl.z_part.size();
    std::vector<Index> image(g.n_vertices());
    for (std::size_t v = 0; v < g.n_vertices(); ++v) image[v] = static_cast<Index>(v);
    std::optional<CycleBasis> basis;

    switch (opts.expansion) {
        case AuxOptions::Expansion::edges: {
            try {
                auto check = certify_at_least(g, ExpansionQuery{image, t, Beta(1)},
                                              opts.expansion_opts);
                if (check.ok) {
                    out.log.push_back("expansion already at threshold 1");
                } else {
                    g = boost_by_edges(g, image, t, opts.degree_cap, opts.seed,
                                       opts.expansion_opts);
                    out.log.push_back("raised expansion by adding edges");
                }
            } catch (const CapExceeded&) {
                out.log.push_back("expansion step skipped: graph over the brute-force cap");
            }
            break;
        }
        case AuxOptions::Expansion::thicken: {
            std::size_t layers = 1;
            if (opts.layer_override) {
                layers = *opts.layer_override;
                if (layers == 0) throw std::invalid_argument("layer override must be positive");
                out.log.push_back("thickening depth forced to " + std::to_string(layers));
            } else {
                auto cert =
                    relative_expansion(g, ExpansionQuery{image, t, Beta(1)}, opts.expansion_opts);
                if (cert.bounded()) {
                    if (*cert.value <= Beta(0)) {
                        throw std::invalid_argument(
                            "zero expansion cannot be boosted by thickening");
                    }
                    long long num = cert.value->numerator();
                    long long den = cert.value->denominator();
                    if (*cert.value < Beta(1)) {
                        layers = static_cast<std::size_t>((den + num - 1) / num);
                    }
                    out.log.push_back("expansion " + std::to_string(num) + "/" +
                                      std::to_string(den) + ", thickening to " +
                                      std::to_string(layers) + " layers");
                } else {
                    out.log.push_back("expansion unbounded, single layer kept");
                }
            }
            if (layers > 1) {
                auto base_basis = fundamental_cycle_basis(g, spanning_tree(g, 0));
                auto [tg, layered] = layered_cycle_basis(g, base_basis, layers);
                g = tg.graph;
                basis = std::move(layered);
                out.log.push_back("ports stay on the layer 0 copies");
            }
            break;
        }
        case AuxOptions::Expansion::none:
            out.log.push_back("expansion left unverified");
            break;
    }

    if (!basis) basis = fundamental_cycle_basis(g, spanning_tree(g, 0));
    auto cell = cellulate(g, *basis, opts.cellulate_len);
    if (cell.chords_added > 0) {
        out.log.push_back("cellulated: " + std::to_string(cell.chords_added) + " chords for " +
                          std::to_string(cell.cycles_replaced) + " long cycles");
    }
    out.graph = std::move(cell.graph);
    out.basis = std::move(cell.basis);
    out.port.n_vertices = out.graph.n_vertices();
    return out;
}

struct CodespaceReport {
    std::size_t k_base = 0;
    std::size_t k_deformed = 0;
    bool k_dropped_by_one = false;
    bool measured_in_stabilizer = false;
    bool checks_commute = false;

    bool pass() const { return k_dropped_by_one && measured_in_stabilizer && checks_commute; }
};

// The measured Z operator must join the stabilizer group and take exactly one
// logical qubit with it. Every field is recomputed from the artifacts.
inline CodespaceReport verify_codespace(const DeformedCode& dc) {
    CodespaceReport rep;
    rep.k_base = logical_qubit_count(dc.base);
    rep.k_deformed = logical_qubit_count(dc.assembled);
    rep.k_dropped_by_one = rep.k_deformed + 1 == rep.k_base;
    std::size_t n2 = dc.assembled.n_qubits();
    std::vector<Index> zl_cols;
    for (Index q : dc.port.measured_support()) {
        zl_cols.push_back(static_cast<Index>(n2 + q));
    }
    rep.measured_in_stabilizer = in_row_space(dc.assembled.checks(), zl_cols);
    rep.checks_commute = symplectic_commutes(dc.assembled.checks());
    return rep;
}

struct DistanceCheckReport {
    std::size_t base_distance = 0;
    DistanceReport deformed;
    bool weight_bounded_substituted = false;
    bool pass = false;
};

// Brute-force distance comparison; when the deformed code outgrows the budget
// the exhaustive scan is replaced by a weight-bounded certificate at one less
// than the base distance, and the substitution is labeled.
inline DistanceCheckReport verify_distance(const DeformedCode& dc,
                                           std::size_t budget = std::size_t{1} << 26) {
    DistanceCheckReport rep;
    auto base_rep = distance(dc.base, DistanceMode::exhaustive(budget));
    rep.base_distance = *base_rep.distance;
    try {
        rep.deformed = distance(dc.assembled, DistanceMode::exhaustive(budget));
    } catch (const BudgetExceeded&) {
        rep.weight_bounded_substituted = true;
        rep.deformed = distance(dc.assembled,
                                DistanceMode::weight_bounded(rep.base_distance - 1, budget));
    }
    std::size_t achieved =
        rep.deformed.distance ? *rep.deformed.distance : rep.deformed.lower_bound;
    rep.pass = achieved >= rep.base_distance;
    return rep;
}

struct DesiderataReport {
    bool connected = false;
    std::size_t max_vertex_degree = 0;
    std::size_t max_port_multiplicity = 0;   // largest port set
    std::size_t max_matching_len = 0;        // largest gained X-support
    std::size_t max_edge_matching_count = 0; // matchings sharing one edge
    SparsityProfile cycle_profile;           // row = cycle length, col = cycles per edge
    std::optional<bool> expansion_certified; // absent when the cap refused the scan
    std::vector<Index> expansion_witness;    // violating cut when certified false
};

// Recomputes every structural quantity from the stored artifacts; nothing is
// cached from construction time.
inline DesiderataReport desiderata_report(const DeformedCode& dc, std::size_t t,
                                          const ExpansionOptions& opts = {}) {
    DesiderataReport rep;
    rep.connected = is_connected(dc.aux);
    std::vector<std::size_t> degree(dc.aux.n_vertices(), 0);
    for (auto [u, v] : dc.aux.edges()) {
        ++degree[u];
        ++degree[v];
    }
    for (std::size_t d : degree) rep.max_vertex_degree = std::max(rep.max_vertex_degree, d);
    for (const auto& s : dc.port.sets) {
        rep.max_port_multiplicity = std::max(rep.max_port_multiplicity, s.size());
    }
    std::vector<std::size_t> edge_count(dc.aux.n_edges(), 0);
    for (const auto& mu : dc.matchings) {
        rep.max_matching_len = std::max(rep.max_matching_len, mu.size());
        for (Index e : mu) ++edge_count[e];
    }
    for (std::size_t cnt : edge_count) {
        rep.max_edge_matching_count = std::max(rep.max_edge_matching_count, cnt);
    }
    rep.cycle_profile = dc.basis.cycles.profile();
    try {
        auto check =
            certify_at_least(dc.aux, ExpansionQuery{dc.port.image(), t, Beta(1)}, opts);
        rep.expansion_certified = check.ok;
        if (!check.ok) rep.expansion_witness = check.violation_witness;
    } catch (const CapExceeded&) {
        rep.expansion_certified = std::nullopt;
    }
    return rep;
}

}  // namespace qdeform
