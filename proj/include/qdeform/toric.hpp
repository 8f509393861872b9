#pragma once

// toric.hpp - layered cyclic-repetition toric block, the transversal-CNOT
// twist circuit with its relabeling layers, a sign-free Pauli frame evolver,
// and the three-piece merge that splices a CSS base code onto the block
// through two auxiliary graphs.

#include <algorithm>
#include <cstddef>
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

// 2d^2 qubits in 2d cyclic layers: d primal layers carry the control-side
// qubits, d dual layers the target side. Layer-major indexing: primal layer i
// occupies [i*d, (i+1)*d), dual layer i occupies d^2 + [i*d, (i+1)*d).
// Every check has weight 4: a weight-2 cyclic row inside its own layer plus
// one qubit in each neighboring layer of the other type.
struct ToricLayout {
    Index d = 0;
    StabilizerCode code;

    Index n_qubits() const { return 2 * d * d; }
    // primal qubit j of layer i
    Index qz(Index i, Index j) const { return (i % d) * d + (j % d); }
    // dual qubit j of layer i
    Index qx(Index i, Index j) const { return d * d + (i % d) * d + (j % d); }
    // row index into hx of the X check (i, r)
    Index cx(Index i, Index r) const { return (i % d) * d + (r % d); }
    // row index into hz of the Z check (i, s)
    Index cz(Index i, Index s) const { return (i % d) * d + (s % d); }
};

// X check (i, r): qubits qz(i,r), qz(i,r+1), qx(i-1,r), qx(i,r).
// Z check (i, s): qubits qx(i,s-1), qx(i,s), qz(i,s), qz(i+1,s).
// Named logical lines: X1 one primal qubit per layer at index 0, X2 all of
// dual layer 0, Z1 all of primal layer 0, Z2 one dual qubit per layer.
inline ToricLayout toric_code(Index d) {
    if (d < 2) {
        throw std::invalid_argument("the layered block needs d >= 2");
    }
    auto qz = [d](Index i, Index j) { return (i % d) * d + (j % d); };
    auto qx = [d](Index i, Index j) { return d * d + (i % d) * d + (j % d); };
    std::vector<std::vector<Index>> hx_rows, hz_rows;
    for (Index i = 0; i < d; ++i) {
        for (Index r = 0; r < d; ++r) {
            std::vector<Index> row = {qx(i + d - 1, r), qz(i, r), qz(i, r + 1), qx(i, r)};
            std::sort(row.begin(), row.end());
            hx_rows.push_back(std::move(row));
        }
    }
    for (Index i = 0; i < d; ++i) {
        for (Index s = 0; s < d; ++s) {
            std::vector<Index> row = {qz(i, s), qx(i, s), qx(i, s + d - 1), qz(i + 1, s)};
            std::sort(row.begin(), row.end());
            hz_rows.push_back(std::move(row));
        }
    }
    std::size_t nx = hx_rows.size();
    std::size_t nz = hz_rows.size();
    auto hx = SparseBitMatrix::from_rows(nx, 2 * d * d, hx_rows);
    auto hz = SparseBitMatrix::from_rows(nz, 2 * d * d, hz_rows);
    auto code = css_code(hx, hz);
    std::vector<Index> x1, x2, z1, z2;
    for (Index i = 0; i < d; ++i) {
        x1.push_back(qz(i, 0));
        x2.push_back(qx(0, i));
        z1.push_back(qz(0, i));
        z2.push_back(qx(i, 0));
    }
    code.add_logical("X1", make_pauli(x1, {}));
    code.add_logical("X2", make_pauli(x2, {}));
    code.add_logical("Z1", make_pauli({}, z1));
    code.add_logical("Z2", make_pauli({}, z2));
    return ToricLayout{d, std::move(code)};
}

// Sign-free Pauli rows evolved through a circuit by conjugation.
struct PauliFrame {
    std::vector<PauliOperator> rows;
};

// One circuit step: a batch of disjoint CNOT gates, or a relabeling that
// moves qubit indices (identity outside `moves`; the moved set must permute).
struct CircuitElement {
    enum class Kind { cnot_batch, relabel };
    Kind kind = Kind::cnot_batch;
    std::vector<std::pair<Index, Index>> gates;  // (control, target)
    std::vector<std::pair<Index, Index>> moves;  // (old index, new index)
};

// The twist circuit: per layer i one transversal CNOT batch (primal controls,
// dual targets, equal in-layer index), then the dual relabeling j -> j-i-1
// and the primal relabeling j -> j-i, all cyclic mod d. 3d elements total:
// d batches and 2d relabeling layers.
struct DehnTwistCircuit {
    Index d = 0;
    Index n_qubits = 0;
    std::vector<CircuitElement> elements;

    // Dual-layer relabeling shift of layer `layer`, measured relative to
    // layer 0's: the targets of layer i end up shifted by exactly i more
    // than layer 0's targets.
    Index effective_target_offset(Index layer) const {
        if (d < 2 || elements.size() != static_cast<std::size_t>(3) * d) {
            throw std::invalid_argument("not a twist circuit");
        }
        if (layer >= d) {
            throw std::invalid_argument("layer index out of range");
        }
        auto shift_of = [this](Index l) {
            const CircuitElement& el = elements[static_cast<std::size_t>(3) * l + 1];
            if (el.kind != CircuitElement::Kind::relabel || el.moves.empty()) {
                throw std::invalid_argument("not a twist circuit");
            }
            auto [from, to] = el.moves.front();
            return ((to % d) + d - (from % d)) % d;
        };
        return (shift_of(0) + d - shift_of(layer)) % d;
    }
};

inline DehnTwistCircuit dehn_twist(Index d) {
    if (d < 2) {
        throw std::invalid_argument("the twist circuit needs d >= 2");
    }
    DehnTwistCircuit c;
    c.d = d;
    c.n_qubits = 2 * d * d;
    auto qz = [d](Index i, Index j) { return (i % d) * d + (j % d); };
    auto qx = [d](Index i, Index j) { return d * d + (i % d) * d + (j % d); };
    for (Index i = 0; i < d; ++i) {
        CircuitElement batch;
        batch.kind = CircuitElement::Kind::cnot_batch;
        for (Index j = 0; j < d; ++j) {
            batch.gates.emplace_back(qz(i, j), qx(i, j));
        }
        c.elements.push_back(std::move(batch));
        CircuitElement dual;
        dual.kind = CircuitElement::Kind::relabel;
        for (Index j = 0; j < d; ++j) {
            dual.moves.emplace_back(qx(i, j), qx(i, j + 2 * d - i - 1));
        }
        c.elements.push_back(std::move(dual));
        CircuitElement primal;
        primal.kind = CircuitElement::Kind::relabel;
        for (Index j = 0; j < d; ++j) {
            primal.moves.emplace_back(qz(i, j), qz(i, j + d - i));
        }
        c.elements.push_back(std::move(primal));
    }
    return c;
}

namespace detail {

inline void toggle_sorted(std::vector<Index>& v, Index q) {
    auto it = std::lower_bound(v.begin(), v.end(), q);
    if (it != v.end() && *it == q) {
        v.erase(it);
    } else {
        v.insert(it, q);
    }
}

inline std::vector<Index> sym_diff(const std::vector<Index>& a, const std::vector<Index>& b) {
    std::vector<Index> out;
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(),
                                  std::back_inserter(out));
    return out;
}

}  // namespace detail

// Conjugates every frame row through the circuit: X flows control -> target,
// Z flows target -> control, relabelings rename support indices. Signs are
// not tracked.
inline PauliFrame apply_frame(const PauliFrame& frame, const DehnTwistCircuit& circuit) {
    for (const auto& row : frame.rows) {
        for (Index q : row.x_part) {
            if (q >= circuit.n_qubits) {
                throw std::invalid_argument("frame row touches a qubit outside the circuit");
            }
        }
        for (Index q : row.z_part) {
            if (q >= circuit.n_qubits) {
                throw std::invalid_argument("frame row touches a qubit outside the circuit");
            }
        }
    }
    PauliFrame out = frame;
    for (const auto& el : circuit.elements) {
        if (el.kind == CircuitElement::Kind::cnot_batch) {
            for (auto [c, t] : el.gates) {
                if (c >= circuit.n_qubits || t >= circuit.n_qubits || c == t) {
                    throw std::invalid_argument("bad gate in circuit");
                }
            }
            for (auto& row : out.rows) {
                for (auto [c, t] : el.gates) {
                    if (std::binary_search(row.x_part.begin(), row.x_part.end(), c)) {
                        detail::toggle_sorted(row.x_part, t);
                    }
                    if (std::binary_search(row.z_part.begin(), row.z_part.end(), t)) {
                        detail::toggle_sorted(row.z_part, c);
                    }
                }
            }
        } else {
            std::vector<Index> image(circuit.n_qubits);
            for (Index q = 0; q < circuit.n_qubits; ++q) image[q] = q;
            for (auto [from, to] : el.moves) {
                if (from >= circuit.n_qubits || to >= circuit.n_qubits) {
                    throw std::invalid_argument("bad relabeling in circuit");
                }
                image[from] = to;
            }
            auto rename = [&image](std::vector<Index>& support) {
                for (Index& q : support) q = image[q];
                std::sort(support.begin(), support.end());
            };
            for (auto& row : out.rows) {
                rename(row.x_part);
                rename(row.z_part);
            }
        }
    }
    return out;
}

// Outcome of running the full tableau through the twist circuit: the check
// rowspace must come back unchanged, the control-side X line must pick up
// the target-side X line, the target-side Z line must pick up the
// control-side Z line, and the two fixed lines must come back verbatim.
struct LogicalCnotReport {
    Index d = 0;
    bool stabilizers_preserved = false;
    bool control_x_picks_up_target = false;
    bool target_z_picks_up_control = false;
    bool target_x_fixed = false;
    bool control_z_fixed = false;

    bool pass() const {
        return stabilizers_preserved && control_x_picks_up_target &&
               target_z_picks_up_control && target_x_fixed && control_z_fixed;
    }
};

inline LogicalCnotReport verify_logical_cnot(Index d) {
    if (d > 8) {
        throw std::invalid_argument("tableau verification is capped at d = 8");
    }
    auto t = toric_code(d);
    auto circuit = dehn_twist(d);
    PauliFrame frame;
    std::size_t m = t.code.checks().n_rows();
    for (std::size_t r = 0; r < m; ++r) {
        frame.rows.push_back(t.code.check_as_pauli(r));
    }
    for (const auto& l : t.code.named_logicals()) {
        frame.rows.push_back(l.op);
    }
    auto evolved = apply_frame(frame, circuit);

    std::size_t half = m / 2;
    std::vector<std::vector<Index>> ex_rows, ez_rows;
    bool types_clean = true;
    for (std::size_t r = 0; r < half; ++r) {
        types_clean = types_clean && evolved.rows[r].z_part.empty();
        ex_rows.push_back(evolved.rows[r].x_part);
    }
    for (std::size_t r = half; r < m; ++r) {
        types_clean = types_clean && evolved.rows[r].x_part.empty();
        ez_rows.push_back(evolved.rows[r].z_part);
    }
    std::size_t nex = ex_rows.size();
    std::size_t nez = ez_rows.size();
    auto ex = SparseBitMatrix::from_rows(nex, t.n_qubits(), ex_rows);
    auto ez = SparseBitMatrix::from_rows(nez, t.n_qubits(), ez_rows);
    bool contained = true;
    for (std::size_t r = 0; r < nex; ++r) {
        contained = contained && in_row_space(t.code.hx(), ex_rows[r]);
    }
    for (std::size_t r = 0; r < nez; ++r) {
        contained = contained && in_row_space(t.code.hz(), ez_rows[r]);
    }

    LogicalCnotReport rep;
    rep.d = d;
    rep.stabilizers_preserved = types_clean && contained &&
                                rank(ex) == rank(t.code.hx()) &&
                                rank(ez) == rank(t.code.hz());

    const auto& logicals = t.code.named_logicals();
    const auto& x1 = logicals[0].op;
    const auto& x2 = logicals[1].op;
    const auto& z1 = logicals[2].op;
    const auto& z2 = logicals[3].op;
    const auto& x1e = evolved.rows[m];
    const auto& x2e = evolved.rows[m + 1];
    const auto& z1e = evolved.rows[m + 2];
    const auto& z2e = evolved.rows[m + 3];

    rep.control_x_picks_up_target =
        x1e.z_part.empty() &&
        in_row_space(t.code.hx(),
                     detail::sym_diff(x1e.x_part, detail::sym_diff(x1.x_part, x2.x_part)));
    rep.target_z_picks_up_control =
        z2e.x_part.empty() &&
        in_row_space(t.code.hz(),
                     detail::sym_diff(z2e.z_part, detail::sym_diff(z1.z_part, z2.z_part)));
    rep.target_x_fixed = x2e.x_part == x2.x_part && x2e.z_part.empty();
    rep.control_z_fixed = z1e.z_part == z1.z_part && z1e.x_part.empty();
    return rep;
}

// Fault injection on the twist circuit: an X error on the control of the
// first gate of a batch, placed before the batch fires, conjugated through
// the rest of the circuit. The full d-fault pattern slips past every check
// yet multiplies both X lines; once the target-side X line is quotiented out
// (the ancilla block is prepared with that line fixed), what remains is the
// control-side X line. Any strict subset of the family is caught or trivial.
struct FaultDemoReport {
    Index d = 0;
    bool empty_pattern_is_identity = false;
    bool every_single_fault_is_detected = false;
    bool full_pattern_has_zero_syndrome = false;
    bool full_pattern_is_not_a_stabilizer = false;
    bool full_pattern_class_is_both_x_lines = false;
    bool full_pattern_matches_control_line_after_init = false;
    bool family_checked = false;
    bool family_all_caught = false;

    bool pass() const {
        return empty_pattern_is_identity && every_single_fault_is_detected &&
               full_pattern_has_zero_syndrome && full_pattern_is_not_a_stabilizer &&
               full_pattern_class_is_both_x_lines &&
               full_pattern_matches_control_line_after_init &&
               (!family_checked || family_all_caught);
    }
};

namespace detail {

// Residual of X faults on the first-gate controls of the batches in `layers`:
// each fault is conjugated by the circuit suffix that starts at its batch.
inline PauliOperator twist_fault_residual(const DehnTwistCircuit& circuit,
                                          const std::vector<Index>& layers) {
    std::vector<Index> residual;
    for (Index i : layers) {
        DehnTwistCircuit suffix;
        suffix.d = circuit.d;
        suffix.n_qubits = circuit.n_qubits;
        suffix.elements.assign(circuit.elements.begin() + static_cast<std::ptrdiff_t>(3) * i,
                               circuit.elements.end());
        const auto& batch = circuit.elements[static_cast<std::size_t>(3) * i];
        PauliFrame f;
        f.rows.push_back(make_pauli({batch.gates.front().first}, {}));
        auto out = apply_frame(f, suffix);
        residual = sym_diff(residual, out.rows.front().x_part);
    }
    return make_pauli(residual, {});
}

}  // namespace detail

inline FaultDemoReport fault_pattern_demo(Index d) {
    if (d > 8) {
        throw std::invalid_argument("fault demo is capped at d = 8");
    }
    auto t = toric_code(d);
    auto circuit = dehn_twist(d);
    FaultDemoReport rep;
    rep.d = d;

    rep.empty_pattern_is_identity =
        weight(detail::twist_fault_residual(circuit, {})) == 0;

    rep.every_single_fault_is_detected = true;
    for (Index i = 0; i < d; ++i) {
        auto res = detail::twist_fault_residual(circuit, {i});
        rep.every_single_fault_is_detected =
            rep.every_single_fault_is_detected && !t.code.commutes_with_checks(res);
    }

    std::vector<Index> all(d);
    for (Index i = 0; i < d; ++i) all[i] = i;
    auto res = detail::twist_fault_residual(circuit, all);
    rep.full_pattern_has_zero_syndrome = t.code.commutes_with_checks(res);
    rep.full_pattern_is_not_a_stabilizer = !in_row_space(t.code.hx(), res.x_part);
    const auto& logicals = t.code.named_logicals();
    const auto& x1 = logicals[0].op.x_part;
    const auto& x2 = logicals[1].op.x_part;
    rep.full_pattern_class_is_both_x_lines =
        in_row_space(t.code.hx(), detail::sym_diff(res.x_part, detail::sym_diff(x1, x2)));
    std::vector<std::vector<Index>> plus_rows;
    for (std::size_t r = 0; r < t.code.hx().n_rows(); ++r) {
        plus_rows.push_back(t.code.hx().row(r));
    }
    plus_rows.push_back(x2);
    std::size_t np = plus_rows.size();
    auto hx_plus_init = SparseBitMatrix::from_rows(np, t.n_qubits(), plus_rows);
    rep.full_pattern_matches_control_line_after_init =
        in_row_space(hx_plus_init, detail::sym_diff(res.x_part, x1));

    rep.family_checked = d == 3;
    if (rep.family_checked) {
        rep.family_all_caught = true;
        for (Index a = 0; a < d; ++a) {
            for (Index b = a; b < d; ++b) {
                std::vector<Index> layers = a == b ? std::vector<Index>{a}
                                                   : std::vector<Index>{a, b};
                auto sub = detail::twist_fault_residual(circuit, layers);
                bool caught = !t.code.commutes_with_checks(sub) ||
                              in_row_space(t.code.hx(), sub.x_part);
                rep.family_all_caught = rep.family_all_caught && caught;
            }
        }
    }
    return rep;
}

// One auxiliary attachment: the graph, the port sets tying base qubits to its
// vertices, and a cycle basis over its edges.
struct AuxAttachment {
    Graph graph;
    PortMap port;
    CycleBasis basis;
};

// The merged code. Column layout: base qubits, control-side edge qubits,
// the 2d^2 block qubits (layer-major), target-side edge qubits.
struct MergedToric {
    StabilizerCode base;
    ToricLayout block;
    AuxAttachment aux_z, aux_x;
    SkipTreeResult skip_z, skip_x;
    StabilizerCode assembled;
    Index ez_offset = 0;
    Index block_offset = 0;
    Index ex_offset = 0;
    Index n_qubits = 0;
};

namespace detail {

inline void check_sorted_support(const std::vector<Index>& s, Index n, const std::string& what) {
    if (s.empty()) {
        throw std::invalid_argument(what + " must not be empty");
    }
    if (!std::is_sorted(s.begin(), s.end()) ||
        std::adjacent_find(s.begin(), s.end()) != s.end()) {
        throw std::invalid_argument(what + " must be sorted and duplicate-free");
    }
    if (s.back() >= n) {
        throw std::invalid_argument(what + " references a qubit outside the base code");
    }
}

}  // namespace detail

// Splices `base` onto a fresh d-layer block: the control-side support is tied
// by aux_z to primal layer 0 and the target-side support by aux_x to dual
// layer d-1, each through the closed-walk transform and label permutation of
// its graph. Base checks that cross a support gain matched edge paths; the
// layer-0 X checks carry the control-side transform rows, and the last Z
// layer carries the target-side transform rows shifted by one.
inline MergedToric merge_with_toric(const StabilizerCode& base,
                                    const std::vector<Index>& zc_support,
                                    const std::vector<Index>& xt_support,
                                    AuxAttachment aux_z,
                                    AuxAttachment aux_x,
                                    Index d) {
    if (!base.is_css()) {
        throw std::invalid_argument("the merge needs a CSS base code");
    }
    Index n = static_cast<Index>(base.n_qubits());
    detail::check_sorted_support(zc_support, n, "the control-side support");
    detail::check_sorted_support(xt_support, n, "the target-side support");
    std::vector<Index> overlap;
    std::set_intersection(zc_support.begin(), zc_support.end(),
                          xt_support.begin(), xt_support.end(),
                          std::back_inserter(overlap));
    if (!overlap.empty()) {
        throw std::invalid_argument("the measured supports overlap");
    }
    ToricLayout block = toric_code(d);

    for (const AuxAttachment* side : {&aux_z, &aux_x}) {
        if (side->port.n_qubits != base.n_qubits()) {
            throw std::invalid_argument("port map does not cover the base code");
        }
        if (side->graph.n_vertices() != d || side->port.n_vertices != d) {
            throw std::invalid_argument("each auxiliary graph needs exactly d vertices");
        }
        validate_port_sets(side->port);
        // revalidates rows: cycles, spanning rank
        make_cycle_basis(side->graph, side->basis.cycles);
    }
    if (aux_z.port.measured_support() != zc_support) {
        throw std::invalid_argument("the control-side ports do not measure the given support");
    }
    if (aux_x.port.measured_support() != xt_support) {
        throw std::invalid_argument("the target-side ports do not measure the given support");
    }

    SkipTreeResult skip_z = skiptree(aux_z.graph);
    SkipTreeResult skip_x = skiptree(aux_x.graph);

    Index mz = static_cast<Index>(aux_z.graph.n_edges());
    Index mx = static_cast<Index>(aux_x.graph.n_edges());
    const Index ez_offset = n;
    const Index bo = n + mz;
    const Index ex_offset = bo + 2 * d * d;
    const Index n_qubits = ex_offset + mx;

    auto qz = [&](Index i, Index j) { return bo + block.qz(i, j); };
    auto qx = [&](Index i, Index j) { return bo + block.qx(i, j); };

    // XOR multiset of port vertices a base check touches across a support.
    auto ports_of = [](const std::vector<Index>& row, const std::vector<Index>& support,
                       const PortMap& pm) {
        std::vector<Index> ports;
        for (Index q : row) {
            if (std::binary_search(support.begin(), support.end(), q)) {
                ports = detail::sym_diff(ports, pm.sets[q]);
            }
        }
        return ports;
    };

    std::vector<std::vector<Index>> hxp, hzp;

    for (std::size_t r = 0; r < base.hx().n_rows(); ++r) {
        auto row = base.hx().row(r);
        auto matched = match_ports(aux_z.graph, ports_of(row, zc_support, aux_z.port));
        for (Index e : matched) row.push_back(ez_offset + e);
        std::sort(row.begin(), row.end());
        hxp.push_back(std::move(row));
    }
    for (std::size_t r = 0; r < aux_z.basis.cycles.n_rows(); ++r) {
        std::vector<Index> row;
        for (Index e : aux_z.basis.cycles.row(r)) row.push_back(ez_offset + e);
        hxp.push_back(std::move(row));
    }
    for (Index i = 0; i < d; ++i) {
        for (Index r = 0; r < d; ++r) {
            std::vector<Index> row = {qz(i, r), qz(i, r + 1), qx(i + d - 1, r), qx(i, r)};
            if (i == 0) {
                for (Index e : skip_z.T.row(r)) row.push_back(ez_offset + e);
            }
            std::sort(row.begin(), row.end());
            hxp.push_back(std::move(row));
        }
    }
    auto owners_x = aux_x.port.owners();
    auto adj_x = aux_x.graph.adjacency();
    for (Index v = 0; v < d; ++v) {
        std::vector<Index> row = owners_x[v];
        row.push_back(qx(d - 1, skip_x.label_of_vertex[v]));
        for (auto [nbr, e] : adj_x[v]) row.push_back(ex_offset + e);
        std::sort(row.begin(), row.end());
        hxp.push_back(std::move(row));
    }

    for (std::size_t r = 0; r < base.hz().n_rows(); ++r) {
        auto row = base.hz().row(r);
        auto matched = match_ports(aux_x.graph, ports_of(row, xt_support, aux_x.port));
        for (Index e : matched) row.push_back(ex_offset + e);
        std::sort(row.begin(), row.end());
        hzp.push_back(std::move(row));
    }
    for (std::size_t r = 0; r < aux_x.basis.cycles.n_rows(); ++r) {
        std::vector<Index> row;
        for (Index e : aux_x.basis.cycles.row(r)) row.push_back(ex_offset + e);
        hzp.push_back(std::move(row));
    }
    for (Index i = 0; i < d; ++i) {
        for (Index s = 0; s < d; ++s) {
            std::vector<Index> row = {qx(i, s + d - 1), qx(i, s), qz(i, s), qz(i + 1, s)};
            if (i == d - 1) {
                for (Index e : skip_x.T.row((s + d - 1) % d)) {
                    row.push_back(ex_offset + e);
                }
            }
            std::sort(row.begin(), row.end());
            hzp.push_back(std::move(row));
        }
    }
    auto owners_z = aux_z.port.owners();
    auto adj_z = aux_z.graph.adjacency();
    for (Index v = 0; v < d; ++v) {
        std::vector<Index> row = owners_z[v];
        row.push_back(qz(0, skip_z.label_of_vertex[v]));
        for (auto [nbr, e] : adj_z[v]) row.push_back(ez_offset + e);
        std::sort(row.begin(), row.end());
        hzp.push_back(std::move(row));
    }

    std::size_t nxp = hxp.size();
    std::size_t nzp = hzp.size();
    auto hxm = SparseBitMatrix::from_rows(nxp, n_qubits, hxp);
    auto hzm = SparseBitMatrix::from_rows(nzp, n_qubits, hzp);
    auto assembled = css_code(hxm, hzm);
    return MergedToric{base,
                       std::move(block),
                       std::move(aux_z),
                       std::move(aux_x),
                       std::move(skip_z),
                       std::move(skip_x),
                       std::move(assembled),
                       ez_offset,
                       bo,
                       ex_offset,
                       n_qubits};
}

}  // namespace qdeform
