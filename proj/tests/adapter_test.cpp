#include <qdeform/adapter.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <vector>

#include "fixtures.hpp"

namespace qdeform {
namespace {

StabilizerCode six_two_two() {
    auto hx = SparseBitMatrix::from_rows(3, 6, {{0, 1}, {2, 3}, {4, 5}});
    auto hz = SparseBitMatrix::from_rows(1, 6, {{0, 1, 2, 3, 4, 5}});
    return css_code(std::move(hx), std::move(hz));
}

Graph triangle() {
    Graph g(3);
    g.add_edge(0, 1);
    g.add_edge(1, 2);
    g.add_edge(0, 2);
    return g;
}

Graph complete_graph(std::size_t n) {
    Graph g(n);
    for (Index u = 0; u < n; ++u) {
        for (Index v = u + 1; v < n; ++v) g.add_edge(u, v);
    }
    return g;
}

CycleBasis tree_basis(const Graph& g) {
    return fundamental_cycle_basis(g, spanning_tree(g, 0));
}

std::vector<Index> z_support(const StabilizerCode& c, const std::string& name) {
    for (const auto& l : c.named_logicals()) {
        if (l.name == name) return l.op.z_part;
    }
    throw std::runtime_error("missing logical " + name);
}

std::vector<Index> x_support(const StabilizerCode& c, const std::string& name) {
    for (const auto& l : c.named_logicals()) {
        if (l.name == name) return l.op.x_part;
    }
    throw std::runtime_error("missing logical " + name);
}

TEST(PlanTest, TriangleBridgeUsesThreeEdges) {
    auto gl = triangle();
    auto gr = triangle();
    auto plan = plan_adapter(gl, {0, 1, 2}, gr, {0, 1, 2});
    EXPECT_EQ(plan.bridge.size(), 3u);
    EXPECT_EQ(plan.left_ports, (std::vector<Index>{0, 1, 2}));
    EXPECT_EQ(plan.t_left.n_rows(), 3u);
    EXPECT_EQ(plan.t_left.n_cols(), 3u);
    EXPECT_EQ(plan.p_left.n_rows(), 3u);
    auto check = cyclic_repetition_check(3);
    EXPECT_EQ(multiply(multiply(plan.t_left, incidence_matrix(gl)), plan.p_left), check);
    EXPECT_EQ(multiply(multiply(plan.t_right, incidence_matrix(gr)), plan.p_right), check);
    std::vector<Index> lefts, rights;
    for (auto [lv, rv] : plan.bridge) {
        lefts.push_back(lv);
        rights.push_back(rv);
    }
    std::sort(lefts.begin(), lefts.end());
    std::sort(rights.begin(), rights.end());
    EXPECT_EQ(lefts, (std::vector<Index>{0, 1, 2}));
    EXPECT_EQ(rights, (std::vector<Index>{0, 1, 2}));
}

TEST(PlanTest, SubsetPortsEmbedIntoHostCoordinates) {
    // Path 0-1-2 with a triangle 2-3-4 hanging off the end.
    Graph g(5);
    g.add_edge(0, 1);
    g.add_edge(1, 2);
    g.add_edge(2, 3);
    g.add_edge(3, 4);
    g.add_edge(2, 4);
    auto plan = plan_adapter(g, {2, 3, 4}, triangle(), {0, 1, 2});
    EXPECT_EQ(plan.bridge.size(), 3u);
    EXPECT_EQ(plan.t_left.n_cols(), 5u);
    for (std::size_t r = 0; r < plan.t_left.n_rows(); ++r) {
        for (Index c : plan.t_left.row(r)) EXPECT_GE(c, 2u);
    }
    for (std::size_t v = 0; v < 2; ++v) EXPECT_TRUE(plan.p_left.row(v).empty());
    auto check = cyclic_repetition_check(3);
    EXPECT_EQ(multiply(multiply(plan.t_left, incidence_matrix(g)), plan.p_left), check);
}

TEST(PlanTest, RejectsBadSubsets) {
    auto g = triangle();
    EXPECT_THROW(plan_adapter(g, {0, 1}, g, {0, 1, 2}), std::invalid_argument);
    EXPECT_THROW(plan_adapter(g, {0}, g, {1}), std::invalid_argument);
    EXPECT_THROW(plan_adapter(g, {0, 3}, g, {0, 1}), std::invalid_argument);
    Graph path(4);
    path.add_edge(0, 1);
    path.add_edge(1, 2);
    path.add_edge(2, 3);
    EXPECT_THROW(plan_adapter(path, {0, 3}, path, {0, 1}), std::invalid_argument);
}

TEST(JoinTest, TwoTrianglesJoinCleanly) {
    auto gl = triangle();
    auto gr = triangle();
    auto bl = tree_basis(gl);
    auto br = tree_basis(gr);
    auto plan = plan_adapter(gl, {0, 1, 2}, gr, {0, 1, 2});
    auto joined = join(gl, bl, gr, br, plan);
    EXPECT_EQ(joined.graph.n_vertices(), 6u);
    EXPECT_EQ(joined.graph.n_edges(), 9u);
    EXPECT_EQ(joined.left_edges, 3u);
    EXPECT_EQ(joined.bridge_edges, 3u);
    EXPECT_EQ(joined.basis.cycles.n_rows(), 5u);
    EXPECT_EQ(rank(joined.basis.cycles), 4u);
    EXPECT_TRUE(multiply(joined.basis.cycles, incidence_matrix(joined.graph)).is_zero());
    for (std::size_t i = 0; i < 3; ++i) {
        auto [lv, rv] = plan.bridge[i];
        auto [u, v] = joined.graph.edge(3 + i);
        EXPECT_EQ(u, std::min<Index>(lv, rv + 3));
        EXPECT_EQ(v, std::max<Index>(lv, rv + 3));
    }
}

TEST(JoinTest, LadderRowsCarryConsecutiveBridges) {
    auto gl = triangle();
    auto gr = triangle();
    auto plan = plan_adapter(gl, {0, 1, 2}, gr, {0, 1, 2});
    auto joined = join(gl, tree_basis(gl), gr, tree_basis(gr), plan);
    std::size_t first_ladder = tree_basis(gl).cycles.n_rows();
    for (std::size_t i = 0; i < 3; ++i) {
        auto row = joined.basis.cycles.row(first_ladder + i);
        EXPECT_TRUE(std::binary_search(row.begin(), row.end(), static_cast<Index>(3 + i)));
        EXPECT_TRUE(
            std::binary_search(row.begin(), row.end(), static_cast<Index>(3 + (i + 1) % 3)));
        for (Index c : row) {
            bool left_part = c < 3;
            bool bridge_part = c >= 3 && c < 6;
            bool right_part = c >= 6;
            EXPECT_TRUE(left_part || bridge_part || right_part);
            if (left_part) {
                EXPECT_TRUE(std::binary_search(plan.t_left.row(i).begin(),
                                               plan.t_left.row(i).end(), c));
            }
            if (right_part) {
                EXPECT_TRUE(std::binary_search(plan.t_right.row(i).begin(),
                                               plan.t_right.row(i).end(),
                                               static_cast<Index>(c - 6)));
            }
        }
    }
}

TEST(JoinTest, ProfileStaysWithinTheSparsityBudget) {
    auto gl = complete_graph(4);
    auto gr = complete_graph(4);
    auto bl = tree_basis(gl);
    auto br = tree_basis(gr);
    auto in_l = bl.profile();
    auto in_r = br.profile();
    auto plan = plan_adapter(gl, {0, 1, 2, 3}, gr, {0, 1, 2, 3});
    auto joined = join(gl, bl, gr, br, plan);
    auto out = joined.basis.profile();
    std::size_t gamma = std::max(in_l.max_row_weight, in_r.max_row_weight);
    std::size_t delta = std::max(in_l.max_col_weight, in_r.max_col_weight);
    EXPECT_LE(out.max_row_weight, std::max<std::size_t>(gamma, 8));
    EXPECT_LE(out.max_col_weight, delta + 2);
}

TEST(JoinTest, JoinedExpansionStaysAboveOne) {
    auto gl = complete_graph(4);
    auto gr = complete_graph(4);
    ExpansionQuery side{{0, 1, 2, 3}, 3, Beta{1}};
    ASSERT_TRUE(certify_at_least(gl, side).ok);
    ASSERT_TRUE(certify_at_least(gr, side).ok);
    auto plan = plan_adapter(gl, {0, 1, 2, 3}, gr, {0, 1, 2, 3});
    auto joined = join(gl, tree_basis(gl), gr, tree_basis(gr), plan);
    ExpansionQuery q{{0, 1, 2, 3, 4, 5, 6, 7}, 3, Beta{1}};
    EXPECT_TRUE(certify_at_least(joined.graph, q).ok);
}

TEST(IrreducibleTest, ScanFindsTheSmallestLexFirstSubset) {
    auto c = six_two_two();
    auto sub = find_irreducible_subsupport(c, {0, 1, 4, 5});
    EXPECT_EQ(sub, (std::vector<Index>{0, 1}));
}

TEST(IrreducibleTest, DescentHandlesSupportsBeyondTheScanCap) {
    auto c = six_two_two();
    auto sub = find_irreducible_subsupport(c, {0, 1, 4, 5}, 2);
    EXPECT_EQ(sub.size(), 2u);
    EXPECT_TRUE(sub == (std::vector<Index>{0, 1}) || sub == (std::vector<Index>{4, 5}));
}

TEST(IrreducibleTest, RejectsTrivialSupports) {
    auto c = six_two_two();
    EXPECT_THROW(find_irreducible_subsupport(c, {0, 1, 2, 3, 4, 5}), std::invalid_argument);
    EXPECT_THROW(find_irreducible_subsupport(c, {}), std::invalid_argument);
}

TEST(AugmentTest, ScatteredPortsGainADirectEdge) {
    auto c = six_two_two();
    MeasurementLeg leg;
    leg.support = {0, 1};
    leg.aux = Graph(3);
    leg.aux.add_edge(0, 2);
    leg.aux.add_edge(1, 2);
    leg.port.n_qubits = 6;
    leg.port.n_vertices = 3;
    leg.port.sets = {{0}, {1}, {}, {}, {}, {}};
    leg.basis = tree_basis(leg.aux);
    auto con = connect_leg_ports(c, leg, {0, 1});
    EXPECT_EQ(con.sub_ports, (std::vector<Index>{0, 1}));
    EXPECT_EQ(con.edges_added, 1u);
    EXPECT_EQ(leg.aux.n_edges(), 3u);
    EXPECT_EQ(leg.aux.edge(2), (std::pair<Index, Index>{0, 1}));
    ASSERT_EQ(leg.basis.cycles.n_rows(), 1u);
    EXPECT_EQ(leg.basis.cycles.row(0), (std::vector<Index>{0, 1, 2}));
}

TEST(AugmentTest, AlreadyAdjacentPortsAreLeftAlone) {
    auto c = six_two_two();
    MeasurementLeg leg;
    leg.support = {0, 1};
    leg.aux = Graph(2);
    leg.aux.add_edge(0, 1);
    leg.port.n_qubits = 6;
    leg.port.n_vertices = 2;
    leg.port.sets = {{0}, {1}, {}, {}, {}, {}};
    leg.basis = tree_basis(leg.aux);
    auto con = connect_leg_ports(c, leg, {0, 1});
    EXPECT_EQ(con.edges_added, 0u);
    EXPECT_EQ(leg.aux.n_edges(), 1u);
}

// Two disjoint logicals of one code, each with its own graph; the joint
// surgery must add exactly the product to the stabilizer.
TEST(JointTest, TwoLegsOnOneHostMeasureTheProductOnly) {
    auto c = six_two_two();
    auto make_leg = [&](std::vector<Index> support) {
        auto aux = build_aux_graph(c, support, AuxOptions{});
        MeasurementLeg leg;
        leg.support = std::move(support);
        leg.aux = aux.graph;
        leg.port = aux.port;
        leg.basis = aux.basis;
        return leg;
    };
    auto jm = joint_measurement(c, {make_leg({0, 1}), make_leg({4, 5})});
    EXPECT_EQ(jm.sub_supports[0], (std::vector<Index>{0, 1}));
    EXPECT_EQ(jm.adapters.size(), 1u);
    EXPECT_EQ(jm.adapters[0].bridge.size(), 2u);
    EXPECT_EQ(jm.vertex_offsets, (std::vector<std::size_t>{0, 2}));
    EXPECT_EQ(jm.code.port.measured_support(), (std::vector<Index>{0, 1, 4, 5}));

    const auto& dc = jm.code;
    EXPECT_EQ(logical_qubit_count(dc.assembled),
              logical_qubit_count(c) - 1);
    std::vector<Index> product{0, 1, 4, 5};
    std::vector<Index> cols;
    std::size_t n2 = dc.assembled.n_qubits();
    for (Index q : product) cols.push_back(q + static_cast<Index>(n2));
    EXPECT_TRUE(in_row_space(dc.assembled.checks(), cols));
    for (auto single : {std::vector<Index>{0, 1}, std::vector<Index>{4, 5}}) {
        std::vector<Index> c1;
        for (Index q : single) c1.push_back(q + static_cast<Index>(n2));
        EXPECT_FALSE(in_row_space(dc.assembled.checks(), c1));
    }
    auto rep = verify_codespace(dc);
    EXPECT_TRUE(rep.pass());
}

TEST(JointTest, SingleLegDegeneratesToThePlainSurgery) {
    auto c = six_two_two();
    auto aux = build_aux_graph(c, {0, 1}, AuxOptions{});
    MeasurementLeg leg{{0, 1}, aux.graph, aux.port, aux.basis};
    auto jm = joint_measurement(c, {leg});
    auto plain = assemble_deformed(c, aux.graph, aux.port, aux.basis);
    EXPECT_EQ(jm.code.assembled, plain.assembled);
    EXPECT_TRUE(jm.adapters.empty());
}

TEST(JointTest, SeparateTorusBlocksKeepOnlyTheProduct) {
    auto make_block = [&]() {
        auto c = fixtures::toric(2);
        auto support = z_support(c, "Z1");
        auto aux = build_aux_graph(c, support, AuxOptions{});
        return JointBlock{c, support, aux.graph, aux.port, aux.basis};
    };
    auto jm = joint_measurement({make_block(), make_block()});
    const auto& dc = jm.code;
    EXPECT_EQ(dc.base.n_qubits(), 16u);
    EXPECT_EQ(logical_qubit_count(dc.base), 4u);
    EXPECT_EQ(logical_qubit_count(dc.assembled), 3u);
    EXPECT_EQ(dc.port.measured_support(), (std::vector<Index>{0, 1, 8, 9}));

    std::size_t n2 = dc.assembled.n_qubits();
    auto z_cols = [&](std::vector<Index> qs) {
        for (auto& q : qs) q += static_cast<Index>(n2);
        return qs;
    };
    EXPECT_TRUE(in_row_space(dc.assembled.checks(), z_cols({0, 1, 8, 9})));
    EXPECT_FALSE(in_row_space(dc.assembled.checks(), z_cols({0, 1})));
    EXPECT_FALSE(in_row_space(dc.assembled.checks(), z_cols({8, 9})));

    auto rep = verify_distance(dc);
    EXPECT_TRUE(rep.pass);
    ASSERT_TRUE(rep.deformed.distance.has_value());
    EXPECT_GE(*rep.deformed.distance, 2u);
}

TEST(JointTest, ThreeBlockChainMeasuresTheTripleProduct) {
    auto make_block = [&]() {
        auto c = repetition_code(3);
        std::vector<Index> support{0, 1, 2};
        auto aux = build_aux_graph(c, support, AuxOptions{});
        return JointBlock{c, support, aux.graph, aux.port, aux.basis};
    };
    auto jm = joint_measurement({make_block(), make_block(), make_block()});
    EXPECT_EQ(jm.adapters.size(), 2u);
    EXPECT_EQ(jm.adapters[0].bridge.size(), 3u);
    EXPECT_EQ(jm.vertex_offsets, (std::vector<std::size_t>{0, 3, 6}));

    const auto& dc = jm.code;
    EXPECT_EQ(logical_qubit_count(dc.base), 3u);
    EXPECT_EQ(logical_qubit_count(dc.assembled), 2u);
    std::size_t n2 = dc.assembled.n_qubits();
    auto z_cols = [&](std::vector<Index> qs) {
        for (auto& q : qs) q += static_cast<Index>(n2);
        return qs;
    };
    EXPECT_TRUE(in_row_space(dc.assembled.checks(), z_cols({0, 1, 2, 3, 4, 5, 6, 7, 8})));
    EXPECT_FALSE(in_row_space(dc.assembled.checks(), z_cols({0, 1, 2})));
    EXPECT_FALSE(in_row_space(dc.assembled.checks(), z_cols({0, 1, 2, 3, 4, 5})));
    EXPECT_TRUE(verify_codespace(dc).pass());
}

TEST(JointTest, OverlapBoundIsEnforced) {
    auto c = six_two_two();
    auto aux = build_aux_graph(c, {0, 1}, AuxOptions{});
    MeasurementLeg leg{{0, 1}, aux.graph, aux.port, aux.basis};
    JointOptions opts;
    opts.max_overlap = 1;
    try {
        joint_measurement(c, {leg, leg}, opts);
        FAIL() << "expected a rejection";
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("qubit 0"), std::string::npos);
    }
}

TEST(JointTest, RejectsInconsistentLegs) {
    auto c = six_two_two();
    auto aux = build_aux_graph(c, {0, 1}, AuxOptions{});
    MeasurementLeg good{{0, 1}, aux.graph, aux.port, aux.basis};
    auto bad_support = good;
    bad_support.support = {0, 1, 2};  // parity no longer matches the port map
    EXPECT_THROW(joint_measurement(c, {bad_support}), std::invalid_argument);
    auto bad_port = good;
    bad_port.port.n_qubits = 5;
    EXPECT_THROW(joint_measurement(c, {bad_port}), std::invalid_argument);
    EXPECT_THROW(joint_measurement(c, {}), std::invalid_argument);
}

TEST(ExpansionlessTest, EqualWeightTorusPairKeepsTheDistance) {
    auto left = fixtures::toric(2);
    auto right = fixtures::toric(2);
    ExpansionlessRequest req;
    req.left_z = z_support(left, "Z1");
    req.right_z = z_support(right, "Z1");
    auto out = expansionless_joint(left, right, req);
    EXPECT_FALSE(out.swapped);
    EXPECT_EQ(out.claimed_distance, 2u);
    EXPECT_EQ(out.z_stage.aux.n_vertices(), 2u);
    EXPECT_EQ(out.z_stage.port.measured_support(), (std::vector<Index>{0, 1, 8, 9}));
    auto own = out.z_stage.port.owners();
    EXPECT_EQ(own[0], (std::vector<Index>{0, 8}));
    EXPECT_EQ(own[1], (std::vector<Index>{1, 9}));
    EXPECT_TRUE(verify_codespace(out.z_stage).pass());
    auto rep = verify_distance(out.z_stage);
    EXPECT_TRUE(rep.pass);
    ASSERT_TRUE(rep.deformed.distance.has_value());
    EXPECT_GE(*rep.deformed.distance, 2u);
}

TEST(ExpansionlessTest, HeavierSideScreensTheLighterOne) {
    auto left = fixtures::toric(3);
    auto right = fixtures::toric(2);
    ExpansionlessRequest req;
    req.left_z = z_support(left, "Z1");
    req.right_z = z_support(right, "Z1");
    auto out = expansionless_joint(left, right, req);
    EXPECT_FALSE(out.swapped);
    EXPECT_EQ(out.claimed_distance, 2u);
    EXPECT_EQ(out.z_stage.aux.n_vertices(), 3u);
    EXPECT_TRUE(verify_codespace(out.z_stage).pass());
    auto rep = verify_distance(out.z_stage);
    EXPECT_TRUE(rep.pass);
    ASSERT_TRUE(rep.deformed.distance.has_value());
    EXPECT_GE(*rep.deformed.distance, 2u);
}

TEST(ExpansionlessTest, SwapPutsTheHeavierBlockFirst) {
    auto left = fixtures::toric(2);
    auto right = fixtures::toric(3);
    ExpansionlessRequest req;
    req.left_z = z_support(left, "Z1");
    req.right_z = z_support(right, "Z1");
    auto out = expansionless_joint(left, right, req);
    EXPECT_TRUE(out.swapped);
    EXPECT_EQ(out.combined.n_qubits(), 26u);
    EXPECT_EQ(out.z_stage.aux.n_vertices(), 3u);
    // The bigger block now sits first, so its support keeps low indices.
    EXPECT_EQ(out.z_stage.port.measured_support(), (std::vector<Index>{0, 1, 2, 18, 19}));
    EXPECT_EQ(out.claimed_distance, 2u);
    EXPECT_TRUE(verify_codespace(out.z_stage).pass());
}

TEST(ExpansionlessTest, RejectsANonMinimumHeavySupport) {
    auto left = fixtures::toric(2);
    auto right = fixtures::toric(2);
    ExpansionlessRequest req;
    // A weight-4 representative of the same logical class.
    req.left_z = {1, 2, 4, 5};
    req.right_z = z_support(right, "Z1");
    try {
        expansionless_joint(left, right, req);
        FAIL() << "expected a rejection";
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("minimum weight"), std::string::npos);
    }
}

TEST(ExpansionlessTest, RejectsBrokenSupports) {
    auto left = fixtures::toric(2);
    auto right = fixtures::toric(2);
    ExpansionlessRequest anti;
    anti.left_z = {0};
    anti.right_z = z_support(right, "Z1");
    EXPECT_THROW(expansionless_joint(left, right, anti), std::invalid_argument);
    ExpansionlessRequest trivial;
    trivial.left_z = {0, 2, 4, 5};  // a Z check row of the torus
    trivial.right_z = z_support(right, "Z1");
    EXPECT_THROW(expansionless_joint(left, right, trivial), std::invalid_argument);
}

TEST(ExpansionlessTest, DualPairJoinMeasuresBothProducts) {
    auto left = fixtures::toric(2);
    auto right = six_two_two();
    ExpansionlessRequest req;
    req.pairing = PairingMode::dual_zx;
    req.left_z = z_support(left, "Z1");
    req.left_x = x_support(left, "X2");
    req.left_x_partner = make_pauli(x_support(left, "X1"), {});
    req.left_z_partner = make_pauli({}, z_support(left, "Z2"));
    req.right_z = {0, 1};
    req.right_x = {2, 4};
    auto out = expansionless_joint(left, right, req);
    EXPECT_EQ(out.claimed_distance, 2u);
    ASSERT_TRUE(out.x_stage.has_value());
    EXPECT_EQ(out.combined.n_qubits(), 14u);
    EXPECT_EQ(logical_qubit_count(out.combined), 4u);
    EXPECT_EQ(logical_qubit_count(out.z_stage.assembled), 3u);
    EXPECT_EQ(logical_qubit_count(out.final_code), 2u);

    std::size_t n2 = out.final_code.n_qubits();
    auto z_cols = [&](std::vector<Index> qs) {
        for (auto& q : qs) q += static_cast<Index>(n2);
        return qs;
    };
    EXPECT_TRUE(in_row_space(out.final_code.checks(), z_cols({0, 1, 8, 9})));
    EXPECT_TRUE(in_row_space(out.final_code.checks(), std::vector<Index>{4, 5, 10, 12}));
    EXPECT_FALSE(in_row_space(out.final_code.checks(), z_cols({0, 1})));
    EXPECT_FALSE(in_row_space(out.final_code.checks(), std::vector<Index>{4, 5}));

    auto mode = DistanceMode::exhaustive();
    auto rep = distance(out.final_code, mode);
    ASSERT_TRUE(rep.distance.has_value());
    EXPECT_GE(*rep.distance, 2u);
}

TEST(ExpansionlessTest, DualModeRejectsACompressiblePair) {
    auto left = six_two_two();
    auto right = fixtures::toric(2);
    ExpansionlessRequest req;
    req.pairing = PairingMode::dual_zx;
    req.left_z = {0, 1};
    req.left_x = {2, 4};
    req.left_x_partner = make_pauli({0, 2}, {});
    req.left_z_partner = make_pauli({}, {4, 5});
    req.right_z = z_support(right, "Z1");
    req.right_x = x_support(right, "X2");
    try {
        expansionless_joint(left, right, req);
        FAIL() << "expected a rejection";
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("compresses"), std::string::npos);
    }
}

}  // namespace
}  // namespace qdeform
