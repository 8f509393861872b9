#include <qdeform/surgery.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "fixtures.hpp"

namespace qdeform {
namespace {

// hx pairs {01}{23}{45}, hz the full Z row: k = 2, d = 2, and Z0Z1Z2Z3 is a
// measurable logical whose check overlaps sit on two separate pairs.
StabilizerCode six_two_two() {
    auto hx = SparseBitMatrix::from_rows(3, 6, {{0, 1}, {2, 3}, {4, 5}});
    auto hz = SparseBitMatrix::from_rows(1, 6, {{0, 1, 2, 3, 4, 5}});
    return css_code(std::move(hx), std::move(hz));
}

// Cyclic XZZXI rows; k = 1 and the all-ones Z operator is the bare logical.
StabilizerCode five_qubit() {
    std::vector<std::vector<Index>> rows;
    for (Index r = 0; r < 4; ++r) {
        std::vector<Index> row{static_cast<Index>(r), static_cast<Index>((r + 3) % 5),
                               static_cast<Index>(5 + (r + 1) % 5),
                               static_cast<Index>(5 + (r + 2) % 5)};
        std::sort(row.begin(), row.end());
        rows.push_back(std::move(row));
    }
    return StabilizerCode::from_checks(5, SparseBitMatrix::from_rows(4, 10, std::move(rows)));
}

CycleBasis tree_basis(const Graph& g) {
    return fundamental_cycle_basis(g, spanning_tree(g, 0));
}

AuxOptions aux_opts(AuxOptions::Expansion mode) {
    AuxOptions opts;
    opts.expansion = mode;
    return opts;
}

TEST(PortMapTest, SingletonPortsExposeSupportImageAndOwners) {
    auto pm = singleton_ports(6, {0, 1, 3});
    EXPECT_EQ(pm.n_vertices, 3u);
    EXPECT_EQ(pm.measured_support(), (std::vector<Index>{0, 1, 3}));
    EXPECT_EQ(pm.image(), (std::vector<Index>{0, 1, 2}));
    auto own = pm.owners();
    ASSERT_EQ(own.size(), 3u);
    EXPECT_EQ(own[0], (std::vector<Index>{0}));
    EXPECT_EQ(own[1], (std::vector<Index>{1}));
    EXPECT_EQ(own[2], (std::vector<Index>{3}));
    auto f = port_matrix(pm);
    EXPECT_EQ(f.n_rows(), 6u);
    EXPECT_EQ(f.n_cols(), 3u);
    EXPECT_EQ(f.row(3), (std::vector<Index>{2}));
    EXPECT_TRUE(f.row(2).empty());
}

TEST(PortMapTest, ValidationRejectsBrokenMaps) {
    PortMap pm;
    pm.n_qubits = 2;
    pm.n_vertices = 2;
    pm.sets = {{0}, {0}};
    EXPECT_THROW(validate_port_map(pm), std::invalid_argument);
    pm.sets = {{1, 0}, {}};
    EXPECT_THROW(validate_port_map(pm), std::invalid_argument);
    pm.sets = {{5}, {}};
    EXPECT_THROW(validate_port_map(pm), std::invalid_argument);
    pm.sets = {{0}};
    EXPECT_THROW(validate_port_map(pm), std::invalid_argument);
}

TEST(MatchPortsTest, PairsEndpointsAlongShortestPaths) {
    Graph g(4);
    g.add_edge(0, 1);
    g.add_edge(1, 2);
    g.add_edge(2, 3);
    EXPECT_EQ(match_ports(g, {0, 3}), (std::vector<Index>{0, 1, 2}));
    EXPECT_EQ(match_ports(g, {0, 1, 2, 3}), (std::vector<Index>{0, 2}));
}

TEST(MatchPortsTest, TieBreaksOnVertexIndexAndRejectsBadInputs) {
    Graph star(5);
    star.add_edge(0, 4);
    star.add_edge(0, 2);
    star.add_edge(0, 1);
    star.add_edge(0, 3);
    // Leaves 2, 3, 4 all sit at distance two from leaf 1; the lowest wins.
    auto mu = match_ports(star, {1, 2, 3, 4});
    EXPECT_EQ(mu, (std::vector<Index>{0, 1, 2, 3}));

    Graph split(4);
    split.add_edge(0, 1);
    split.add_edge(2, 3);
    EXPECT_THROW(match_ports(split, {0, 2}), std::invalid_argument);
    EXPECT_THROW(match_ports(split, {0, 1, 2}), std::invalid_argument);
}

TEST(MatchPortsTest, MatchingBoundaryIsExactlyThePortSet) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        std::size_t n = 3 + rng() % 8;
        Graph g(n);
        for (std::size_t v = 1; v < n; ++v) {
            g.add_edge(static_cast<Index>(rng() % v), static_cast<Index>(v));
        }
        std::size_t extra = rng() % 4;
        for (std::size_t i = 0; i < extra; ++i) {
            Index u = static_cast<Index>(rng() % n);
            Index v = static_cast<Index>(rng() % n);
            if (u != v) g.add_edge(u, v);
        }
        std::vector<Index> ports;
        for (std::size_t v = 0; v < n; ++v) {
            if (rng() % 2) ports.push_back(static_cast<Index>(v));
        }
        if (ports.size() % 2 != 0) ports.pop_back();
        auto mu = match_ports(g, ports);
        std::vector<std::size_t> deg(n, 0);
        for (Index e : mu) {
            auto [u, v] = g.edge(e);
            ++deg[u];
            ++deg[v];
        }
        std::set<Index> port_set(ports.begin(), ports.end());
        for (std::size_t v = 0; v < n; ++v) {
            EXPECT_EQ(deg[v] % 2 == 1, port_set.count(static_cast<Index>(v)) == 1)
                << "trial " << trial << " vertex " << v;
        }
    }
}

TEST(BuildAuxTest, SmallTorusPortGivesDoubledEdge) {
    auto c = fixtures::toric(2);
    auto aux = build_aux_graph(c, {0, 1});
    EXPECT_EQ(aux.graph.n_vertices(), 2u);
    ASSERT_EQ(aux.graph.n_edges(), 2u);
    EXPECT_EQ(aux.graph.edge(0), std::make_pair(Index{0}, Index{1}));
    EXPECT_EQ(aux.graph.edge(1), std::make_pair(Index{0}, Index{1}));
    ASSERT_EQ(aux.basis.cycles.n_rows(), 1u);
    EXPECT_EQ(aux.basis.cycles.row(0), (std::vector<Index>{0, 1}));
    EXPECT_EQ(aux.port.measured_support(), (std::vector<Index>{0, 1}));
    bool logged = false;
    for (const auto& line : aux.log) {
        if (line.find("threshold 1") != std::string::npos) logged = true;
    }
    EXPECT_TRUE(logged);
}

TEST(BuildAuxTest, LargerTorusPortGivesTriangle) {
    auto c = fixtures::toric(3);
    auto aux = build_aux_graph(c, {0, 1, 2});
    EXPECT_EQ(aux.graph.n_vertices(), 3u);
    ASSERT_EQ(aux.graph.n_edges(), 3u);
    EXPECT_EQ(aux.graph.edge(0), std::make_pair(Index{0}, Index{1}));
    EXPECT_EQ(aux.graph.edge(1), std::make_pair(Index{1}, Index{2}));
    EXPECT_EQ(aux.graph.edge(2), std::make_pair(Index{0}, Index{2}));
    ASSERT_EQ(aux.basis.cycles.n_rows(), 1u);
    EXPECT_EQ(aux.basis.cycles.row(0).size(), 3u);
}

TEST(BuildAuxTest, DisconnectedOverlapsAreChainedTogether) {
    auto aux = build_aux_graph(six_two_two(), {0, 1, 2, 3},
                               aux_opts(AuxOptions::Expansion::none));
    EXPECT_EQ(aux.graph.n_vertices(), 4u);
    ASSERT_EQ(aux.graph.n_edges(), 3u);
    EXPECT_EQ(aux.graph.edge(0), std::make_pair(Index{0}, Index{1}));
    EXPECT_EQ(aux.graph.edge(1), std::make_pair(Index{2}, Index{3}));
    EXPECT_EQ(aux.graph.edge(2), std::make_pair(Index{0}, Index{2}));
    EXPECT_TRUE(is_connected(aux.graph));
    EXPECT_EQ(aux.basis.cycles.n_rows(), 0u);
    bool joined = false;
    for (const auto& line : aux.log) {
        if (line.find("joined 2 components") != std::string::npos) joined = true;
    }
    EXPECT_TRUE(joined);
}

TEST(BuildAuxTest, EdgeModeRepairsAPoorExpander) {
    auto aux = build_aux_graph(six_two_two(), {0, 1, 2, 3},
                               aux_opts(AuxOptions::Expansion::edges));
    auto check = certify_at_least(aux.graph, ExpansionQuery{aux.port.image(), 4, Beta(1)});
    EXPECT_TRUE(check.ok);
    EXPECT_GT(aux.graph.n_edges(), 3u);
}

TEST(BuildAuxTest, ThickenModeLiftsAHalfExpanderToTwoLayers) {
    auto aux = build_aux_graph(six_two_two(), {0, 1, 2, 3},
                               aux_opts(AuxOptions::Expansion::thicken));
    EXPECT_EQ(aux.graph.n_vertices(), 8u);
    EXPECT_EQ(aux.graph.n_edges(), 10u);
    // Ports keep their layer 0 indices.
    EXPECT_EQ(aux.port.image(), (std::vector<Index>{0, 1, 2, 3}));
    EXPECT_EQ(aux.port.n_vertices, 8u);
    // Rung squares only: the base graph is a tree.
    EXPECT_EQ(aux.basis.cycles.n_rows(), 3u);
    EXPECT_EQ(aux.basis.profile().max_row_weight, 4u);
    bool logged = false;
    for (const auto& line : aux.log) {
        if (line.find("thickening to 2 layers") != std::string::npos) logged = true;
    }
    EXPECT_TRUE(logged);
    auto check = certify_at_least(aux.graph, ExpansionQuery{aux.port.image(), 2, Beta(1)});
    EXPECT_TRUE(check.ok);
}

TEST(BuildAuxTest, LayerOverrideForcesTheDepth) {
    auto opts = aux_opts(AuxOptions::Expansion::thicken);
    opts.layer_override = 3;
    auto aux = build_aux_graph(six_two_two(), {0, 1, 2, 3}, opts);
    EXPECT_EQ(aux.graph.n_vertices(), 12u);
    EXPECT_EQ(aux.basis.cycles.n_rows(), 6u);
}

TEST(BuildAuxTest, RejectsUnmeasurableInputs) {
    auto c = fixtures::toric(2);
    EXPECT_THROW(build_aux_graph(c, {0}), std::invalid_argument);
    std::vector<Index> stab(c.hz().row(0).begin(), c.hz().row(0).end());
    EXPECT_THROW(build_aux_graph(c, stab), std::invalid_argument);
    EXPECT_THROW(build_aux_graph(c, {0, 0}), std::invalid_argument);
    EXPECT_THROW(build_aux_graph(c, {0, 99}), std::invalid_argument);
}

TEST(AssembleTest, SmallTorusMeasurementChecksOut) {
    auto c = fixtures::toric(2);
    auto aux = build_aux_graph(c, {0, 1});
    auto dc = assemble_deformed(c, aux.graph, aux.port, aux.basis);
    EXPECT_EQ(dc.assembled.n_qubits(), 10u);
    EXPECT_TRUE(dc.assembled.is_css());

    ASSERT_EQ(dc.matchings.size(), 8u);
    EXPECT_EQ(dc.matchings[0], (std::vector<Index>{0}));
    EXPECT_EQ(dc.matchings[1], (std::vector<Index>{0}));
    for (std::size_t r = 2; r < 8; ++r) EXPECT_TRUE(dc.matchings[r].empty());

    EXPECT_EQ(dc.blocks.G.n_rows(), 2u);
    EXPECT_EQ(dc.blocks.G.n_cols(), 2u);
    EXPECT_EQ(dc.blocks.N.n_rows(), 1u);
    EXPECT_EQ(dc.blocks.M.n_rows(), 8u);
    EXPECT_EQ(dc.blocks.M.row(0), (std::vector<Index>{0}));
    EXPECT_EQ(dc.blocks.F.n_rows(), 8u);
    EXPECT_EQ(dc.blocks.F.row(0), (std::vector<Index>{0}));
    EXPECT_EQ(dc.blocks.F.row(1), (std::vector<Index>{1}));

    auto cs = verify_codespace(dc);
    EXPECT_EQ(cs.k_base, 2u);
    EXPECT_EQ(cs.k_deformed, 1u);
    EXPECT_TRUE(cs.k_dropped_by_one);
    EXPECT_TRUE(cs.measured_in_stabilizer);
    EXPECT_TRUE(cs.checks_commute);
    EXPECT_TRUE(cs.pass());

    auto dist = verify_distance(dc);
    EXPECT_EQ(dist.base_distance, 2u);
    EXPECT_FALSE(dist.weight_bounded_substituted);
    EXPECT_TRUE(dist.pass);
    ASSERT_TRUE(dist.deformed.distance.has_value());
    EXPECT_GE(*dist.deformed.distance, 2u);
}

TEST(AssembleTest, VertexChecksMultiplyToTheMeasuredOperator) {
    for (std::size_t d : {2u, 3u}) {
        auto c = fixtures::toric(d);
        std::vector<Index> support;
        for (std::size_t j = 0; j < d; ++j) support.push_back(static_cast<Index>(j));
        auto aux = build_aux_graph(c, support);
        auto dc = assemble_deformed(c, aux.graph, aux.port, aux.basis);
        std::size_t n_base_hz = c.hz().n_rows();
        std::vector<Index> acc;
        for (std::size_t v = 0; v < dc.aux.n_vertices(); ++v) {
            acc = detail::symmetric_difference(acc, dc.assembled.hz().row(n_base_hz + v));
        }
        EXPECT_EQ(acc, support) << "d = " << d;
    }
}

TEST(AssembleTest, LargerTorusDistanceSurvivesExhaustively) {
    auto c = fixtures::toric(3);
    auto aux = build_aux_graph(c, {0, 1, 2});
    auto dc = assemble_deformed(c, aux.graph, aux.port, aux.basis);
    auto cs = verify_codespace(dc);
    EXPECT_TRUE(cs.pass());
    auto dist = verify_distance(dc);
    EXPECT_EQ(dist.base_distance, 3u);
    EXPECT_FALSE(dist.weight_bounded_substituted);
    EXPECT_TRUE(dist.pass);
    ASSERT_TRUE(dist.deformed.distance.has_value());
    EXPECT_GE(*dist.deformed.distance, 3u);
}

TEST(AssembleTest, TightBudgetFallsBackToWeightBoundedCertificate) {
    auto c = fixtures::toric(3);
    auto aux = build_aux_graph(c, {0, 1, 2});
    auto dc = assemble_deformed(c, aux.graph, aux.port, aux.basis);
    auto dist = verify_distance(dc, 4000);
    EXPECT_EQ(dist.base_distance, 3u);
    EXPECT_TRUE(dist.weight_bounded_substituted);
    EXPECT_FALSE(dist.deformed.distance.has_value());
    EXPECT_EQ(dist.deformed.lower_bound, 3u);
    EXPECT_TRUE(dist.pass);
}

TEST(AssembleTest, TreeShapedAuxGraphDropsTheDistance) {
    auto c = six_two_two();
    auto aux = build_aux_graph(c, {0, 1, 2, 3},
                               aux_opts(AuxOptions::Expansion::none));
    auto dc = assemble_deformed(c, aux.graph, aux.port, aux.basis);
    EXPECT_TRUE(verify_codespace(dc).pass());

    auto rep = desiderata_report(dc, 2);
    ASSERT_TRUE(rep.expansion_certified.has_value());
    EXPECT_FALSE(*rep.expansion_certified);
    EXPECT_FALSE(rep.expansion_witness.empty());

    auto dist = verify_distance(dc);
    EXPECT_EQ(dist.base_distance, 2u);
    EXPECT_FALSE(dist.pass);
    ASSERT_TRUE(dist.deformed.distance.has_value());
    EXPECT_EQ(*dist.deformed.distance, 1u);
    ASSERT_TRUE(dist.deformed.witness.has_value());
    EXPECT_EQ(weight(*dist.deformed.witness), 1u);
    // The weight-1 operator lives on an edge no cycle and no matching covers.
    EXPECT_TRUE(dist.deformed.witness->x_part.empty());
    EXPECT_GE(dist.deformed.witness->z_part[0], 6u);
}

TEST(AssembleTest, OneExtraEdgeRestoresTheDistance) {
    auto c = six_two_two();
    Graph g(4);
    g.add_edge(0, 1);
    g.add_edge(2, 3);
    g.add_edge(0, 2);
    g.add_edge(1, 3);
    auto port = singleton_ports(6, {0, 1, 2, 3});
    auto dc = assemble_deformed(c, g, port, tree_basis(g));
    EXPECT_TRUE(verify_codespace(dc).pass());

    auto rep = desiderata_report(dc, 2);
    ASSERT_TRUE(rep.expansion_certified.has_value());
    EXPECT_TRUE(*rep.expansion_certified);

    auto dist = verify_distance(dc);
    EXPECT_TRUE(dist.pass);
    EXPECT_EQ(*dist.deformed.distance, 2u);
}

TEST(AssembleTest, ThickenedAuxGraphAlsoRestoresTheDistance) {
    auto c = six_two_two();
    auto aux = build_aux_graph(c, {0, 1, 2, 3},
                               aux_opts(AuxOptions::Expansion::thicken));
    auto dc = assemble_deformed(c, aux.graph, aux.port, aux.basis);
    EXPECT_TRUE(verify_codespace(dc).pass());
    auto dist = verify_distance(dc);
    EXPECT_EQ(dist.base_distance, 2u);
    EXPECT_TRUE(dist.pass);
}

TEST(AssembleTest, SetValuedPortsSpreadOneQubitOverManyVertices) {
    auto c = fixtures::toric(2);
    Graph g(6);
    for (Index v = 0; v + 1 < 6; ++v) g.add_edge(v, v + 1);
    PortMap port;
    port.n_qubits = 8;
    port.n_vertices = 6;
    port.sets.resize(8);
    port.sets[0] = {0, 1, 2};
    port.sets[1] = {3};
    port.sets[2] = {4, 5};
    EXPECT_EQ(port.measured_support(), (std::vector<Index>{0, 1}));
    auto dc = assemble_deformed(c, g, port, tree_basis(g));
    auto cs = verify_codespace(dc);
    EXPECT_EQ(cs.k_base, 2u);
    EXPECT_EQ(cs.k_deformed, 1u);
    EXPECT_TRUE(cs.pass());
    auto rep = desiderata_report(dc, 2);
    EXPECT_EQ(rep.max_port_multiplicity, 3u);
}

TEST(AssembleTest, GenericBaseCodeTakesTheNonSplitPath) {
    auto c = five_qubit();
    auto aux = build_aux_graph(c, {0, 1, 2, 3, 4},
                               aux_opts(AuxOptions::Expansion::none));
    auto dc = assemble_deformed(c, aux.graph, aux.port, aux.basis);
    EXPECT_FALSE(dc.assembled.is_css());
    auto cs = verify_codespace(dc);
    EXPECT_EQ(cs.k_base, 1u);
    EXPECT_EQ(cs.k_deformed, 0u);
    EXPECT_TRUE(cs.pass());
}

TEST(AssembleTest, PortlessChecksLeaveTheGainBlockEmpty) {
    auto c = css_code(SparseBitMatrix(0, 3), full_rank_repetition_check(3));
    Graph g(1);
    auto port = singleton_ports(3, {0});
    CycleBasis basis = tree_basis(g);
    auto dc = assemble_deformed(c, g, port, basis);
    EXPECT_TRUE(dc.blocks.M.is_zero());
    EXPECT_EQ(dc.assembled.n_qubits(), 3u);
    auto cs = verify_codespace(dc);
    EXPECT_EQ(cs.k_base, 1u);
    EXPECT_EQ(cs.k_deformed, 0u);
    EXPECT_TRUE(cs.pass());
}

TEST(AssembleTest, RejectsMismatchedOrUnmeasurableInputs) {
    auto c = fixtures::toric(2);
    auto aux = build_aux_graph(c, {0, 1});
    auto bad_port = aux.port;
    bad_port.n_qubits = 7;
    bad_port.sets.resize(7);
    EXPECT_THROW(assemble_deformed(c, aux.graph, bad_port, aux.basis), std::invalid_argument);

    // A port set on an X-basis qubit makes the measured operator anticommute.
    auto anti = singleton_ports(8, {0, 1, 4});
    Graph g3(3);
    g3.add_edge(0, 1);
    g3.add_edge(1, 2);
    EXPECT_THROW(assemble_deformed(c, g3, anti, tree_basis(g3)), std::invalid_argument);

    // A component holding one endpoint of a required pair cannot be matched.
    auto split_code = css_code(SparseBitMatrix::from_rows(1, 6, {{0, 2}}),
                               SparseBitMatrix::from_rows(1, 6, {{0, 1, 2, 3, 4, 5}}));
    Graph split(4);
    split.add_edge(0, 1);
    split.add_edge(2, 3);
    auto port = singleton_ports(6, {0, 1, 2, 3});
    SparseBitMatrix no_cycles(0, 2);
    EXPECT_THROW(
        assemble_deformed(split_code, split, port, CycleBasis{std::move(no_cycles)}),
        std::invalid_argument);
}

TEST(DesiderataTest, TriangleReportMatchesHandCounts) {
    auto c = fixtures::toric(3);
    auto aux = build_aux_graph(c, {0, 1, 2});
    auto dc = assemble_deformed(c, aux.graph, aux.port, aux.basis);
    auto rep = desiderata_report(dc, 3);
    EXPECT_TRUE(rep.connected);
    EXPECT_EQ(rep.max_vertex_degree, 2u);
    EXPECT_EQ(rep.max_port_multiplicity, 1u);
    EXPECT_EQ(rep.max_matching_len, 1u);
    EXPECT_EQ(rep.max_edge_matching_count, 1u);
    EXPECT_EQ(rep.cycle_profile.max_row_weight, 3u);
    EXPECT_EQ(rep.cycle_profile.max_col_weight, 1u);
    ASSERT_TRUE(rep.expansion_certified.has_value());
    EXPECT_TRUE(*rep.expansion_certified);
    EXPECT_TRUE(rep.expansion_witness.empty());
}

TEST(DesiderataTest, CapRefusalLeavesCertificationOpen) {
    auto c = fixtures::toric(2);
    auto aux = build_aux_graph(c, {0, 1});
    auto dc = assemble_deformed(c, aux.graph, aux.port, aux.basis);
    auto rep = desiderata_report(dc, 2, ExpansionOptions{1, 1});
    EXPECT_FALSE(rep.expansion_certified.has_value());
}

}  // namespace
}  // namespace qdeform
