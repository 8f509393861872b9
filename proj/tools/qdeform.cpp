// Command line front end: builds and verifies graph sparsifiers, deformed
// codes, adapters, triangulations, and layered-block merges, emitting
// deterministic JSON manifests next to the generated artifacts.
//
// Exit codes: 0 when every requested check passed, 1 when a verification
// failed (the report still prints), 2 on malformed input or bad options.
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qdeform/adapter.hpp"
#include "qdeform/delaunay.hpp"
#include "qdeform/expansion.hpp"
#include "qdeform/gf2.hpp"
#include "qdeform/graph.hpp"
#include "qdeform/skiptree.hpp"
#include "qdeform/stabilizer.hpp"
#include "qdeform/surgery.hpp"
#include "qdeform/toric.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace qdeform;

namespace {

constexpr const char* kToolName = "qdeform";
constexpr const char* kToolVersion = "1.0.0";

// QSW_BRUTEFORCE_CAP widens or narrows every brute-force budget at once.
std::size_t env_cap(std::size_t fallback) {
    const char* s = std::getenv("QSW_BRUTEFORCE_CAP");
    if (!s || !*s) return fallback;
    char* end = nullptr;
    unsigned long long v = std::strtoull(s, &end, 10);
    if (!end || *end != '\0' || v == 0) {
        throw std::invalid_argument("QSW_BRUTEFORCE_CAP must be a positive integer");
    }
    return static_cast<std::size_t>(v);
}

std::vector<Index> parse_indices(const std::string& csv) {
    std::vector<Index> out;
    std::istringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) throw std::invalid_argument("empty entry in index list '" + csv + "'");
        std::size_t pos = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(tok, &pos);
        } catch (const std::exception&) {
            throw std::invalid_argument("bad index '" + tok + "' in list '" + csv + "'");
        }
        if (pos != tok.size()) {
            throw std::invalid_argument("bad index '" + tok + "' in list '" + csv + "'");
        }
        out.push_back(static_cast<Index>(v));
    }
    if (out.empty()) throw std::invalid_argument("index list '" + csv + "' is empty");
    return out;
}

Beta parse_beta(const std::string& s) {
    std::size_t slash = s.find('/');
    try {
        if (slash == std::string::npos) return Beta(std::stoll(s));
        long long num = std::stoll(s.substr(0, slash));
        long long den = std::stoll(s.substr(slash + 1));
        if (den <= 0) throw std::invalid_argument("nonpositive denominator");
        return Beta(num, den);
    } catch (const std::exception&) {
        throw std::invalid_argument("bad rational '" + s + "', expected p or p/q");
    }
}

std::string beta_str(const Beta& b) {
    return std::to_string(b.numerator()) + "/" + std::to_string(b.denominator());
}

ordered_json beta_json(const std::optional<Beta>& b) {
    if (!b) return nullptr;
    return beta_str(*b);
}

ordered_json indices_json(const std::vector<Index>& v) {
    ordered_json a = ordered_json::array();
    for (Index x : v) a.push_back(x);
    return a;
}

ordered_json pauli_json(const PauliOperator& p) {
    return ordered_json{{"x", indices_json(p.x_part)}, {"z", indices_json(p.z_part)}};
}

ordered_json profile_json(const SparsityProfile& p) {
    return ordered_json{{"max_row_weight", p.max_row_weight},
                        {"max_col_weight", p.max_col_weight}};
}

ordered_json distance_json(const DistanceReport& r) {
    ordered_json j;
    j["distance"] = r.distance ? ordered_json(*r.distance) : ordered_json(nullptr);
    j["lower_bound"] = r.lower_bound;
    j["witness"] = r.witness ? pauli_json(*r.witness) : ordered_json(nullptr);
    return j;
}

ordered_json codespace_json(const CodespaceReport& r) {
    ordered_json j;
    j["k_base"] = r.k_base;
    j["k_deformed"] = r.k_deformed;
    j["k_dropped_by_one"] = r.k_dropped_by_one;
    j["measured_in_stabilizer"] = r.measured_in_stabilizer;
    j["checks_commute"] = r.checks_commute;
    j["pass"] = r.pass();
    return j;
}

ordered_json port_json(const PortMap& pm) {
    ordered_json sets = ordered_json::array();
    for (const auto& s : pm.sets) sets.push_back(indices_json(s));
    return ordered_json{
        {"n_qubits", pm.n_qubits}, {"n_vertices", pm.n_vertices}, {"sets", sets}};
}

PortMap port_from_json(const ordered_json& j) {
    PortMap pm;
    pm.n_qubits = j.at("n_qubits").get<std::size_t>();
    pm.n_vertices = j.at("n_vertices").get<std::size_t>();
    for (const auto& s : j.at("sets")) pm.sets.push_back(s.get<std::vector<Index>>());
    validate_port_map(pm);
    return pm;
}

ordered_json nested_indices_json(const std::vector<std::vector<Index>>& vv) {
    ordered_json a = ordered_json::array();
    for (const auto& v : vv) a.push_back(indices_json(v));
    return a;
}

// File helpers. Readers cite the offending line through ParseError.

std::ifstream open_input(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("cannot open '" + path + "'");
    return is;
}

Graph load_graph(const std::string& path) {
    auto is = open_input(path);
    try {
        return read_graph(is);
    } catch (const ParseError& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
}

SparseBitMatrix load_matrix(const std::string& path) {
    auto is = open_input(path);
    try {
        return read_matrix(is);
    } catch (const ParseError& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
}

PointSet2D load_points(const std::string& path) {
    auto is = open_input(path);
    try {
        return parse_points(is);
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
}

ordered_json load_json(const std::string& path) {
    auto is = open_input(path);
    try {
        return ordered_json::parse(is);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
}

StabilizerCode load_code(const std::string& path) {
    try {
        return code_from_json(load_json(path));
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream os(path);
    if (!os) throw std::invalid_argument("cannot write '" + path.string() + "'");
    return os;
}

void save_matrix(const SparseBitMatrix& m, const fs::path& path) {
    auto os = open_output(path);
    write_matrix(m, os);
}

void save_graph(const Graph& g, const fs::path& path) {
    auto os = open_output(path);
    write_graph(g, os);
}

void save_text(const std::string& text, const fs::path& path) {
    auto os = open_output(path);
    os << text;
}

void save_json(const ordered_json& j, const fs::path& path) {
    auto os = open_output(path);
    os << j.dump(2) << '\n';
}

fs::path ensure_out_dir(const std::string& dir) {
    fs::path p(dir);
    fs::create_directories(p);
    return p;
}

ordered_json make_manifest(const std::string& kind, const std::string& command,
                           std::uint64_t seed) {
    ordered_json m;
    m["kind"] = kind;
    m["tool"] = ordered_json{{"name", kToolName}, {"version", kToolVersion}};
    m["command"] = command;
    m["seed"] = seed;
    return m;
}

void emit(const ordered_json& manifest, const std::optional<fs::path>& out_dir) {
    if (out_dir) save_json(manifest, *out_dir / "manifest.json");
    std::cout << manifest.dump(2) << '\n';
}

struct CommonOpts {
    std::uint64_t seed = 0;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    std::string out_dir;

    void attach(CLI::App* sub, bool out_required) {
        sub->add_option("--seed", seed, "RNG seed recorded in the manifest")
            ->capture_default_str();
        sub->add_option("--threads", threads,
                        "worker thread budget; results do not depend on it");
        auto* o = sub->add_option("-o,--out", out_dir, "output directory for artifacts");
        if (out_required) o->required();
    }

    std::optional<fs::path> out() const {
        if (out_dir.empty()) return std::nullopt;
        return ensure_out_dir(out_dir);
    }
};

// skiptree / skiptree-hr: sparse factorization T * G * P of a canonical
// repetition check through the graph's incidence matrix.

int run_skiptree(const std::string& graph_path, const CommonOpts& common, bool full_rank) {
    Graph g = load_graph(graph_path);
    SkipTreeResult res = full_rank ? skiptree_hr(g) : skiptree(g);
    auto variant = full_rank ? SkipTreeVariant::full_rank : SkipTreeVariant::cyclic;
    SkipTreeReport rep = verify_skiptree(g, res.T, res.P, variant);

    auto out = common.out();
    ordered_json m = make_manifest("graph", full_rank ? "skiptree-hr" : "skiptree",
                                   common.seed);
    m["inputs"] = ordered_json{{"graph", graph_path},
                               {"n_vertices", g.n_vertices()},
                               {"n_edges", g.n_edges()}};
    m["artifacts"] = ordered_json{{"t", "T.txt"}, {"p", "P.txt"}};
    m["summary"] = ordered_json{{"max_row_weight", rep.t_profile.max_row_weight},
                                {"max_col_weight", rep.t_profile.max_col_weight},
                                {"max_path_len", rep.max_path_len},
                                {"verified", rep.verified}};
    if (out) {
        save_matrix(res.T, *out / "T.txt");
        save_matrix(res.P, *out / "P.txt");
    }
    emit(m, out);
    return rep.verified ? 0 : 1;
}

// expansion: exact relative expansion of a port set, optional certification
// against a threshold, optional edge or layer boosting.

int run_expansion(const std::string& graph_path, const std::string& subset_csv,
                  std::size_t t, const std::string& threshold_str,
                  const std::string& boost, const CommonOpts& common) {
    Graph g = load_graph(graph_path);
    std::vector<Index> subset = parse_indices(subset_csv);
    ExpansionOptions opts;
    opts.cap = env_cap(opts.cap);
    opts.n_threads = common.threads;
    ExpansionQuery q{subset, t, Beta(1)};

    auto out = common.out();
    ordered_json m = make_manifest("graph", "expansion", common.seed);
    m["inputs"] = ordered_json{{"graph", graph_path},
                               {"subset", indices_json(subset)},
                               {"t", t}};
    m["artifacts"] = ordered_json::object();

    auto cert = relative_expansion(g, q, opts);
    ordered_json summary;
    summary["beta"] = beta_json(cert.value);
    summary["witness"] = indices_json(cert.witness);
    summary["cap"] = opts.cap;

    int rc = 0;
    if (!threshold_str.empty()) {
        q.threshold = parse_beta(threshold_str);
        m["inputs"]["threshold"] = beta_str(q.threshold);
        auto cr = certify_at_least(g, q, opts);
        summary["certified"] = cr.ok;
        summary["violation_value"] = beta_json(cr.violation_value);
        summary["violation_witness"] = indices_json(cr.violation_witness);
        if (!cr.ok) rc = 1;
    }

    if (boost == "edges") {
        Graph boosted = boost_by_edges(g, subset, t, 8, common.seed, opts);
        auto after = relative_expansion(boosted, ExpansionQuery{subset, t, Beta(1)}, opts);
        summary["boost"] = ordered_json{{"mode", "edges"},
                                        {"n_edges", boosted.n_edges()},
                                        {"beta_after", beta_json(after.value)}};
        if (out) {
            save_graph(boosted, *out / "boosted.txt");
            m["artifacts"]["boosted"] = "boosted.txt";
        }
    } else if (boost == "thicken") {
        auto tb = boost_by_thickening(g, subset, t, opts);
        summary["boost"] = ordered_json{{"mode", "thicken"},
                                        {"layers", tb.thickened.layers},
                                        {"base_beta", beta_json(tb.base_beta)},
                                        {"verified", tb.verified},
                                        {"cap_skipped", tb.cap_skipped},
                                        {"layer_ports", nested_indices_json(tb.layer_ports)}};
        if (out) {
            save_graph(tb.thickened.graph, *out / "thickened.txt");
            m["artifacts"]["thickened"] = "thickened.txt";
        }
        if (!tb.verified && !tb.cap_skipped) rc = 1;
    }

    m["summary"] = std::move(summary);
    emit(m, out);
    return rc;
}

// surgery build: attach an auxiliary graph to a Z operator of a code, emit the
// deformed code plus every block needed to re-verify it from disk.

AuxOptions::Expansion parse_expansion_mode(const std::string& s) {
    if (s == "edges") return AuxOptions::Expansion::edges;
    if (s == "thicken") return AuxOptions::Expansion::thicken;
    if (s == "none") return AuxOptions::Expansion::none;
    throw std::invalid_argument("bad expansion mode '" + s + "'");
}

std::vector<Index> pick_support(const StabilizerCode& c, const std::string& support_csv,
                                const std::string& logical_name) {
    if (!support_csv.empty()) return parse_indices(support_csv);
    for (const auto& l : c.named_logicals()) {
        if (!logical_name.empty() && l.name != logical_name) continue;
        if (!l.op.x_part.empty()) {
            if (!logical_name.empty()) {
                throw std::invalid_argument("logical '" + l.name + "' is not Z-type");
            }
            continue;
        }
        if (!l.op.z_part.empty()) return l.op.z_part;
    }
    if (!logical_name.empty()) {
        throw std::invalid_argument("no logical named '" + logical_name + "'");
    }
    throw std::invalid_argument("the code has no Z-type named logical; pass --support");
}

ordered_json surgery_summary(const DeformedCode& dc, bool with_distance) {
    ordered_json s;
    s["codespace"] = codespace_json(verify_codespace(dc));
    bool pass = s["codespace"]["pass"].get<bool>();
    if (with_distance) {
        auto dr = verify_distance(dc, env_cap(std::size_t{1} << 26));
        ordered_json dj;
        dj["base_distance"] = dr.base_distance;
        dj["deformed"] = distance_json(dr.deformed);
        dj["weight_bounded_substituted"] = dr.weight_bounded_substituted;
        dj["pass"] = dr.pass;
        s["distance"] = std::move(dj);
        pass = pass && dr.pass;
    }
    s["pass"] = pass;
    return s;
}

void write_surgery_artifacts(const DeformedCode& dc, const fs::path& out) {
    save_json(code_to_json(dc.base), out / "base.json");
    save_graph(dc.aux, out / "aux.txt");
    save_matrix(dc.basis.cycles, out / "basis.txt");
    save_matrix(dc.blocks.G, out / "G.txt");
    save_matrix(dc.blocks.N, out / "N.txt");
    save_matrix(dc.blocks.M, out / "M.txt");
    save_matrix(dc.blocks.F, out / "F.txt");
    save_json(code_to_json(dc.assembled), out / "deformed.json");
}

ordered_json surgery_artifact_names() {
    return ordered_json{{"base", "base.json"}, {"aux", "aux.txt"},
                        {"basis", "basis.txt"}, {"g", "G.txt"},
                        {"n", "N.txt"},         {"m", "M.txt"},
                        {"f", "F.txt"},         {"deformed", "deformed.json"}};
}

int run_surgery_build(const std::string& code_path, const std::string& support_csv,
                      const std::string& logical_name, std::size_t target_t,
                      const std::string& expansion_mode, bool with_distance,
                      const CommonOpts& common) {
    StabilizerCode c = load_code(code_path);
    std::vector<Index> support = pick_support(c, support_csv, logical_name);

    AuxOptions aopts;
    aopts.target_t = target_t;
    aopts.expansion = parse_expansion_mode(expansion_mode);
    aopts.seed = common.seed;
    aopts.expansion_opts.cap = env_cap(aopts.expansion_opts.cap);
    aopts.expansion_opts.n_threads = common.threads;

    AuxBuild ab = build_aux_graph(c, support, aopts);
    DeformedCode dc = assemble_deformed(c, ab.graph, ab.port, ab.basis);

    auto out = common.out();
    ordered_json m = make_manifest("surgery", "surgery build", common.seed);
    m["inputs"] = ordered_json{{"code", code_path}, {"support", indices_json(support)}};
    m["artifacts"] = surgery_artifact_names();
    m["port"] = port_json(dc.port);
    m["matchings"] = nested_indices_json(dc.matchings);
    m["aux_log"] = ab.log;
    m["summary"] = surgery_summary(dc, with_distance);
    write_surgery_artifacts(dc, *out);
    emit(m, out);
    return m["summary"]["pass"].get<bool>() ? 0 : 1;
}

// surgery verify: reload every artifact a build manifest names, reassemble the
// deformed code from scratch, and demand the stored summary byte for byte.

DeformedCode reload_deformed(const ordered_json& m, const fs::path& dir) {
    const auto& a = m.at("artifacts");
    StabilizerCode base = load_code((dir / a.at("base").get<std::string>()).string());
    Graph aux = load_graph((dir / a.at("aux").get<std::string>()).string());
    SparseBitMatrix basis_rows =
        load_matrix((dir / a.at("basis").get<std::string>()).string());
    PortMap port = port_from_json(m.at("port"));
    CycleBasis basis = make_cycle_basis(aux, std::move(basis_rows));
    return assemble_deformed(base, aux, port, basis);
}

int run_surgery_verify(const std::string& manifest_path) {
    ordered_json m = load_json(manifest_path);
    if (m.value("kind", "") != "surgery") {
        throw std::invalid_argument(manifest_path + ": not a surgery manifest");
    }
    fs::path dir = fs::path(manifest_path).parent_path();
    const auto& a = m.at("artifacts");

    DeformedCode dc = reload_deformed(m, dir);
    StabilizerCode stored =
        load_code((dir / a.at("deformed").get<std::string>()).string());

    ordered_json rep;
    rep["assembled_matches"] = dc.assembled == stored;
    rep["blocks_match"] =
        dc.blocks.G == load_matrix((dir / a.at("g").get<std::string>()).string()) &&
        dc.blocks.N == load_matrix((dir / a.at("n").get<std::string>()).string()) &&
        dc.blocks.M == load_matrix((dir / a.at("m").get<std::string>()).string()) &&
        dc.blocks.F == load_matrix((dir / a.at("f").get<std::string>()).string());
    rep["matchings_match"] = nested_indices_json(dc.matchings) == m.at("matchings");

    ordered_json recomputed = surgery_summary(dc, m.at("summary").contains("distance"));
    rep["summary_matches"] = recomputed.dump() == m.at("summary").dump();
    rep["summary"] = std::move(recomputed);
    bool ok = rep["assembled_matches"].get<bool>() && rep["blocks_match"].get<bool>() &&
              rep["matchings_match"].get<bool>() && rep["summary_matches"].get<bool>();
    rep["verified"] = ok;
    std::cout << rep.dump(2) << '\n';
    return ok ? 0 : 1;
}

// adapter join: bridge the auxiliary graphs of several build manifests so one
// deformed code measures the product of the named operators.

int run_adapter_join(const std::vector<std::string>& manifest_paths,
                     std::size_t max_overlap, std::size_t scan_cap,
                     const CommonOpts& common) {
    if (manifest_paths.size() < 2) {
        throw std::invalid_argument("adapter join needs at least two build manifests");
    }
    std::vector<JointBlock> blocks;
    for (const auto& path : manifest_paths) {
        ordered_json m = load_json(path);
        if (m.value("kind", "") != "surgery") {
            throw std::invalid_argument(path + ": not a surgery manifest");
        }
        fs::path dir = fs::path(path).parent_path();
        const auto& a = m.at("artifacts");
        JointBlock b{
            load_code((dir / a.at("base").get<std::string>()).string()),
            m.at("inputs").at("support").get<std::vector<Index>>(),
            load_graph((dir / a.at("aux").get<std::string>()).string()),
            port_from_json(m.at("port")),
            CycleBasis{load_matrix((dir / a.at("basis").get<std::string>()).string())}};
        blocks.push_back(std::move(b));
    }

    JointMeasurement jm = joint_measurement(blocks, JointOptions{max_overlap, scan_cap});

    auto out = common.out();
    ordered_json m = make_manifest("adapter", "adapter join", common.seed);
    m["inputs"] = ordered_json{{"manifests", manifest_paths}};
    m["artifacts"] = surgery_artifact_names();
    m["port"] = port_json(jm.code.port);
    m["matchings"] = nested_indices_json(jm.code.matchings);
    ordered_json summary;
    summary["codespace"] = codespace_json(verify_codespace(jm.code));
    summary["sub_supports"] = nested_indices_json(jm.sub_supports);
    summary["sub_ports"] = nested_indices_json(jm.sub_ports);
    summary["vertex_offsets"] = jm.vertex_offsets;
    summary["n_adapters"] = jm.adapters.size();
    summary["pass"] = summary["codespace"]["pass"].get<bool>();
    m["summary"] = std::move(summary);
    write_surgery_artifacts(jm.code, *out);
    emit(m, out);
    return m["summary"]["pass"].get<bool>() ? 0 : 1;
}

// delaunay: exact-predicate triangulation with a triangle cycle basis and
// point-free circumcircles; optional perturbation and pairwise matching.

int run_delaunay(const std::string& points_path, bool perturb, std::int64_t epsilon,
                 const std::vector<std::string>& match_csv, bool dot,
                 const CommonOpts& common) {
    PointSet2D ps = load_points(points_path);
    Perturb p = perturb ? Perturb::seeded(common.seed, epsilon) : Perturb::off();
    Triangulation tri = triangulate(ps, p);

    std::size_t n = tri.graph.n_vertices();
    std::size_t e = tri.graph.n_edges();
    std::size_t cycles = tri.basis.cycles.n_rows();
    bool complete = n == 0 || cycles == e + 1 - n;
    bool all_triangles = true;
    for (std::size_t r = 0; r < cycles; ++r) {
        if (tri.basis.cycles.row(r).size() != 3) all_triangles = false;
    }

    auto out = common.out();
    ordered_json m = make_manifest("graph", "delaunay", common.seed);
    m["inputs"] = ordered_json{{"points", points_path},
                               {"n_points", ps.points.size()},
                               {"perturb", perturb}};
    m["artifacts"] = ordered_json{{"graph", "graph.txt"},
                                  {"basis", "basis.txt"},
                                  {"points", "points.txt"}};
    ordered_json faces = ordered_json::array();
    for (const auto& f : tri.faces) faces.push_back({f[0], f[1], f[2]});
    ordered_json summary;
    summary["n_vertices"] = n;
    summary["n_edges"] = e;
    summary["n_faces"] = tri.faces.size();
    summary["faces"] = std::move(faces);
    summary["basis_profile"] = profile_json(tri.basis.profile());
    summary["basis_complete"] = complete;
    summary["all_cycles_triangles"] = all_triangles;
    summary["circumcircles_empty"] = true;  // triangulate() certifies or throws

    ordered_json matches = ordered_json::array();
    for (const auto& csv : match_csv) {
        auto pair = parse_indices(csv);
        if (pair.size() != 2) {
            throw std::invalid_argument("--match expects two comma-separated vertices");
        }
        auto path = empty_circle_match(tri.graph, tri.points, pair[0], pair[1]);
        matches.push_back(ordered_json{{"pair", indices_json(pair)},
                                       {"edges", indices_json(path)},
                                       {"length", path.size()}});
    }
    if (!matches.empty()) summary["matchings"] = std::move(matches);
    m["summary"] = std::move(summary);

    if (out) {
        save_graph(tri.graph, *out / "graph.txt");
        save_matrix(tri.basis.cycles, *out / "basis.txt");
        std::ostringstream pts;
        pts << tri.points.size() << '\n';
        for (const auto& pt : tri.points) pts << pt.x << ' ' << pt.y << '\n';
        save_text(pts.str(), *out / "points.txt");
        if (dot) {
            save_text(to_dot(tri.graph), *out / "graph.dot");
            m["artifacts"]["dot"] = "graph.dot";
        }
    }
    emit(m, out);
    return complete && all_triangles ? 0 : 1;
}

// toric-cnot: verify the twist tableau on the layered block plus its fault
// propagation demo.

int run_toric_cnot(Index d, const CommonOpts& common) {
    LogicalCnotReport cnot = verify_logical_cnot(d);
    FaultDemoReport fault = fault_pattern_demo(d);

    ordered_json m = make_manifest("code", "toric-cnot", common.seed);
    m["inputs"] = ordered_json{{"d", d}};
    m["artifacts"] = ordered_json::object();
    ordered_json cj;
    cj["stabilizers_preserved"] = cnot.stabilizers_preserved;
    cj["control_x_picks_up_target"] = cnot.control_x_picks_up_target;
    cj["target_z_picks_up_control"] = cnot.target_z_picks_up_control;
    cj["target_x_fixed"] = cnot.target_x_fixed;
    cj["control_z_fixed"] = cnot.control_z_fixed;
    cj["pass"] = cnot.pass();
    ordered_json fj;
    fj["empty_pattern_is_identity"] = fault.empty_pattern_is_identity;
    fj["every_single_fault_is_detected"] = fault.every_single_fault_is_detected;
    fj["full_pattern_has_zero_syndrome"] = fault.full_pattern_has_zero_syndrome;
    fj["full_pattern_is_not_a_stabilizer"] = fault.full_pattern_is_not_a_stabilizer;
    fj["full_pattern_class_is_both_x_lines"] = fault.full_pattern_class_is_both_x_lines;
    fj["full_pattern_matches_control_line_after_init"] =
        fault.full_pattern_matches_control_line_after_init;
    fj["family_checked"] = fault.family_checked;
    fj["family_all_caught"] = fault.family_all_caught;
    fj["pass"] = fault.pass();
    bool pass = cnot.pass() && fault.pass();
    m["summary"] = ordered_json{{"cnot", std::move(cj)},
                                {"fault_demo", std::move(fj)},
                                {"pass", pass}};
    emit(m, common.out());
    return pass ? 0 : 1;
}

// toric-merge: glue a distance-d layered block onto a CSS code through two
// cycle attachments and check the rank bookkeeping of the merged checks.

AuxAttachment cycle_attachment(std::size_t n_qubits, const std::vector<Index>& support,
                               Index d) {
    Graph g(d);
    for (Index i = 0; i < d; ++i) g.add_edge(i, (i + 1) % d);
    std::vector<Index> all(d);
    for (Index i = 0; i < d; ++i) all[i] = i;
    CycleBasis basis = make_cycle_basis(
        g, SparseBitMatrix::from_rows(1, d, {all}));
    return AuxAttachment{std::move(g), singleton_ports(n_qubits, support),
                         std::move(basis)};
}

int run_toric_merge(const std::string& code_path, Index d, const std::string& zc_csv,
                    const std::string& xt_csv, const CommonOpts& common) {
    StabilizerCode base = load_code(code_path);
    std::vector<Index> zc = parse_indices(zc_csv);
    std::vector<Index> xt = parse_indices(xt_csv);
    std::sort(zc.begin(), zc.end());
    std::sort(xt.begin(), xt.end());
    if (zc.size() != static_cast<std::size_t>(d) ||
        xt.size() != static_cast<std::size_t>(d)) {
        throw std::invalid_argument("each support must name exactly d qubits");
    }

    MergedToric mt = merge_with_toric(base, zc, xt, cycle_attachment(base.n_qubits(), zc, d),
                                      cycle_attachment(base.n_qubits(), xt, d), d);

    std::size_t rank_hx_base = rank(base.hx());
    std::size_t rank_hz_base = rank(base.hz());
    std::size_t rank_hx = rank(mt.assembled.hx());
    std::size_t rank_hz = rank(mt.assembled.hz());
    std::size_t dd = static_cast<std::size_t>(d) * static_cast<std::size_t>(d);
    bool identity_x = rank_hx == rank_hx_base + mt.aux_z.graph.n_edges() + dd;
    bool identity_z = rank_hz == rank_hz_base + mt.aux_x.graph.n_edges() + dd;
    std::size_t k_base = logical_qubit_count(base);
    std::size_t k_merged = logical_qubit_count(mt.assembled);
    bool k_preserved = k_merged == k_base;
    bool pass = identity_x && identity_z && k_preserved;

    auto out = common.out();
    ordered_json m = make_manifest("toric-merge", "toric-merge", common.seed);
    m["inputs"] = ordered_json{{"code", code_path},
                               {"d", d},
                               {"z_support", indices_json(zc)},
                               {"x_support", indices_json(xt)}};
    m["artifacts"] = ordered_json{{"merged", "merged.json"}, {"aux_z", "aux_z.txt"},
                                  {"aux_x", "aux_x.txt"},    {"t_z", "T_Z.txt"},
                                  {"p_z", "P_Z.txt"},        {"t_x", "T_X.txt"},
                                  {"p_x", "P_X.txt"}};
    ordered_json summary;
    summary["n_merged"] = mt.n_qubits;
    summary["offsets"] = ordered_json{{"ez", mt.ez_offset},
                                      {"block", mt.block_offset},
                                      {"ex", mt.ex_offset}};
    summary["ranks"] = ordered_json{{"hx_base", rank_hx_base},
                                    {"hz_base", rank_hz_base},
                                    {"hx_merged", rank_hx},
                                    {"hz_merged", rank_hz}};
    summary["rank_identity_x"] = identity_x;
    summary["rank_identity_z"] = identity_z;
    summary["k_base"] = k_base;
    summary["k_merged"] = k_merged;
    summary["k_preserved"] = k_preserved;
    summary["pass"] = pass;
    m["summary"] = std::move(summary);
    if (out) {
        save_json(code_to_json(mt.assembled), *out / "merged.json");
        save_graph(mt.aux_z.graph, *out / "aux_z.txt");
        save_graph(mt.aux_x.graph, *out / "aux_x.txt");
        save_matrix(mt.skip_z.T, *out / "T_Z.txt");
        save_matrix(mt.skip_z.P, *out / "P_Z.txt");
        save_matrix(mt.skip_x.T, *out / "T_X.txt");
        save_matrix(mt.skip_x.P, *out / "P_X.txt");
    }
    emit(m, out);
    return pass ? 0 : 1;
}

// distance: exhaustive or weight-bounded minimum logical weight.

int run_distance(const std::string& code_path, const std::string& mode_str,
                 std::size_t max_weight, std::size_t budget,
                 std::optional<std::size_t> expect, const CommonOpts& common) {
    StabilizerCode c = load_code(code_path);
    budget = env_cap(budget);
    DistanceMode mode = DistanceMode::exhaustive(budget);
    if (mode_str == "weight-bounded") {
        if (max_weight == 0) {
            throw std::invalid_argument("--mode weight-bounded needs --w");
        }
        mode = DistanceMode::weight_bounded(max_weight, budget);
    } else if (mode_str != "exhaustive") {
        throw std::invalid_argument("bad mode '" + mode_str + "'");
    }

    DistanceReport dr = distance(c, mode);
    ordered_json m = make_manifest("code", "distance", common.seed);
    m["inputs"] = ordered_json{{"code", code_path}, {"mode", mode_str}, {"budget", budget}};
    if (mode_str == "weight-bounded") m["inputs"]["w"] = max_weight;
    m["artifacts"] = ordered_json::object();
    ordered_json summary = distance_json(dr);
    int rc = 0;
    if (expect) {
        bool ok = dr.distance.has_value() && *dr.distance == *expect;
        summary["expected"] = *expect;
        summary["matches_expected"] = ok;
        if (!ok) rc = 1;
    }
    m["summary"] = std::move(summary);
    emit(m, common.out());
    return rc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"deformation toolkit for sparse stabilizer codes"};
    app.require_subcommand(1);
    int rc = 0;

    CommonOpts st_common;
    std::string st_graph;
    auto* st = app.add_subcommand("skiptree",
                                  "factor the cyclic repetition check through a graph");
    st->add_option("graph", st_graph, "graph file")->required();
    st_common.attach(st, true);
    st->callback([&]() { rc = run_skiptree(st_graph, st_common, false); });

    CommonOpts hr_common;
    std::string hr_graph;
    auto* hr = app.add_subcommand("skiptree-hr",
                                  "factor the full-rank repetition check through a graph");
    hr->add_option("graph", hr_graph, "graph file")->required();
    hr_common.attach(hr, true);
    hr->callback([&]() { rc = run_skiptree(hr_graph, hr_common, true); });

    CommonOpts ex_common;
    std::string ex_graph, ex_subset, ex_threshold, ex_boost = "none";
    std::size_t ex_t = 1;
    auto* ex = app.add_subcommand("expansion",
                                  "exact relative expansion of a port set");
    ex->add_option("graph", ex_graph, "graph file")->required();
    ex->add_option("--subset", ex_subset, "comma-separated port vertices")->required();
    ex->add_option("--t", ex_t, "subset size bound")->capture_default_str();
    ex->add_option("--threshold", ex_threshold, "certify expansion >= p/q");
    ex->add_option("--boost", ex_boost, "none, edges, or thicken")
        ->check(CLI::IsMember({"none", "edges", "thicken"}))
        ->capture_default_str();
    ex_common.attach(ex, false);
    ex->callback([&]() {
        rc = run_expansion(ex_graph, ex_subset, ex_t, ex_threshold, ex_boost, ex_common);
    });

    auto* surgery = app.add_subcommand("surgery", "deform a code to measure a Z operator");
    surgery->require_subcommand(1);
    CommonOpts sb_common;
    std::string sb_code, sb_support, sb_logical, sb_expansion = "edges";
    std::size_t sb_t = 0;
    bool sb_distance = false;
    auto* sb = surgery->add_subcommand("build", "build and verify a deformed code");
    sb->add_option("code", sb_code, "code JSON file")->required();
    sb->add_option("--support", sb_support, "measured Z support, comma-separated");
    sb->add_option("--logical", sb_logical, "measure this named Z logical instead");
    sb->add_option("--t", sb_t, "target port subset bound; 0 picks the support size")
        ->capture_default_str();
    sb->add_option("--expansion", sb_expansion, "edges, thicken, or none")
        ->check(CLI::IsMember({"edges", "thicken", "none"}))
        ->capture_default_str();
    sb->add_flag("--distance", sb_distance, "also brute-force the deformed distance");
    sb_common.attach(sb, true);
    sb->callback([&]() {
        rc = run_surgery_build(sb_code, sb_support, sb_logical, sb_t, sb_expansion,
                               sb_distance, sb_common);
    });

    std::string sv_manifest;
    auto* sv = surgery->add_subcommand("verify", "re-verify a build manifest from disk");
    sv->add_option("manifest", sv_manifest, "manifest JSON file")->required();
    sv->callback([&]() { rc = run_surgery_verify(sv_manifest); });

    auto* adapter = app.add_subcommand("adapter", "bridge deformed codes");
    adapter->require_subcommand(1);
    CommonOpts aj_common;
    std::vector<std::string> aj_manifests;
    std::size_t aj_overlap = 4, aj_scan = 12;
    auto* aj = adapter->add_subcommand("join", "measure the product of several operators");
    aj->add_option("manifests", aj_manifests, "surgery build manifests")
        ->required()
        ->expected(-2);
    aj->add_option("--max-overlap", aj_overlap, "qubits two legs may share")
        ->capture_default_str();
    aj->add_option("--scan-cap", aj_scan, "sub-support search cap")->capture_default_str();
    aj_common.attach(aj, true);
    aj->callback([&]() { rc = run_adapter_join(aj_manifests, aj_overlap, aj_scan, aj_common); });

    CommonOpts dl_common;
    std::string dl_points;
    std::vector<std::string> dl_match;
    bool dl_perturb = false, dl_dot = false;
    std::int64_t dl_eps = 16;
    auto* dl = app.add_subcommand("delaunay", "triangulate points with exact predicates");
    dl->add_option("points", dl_points, "points file")->required();
    dl->add_flag("--perturb", dl_perturb, "apply the seeded jitter first");
    dl->add_option("--epsilon", dl_eps, "jitter magnitude")->capture_default_str();
    dl->add_option("--match", dl_match, "vertex pair a,b to connect; repeatable");
    dl->add_flag("--dot", dl_dot, "also write a DOT export");
    dl_common.attach(dl, false);
    dl->callback([&]() {
        rc = run_delaunay(dl_points, dl_perturb, dl_eps, dl_match, dl_dot, dl_common);
    });

    CommonOpts tc_common;
    Index tc_d = 0;
    auto* tc = app.add_subcommand("toric-cnot",
                                  "verify the twist tableau on the layered block");
    tc->add_option("--d", tc_d, "block dimension")->required();
    tc_common.attach(tc, false);
    tc->callback([&]() { rc = run_toric_cnot(tc_d, tc_common); });

    CommonOpts tm_common;
    std::string tm_code, tm_zc, tm_xt;
    Index tm_d = 0;
    auto* tm = app.add_subcommand("toric-merge",
                                  "merge a layered block into a CSS code");
    tm->add_option("code", tm_code, "CSS code JSON file")->required();
    tm->add_option("--d", tm_d, "block dimension")->required();
    tm->add_option("--zc", tm_zc, "control-side Z support, comma-separated")->required();
    tm->add_option("--xt", tm_xt, "target-side X support, comma-separated")->required();
    tm_common.attach(tm, true);
    tm->callback([&]() { rc = run_toric_merge(tm_code, tm_d, tm_zc, tm_xt, tm_common); });

    CommonOpts di_common;
    std::string di_code, di_mode = "exhaustive";
    std::size_t di_w = 0, di_budget = std::size_t{1} << 26;
    std::optional<std::size_t> di_expect;
    auto* di = app.add_subcommand("distance", "minimum nontrivial logical weight");
    di->add_option("code", di_code, "code JSON file")->required();
    di->add_option("--mode", di_mode, "exhaustive or weight-bounded")
        ->check(CLI::IsMember({"exhaustive", "weight-bounded"}))
        ->capture_default_str();
    di->add_option("--w", di_w, "weight bound for weight-bounded mode");
    di->add_option("--budget", di_budget, "enumeration budget")->capture_default_str();
    di->add_option("--expect", di_expect, "fail unless the exact distance equals this");
    di_common.attach(di, false);
    di->callback([&]() {
        rc = run_distance(di_code, di_mode, di_w, di_budget, di_expect, di_common);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return rc;
}
