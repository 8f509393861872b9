// Planar Delaunay auxiliary graphs: an exact-arithmetic triangulation whose
// triangle faces form a complete length-3 cycle basis, plus the shrinking
// diameter-circle search that turns any vertex pair into a short edge path.
// Coordinates are scaled integers so every predicate is decided exactly.
#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <deque>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/rational.hpp>

#include "qdeform/gf2.hpp"
#include "qdeform/graph.hpp"
#include "qdeform/stabilizer.hpp"

namespace qdeform {

struct Pt {
    std::int64_t x = 0;
    std::int64_t y = 0;
    friend bool operator==(const Pt&, const Pt&) = default;
};

// Keeps every in-circle determinant term below 2^127: differences stay under
// 2^31 and the worst product is diff^3 * 2 diff^2 * 12 terms.
inline constexpr std::int64_t kCoordLimit = 500'000'000;

struct PointSet2D {
    std::vector<Pt> points;
    double density_hint = 0.0;       // rho, reported only
    double stabilizer_radius = 0.0;  // R_S, reported only; the local ball is 3 * R_S
};

// Seeded jitter that multiplies every coordinate by 4 * epsilon and then moves
// it by at most epsilon, so distinct points stay distinct and coordinates that
// differ keep their order.
struct Perturb {
    bool enabled = false;
    std::uint64_t seed = 0;
    std::int64_t epsilon = 16;

    static Perturb off() { return {}; }
    static Perturb seeded(std::uint64_t seed, std::int64_t epsilon = 16) {
        return {true, seed, epsilon};
    }
};

namespace detail {

using I128 = __int128;

inline I128 orient2d(const Pt& a, const Pt& b, const Pt& c) {
    return I128(b.x - a.x) * I128(c.y - a.y) - I128(b.y - a.y) * I128(c.x - a.x);
}

// Positive when d lies strictly inside the circumcircle of the ccw triangle
// abc, zero when d lies on it.
inline I128 in_circle(const Pt& a, const Pt& b, const Pt& c, const Pt& d) {
    I128 adx = a.x - d.x, ady = a.y - d.y;
    I128 bdx = b.x - d.x, bdy = b.y - d.y;
    I128 cdx = c.x - d.x, cdy = c.y - d.y;
    I128 aq = adx * adx + ady * ady;
    I128 bq = bdx * bdx + bdy * bdy;
    I128 cq = cdx * cdx + cdy * cdy;
    return adx * (bdy * cq - cdy * bq) - ady * (bdx * cq - cdx * bq) +
           aq * (bdx * cdy - cdx * bdy);
}

// Positive when w lies strictly inside the circle whose diameter is uv.
inline bool inside_diameter_circle(const Pt& u, const Pt& v, const Pt& w) {
    I128 dot = I128(w.x - u.x) * I128(w.x - v.x) + I128(w.y - u.y) * I128(w.y - v.y);
    return dot < 0;
}

// Triangle soup with edge incidence, used only while flipping to Delaunay.
struct TriSoup {
    std::vector<std::array<Index, 3>> tri;  // ccw triples
    std::vector<bool> alive;
    std::map<std::pair<Index, Index>, std::vector<std::size_t>> edge_tris;

    static std::pair<Index, Index> key(Index u, Index v) {
        return {std::min(u, v), std::max(u, v)};
    }

    std::size_t add(Index a, Index b, Index c, const std::vector<Pt>& p) {
        I128 o = orient2d(p[a], p[b], p[c]);
        if (o == 0) throw std::logic_error("triangulation produced a degenerate face");
        if (o < 0) std::swap(b, c);
        std::size_t id = tri.size();
        tri.push_back({a, b, c});
        alive.push_back(true);
        for (int i = 0; i < 3; ++i) edge_tris[key(tri[id][i], tri[id][(i + 1) % 3])].push_back(id);
        return id;
    }

    void kill(std::size_t id) {
        alive[id] = false;
        for (int i = 0; i < 3; ++i) {
            auto& v = edge_tris[key(tri[id][i], tri[id][(i + 1) % 3])];
            v.erase(std::remove(v.begin(), v.end(), id), v.end());
        }
    }
};

}  // namespace detail

struct Triangulation {
    Graph graph;
    std::vector<std::array<Index, 3>> faces;  // vertex triples, ascending, sorted
    CycleBasis basis;                         // one length-3 cycle per face
    std::vector<Pt> points;                   // as triangulated, perturbed when enabled
};

// Applies the seeded jitter; the i-th output still describes the i-th input.
inline std::vector<Pt> perturb_points(const std::vector<Pt>& points, const Perturb& p) {
    if (p.epsilon < 1) throw std::invalid_argument("the perturbation needs epsilon >= 1");
    std::int64_t scale = 4 * p.epsilon;
    std::uint64_t state = p.seed * 0x9e3779b97f4a7c15ULL + 1;
    auto next = [&state]() {
        state ^= state >> 12;
        state ^= state << 25;
        state ^= state >> 27;
        return state * 0x2545f4914f6cdd1dULL;
    };
    std::uint64_t span = static_cast<std::uint64_t>(2 * p.epsilon + 1);
    std::vector<Pt> out;
    out.reserve(points.size());
    for (const Pt& q : points) {
        if (std::abs(q.x) > (kCoordLimit - p.epsilon) / scale ||
            std::abs(q.y) > (kCoordLimit - p.epsilon) / scale) {
            throw std::invalid_argument("coordinates too large to perturb exactly");
        }
        std::int64_t jx = static_cast<std::int64_t>(next() % span) - p.epsilon;
        std::int64_t jy = static_cast<std::int64_t>(next() % span) - p.epsilon;
        out.push_back({q.x * scale + jx, q.y * scale + jy});
    }
    return out;
}

// Sweep triangulation of the convex hull, then local edge flips until every
// face circumcircle is empty; the face list doubles as the cycle basis.
inline Triangulation triangulate(const PointSet2D& ps, const Perturb& perturb = {}) {
    std::size_t n = ps.points.size();
    if (n < 3) throw std::invalid_argument("a triangulation needs at least three points");
    for (const Pt& q : ps.points) {
        if (std::abs(q.x) > kCoordLimit || std::abs(q.y) > kCoordLimit) {
            throw std::invalid_argument("coordinate magnitude exceeds the exact range");
        }
    }
    std::vector<Pt> pts = perturb.enabled ? perturb_points(ps.points, perturb) : ps.points;

    std::vector<Index> order(n);
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(), [&pts](Index a, Index b) {
        return std::pair(pts[a].x, pts[a].y) < std::pair(pts[b].x, pts[b].y);
    });
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (pts[order[i]] == pts[order[i + 1]]) {
            throw std::invalid_argument("points " + std::to_string(order[i]) + " and " +
                                        std::to_string(order[i + 1]) + " coincide");
        }
    }

    // Chains keep collinear boundary vertices and pop only on a strict turn,
    // so every emitted triangle uses adjacent boundary segments and no vertex
    // ever ends up in the interior of a triangulation edge.
    detail::TriSoup soup;
    auto extend = [&](std::vector<Index>& chain, Index idx, bool lower) {
        while (chain.size() >= 2) {
            detail::I128 o = detail::orient2d(pts[chain[chain.size() - 2]],
                                              pts[chain[chain.size() - 1]], pts[idx]);
            bool pop = lower ? o < 0 : o > 0;
            if (!pop) break;
            soup.add(chain[chain.size() - 2], chain[chain.size() - 1], idx, pts);
            chain.pop_back();
        }
        chain.push_back(idx);
    };
    std::vector<Index> lower_chain, upper_chain;
    for (Index idx : order) {
        extend(lower_chain, idx, true);
        extend(upper_chain, idx, false);
    }
    if (soup.tri.empty()) throw std::invalid_argument("the points are collinear");

    // Lawson flips: only strictly violating edges flip, so cocircular quads
    // stay put and termination follows from the lifted-surface potential.
    std::deque<std::pair<Index, Index>> work;
    for (const auto& [e, ts] : soup.edge_tris) work.push_back(e);
    while (!work.empty()) {
        auto e = work.front();
        work.pop_front();
        auto it = soup.edge_tris.find(e);
        if (it == soup.edge_tris.end() || it->second.size() != 2) continue;
        std::size_t t1 = it->second[0], t2 = it->second[1];
        Index u = 0, v = 0, c = 0;
        for (int i = 0; i < 3; ++i) {
            Index a = soup.tri[t1][i], b = soup.tri[t1][(i + 1) % 3];
            if (detail::TriSoup::key(a, b) == e) {
                u = a;
                v = b;
                c = soup.tri[t1][(i + 2) % 3];
            }
        }
        Index d = 0;
        for (Index w : soup.tri[t2]) {
            if (w != u && w != v) d = w;
        }
        if (detail::in_circle(pts[u], pts[v], pts[c], pts[d]) > 0) {
            soup.kill(t1);
            soup.kill(t2);
            soup.add(u, d, c, pts);
            soup.add(d, v, c, pts);
            work.push_back(detail::TriSoup::key(u, d));
            work.push_back(detail::TriSoup::key(d, v));
            work.push_back(detail::TriSoup::key(v, c));
            work.push_back(detail::TriSoup::key(c, u));
        }
    }

    std::vector<std::array<Index, 3>> faces;
    for (std::size_t t = 0; t < soup.tri.size(); ++t) {
        if (!soup.alive[t]) continue;
        std::array<Index, 3> f = soup.tri[t];
        std::sort(f.begin(), f.end());
        faces.push_back(f);
    }
    std::sort(faces.begin(), faces.end());

    // Post-hoc certificate: no point strictly inside any face circumcircle,
    // and a point on one means the triangulation is not unique.
    for (const auto& f : faces) {
        Pt a = pts[f[0]], b = pts[f[1]], c = pts[f[2]];
        if (detail::orient2d(a, b, c) < 0) std::swap(b, c);
        for (Index s = 0; s < static_cast<Index>(n); ++s) {
            if (s == f[0] || s == f[1] || s == f[2]) continue;
            detail::I128 val = detail::in_circle(a, b, c, pts[s]);
            if (val > 0) throw std::logic_error("a face circumcircle still contains a point");
            if (val == 0) {
                std::string msg = "points " + std::to_string(f[0]) + ", " + std::to_string(f[1]) +
                                  ", " + std::to_string(f[2]) + ", " + std::to_string(s) +
                                  " lie on one empty circle; the triangulation is not unique";
                if (perturb.enabled) msg += " (try another perturbation seed)";
                throw std::invalid_argument(msg);
            }
        }
    }

    std::set<std::pair<Index, Index>> edge_set;
    for (const auto& f : faces) {
        edge_set.insert({f[0], f[1]});
        edge_set.insert({f[0], f[2]});
        edge_set.insert({f[1], f[2]});
    }
    Graph g(n);
    std::map<std::pair<Index, Index>, Index> edge_id;
    for (const auto& e : edge_set) edge_id[e] = g.add_edge(e.first, e.second);
    if (!is_connected(g)) throw std::logic_error("triangulation produced a disconnected graph");

    std::vector<std::vector<Index>> rows;
    rows.reserve(faces.size());
    for (const auto& f : faces) {
        rows.push_back({edge_id[{f[0], f[1]}], edge_id[{f[0], f[2]}], edge_id[{f[1], f[2]}]});
        std::sort(rows.back().begin(), rows.back().end());
    }
    std::size_t n_rows = rows.size();
    CycleBasis basis =
        make_cycle_basis(g, SparseBitMatrix::from_rows(n_rows, g.n_edges(), std::move(rows)));
    return {std::move(g), std::move(faces), std::move(basis), std::move(pts)};
}

// Edge path between two triangulation vertices: when the circle on the
// segment is point-free the direct edge exists, otherwise split at the
// interior point nearest the midpoint and recurse on both halves. Distances
// shrink strictly, so the recursion consumes interior points and stops.
inline std::vector<Index> empty_circle_match(const Graph& g, const std::vector<Pt>& pts, Index a,
                                             Index b) {
    if (g.n_vertices() != pts.size()) {
        throw std::invalid_argument("the graph and the point set disagree on the vertex count");
    }
    if (a >= pts.size() || b >= pts.size() || a == b) {
        throw std::invalid_argument("matching endpoints must be two distinct vertices");
    }
    std::map<std::pair<Index, Index>, Index> edge_id;
    for (Index e = 0; e < g.n_edges(); ++e) edge_id[g.edge(e)] = e;

    std::vector<Index> path;
    auto rec = [&](auto&& self, Index u, Index v) -> void {
        bool found = false;
        Index best = 0;
        detail::I128 best_dist = 0;
        for (Index w = 0; w < static_cast<Index>(pts.size()); ++w) {
            if (w == u || w == v) continue;
            if (!detail::inside_diameter_circle(pts[u], pts[v], pts[w])) continue;
            detail::I128 dx = 2 * detail::I128(pts[w].x) - pts[u].x - pts[v].x;
            detail::I128 dy = 2 * detail::I128(pts[w].y) - pts[u].y - pts[v].y;
            detail::I128 dist = dx * dx + dy * dy;
            if (!found || dist < best_dist) {
                found = true;
                best = w;
                best_dist = dist;
            }
        }
        if (!found) {
            auto it = edge_id.find({std::min(u, v), std::max(u, v)});
            if (it == edge_id.end()) {
                throw std::logic_error(
                    "the diameter circle is empty but the edge is missing; the graph is not the "
                    "triangulation of these points");
            }
            path.push_back(it->second);
            return;
        }
        self(self, u, best);
        self(self, best, v);
    };
    rec(rec, a, b);
    return path;
}

struct LocalDesiderataReport {
    bool connected = false;
    Index max_degree = 0;
    std::size_t n_cycles = 0;
    bool all_cycles_triangles = false;
    bool basis_complete = false;               // rank equals m - n + 1
    Index max_cycles_per_edge = 0;
    std::vector<std::size_t> matching_lengths;  // per overlapping check, total path edges
    std::size_t max_matching_length = 0;

    bool pass() const { return connected && all_cycles_triangles && basis_complete; }
};

// Measures the locality desiderata on a triangulated support: connectivity,
// degree, triangle basis completeness, per-edge face counts, and the matched
// path length for every check that overlaps the support.
inline LocalDesiderataReport verify_local_desiderata(const Triangulation& tri,
                                                     const StabilizerCode& code,
                                                     std::vector<Index> zl_support) {
    std::sort(zl_support.begin(), zl_support.end());
    zl_support.erase(std::unique(zl_support.begin(), zl_support.end()), zl_support.end());
    if (!zl_support.empty() && zl_support.back() >= code.n_qubits()) {
        throw std::invalid_argument("the measured support leaves the qubit range");
    }
    if (tri.points.size() != zl_support.size()) {
        throw std::invalid_argument("the support needs one triangulated point per qubit");
    }
    if (!is_irreducible(code, make_pauli({}, zl_support))) {
        throw std::invalid_argument("the measured support is not irreducible");
    }

    LocalDesiderataReport rep;
    rep.connected = is_connected(tri.graph);
    for (const auto& nbrs : tri.graph.adjacency()) {
        rep.max_degree = std::max(rep.max_degree, static_cast<Index>(nbrs.size()));
    }
    rep.n_cycles = tri.faces.size();
    rep.all_cycles_triangles = true;
    for (std::size_t r = 0; r < tri.basis.cycles.n_rows(); ++r) {
        if (tri.basis.cycles.row(r).size() != 3) rep.all_cycles_triangles = false;
    }
    rep.basis_complete =
        rank(tri.basis.cycles) == tri.graph.n_edges() - tri.graph.n_vertices() + 1;

    std::vector<Index> per_edge(tri.graph.n_edges(), 0);
    for (std::size_t r = 0; r < tri.basis.cycles.n_rows(); ++r) {
        for (Index e : tri.basis.cycles.row(r)) ++per_edge[e];
    }
    for (Index c : per_edge) rep.max_cycles_per_edge = std::max(rep.max_cycles_per_edge, c);

    for (std::size_t r = 0; r < code.checks().n_rows(); ++r) {
        PauliOperator chk = code.check_as_pauli(r);
        std::vector<Index> verts;
        for (Index q : chk.x_part) {
            auto it = std::lower_bound(zl_support.begin(), zl_support.end(), q);
            if (it != zl_support.end() && *it == q) {
                verts.push_back(static_cast<Index>(it - zl_support.begin()));
            }
        }
        if (verts.empty()) continue;
        if (verts.size() % 2 != 0) {
            throw std::logic_error("a check overlaps the measured support oddly");
        }
        std::size_t total = 0;
        for (std::size_t i = 0; i + 1 < verts.size(); i += 2) {
            total += empty_circle_match(tri.graph, tri.points, verts[i], verts[i + 1]).size();
        }
        rep.matching_lengths.push_back(total);
        rep.max_matching_length = std::max(rep.max_matching_length, total);
    }
    return rep;
}

namespace detail {

inline boost::rational<long long> parse_rational(const std::string& tok) {
    auto bad = [&tok]() {
        return std::invalid_argument("bad coordinate '" + tok + "'");
    };
    std::size_t pos = 0;
    bool neg = false;
    if (pos < tok.size() && (tok[pos] == '+' || tok[pos] == '-')) {
        neg = tok[pos] == '-';
        ++pos;
    }
    auto digits = [&](long long& out) {
        if (pos >= tok.size() || !std::isdigit(static_cast<unsigned char>(tok[pos]))) throw bad();
        out = 0;
        while (pos < tok.size() && std::isdigit(static_cast<unsigned char>(tok[pos]))) {
            if (out > (std::numeric_limits<long long>::max() - 9) / 10) throw bad();
            out = out * 10 + (tok[pos] - '0');
            ++pos;
        }
    };
    long long whole = 0;
    digits(whole);
    boost::rational<long long> val(whole);
    if (pos < tok.size() && tok[pos] == '/') {
        ++pos;
        long long den = 0;
        digits(den);
        if (den == 0) throw bad();
        val = boost::rational<long long>(whole, den);
    } else if (pos < tok.size() && tok[pos] == '.') {
        ++pos;
        long long frac = 0;
        long long ten = 1;
        if (pos >= tok.size() || !std::isdigit(static_cast<unsigned char>(tok[pos]))) throw bad();
        while (pos < tok.size() && std::isdigit(static_cast<unsigned char>(tok[pos]))) {
            if (frac > (std::numeric_limits<long long>::max() - 9) / 10 || ten > 100'000'000'000'000LL) {
                throw bad();
            }
            frac = frac * 10 + (tok[pos] - '0');
            ten *= 10;
            ++pos;
        }
        val = boost::rational<long long>(whole * ten + frac, ten);
    }
    if (pos != tok.size()) throw bad();
    if (neg) val = -val;
    return val;
}

}  // namespace detail

// Points file: the count, then one "x y" pair per point; coordinates may be
// integers, decimals, or p/q fractions and are cleared to one integer grid.
inline PointSet2D parse_points(std::istream& is) {
    std::size_t n = 0;
    if (!(is >> n)) throw std::invalid_argument("the points file must start with the point count");
    std::vector<boost::rational<long long>> coords;
    coords.reserve(2 * n);
    for (std::size_t i = 0; i < 2 * n; ++i) {
        std::string tok;
        if (!(is >> tok)) throw std::invalid_argument("the points file ends early");
        coords.push_back(detail::parse_rational(tok));
    }
    long long common = 1;
    for (const auto& c : coords) {
        long long d = c.denominator() / std::gcd(common, c.denominator());
        if (common > kCoordLimit / std::max<long long>(d, 1)) {
            throw std::invalid_argument("coordinate denominators are too fine for exact range");
        }
        common *= d;
    }
    PointSet2D ps;
    ps.points.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto scale = [&](const boost::rational<long long>& c) {
            if (c.numerator() > kCoordLimit || c.numerator() < -kCoordLimit) {
                throw std::invalid_argument("coordinate exceeds the exact range after scaling");
            }
            long long v = c.numerator() * (common / c.denominator());
            if (v > kCoordLimit || v < -kCoordLimit) {
                throw std::invalid_argument("coordinate exceeds the exact range after scaling");
            }
            return v;
        };
        ps.points.push_back({scale(coords[2 * i]), scale(coords[2 * i + 1])});
    }
    return ps;
}

}  // namespace qdeform
