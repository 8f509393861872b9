// Independent reference implementations used only by tests.
// Everything here is deliberately naive and shares no code with the library:
// dense row-by-row arithmetic, full subset enumeration, combinatorial weight
// scans. Library results are compared against these, never the other way round.
#pragma once

#include <algorithm>
#include <bit>
#include <boost/multiprecision/cpp_int.hpp>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

using DenseMat = std::vector<std::vector<int>>;

inline DenseMat dense_zero(std::size_t rows, std::size_t cols) {
    return DenseMat(rows, std::vector<int>(cols, 0));
}

inline DenseMat dense_multiply(const DenseMat& a, const DenseMat& b) {
    if (a.empty() || b.empty()) {
        return dense_zero(a.size(), b.empty() ? 0 : b[0].size());
    }
    std::size_t n = a.size(), k = b.size(), m = b[0].size();
    DenseMat out = dense_zero(n, m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            int acc = 0;
            for (std::size_t t = 0; t < k; ++t) {
                acc ^= (a[i][t] & b[t][j]);
            }
            out[i][j] = acc;
        }
    }
    return out;
}

// Row echelon over GF(2), pivoting on the highest-index candidate row so the
// elimination order differs from usual lowest-row conventions.
inline std::size_t dense_rank(DenseMat a) {
    if (a.empty()) return 0;
    std::size_t rows = a.size(), cols = a[0].size();
    std::size_t rank = 0;
    std::vector<bool> used(rows, false);
    for (std::size_t c = 0; c < cols; ++c) {
        std::size_t pivot = rows;
        for (std::size_t r = rows; r-- > 0;) {
            if (!used[r] && a[r][c]) { pivot = r; break; }
        }
        if (pivot == rows) continue;
        used[pivot] = true;
        ++rank;
        for (std::size_t r = 0; r < rows; ++r) {
            if (r != pivot && a[r][c]) {
                for (std::size_t j = 0; j < cols; ++j) a[r][j] ^= a[pivot][j];
            }
        }
    }
    return rank;
}

// All GF(2) combinations of the rows of a; usable for row counts <= 20.
inline bool dense_in_rowspace_exhaustive(const DenseMat& a, const std::vector<int>& v) {
    std::size_t rows = a.size();
    if (rows > 20) throw std::runtime_error("exhaustive rowspace oracle capped at 20 rows");
    for (std::uint64_t mask = 0; mask < (1ull << rows); ++mask) {
        std::vector<int> acc(v.size(), 0);
        for (std::size_t r = 0; r < rows; ++r) {
            if (mask & (1ull << r)) {
                for (std::size_t c = 0; c < v.size(); ++c) acc[c] ^= a[r][c];
            }
        }
        if (acc == v) return true;
    }
    return false;
}

inline bool dense_in_rowspace(const DenseMat& a, const std::vector<int>& v) {
    DenseMat ext = a;
    ext.push_back(v);
    return dense_rank(ext) == dense_rank(a);
}

// Right nullspace basis by solving RREF back-substitution; result rows sorted
// by free-column index.
inline DenseMat dense_nullspace(const DenseMat& a) {
    if (a.empty()) return {};
    std::size_t rows = a.size(), cols = a[0].size();
    DenseMat m = a;
    std::vector<long> pivot_row_of_col(cols, -1);
    std::size_t rank = 0;
    for (std::size_t c = 0; c < cols && rank < rows; ++c) {
        std::size_t pivot = rows;
        for (std::size_t r = rank; r < rows; ++r) {
            if (m[r][c]) { pivot = r; break; }
        }
        if (pivot == rows) continue;
        std::swap(m[rank], m[pivot]);
        for (std::size_t r = 0; r < rows; ++r) {
            if (r != rank && m[r][c]) {
                for (std::size_t j = 0; j < cols; ++j) m[r][j] ^= m[rank][j];
            }
        }
        pivot_row_of_col[c] = static_cast<long>(rank);
        ++rank;
    }
    DenseMat basis;
    for (std::size_t c = 0; c < cols; ++c) {
        if (pivot_row_of_col[c] >= 0) continue;
        std::vector<int> v(cols, 0);
        v[c] = 1;
        for (std::size_t pc = 0; pc < cols; ++pc) {
            long pr = pivot_row_of_col[pc];
            if (pr >= 0 && m[static_cast<std::size_t>(pr)][c]) v[pc] = 1;
        }
        basis.push_back(v);
    }
    return basis;
}

// Pairwise Pauli commutation on a symplectic matrix [X|Z]: rows i and j
// anticommute iff |Xi & Zj| + |Zi & Xj| is odd.
inline bool commutation_oracle(const DenseMat& h) {
    if (h.empty()) return true;
    std::size_t rows = h.size(), cols = h[0].size();
    std::size_t n = cols / 2;
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < rows; ++j) {
            int parity = 0;
            for (std::size_t q = 0; q < n; ++q) {
                parity ^= (h[i][q] & h[j][n + q]);
                parity ^= (h[i][n + q] & h[j][q]);
            }
            if (parity) return false;
        }
    }
    return true;
}

// Exact fraction with cross-multiplied comparison; small values only.
struct Frac {
    long long num = 0;
    long long den = 1;
};

inline bool frac_less(const Frac& a, const Frac& b) {
    return static_cast<__int128>(a.num) * b.den < static_cast<__int128>(b.num) * a.den;
}

inline bool frac_equal(const Frac& a, const Frac& b) {
    return static_cast<__int128>(a.num) * b.den == static_cast<__int128>(b.num) * a.den;
}

struct ExpansionOracleResult {
    Frac value;
    std::uint64_t witness_mask = 0;
    bool any_subset = false;
};

// Relative expansion by scanning every one of the 2^n vertex subsets and
// recomputing the cut size from scratch. U is a bitmask over vertices.
inline ExpansionOracleResult expansion_oracle(
    std::size_t n_vertices,
    const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges,
    std::uint64_t u_mask,
    long long t) {
    ExpansionOracleResult res;
    long long u_size = static_cast<long long>(std::popcount(u_mask));
    for (std::uint64_t mask = 0; mask < (1ull << n_vertices); ++mask) {
        long long cut = 0;
        for (const auto& e : edges) {
            bool a = (mask >> e.first) & 1, b = (mask >> e.second) & 1;
            if (a != b) ++cut;
        }
        long long inside = static_cast<long long>(std::popcount(mask & u_mask));
        long long denom = std::min({t, inside, u_size - inside});
        if (denom <= 0) continue;
        Frac f{cut, denom};
        auto as_list = [n_vertices](std::uint64_t m) {
            std::vector<std::size_t> out;
            for (std::size_t v = 0; v < n_vertices; ++v) {
                if ((m >> v) & 1) out.push_back(v);
            }
            return out;
        };
        bool better = !res.any_subset || frac_less(f, res.value);
        if (!better && frac_equal(f, res.value)) {
            auto a = as_list(mask), b = as_list(res.witness_mask);
            better = std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
        }
        if (better) {
            res.value = f;
            res.witness_mask = mask;
            res.any_subset = true;
        }
    }
    return res;
}

// Cyclomatic number m - n + p via union-find.
inline std::size_t cyclomatic_number(
    std::size_t n_vertices,
    const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges) {
    std::vector<std::size_t> parent(n_vertices);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        while (parent[x] != x) { parent[x] = parent[parent[x]]; x = parent[x]; }
        return x;
    };
    for (const auto& e : edges) {
        parent[find(e.first)] = find(e.second);
    }
    std::set<std::size_t> roots;
    for (std::size_t v = 0; v < n_vertices; ++v) roots.insert(find(v));
    return edges.size() - n_vertices + roots.size();
}

// CSS distance by scanning supports in increasing weight. The X-side distance
// is the least |S| with hz . 1_S = 0 and 1_S outside rowspace(hx); Z-side is
// symmetric. Returns 0 if no nontrivial logical of weight <= max_weight exists.
inline std::size_t css_side_distance_oracle(const DenseMat& stab_same_type,
                                            const DenseMat& stab_other_type,
                                            std::size_t n,
                                            std::size_t max_weight) {
    std::size_t base_rank = dense_rank(stab_same_type);
    std::vector<std::size_t> support;
    for (std::size_t w = 1; w <= std::min(n, max_weight); ++w) {
        support.assign(w, 0);
        std::iota(support.begin(), support.end(), 0);
        while (true) {
            std::vector<int> v(n, 0);
            for (std::size_t q : support) v[q] = 1;
            bool commutes = true;
            for (const auto& row : stab_other_type) {
                int parity = 0;
                for (std::size_t q : support) parity ^= row[q];
                if (parity) { commutes = false; break; }
            }
            if (commutes) {
                DenseMat ext = stab_same_type;
                ext.push_back(v);
                if (dense_rank(ext) != base_rank) return w;
            }
            // next combination
            std::size_t i = w;
            while (i-- > 0) {
                if (support[i] != i + n - w) {
                    ++support[i];
                    for (std::size_t j = i + 1; j < w; ++j) support[j] = support[j - 1] + 1;
                    break;
                }
                if (i == 0) goto next_weight;
            }
        }
    next_weight:;
    }
    return 0;
}

inline std::size_t css_distance_oracle(const DenseMat& hx, const DenseMat& hz,
                                       std::size_t n, std::size_t max_weight) {
    std::size_t dx = css_side_distance_oracle(hx, hz, n, max_weight);
    std::size_t dz = css_side_distance_oracle(hz, hx, n, max_weight);
    if (dx == 0) return dz;
    if (dz == 0) return dx;
    return std::min(dx, dz);
}

// Exact circumcircle test built from the circumcenter itself: solve the two
// perpendicular-bisector equations with Cramer's rule in big integers and
// compare squared distances. Returns +1 if p is strictly inside the circle
// through a, b, c; 0 if on it; -1 if outside. The triangle must not be
// degenerate.
using BigInt = boost::multiprecision::cpp_int;

struct Pt {
    long long x = 0;
    long long y = 0;
};

inline int circumcircle_side_oracle(Pt a, Pt b, Pt c, Pt p) {
    // Bisector of (a,b): 2(b-a).center = |b|^2 - |a|^2, likewise for (a,c).
    BigInt a11 = 2 * (BigInt(b.x) - a.x), a12 = 2 * (BigInt(b.y) - a.y);
    BigInt a21 = 2 * (BigInt(c.x) - a.x), a22 = 2 * (BigInt(c.y) - a.y);
    BigInt r1 = BigInt(b.x) * b.x + BigInt(b.y) * b.y - BigInt(a.x) * a.x - BigInt(a.y) * a.y;
    BigInt r2 = BigInt(c.x) * c.x + BigInt(c.y) * c.y - BigInt(a.x) * a.x - BigInt(a.y) * a.y;
    BigInt det = a11 * a22 - a12 * a21;
    if (det == 0) throw std::runtime_error("degenerate triangle in circumcircle oracle");
    // center = (cx/det, cy/det)
    BigInt cx = r1 * a22 - r2 * a12;
    BigInt cy = a11 * r2 - a21 * r1;
    auto sq_dist_scaled = [&](Pt q) {
        BigInt dx = BigInt(q.x) * det - cx;
        BigInt dy = BigInt(q.y) * det - cy;
        return dx * dx + dy * dy;
    };
    BigInt dp = sq_dist_scaled(p);
    BigInt da = sq_dist_scaled(a);
    if (dp < da) return 1;
    if (dp == da) return 0;
    return -1;
}

}  // namespace oracle
