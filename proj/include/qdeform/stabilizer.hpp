// Stabilizer and CSS codes as symplectic check matrices, sign-free Pauli
// operators, exhaustive and weight-bounded distance scans, and the
// support-restriction machinery used to reason about irreducible Z logicals.
#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <tuple>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qdeform/gf2.hpp"

namespace qdeform {

// Sign-free Pauli: sorted supports of the X and Z parts. A qubit in both
// supports acts as Y and counts once toward the weight.
struct PauliOperator {
    std::vector<Index> x_part;
    std::vector<Index> z_part;

    bool operator==(const PauliOperator&) const = default;
};

inline PauliOperator make_pauli(std::vector<Index> x, std::vector<Index> z) {
    std::sort(x.begin(), x.end());
    std::sort(z.begin(), z.end());
    x.erase(std::unique(x.begin(), x.end()), x.end());
    z.erase(std::unique(z.begin(), z.end()), z.end());
    return {std::move(x), std::move(z)};
}

inline std::size_t weight(const PauliOperator& p) {
    std::vector<Index> u;
    std::set_union(p.x_part.begin(), p.x_part.end(), p.z_part.begin(), p.z_part.end(),
                   std::back_inserter(u));
    return u.size();
}

namespace detail {

inline std::size_t intersection_size(const std::vector<Index>& a, const std::vector<Index>& b) {
    std::size_t count = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) {
            ++ia;
        } else if (*ib < *ia) {
            ++ib;
        } else {
            ++count;
            ++ia;
            ++ib;
        }
    }
    return count;
}

inline std::vector<Index> symmetric_difference(const std::vector<Index>& a,
                                               const std::vector<Index>& b) {
    std::vector<Index> out;
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(),
                                  std::back_inserter(out));
    return out;
}

}  // namespace detail

inline bool commutes(const PauliOperator& a, const PauliOperator& b) {
    std::size_t cross = detail::intersection_size(a.x_part, b.z_part) +
                        detail::intersection_size(a.z_part, b.x_part);
    return cross % 2 == 0;
}

inline PauliOperator multiply(const PauliOperator& a, const PauliOperator& b) {
    return {detail::symmetric_difference(a.x_part, b.x_part),
            detail::symmetric_difference(a.z_part, b.z_part)};
}

struct NamedLogical {
    std::string name;
    PauliOperator op;
};

// Checks live in a single r x 2n matrix with columns [X half | Z half]. Codes
// built from an X/Z split keep the blocks for the cheaper CSS code paths.
class StabilizerCode {
public:
    static StabilizerCode from_checks(std::size_t n, SparseBitMatrix checks) {
        if (checks.n_cols() != 2 * n) {
            throw std::invalid_argument("check matrix must have 2n columns");
        }
        if (!symplectic_commutes(checks)) {
            throw std::invalid_argument("checks do not mutually commute");
        }
        StabilizerCode c;
        c.n_ = n;
        c.checks_ = std::move(checks);
        return c;
    }

    std::size_t n_qubits() const { return n_; }
    const SparseBitMatrix& checks() const { return checks_; }
    bool is_css() const { return css_.has_value(); }
    const SparseBitMatrix& hx() const { return require_css().first; }
    const SparseBitMatrix& hz() const { return require_css().second; }
    const std::vector<NamedLogical>& named_logicals() const { return named_logicals_; }

    PauliOperator check_as_pauli(std::size_t r) const {
        PauliOperator p;
        for (Index c : checks_.row(r)) {
            if (c < n_) {
                p.x_part.push_back(c);
            } else {
                p.z_part.push_back(c - static_cast<Index>(n_));
            }
        }
        return p;
    }

    bool commutes_with_checks(const PauliOperator& p) const {
        for (std::size_t r = 0; r < checks_.n_rows(); ++r) {
            if (!commutes(check_as_pauli(r), p)) return false;
        }
        return true;
    }

    void add_logical(std::string name, PauliOperator op) {
        if (!commutes_with_checks(op)) {
            throw std::invalid_argument("logical '" + name + "' anticommutes with a check");
        }
        named_logicals_.push_back({std::move(name), std::move(op)});
    }

    friend StabilizerCode css_code(SparseBitMatrix hx, SparseBitMatrix hz);

    bool operator==(const StabilizerCode& other) const {
        return n_ == other.n_ && checks_ == other.checks_ && css_ == other.css_;
    }

private:
    StabilizerCode() = default;

    const std::pair<SparseBitMatrix, SparseBitMatrix>& require_css() const {
        if (!css_) throw std::invalid_argument("code was not built from an X/Z split");
        return *css_;
    }

    std::size_t n_ = 0;
    SparseBitMatrix checks_;
    std::optional<std::pair<SparseBitMatrix, SparseBitMatrix>> css_;
    std::vector<NamedLogical> named_logicals_;
};

inline StabilizerCode css_code(SparseBitMatrix hx, SparseBitMatrix hz) {
    if (hx.n_cols() != hz.n_cols()) {
        throw std::invalid_argument("X and Z blocks disagree on qubit count");
    }
    std::size_t n = hx.n_cols();
    auto product = multiply(hx, hz.transpose());
    for (std::size_t i = 0; i < product.n_rows(); ++i) {
        if (!product.row(i).empty()) {
            throw std::invalid_argument("X check " + std::to_string(i) +
                                        " anticommutes with Z check " +
                                        std::to_string(product.row(i).front()));
        }
    }
    SparseBitMatrix zero_x(hx.n_rows(), n);
    SparseBitMatrix zero_z(hz.n_rows(), n);
    auto checks = vstack(hstack(hx, zero_x), hstack(zero_z, hz));
    StabilizerCode c;
    c.n_ = n;
    c.checks_ = std::move(checks);
    c.css_ = {std::move(hx), std::move(hz)};
    return c;
}

inline std::size_t logical_qubit_count(const StabilizerCode& c) {
    if (c.is_css()) return c.n_qubits() - rank(c.hx()) - rank(c.hz());
    return c.n_qubits() - rank(c.checks());
}

inline bool is_nontrivial_logical(const StabilizerCode& c, const PauliOperator& p) {
    if (!c.commutes_with_checks(p)) return false;
    std::vector<Index> combined = p.x_part;
    for (Index q : p.z_part) combined.push_back(q + static_cast<Index>(c.n_qubits()));
    std::sort(combined.begin(), combined.end());
    return !in_row_space(c.checks(), combined);
}

class BudgetExceeded : public std::runtime_error {
public:
    BudgetExceeded(std::size_t needed, std::size_t budget)
        : std::runtime_error("enumeration needs " + std::to_string(needed) +
                             " steps but the budget is " + std::to_string(budget)),
          needed_(needed),
          budget_(budget) {}
    std::size_t needed_budget() const { return needed_; }
    std::size_t budget() const { return budget_; }

private:
    std::size_t needed_;
    std::size_t budget_;
};

struct DistanceMode {
    bool exhaustive_scan = true;
    std::size_t max_weight = 0;
    std::size_t budget = std::size_t{1} << 26;

    static DistanceMode exhaustive(std::size_t budget = std::size_t{1} << 26) {
        return {true, 0, budget};
    }
    static DistanceMode weight_bounded(std::size_t w, std::size_t budget = std::size_t{1} << 26) {
        return {false, w, budget};
    }
};

struct DistanceReport {
    std::optional<std::size_t> distance;   // exact when set
    std::size_t lower_bound = 0;           // d >= lower_bound holds either way
    std::optional<PauliOperator> witness;  // nontrivial logical realizing *distance
};

namespace detail {

// Dense words for the coset scans.
struct PauliWords {
    std::vector<std::uint64_t> x, z;
};

inline PauliWords make_words(std::size_t n, const std::vector<Index>& x_supp,
                             const std::vector<Index>& z_supp) {
    PauliWords w;
    w.x.assign((n + 63) / 64, 0);
    w.z.assign((n + 63) / 64, 0);
    for (Index c : x_supp) w.x[c / 64] |= std::uint64_t{1} << (c % 64);
    for (Index c : z_supp) w.z[c / 64] |= std::uint64_t{1} << (c % 64);
    return w;
}

inline void xor_into(PauliWords& acc, const PauliWords& v) {
    for (std::size_t i = 0; i < acc.x.size(); ++i) acc.x[i] ^= v.x[i];
    for (std::size_t i = 0; i < acc.z.size(); ++i) acc.z[i] ^= v.z[i];
}

inline std::size_t union_weight(const PauliWords& w) {
    std::size_t total = 0;
    for (std::size_t i = 0; i < w.x.size(); ++i) {
        total += static_cast<std::size_t>(std::popcount(w.x[i] | w.z[i]));
    }
    return total;
}

inline PauliOperator words_to_pauli(const PauliWords& w, std::size_t n) {
    PauliOperator p;
    for (std::size_t q = 0; q < n; ++q) {
        if ((w.x[q / 64] >> (q % 64)) & 1) p.x_part.push_back(static_cast<Index>(q));
        if ((w.z[q / 64] >> (q % 64)) & 1) p.z_part.push_back(static_cast<Index>(q));
    }
    return p;
}

// Incremental eliminator over dense word vectors; insert returns true when
// the vector extended the span.
struct WordSpan {
    std::vector<std::vector<std::uint64_t>> rows;
    std::vector<std::size_t> pivot;

    bool insert(std::vector<std::uint64_t> v) {
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if ((v[pivot[i] / 64] >> (pivot[i] % 64)) & 1) {
                for (std::size_t w = 0; w < v.size(); ++w) v[w] ^= rows[i][w];
            }
        }
        for (std::size_t w = 0; w < v.size(); ++w) {
            if (v[w] != 0) {
                std::size_t p = w * 64 + static_cast<std::size_t>(std::countr_zero(v[w]));
                rows.push_back(std::move(v));
                pivot.push_back(p);
                return true;
            }
        }
        return false;
    }
};

inline std::vector<std::uint64_t> concat_words(const PauliWords& w) {
    std::vector<std::uint64_t> out = w.x;
    out.insert(out.end(), w.z.begin(), w.z.end());
    return out;
}

// Minimum union weight over span(stab + ext) excluding span(stab). Walks the
// Gray code of the combined coefficient space starting past the pure
// stabilizer block; the high coefficient bits index ext, so every visited
// vector lies in a nontrivial coset. First minimal vector in scan order wins.
inline std::pair<std::size_t, PauliWords> scan_cosets(const std::vector<PauliWords>& stab,
                                                      const std::vector<PauliWords>& ext,
                                                      std::size_t budget) {
    std::size_t r = stab.size();
    std::size_t dim = r + ext.size();
    if (dim >= 48 || (std::size_t{1} << dim) > budget) {
        std::size_t needed = dim >= 48 ? std::numeric_limits<std::size_t>::max()
                                       : std::size_t{1} << dim;
        throw BudgetExceeded(needed, budget);
    }
    auto basis_at = [&](std::size_t b) -> const PauliWords& {
        return b < r ? stab[b] : ext[b - r];
    };
    std::uint64_t start = std::uint64_t{1} << r;
    std::uint64_t end = std::uint64_t{1} << dim;
    PauliWords state = basis_at(0);  // placeholder shape
    for (auto& w : state.x) w = 0;
    for (auto& w : state.z) w = 0;
    std::uint64_t gray = start ^ (start >> 1);
    for (std::size_t b = 0; b < dim; ++b) {
        if ((gray >> b) & 1) xor_into(state, basis_at(b));
    }
    std::size_t best = std::numeric_limits<std::size_t>::max();
    PauliWords best_words = state;
    for (std::uint64_t i = start;; ++i) {
        std::size_t w = union_weight(state);
        if (w < best) {
            best = w;
            best_words = state;
        }
        if (i + 1 == end) break;
        xor_into(state, basis_at(static_cast<std::size_t>(std::countr_zero(i + 1))));
    }
    return {best, best_words};
}

// Splits a candidate space into an independent basis of the modded-out rows
// followed by an extension drawn from the candidate basis.
struct CosetBasis {
    std::vector<PauliWords> stab, ext;
};

inline CosetBasis build_coset_basis(const std::vector<PauliWords>& mod_rows,
                                    const std::vector<PauliWords>& candidates) {
    CosetBasis out;
    WordSpan span;
    for (const auto& row : mod_rows) {
        if (span.insert(concat_words(row))) out.stab.push_back(row);
    }
    for (const auto& cand : candidates) {
        if (span.insert(concat_words(cand))) out.ext.push_back(cand);
    }
    return out;
}

inline std::vector<PauliWords> matrix_rows_as_words(const SparseBitMatrix& m, std::size_t n,
                                                    bool x_side) {
    std::vector<PauliWords> out;
    out.reserve(m.n_rows());
    for (std::size_t r = 0; r < m.n_rows(); ++r) {
        out.push_back(x_side ? make_words(n, m.row(r), {}) : make_words(n, {}, m.row(r)));
    }
    return out;
}

inline std::vector<PauliWords> symplectic_rows_as_words(const SparseBitMatrix& checks,
                                                        std::size_t n) {
    std::vector<PauliWords> out;
    out.reserve(checks.n_rows());
    for (std::size_t r = 0; r < checks.n_rows(); ++r) {
        std::vector<Index> x, z;
        for (Index c : checks.row(r)) {
            if (c < n) {
                x.push_back(c);
            } else {
                z.push_back(c - static_cast<Index>(n));
            }
        }
        out.push_back(make_words(n, x, z));
    }
    return out;
}

// Exhaustive minimum over one CSS side: vectors killed by `opposite` modulo
// rows of `own`.
inline std::pair<std::size_t, PauliOperator> css_side_minimum(const SparseBitMatrix& opposite,
                                                             const SparseBitMatrix& own,
                                                             std::size_t n, bool x_side,
                                                             std::size_t budget) {
    auto null_basis = nullspace_basis(opposite);
    auto coset = build_coset_basis(matrix_rows_as_words(own, n, x_side),
                                   matrix_rows_as_words(null_basis, n, x_side));
    auto [w, words] = scan_cosets(coset.stab, coset.ext, budget);
    return {w, words_to_pauli(words, n)};
}

inline SparseBitMatrix swap_halves(const SparseBitMatrix& checks, std::size_t n) {
    std::vector<std::vector<Index>> rows(checks.n_rows());
    for (std::size_t r = 0; r < checks.n_rows(); ++r) {
        for (Index c : checks.row(r)) {
            rows[r].push_back(c < n ? c + static_cast<Index>(n) : c - static_cast<Index>(n));
        }
        std::sort(rows[r].begin(), rows[r].end());
    }
    std::size_t n_rows = rows.size();
    return SparseBitMatrix::from_rows(n_rows, checks.n_cols(), std::move(rows));
}

inline std::pair<std::size_t, PauliOperator> symplectic_minimum(const StabilizerCode& c,
                                                                std::size_t budget) {
    std::size_t n = c.n_qubits();
    auto null_basis = nullspace_basis(swap_halves(c.checks(), n));
    std::vector<PauliWords> candidates;
    candidates.reserve(null_basis.n_rows());
    for (std::size_t r = 0; r < null_basis.n_rows(); ++r) {
        std::vector<Index> x, z;
        for (Index col : null_basis.row(r)) {
            if (col < n) {
                x.push_back(col);
            } else {
                z.push_back(col - static_cast<Index>(n));
            }
        }
        candidates.push_back(make_words(n, x, z));
    }
    auto coset = build_coset_basis(symplectic_rows_as_words(c.checks(), n), candidates);
    auto [w, words] = scan_cosets(coset.stab, coset.ext, budget);
    return {w, words_to_pauli(words, n)};
}

// Ascending-weight search. Visits supports in lexicographic order, X side
// before Z side for CSS codes, and letters in X<Z<Y order per qubit for
// generic codes, so the first hit is deterministic and of minimum weight.
inline std::optional<PauliOperator> bounded_search(const StabilizerCode& c, std::size_t max_w,
                                                  std::size_t budget) {
    std::size_t n = c.n_qubits();
    double planned = 0;
    for (std::size_t t = 1; t <= max_w; ++t) {
        double combos = 1;
        for (std::size_t i = 0; i < t; ++i) combos *= static_cast<double>(n - i) / (i + 1);
        planned += combos * (c.is_css() ? 2.0 : std::pow(3.0, static_cast<double>(t)));
    }
    if (planned > static_cast<double>(budget)) {
        throw BudgetExceeded(static_cast<std::size_t>(planned), budget);
    }
    std::vector<Index> support;
    std::optional<PauliOperator> hit;
    auto try_candidate = [&](const PauliOperator& p) {
        if (hit) return;
        if (is_nontrivial_logical(c, p)) hit = p;
    };
    auto visit_support = [&]() {
        if (c.is_css()) {
            try_candidate({support, {}});
            try_candidate({{}, support});
        } else {
            std::size_t t = support.size();
            std::vector<int> letter(t, 0);  // 0 = X, 1 = Z, 2 = Y
            while (true) {
                PauliOperator p;
                for (std::size_t i = 0; i < t; ++i) {
                    if (letter[i] != 1) p.x_part.push_back(support[i]);
                    if (letter[i] != 0) p.z_part.push_back(support[i]);
                }
                try_candidate(p);
                if (hit) return;
                std::size_t pos = 0;
                while (pos < t && letter[pos] == 2) {
                    letter[pos] = 0;
                    ++pos;
                }
                if (pos == t) break;
                ++letter[pos];
            }
        }
    };
    for (std::size_t t = 1; t <= max_w && t <= n && !hit; ++t) {
        support.resize(t);
        for (std::size_t i = 0; i < t; ++i) support[i] = static_cast<Index>(i);
        while (!hit) {
            visit_support();
            long pos = static_cast<long>(t) - 1;
            while (pos >= 0 && support[pos] == n - t + static_cast<std::size_t>(pos)) --pos;
            if (pos < 0) break;
            ++support[pos];
            for (std::size_t i = static_cast<std::size_t>(pos) + 1; i < t; ++i) {
                support[i] = support[i - 1] + 1;
            }
        }
    }
    return hit;
}

}  // namespace detail

inline DistanceReport distance(const StabilizerCode& c, DistanceMode mode = DistanceMode::exhaustive()) {
    if (logical_qubit_count(c) == 0) {
        throw std::invalid_argument("code has no logical qubits");
    }
    DistanceReport report;
    if (mode.exhaustive_scan) {
        std::size_t best;
        PauliOperator witness;
        if (c.is_css()) {
            auto [wx, px] = detail::css_side_minimum(c.hz(), c.hx(), c.n_qubits(), true, mode.budget);
            auto [wz, pz] = detail::css_side_minimum(c.hx(), c.hz(), c.n_qubits(), false, mode.budget);
            best = std::min(wx, wz);
            witness = wx <= wz ? px : pz;
        } else {
            std::tie(best, witness) = detail::symplectic_minimum(c, mode.budget);
        }
        report.distance = best;
        report.lower_bound = best;
        report.witness = std::move(witness);
        return report;
    }
    auto hit = detail::bounded_search(c, mode.max_weight, mode.budget);
    if (hit) {
        report.distance = weight(*hit);
        report.lower_bound = *report.distance;
        report.witness = std::move(hit);
    } else {
        report.lower_bound = mode.max_weight + 1;
    }
    return report;
}

// Restriction of the X block to the support of a Z operator always contains
// the all-ones vector in its nullspace; irreducible means nothing else does.
inline bool is_irreducible(const StabilizerCode& c, const PauliOperator& zl) {
    if (!zl.x_part.empty()) throw std::invalid_argument("operator is not Z-type");
    if (!c.commutes_with_checks(zl)) {
        throw std::invalid_argument("operator anticommutes with a check");
    }
    auto restricted = restrict_columns(c.hx(), zl.z_part);
    auto basis = nullspace_basis(restricted);
    return basis.n_rows() == 1;
}

// Multiplies px by X-type checks so its X part leaves support(zl). The
// restricted X block spans every even-weight pattern on the support, which is
// exactly what commutation with zl guarantees about px.
inline PauliOperator clean_overlap(const StabilizerCode& c, const PauliOperator& px,
                                   const PauliOperator& zl) {
    if (!is_irreducible(c, zl)) {
        throw std::invalid_argument("cleaning target is not an irreducible Z operator");
    }
    if (!commutes(px, zl)) {
        throw std::invalid_argument("operator anticommutes with the cleaning target");
    }
    const auto& supp = zl.z_part;
    std::size_t s = supp.size();
    auto restricted = restrict_columns(c.hx(), supp);
    std::size_t n_words = (s + 63) / 64;
    auto to_words = [&](const std::vector<Index>& cols) {
        std::vector<std::uint64_t> w(n_words, 0);
        for (Index col : cols) w[col / 64] |= std::uint64_t{1} << (col % 64);
        return w;
    };
    // Eliminate restricted rows while tracking which original checks combine
    // into each reduced row.
    std::vector<std::vector<std::uint64_t>> rows;
    std::vector<std::vector<Index>> combos;
    std::vector<std::size_t> pivots;
    for (std::size_t r = 0; r < restricted.n_rows(); ++r) {
        auto v = to_words(restricted.row(r));
        std::vector<Index> combo{static_cast<Index>(r)};
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if ((v[pivots[i] / 64] >> (pivots[i] % 64)) & 1) {
                for (std::size_t w = 0; w < n_words; ++w) v[w] ^= rows[i][w];
                combo = detail::symmetric_difference(combo, combos[i]);
            }
        }
        for (std::size_t w = 0; w < n_words; ++w) {
            if (v[w] != 0) {
                pivots.push_back(w * 64 + static_cast<std::size_t>(std::countr_zero(v[w])));
                rows.push_back(std::move(v));
                combos.push_back(std::move(combo));
                break;
            }
        }
    }
    std::vector<Index> target_local;
    for (std::size_t i = 0; i < s; ++i) {
        if (std::binary_search(px.x_part.begin(), px.x_part.end(), supp[i])) {
            target_local.push_back(static_cast<Index>(i));
        }
    }
    auto t = to_words(target_local);
    std::vector<Index> chosen;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if ((t[pivots[i] / 64] >> (pivots[i] % 64)) & 1) {
            for (std::size_t w = 0; w < n_words; ++w) t[w] ^= rows[i][w];
            chosen = detail::symmetric_difference(chosen, combos[i]);
        }
    }
    for (auto w : t) {
        if (w != 0) throw std::logic_error("overlap pattern escaped the restricted row space");
    }
    std::vector<Index> multiplier;
    for (Index r : chosen) multiplier = detail::symmetric_difference(multiplier, c.hx().row(r));
    return {detail::symmetric_difference(px.x_part, multiplier), px.z_part};
}

// Repetition code on n bits: full-rank X-type chain checks and no Z checks.
// One logical qubit; the bare X on qubit 0 is an unprotected weight-1
// logical, the all-ones Z is the protected weight-n one.
inline StabilizerCode repetition_code(std::size_t n) {
    auto c = css_code(full_rank_repetition_check(n), SparseBitMatrix(0, n));
    std::vector<Index> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = static_cast<Index>(i);
    c.add_logical("X", {{0}, {}});
    c.add_logical("Z", {{}, all});
    return c;
}

// Disjoint union of two X/Z-split codes; block b's qubits follow block a's,
// logicals keep their names prefixed by the block tag.
inline StabilizerCode direct_sum(const StabilizerCode& a, const StabilizerCode& b) {
    if (!a.is_css() || !b.is_css()) {
        throw std::invalid_argument("both blocks must carry an X/Z split");
    }
    std::size_t na = a.n_qubits();
    auto shift = [&](const SparseBitMatrix& m, std::size_t total) {
        std::vector<std::vector<Index>> rows(m.n_rows());
        for (std::size_t r = 0; r < m.n_rows(); ++r) {
            for (Index col : m.row(r)) rows[r].push_back(col + static_cast<Index>(na));
        }
        std::size_t n_rows = rows.size();
        return SparseBitMatrix::from_rows(n_rows, total, std::move(rows));
    };
    std::size_t n = na + b.n_qubits();
    auto widen = [&](const SparseBitMatrix& m) {
        std::vector<std::vector<Index>> rows(m.n_rows());
        for (std::size_t r = 0; r < m.n_rows(); ++r) rows[r] = m.row(r);
        std::size_t n_rows = rows.size();
        return SparseBitMatrix::from_rows(n_rows, n, std::move(rows));
    };
    auto hx = vstack(widen(a.hx()), shift(b.hx(), n));
    auto hz = vstack(widen(a.hz()), shift(b.hz(), n));
    auto code = css_code(std::move(hx), std::move(hz));
    for (const auto& l : a.named_logicals()) code.add_logical("a." + l.name, l.op);
    for (const auto& l : b.named_logicals()) {
        PauliOperator shifted;
        for (Index q : l.op.x_part) shifted.x_part.push_back(q + static_cast<Index>(na));
        for (Index q : l.op.z_part) shifted.z_part.push_back(q + static_cast<Index>(na));
        code.add_logical("b." + l.name, shifted);
    }
    return code;
}

inline nlohmann::ordered_json pauli_to_json(const NamedLogical& l) {
    nlohmann::ordered_json j;
    j["name"] = l.name;
    j["x"] = l.op.x_part;
    j["z"] = l.op.z_part;
    return j;
}

inline nlohmann::ordered_json code_to_json(const StabilizerCode& c) {
    nlohmann::ordered_json j;
    j["n"] = c.n_qubits();
    if (c.is_css()) {
        j["hx"] = nlohmann::ordered_json::array();
        for (std::size_t r = 0; r < c.hx().n_rows(); ++r) j["hx"].push_back(c.hx().row(r));
        j["hz"] = nlohmann::ordered_json::array();
        for (std::size_t r = 0; r < c.hz().n_rows(); ++r) j["hz"].push_back(c.hz().row(r));
    } else {
        j["checks"] = nlohmann::ordered_json::array();
        for (std::size_t r = 0; r < c.checks().n_rows(); ++r) {
            auto p = c.check_as_pauli(r);
            nlohmann::ordered_json e;
            e["x"] = p.x_part;
            e["z"] = p.z_part;
            j["checks"].push_back(e);
        }
    }
    j["logicals"] = nlohmann::ordered_json::array();
    for (const auto& l : c.named_logicals()) j["logicals"].push_back(pauli_to_json(l));
    return j;
}

inline StabilizerCode code_from_json(const nlohmann::ordered_json& j) {
    std::size_t n = j.at("n").get<std::size_t>();
    auto read_rows = [&](const nlohmann::ordered_json& arr) {
        std::vector<std::vector<Index>> rows;
        for (const auto& row : arr) {
            std::vector<Index> cols;
            for (const auto& c : row) cols.push_back(c.get<Index>());
            std::sort(cols.begin(), cols.end());
            rows.push_back(std::move(cols));
        }
        std::size_t n_rows = rows.size();
        return SparseBitMatrix::from_rows(n_rows, n, std::move(rows));
    };
    StabilizerCode code = [&] {
        if (j.contains("hx")) return css_code(read_rows(j.at("hx")), read_rows(j.at("hz")));
        std::vector<std::vector<Index>> rows;
        for (const auto& chk : j.at("checks")) {
            std::vector<Index> cols;
            for (const auto& c : chk.at("x")) cols.push_back(c.get<Index>());
            for (const auto& c : chk.at("z")) {
                cols.push_back(c.get<Index>() + static_cast<Index>(n));
            }
            std::sort(cols.begin(), cols.end());
            rows.push_back(std::move(cols));
        }
        std::size_t n_rows = rows.size();
        return StabilizerCode::from_checks(
            n, SparseBitMatrix::from_rows(n_rows, 2 * n, std::move(rows)));
    }();
    if (j.contains("logicals")) {
        for (const auto& l : j.at("logicals")) {
            std::vector<Index> x, z;
            for (const auto& c : l.at("x")) x.push_back(c.get<Index>());
            for (const auto& c : l.at("z")) z.push_back(c.get<Index>());
            code.add_logical(l.at("name").get<std::string>(), make_pauli(x, z));
        }
    }
    return code;
}

}  // namespace qdeform
