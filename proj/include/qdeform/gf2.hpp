// Sparse linear algebra over GF(2). Matrices are stored row-major as sorted
// column-index sets; elimination switches to a bit-packed dense mirror when the
// column count is small enough, which covers every code handled here.
#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qdeform {

using Index = std::uint32_t;

struct SparsityProfile {
    std::size_t max_row_weight = 0;
    std::size_t max_col_weight = 0;
};

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class SparseBitMatrix {
public:
    SparseBitMatrix() = default;
    SparseBitMatrix(std::size_t n_rows, std::size_t n_cols)
        : n_rows_(n_rows), n_cols_(n_cols), rows_(n_rows) {}

    static SparseBitMatrix identity(std::size_t n) {
        SparseBitMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.rows_[i] = {static_cast<Index>(i)};
        return m;
    }

    // Rows are normalized to set semantics: repeated entries cancel in pairs.
    static SparseBitMatrix from_rows(std::size_t n_rows, std::size_t n_cols,
                                     std::vector<std::vector<Index>> rows) {
        if (rows.size() != n_rows) throw std::invalid_argument("row count mismatch");
        SparseBitMatrix m(n_rows, n_cols);
        for (std::size_t r = 0; r < n_rows; ++r) {
            m.set_row(r, std::move(rows[r]));
        }
        return m;
    }

    std::size_t n_rows() const { return n_rows_; }
    std::size_t n_cols() const { return n_cols_; }

    std::size_t nnz() const {
        std::size_t total = 0;
        for (const auto& r : rows_) total += r.size();
        return total;
    }

    const std::vector<Index>& row(std::size_t r) const { return rows_.at(r); }

    bool at(std::size_t r, std::size_t c) const {
        const auto& row = rows_.at(r);
        return std::binary_search(row.begin(), row.end(), static_cast<Index>(c));
    }

    void set_row(std::size_t r, std::vector<Index> cols) {
        std::sort(cols.begin(), cols.end());
        std::vector<Index> out;
        out.reserve(cols.size());
        for (std::size_t i = 0; i < cols.size();) {
            std::size_t j = i;
            while (j < cols.size() && cols[j] == cols[i]) ++j;
            if (cols[i] >= n_cols_) throw std::invalid_argument("column index out of range");
            if ((j - i) % 2 == 1) out.push_back(cols[i]);
            i = j;
        }
        rows_.at(r) = std::move(out);
    }

    void toggle(std::size_t r, std::size_t c) {
        if (c >= n_cols_) throw std::invalid_argument("column index out of range");
        auto& row = rows_.at(r);
        auto it = std::lower_bound(row.begin(), row.end(), static_cast<Index>(c));
        if (it != row.end() && *it == static_cast<Index>(c)) {
            row.erase(it);
        } else {
            row.insert(it, static_cast<Index>(c));
        }
    }

    bool is_zero() const {
        for (const auto& r : rows_) {
            if (!r.empty()) return false;
        }
        return true;
    }

    SparseBitMatrix transpose() const {
        SparseBitMatrix t(n_cols_, n_rows_);
        for (std::size_t r = 0; r < n_rows_; ++r) {
            for (Index c : rows_[r]) t.rows_[c].push_back(static_cast<Index>(r));
        }
        return t;
    }

    SparsityProfile profile() const {
        SparsityProfile p;
        std::vector<std::size_t> col_weight(n_cols_, 0);
        for (const auto& r : rows_) {
            p.max_row_weight = std::max(p.max_row_weight, r.size());
            for (Index c : r) ++col_weight[c];
        }
        for (std::size_t w : col_weight) p.max_col_weight = std::max(p.max_col_weight, w);
        return p;
    }

    bool operator==(const SparseBitMatrix& other) const {
        return n_rows_ == other.n_rows_ && n_cols_ == other.n_cols_ && rows_ == other.rows_;
    }

private:
    std::size_t n_rows_ = 0;
    std::size_t n_cols_ = 0;
    std::vector<std::vector<Index>> rows_;
};

inline SparseBitMatrix row_vector(std::size_t n_cols, std::vector<Index> support) {
    return SparseBitMatrix::from_rows(1, n_cols, {std::move(support)});
}

inline SparseBitMatrix multiply(const SparseBitMatrix& a, const SparseBitMatrix& b) {
    if (a.n_cols() != b.n_rows()) throw std::invalid_argument("dimension mismatch in multiply");
    SparseBitMatrix out(a.n_rows(), b.n_cols());
    std::vector<Index> acc;
    for (std::size_t i = 0; i < a.n_rows(); ++i) {
        acc.clear();
        for (Index k : a.row(i)) {
            const auto& br = b.row(k);
            acc.insert(acc.end(), br.begin(), br.end());
        }
        out.set_row(i, acc);
    }
    return out;
}

inline SparseBitMatrix add(const SparseBitMatrix& a, const SparseBitMatrix& b) {
    if (a.n_rows() != b.n_rows() || a.n_cols() != b.n_cols()) {
        throw std::invalid_argument("dimension mismatch in add");
    }
    SparseBitMatrix out(a.n_rows(), a.n_cols());
    for (std::size_t i = 0; i < a.n_rows(); ++i) {
        std::vector<Index> merged;
        std::set_symmetric_difference(a.row(i).begin(), a.row(i).end(), b.row(i).begin(),
                                      b.row(i).end(), std::back_inserter(merged));
        out.set_row(i, std::move(merged));
    }
    return out;
}

inline SparseBitMatrix hstack(const SparseBitMatrix& a, const SparseBitMatrix& b) {
    if (a.n_rows() != b.n_rows()) throw std::invalid_argument("row count mismatch in hstack");
    SparseBitMatrix out(a.n_rows(), a.n_cols() + b.n_cols());
    for (std::size_t i = 0; i < a.n_rows(); ++i) {
        std::vector<Index> row = a.row(i);
        for (Index c : b.row(i)) row.push_back(static_cast<Index>(c + a.n_cols()));
        out.set_row(i, std::move(row));
    }
    return out;
}

inline SparseBitMatrix vstack(const SparseBitMatrix& a, const SparseBitMatrix& b) {
    if (a.n_cols() != b.n_cols()) throw std::invalid_argument("column count mismatch in vstack");
    SparseBitMatrix out(a.n_rows() + b.n_rows(), a.n_cols());
    for (std::size_t i = 0; i < a.n_rows(); ++i) out.set_row(i, a.row(i));
    for (std::size_t i = 0; i < b.n_rows(); ++i) out.set_row(a.n_rows() + i, b.row(i));
    return out;
}

// Keeps the listed columns (which must be sorted and unique), reindexed to
// 0..k-1 in the same order.
inline SparseBitMatrix restrict_columns(const SparseBitMatrix& a,
                                        const std::vector<Index>& cols) {
    SparseBitMatrix out(a.n_rows(), cols.size());
    for (std::size_t i = 0; i < a.n_rows(); ++i) {
        std::vector<Index> row;
        for (Index c : a.row(i)) {
            auto it = std::lower_bound(cols.begin(), cols.end(), c);
            if (it != cols.end() && *it == c) {
                row.push_back(static_cast<Index>(it - cols.begin()));
            }
        }
        out.set_row(i, std::move(row));
    }
    return out;
}

namespace detail {

constexpr std::size_t kDenseEliminationMaxCols = 4096;

struct PackedMatrix {
    std::size_t n_cols = 0;
    std::size_t words = 0;
    std::vector<std::vector<std::uint64_t>> rows;

    explicit PackedMatrix(const SparseBitMatrix& m)
        : n_cols(m.n_cols()), words((m.n_cols() + 63) / 64) {
        rows.assign(m.n_rows(), std::vector<std::uint64_t>(words, 0));
        for (std::size_t r = 0; r < m.n_rows(); ++r) {
            for (Index c : m.row(r)) rows[r][c >> 6] |= (1ull << (c & 63));
        }
    }

    bool get(std::size_t r, std::size_t c) const {
        return (rows[r][c >> 6] >> (c & 63)) & 1;
    }

    void xor_rows(std::size_t dst, std::size_t src) {
        for (std::size_t w = 0; w < words; ++w) rows[dst][w] ^= rows[src][w];
    }
};

// Gaussian elimination sweeping columns in ascending order; the pivot for a
// column is the first not-yet-used row holding a one there. Records the pivot
// column of each used row. Returns reduced rows (full reduction above and
// below the pivot).
struct Elimination {
    PackedMatrix mat;
    std::vector<long> pivot_row_of_col;   // -1 when the column is free
    std::vector<std::size_t> pivot_cols;  // ascending
    std::size_t rank = 0;

    explicit Elimination(const SparseBitMatrix& m) : mat(m) {
        std::size_t n_rows = mat.rows.size();
        pivot_row_of_col.assign(mat.n_cols, -1);
        std::vector<bool> used(n_rows, false);
        for (std::size_t c = 0; c < mat.n_cols; ++c) {
            std::size_t pivot = n_rows;
            for (std::size_t r = 0; r < n_rows; ++r) {
                if (!used[r] && mat.get(r, c)) { pivot = r; break; }
            }
            if (pivot == n_rows) continue;
            used[pivot] = true;
            pivot_row_of_col[c] = static_cast<long>(pivot);
            pivot_cols.push_back(c);
            ++rank;
            for (std::size_t r = 0; r < n_rows; ++r) {
                if (r != pivot && mat.get(r, c)) mat.xor_rows(r, pivot);
            }
        }
    }
};

// Fallback elimination on the sparse representation for very wide matrices.
inline std::size_t sparse_rank(const SparseBitMatrix& m) {
    std::vector<std::vector<Index>> rows;
    rows.reserve(m.n_rows());
    for (std::size_t r = 0; r < m.n_rows(); ++r) {
        if (!m.row(r).empty()) rows.push_back(m.row(r));
    }
    std::size_t rank = 0;
    while (!rows.empty()) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < rows.size(); ++i) {
            if (rows[i].front() < rows[best].front()) best = i;
        }
        std::vector<Index> pivot = std::move(rows[best]);
        rows.erase(rows.begin() + static_cast<long>(best));
        ++rank;
        std::vector<std::vector<Index>> next;
        next.reserve(rows.size());
        for (auto& row : rows) {
            if (row.front() == pivot.front()) {
                std::vector<Index> merged;
                std::set_symmetric_difference(row.begin(), row.end(), pivot.begin(),
                                              pivot.end(), std::back_inserter(merged));
                if (!merged.empty()) next.push_back(std::move(merged));
            } else {
                next.push_back(std::move(row));
            }
        }
        rows = std::move(next);
    }
    return rank;
}

}  // namespace detail

inline std::size_t rank(const SparseBitMatrix& a) {
    if (a.n_cols() == 0 || a.n_rows() == 0) return 0;
    if (a.n_cols() <= detail::kDenseEliminationMaxCols) {
        return detail::Elimination(a).rank;
    }
    return detail::sparse_rank(a);
}

// Basis of the right nullspace, one row per free column in ascending free
// column order; the basis size always equals n_cols - rank.
inline SparseBitMatrix nullspace_basis(const SparseBitMatrix& a) {
    std::size_t n = a.n_cols();
    if (n == 0) return SparseBitMatrix(0, 0);
    if (n > detail::kDenseEliminationMaxCols) {
        throw std::invalid_argument("nullspace computation exceeds the dense elimination width");
    }
    detail::Elimination e(a);
    std::vector<std::size_t> free_cols;
    for (std::size_t c = 0; c < n; ++c) {
        if (e.pivot_row_of_col[c] < 0) free_cols.push_back(c);
    }
    SparseBitMatrix basis(free_cols.size(), n);
    for (std::size_t i = 0; i < free_cols.size(); ++i) {
        std::size_t fc = free_cols[i];
        std::vector<Index> v{static_cast<Index>(fc)};
        for (std::size_t pc : e.pivot_cols) {
            auto pr = static_cast<std::size_t>(e.pivot_row_of_col[pc]);
            if (e.mat.get(pr, fc)) v.push_back(static_cast<Index>(pc));
        }
        basis.set_row(i, std::move(v));
    }
    return basis;
}

inline bool in_row_space(const SparseBitMatrix& a, const SparseBitMatrix& v) {
    if (v.n_rows() != 1 || v.n_cols() != a.n_cols()) {
        throw std::invalid_argument("membership test needs a single row of matching width");
    }
    return rank(vstack(a, v)) == rank(a);
}

inline bool in_row_space(const SparseBitMatrix& a, const std::vector<Index>& support) {
    return in_row_space(a, row_vector(a.n_cols(), support));
}

// True iff every pair of rows of [X|Z] commutes as Pauli operators, i.e. the
// symplectic Gram matrix vanishes.
inline bool symplectic_commutes(const SparseBitMatrix& h) {
    if (h.n_cols() % 2 != 0) throw std::invalid_argument("symplectic matrix needs even width");
    std::size_t n = h.n_cols() / 2;
    auto split = [&](const std::vector<Index>& row) {
        std::pair<std::vector<Index>, std::vector<Index>> parts;
        for (Index c : row) {
            if (c < n) {
                parts.first.push_back(c);
            } else {
                parts.second.push_back(static_cast<Index>(c - n));
            }
        }
        return parts;
    };
    std::vector<std::pair<std::vector<Index>, std::vector<Index>>> rows;
    rows.reserve(h.n_rows());
    for (std::size_t r = 0; r < h.n_rows(); ++r) rows.push_back(split(h.row(r)));
    auto overlap_parity = [](const std::vector<Index>& a, const std::vector<Index>& b) {
        std::size_t count = 0, i = 0, j = 0;
        while (i < a.size() && j < b.size()) {
            if (a[i] < b[j]) {
                ++i;
            } else if (a[i] > b[j]) {
                ++j;
            } else {
                ++count, ++i, ++j;
            }
        }
        return count % 2;
    };
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = i + 1; j < rows.size(); ++j) {
            if ((overlap_parity(rows[i].first, rows[j].second) +
                 overlap_parity(rows[i].second, rows[j].first)) % 2 != 0) {
                return false;
            }
        }
    }
    return true;
}

// Check matrix of the cyclic repetition code: row i flags bits i and i+1 mod n.
inline SparseBitMatrix cyclic_repetition_check(std::size_t n) {
    if (n < 1) throw std::invalid_argument("cyclic repetition check needs n >= 1");
    SparseBitMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m.set_row(i, {static_cast<Index>(i), static_cast<Index>((i + 1) % n)});
    }
    return m;
}

// The cyclic check with its last row removed; full rank (n-1) x n.
inline SparseBitMatrix full_rank_repetition_check(std::size_t n) {
    if (n < 2) throw std::invalid_argument("full-rank repetition check needs n >= 2");
    SparseBitMatrix m(n - 1, n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        m.set_row(i, {static_cast<Index>(i), static_cast<Index>(i + 1)});
    }
    return m;
}

// Cyclic shift: multiplying a basis row vector on the right advances its index.
inline SparseBitMatrix shift_matrix(std::size_t n) {
    if (n < 1) throw std::invalid_argument("shift matrix needs n >= 1");
    SparseBitMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m.set_row(i, {static_cast<Index>((i + 1) % n)});
    }
    return m;
}

enum class CanonicalKind { cyclic_check, full_rank_check, shift, identity };

inline SparseBitMatrix canonical_matrix(CanonicalKind kind, std::size_t n) {
    switch (kind) {
        case CanonicalKind::cyclic_check: return cyclic_repetition_check(n);
        case CanonicalKind::full_rank_check: return full_rank_repetition_check(n);
        case CanonicalKind::shift: return shift_matrix(n);
        case CanonicalKind::identity: return SparseBitMatrix::identity(n);
    }
    throw std::invalid_argument("unknown canonical matrix kind");
}

// Text format: header "rows cols nnz", then nnz lines "r c" sorted by (r, c)
// with no duplicates. The reader rejects malformed input citing the line.
inline void write_matrix(const SparseBitMatrix& m, std::ostream& os) {
    os << m.n_rows() << ' ' << m.n_cols() << ' ' << m.nnz() << '\n';
    for (std::size_t r = 0; r < m.n_rows(); ++r) {
        for (Index c : m.row(r)) os << r << ' ' << c << '\n';
    }
}

inline SparseBitMatrix read_matrix(std::istream& is) {
    std::string line;
    std::size_t line_no = 0;
    auto next_line = [&](bool required) {
        while (std::getline(is, line)) {
            ++line_no;
            if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
        }
        if (required) throw ParseError(line_no + 1, "unexpected end of file");
        return false;
    };
    auto parse_fields = [&](std::size_t count) {
        std::istringstream ss(line);
        std::vector<long long> vals;
        long long v;
        while (ss >> v) vals.push_back(v);
        std::string rest;
        if (!ss.eof() && ss.fail()) {
            ss.clear();
            ss >> rest;
        }
        if (!rest.empty() || vals.size() != count) {
            throw ParseError(line_no, "expected " + std::to_string(count) + " integer fields");
        }
        for (long long x : vals) {
            if (x < 0) throw ParseError(line_no, "negative value");
        }
        return vals;
    };
    next_line(true);
    auto header = parse_fields(3);
    auto n_rows = static_cast<std::size_t>(header[0]);
    auto n_cols = static_cast<std::size_t>(header[1]);
    auto nnz = static_cast<std::size_t>(header[2]);
    std::vector<std::vector<Index>> rows(n_rows);
    long long prev_r = -1, prev_c = -1;
    for (std::size_t i = 0; i < nnz; ++i) {
        next_line(true);
        auto entry = parse_fields(2);
        long long r = entry[0], c = entry[1];
        if (r >= static_cast<long long>(n_rows)) throw ParseError(line_no, "row index out of range");
        if (c >= static_cast<long long>(n_cols)) throw ParseError(line_no, "column index out of range");
        if (r < prev_r || (r == prev_r && c <= prev_c)) {
            throw ParseError(line_no, "entries must be sorted by (row, column) without duplicates");
        }
        prev_r = r;
        prev_c = c;
        rows[static_cast<std::size_t>(r)].push_back(static_cast<Index>(c));
    }
    if (next_line(false)) throw ParseError(line_no, "trailing content after the last entry");
    return SparseBitMatrix::from_rows(n_rows, n_cols, std::move(rows));
}

}  // namespace qdeform
