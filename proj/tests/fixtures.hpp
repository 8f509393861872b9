// Test-side code fixtures built directly from coordinate formulas, kept
// independent of the library constructions they are used to check.
#pragma once

#include <cstddef>
#include <vector>

#include "qdeform/gf2.hpp"
#include "qdeform/stabilizer.hpp"

namespace fixtures {

using qdeform::Index;

// Torus with a d x d grid of vertices: qubits 0..d^2-1 sit on vertical edges
// (qz), d^2..2d^2-1 on horizontal edges (qx). Vertex checks are X-type,
// plaquette checks Z-type, all weight 4.
inline qdeform::StabilizerCode toric(std::size_t d) {
    auto qz = [d](std::size_t i, std::size_t j) {
        return static_cast<Index>((i % d) * d + (j % d));
    };
    auto qx = [d](std::size_t i, std::size_t j) {
        return static_cast<Index>(d * d + (i % d) * d + (j % d));
    };
    std::vector<std::vector<Index>> hx_rows, hz_rows;
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t r = 0; r < d; ++r) {
            hx_rows.push_back({qx(i + d - 1, r), qz(i, r), qz(i, r + 1), qx(i, r)});
        }
    }
    for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t s = 0; s < d; ++s) {
            hz_rows.push_back({qz(j, s), qx(j, s), qx(j, s + d - 1), qz(j + 1, s)});
        }
    }
    for (auto& row : hx_rows) std::sort(row.begin(), row.end());
    for (auto& row : hz_rows) std::sort(row.begin(), row.end());
    std::size_t n_rows = hx_rows.size();
    auto hx = qdeform::SparseBitMatrix::from_rows(n_rows, 2 * d * d, std::move(hx_rows));
    n_rows = hz_rows.size();
    auto hz = qdeform::SparseBitMatrix::from_rows(n_rows, 2 * d * d, std::move(hz_rows));
    auto code = qdeform::css_code(std::move(hx), std::move(hz));
    std::vector<Index> x1, x2, z1, z2;
    for (std::size_t i = 0; i < d; ++i) {
        x1.push_back(qz(i, 0));
        x2.push_back(qx(0, i));
        z1.push_back(qz(0, i));
        z2.push_back(qx(i, 0));
    }
    std::sort(x1.begin(), x1.end());
    std::sort(x2.begin(), x2.end());
    std::sort(z1.begin(), z1.end());
    std::sort(z2.begin(), z2.end());
    code.add_logical("X1", {x1, {}});
    code.add_logical("X2", {x2, {}});
    code.add_logical("Z1", {{}, z1});
    code.add_logical("Z2", {{}, z2});
    return code;
}

// Steane-style [[7,1,3]] instance: Hamming parity checks on both sides.
inline qdeform::StabilizerCode hamming_css() {
    std::vector<std::vector<Index>> rows = {{0, 2, 4, 6}, {1, 2, 5, 6}, {3, 4, 5, 6}};
    auto h = qdeform::SparseBitMatrix::from_rows(3, 7, std::move(rows));
    return qdeform::css_code(h, h);
}

// Two-qubit block with X1X2 and Z1Z2 checks; encodes nothing.
inline qdeform::StabilizerCode bell_block() {
    auto h = qdeform::SparseBitMatrix::from_rows(1, 2, {{0, 1}});
    return qdeform::css_code(h, h);
}

// [[4,1,2]] block: hx = {X0X1, X2X3}, hz = {Z0Z1Z2Z3}.
inline qdeform::StabilizerCode four_qubit_block() {
    auto hx = qdeform::SparseBitMatrix::from_rows(2, 4, {{0, 1}, {2, 3}});
    auto hz = qdeform::SparseBitMatrix::from_rows(1, 4, {{0, 1, 2, 3}});
    auto code = qdeform::css_code(std::move(hx), std::move(hz));
    code.add_logical("X", {{0, 2}, {}});
    code.add_logical("Z", {{}, {0, 1}});
    return code;
}

}  // namespace fixtures
