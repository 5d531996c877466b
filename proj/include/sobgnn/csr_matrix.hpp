#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sobgnn/dense_matrix.hpp"

namespace sobgnn {

struct CooEntry {
    std::size_t row;
    std::size_t col;
    double value;
};

/// Compressed sparse row matrix, always in canonical form: row_ptr
/// non-decreasing, column indices strictly increasing within each row.
/// Construction (from_coo / from_dense) sums duplicates and drops exact
/// zeros; the arithmetic ops below never prune, so pattern invariants
/// (e.g. nnz preservation under Hadamard powers) are exact.
struct CsrMatrix {
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    std::vector<std::size_t> row_ptr;  // length n_rows + 1
    std::vector<std::size_t> col_idx;
    std::vector<double> values;        // same length as col_idx

    CsrMatrix() : row_ptr(1, 0) {}
    CsrMatrix(std::size_t rows, std::size_t cols)
        : n_rows(rows), n_cols(cols), row_ptr(rows + 1, 0) {}

    std::size_t nnz() const { return values.size(); }

    /// Stored value at (i, j), or 0 if not in the pattern. O(log row length).
    double at(std::size_t i, std::size_t j) const;

    static CsrMatrix from_coo(std::size_t rows, std::size_t cols, std::vector<CooEntry> entries);
    static CsrMatrix from_dense(const DenseMatrix& m);
    static CsrMatrix identity(std::size_t n);

    /// True when the structural invariants hold (used by tests and after IO).
    bool check_canonical() const;
};

DenseMatrix to_dense(const CsrMatrix& m);

bool same_pattern(const CsrMatrix& a, const CsrMatrix& b);
bool is_symmetric(const CsrMatrix& m, double tol = 0.0);

/// Entrywise product; result pattern is the intersection of both patterns.
CsrMatrix hadamard_product(const CsrMatrix& a, const CsrMatrix& b);

/// Entrywise rho-th power, rho >= 1. Pattern (and nnz) identical to m.
CsrMatrix hadamard_power(const CsrMatrix& m, unsigned rho);

/// m + eps*I with every diagonal entry materialized in the pattern, even
/// when the stored value is zero.
CsrMatrix add_scaled_identity(const CsrMatrix& m, double eps);

std::vector<double> row_sums(const CsrMatrix& m);

/// D^{-1/2} M D^{-1/2} with d = row_sums(m). Rows (and columns) with zero
/// degree map to zero instead of producing non-finite values; the pattern
/// is kept unchanged. Requires entries >= 0.
CsrMatrix sym_normalize(const CsrMatrix& m);

/// Sparse-dense product m * x. Cost nnz(m) * x.n_cols multiply-adds.
DenseMatrix spmm(const CsrMatrix& m, const DenseMatrix& x);

/// Combinatorial Laplacian L = D - A of a symmetric non-negative adjacency.
CsrMatrix laplacian(const CsrMatrix& a);

// -- Coordinate-list text serialization ------------------------------------
// Header line "rows cols nnz", then one "i j value" triple per entry,
// 0-indexed. Values use shortest-roundtrip decimal so finite doubles
// round-trip bit-exactly.

std::string to_coo_text(const CsrMatrix& m);
CsrMatrix from_coo_text(const std::string& text);
void write_coo_stream(std::ostream& os, const CsrMatrix& m);
CsrMatrix read_coo_stream(std::istream& is);

// -- Instrumentation --------------------------------------------------------

/// Thread-local multiply-add counter incremented by spmm. Used by the
/// benchmark command and the sparsity-of-compute tests.
struct OpCounter {
    static std::uint64_t get();
    static void reset();
    static void add(std::uint64_t n);
};

}  // namespace sobgnn
