#pragma once

// Shared test utilities: independent dense oracles and random instance
// generators. Oracles here deliberately re-derive results with plain loops
// instead of calling the library paths they check.

#include <cmath>
#include <cstdint>
#include <vector>

#include "sobgnn/csr_matrix.hpp"
#include "sobgnn/dense_matrix.hpp"
#include "sobgnn/graph_build.hpp"
#include "sobgnn/rng.hpp"

namespace test_helpers {

using sobgnn::CsrMatrix;
using sobgnn::DenseMatrix;
using sobgnn::Rng;

/// Plain triple-loop matrix product (the dense matmul oracle).
inline DenseMatrix dense_matmul_oracle(const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix out(a.n_rows, b.n_cols);
    for (std::size_t i = 0; i < a.n_rows; ++i)
        for (std::size_t j = 0; j < b.n_cols; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < a.n_cols; ++k) s += a(i, k) * b(k, j);
            out(i, j) = s;
        }
    return out;
}

inline DenseMatrix random_dense(std::size_t rows, std::size_t cols, Rng& rng, double lo = -1.0,
                                double hi = 1.0) {
    DenseMatrix m(rows, cols);
    for (double& v : m.values) v = rng.uniform(lo, hi);
    return m;
}

/// Random symmetric weighted adjacency: each edge kept with probability
/// `density`, weight uniform in (0, 1]. Zero diagonal, connected not
/// guaranteed.
inline CsrMatrix random_weighted_adjacency(std::size_t n, double density, Rng& rng) {
    std::vector<sobgnn::CooEntry> entries;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (rng.uniform01() < density) {
                const double w = 0.05 + 0.95 * rng.uniform01();
                entries.push_back({i, j, w});
                entries.push_back({j, i, w});
            }
    return CsrMatrix::from_coo(n, n, std::move(entries));
}

/// Random sparse rectangular matrix with signed entries.
inline CsrMatrix random_sparse(std::size_t rows, std::size_t cols, double density, Rng& rng) {
    std::vector<sobgnn::CooEntry> entries;
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            if (rng.uniform01() < density) entries.push_back({i, j, rng.uniform(-2.0, 2.0)});
    return CsrMatrix::from_coo(rows, cols, std::move(entries));
}

/// Unweighted triangle graph adjacency (3 nodes, all connected).
inline CsrMatrix triangle_adjacency() {
    return CsrMatrix::from_coo(3, 3,
                               {{0, 1, 1.0}, {1, 0, 1.0}, {0, 2, 1.0}, {2, 0, 1.0}, {1, 2, 1.0}, {2, 1, 1.0}});
}

/// Random geometric graph: n points uniform in the unit square, edges
/// within `radius`, Gaussian kernel weights.
inline CsrMatrix random_geometric_adjacency(std::size_t n, double radius, Rng& rng,
                                            double sigma = 0.3) {
    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = rng.uniform01();
        ys[i] = rng.uniform01();
    }
    std::vector<sobgnn::CooEntry> entries;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dx = xs[i] - xs[j], dy = ys[i] - ys[j];
            const double d2 = dx * dx + dy * dy;
            if (d2 <= radius * radius) {
                const double w = std::exp(-d2 / (2.0 * sigma * sigma));
                entries.push_back({i, j, w});
                entries.push_back({j, i, w});
            }
        }
    return CsrMatrix::from_coo(n, n, std::move(entries));
}

inline double rel_err(double a, double b) {
    const double denom = std::max(std::fabs(a), std::fabs(b));
    return denom == 0.0 ? 0.0 : std::fabs(a - b) / denom;
}

}  // namespace test_helpers
