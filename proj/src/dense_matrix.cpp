#include "sobgnn/dense_matrix.hpp"

#include <algorithm>
#include <cmath>

#include "sobgnn/errors.hpp"

namespace sobgnn {

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<double>> rows) {
    n_rows = rows.size();
    n_cols = rows.size() ? rows.begin()->size() : 0;
    values.reserve(n_rows * n_cols);
    for (const auto& row : rows) {
        if (row.size() != n_cols) throw DimensionError("DenseMatrix: ragged initializer");
        values.insert(values.end(), row.begin(), row.end());
    }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.n_cols != b.n_rows) throw DimensionError("matmul: inner dimensions differ");
    DenseMatrix out(a.n_rows, b.n_cols);
    for (std::size_t i = 0; i < a.n_rows; ++i) {
        for (std::size_t k = 0; k < a.n_cols; ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.n_cols; ++j) {
                out(i, j) += aik * b(k, j);
            }
        }
    }
    return out;
}

DenseMatrix transpose(const DenseMatrix& m) {
    DenseMatrix out(m.n_cols, m.n_rows);
    for (std::size_t i = 0; i < m.n_rows; ++i)
        for (std::size_t j = 0; j < m.n_cols; ++j) out(j, i) = m(i, j);
    return out;
}

DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b) {
    if (!a.same_shape(b)) throw DimensionError("add: shape mismatch");
    DenseMatrix out = a;
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += b.values[i];
    return out;
}

DenseMatrix scale(const DenseMatrix& m, double c) {
    DenseMatrix out = m;
    for (double& v : out.values) v *= c;
    return out;
}

double max_abs(const DenseMatrix& m) {
    double r = 0.0;
    for (double v : m.values) r = std::max(r, std::fabs(v));
    return r;
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
    if (!a.same_shape(b)) throw DimensionError("max_abs_diff: shape mismatch");
    double r = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        r = std::max(r, std::fabs(a.values[i] - b.values[i]));
    return r;
}

double frobenius_norm(const DenseMatrix& m) {
    double s = 0.0;
    for (double v : m.values) s += v * v;
    return std::sqrt(s);
}

bool all_finite(const DenseMatrix& m) {
    return std::all_of(m.values.begin(), m.values.end(),
                       [](double v) { return std::isfinite(v); });
}

double asymmetry(const DenseMatrix& m) {
    if (m.n_rows != m.n_cols) throw DimensionError("asymmetry: matrix not square");
    double r = 0.0;
    for (std::size_t i = 0; i < m.n_rows; ++i)
        for (std::size_t j = i + 1; j < m.n_cols; ++j)
            r = std::max(r, std::fabs(m(i, j) - m(j, i)));
    return r;
}

}  // namespace sobgnn
