#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace sobgnn {

/// Row-major dense matrix of doubles. Also used as a column vector (n_cols=1).
struct DenseMatrix {
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    std::vector<double> values;  // length n_rows * n_cols

    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols)
        : n_rows(rows), n_cols(cols), values(rows * cols, 0.0) {}
    DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

    double& operator()(std::size_t i, std::size_t j) { return values[i * n_cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return values[i * n_cols + j]; }

    bool same_shape(const DenseMatrix& other) const {
        return n_rows == other.n_rows && n_cols == other.n_cols;
    }

    static DenseMatrix identity(std::size_t n);
};

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix transpose(const DenseMatrix& m);
DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix scale(const DenseMatrix& m, double c);

double max_abs(const DenseMatrix& m);
double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);
double frobenius_norm(const DenseMatrix& m);
bool all_finite(const DenseMatrix& m);

/// Max |m(i,j) - m(j,i)| over the square matrix m.
double asymmetry(const DenseMatrix& m);

}  // namespace sobgnn
