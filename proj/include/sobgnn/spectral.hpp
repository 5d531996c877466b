#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "sobgnn/csr_matrix.hpp"
#include "sobgnn/dense_matrix.hpp"

namespace sobgnn {

/// Eigendecomposition of a symmetric matrix: ascending eigenvalues and
/// orthonormal eigenvectors stored as columns of `eigenvectors`.
struct Spectrum {
    std::vector<double> eigenvalues;
    DenseMatrix eigenvectors;
};

struct EigOptions {
    std::size_t size_cap = 2000;
    double asymmetry_tol = 1e-12;
};

/// Cyclic Jacobi rotations; converges when off(M) < 1e-12 * ||M||_F.
Spectrum sym_eigendecomposition(const DenseMatrix& m, const EigOptions& opts = {});

/// Graph Fourier transform x_hat = U^T x and its inverse x = U x_hat.
std::vector<double> gft(const std::vector<double>& x, const Spectrum& spectrum);
std::vector<double> igft(const std::vector<double>& x_hat, const Spectrum& spectrum);

/// ||x||_{rho,eps} evaluated spectrally as sqrt(sum x_hat^2(i) (lambda_i+eps)^rho).
/// rho may be any real number (the dense spectral path).
double sobolev_norm(const std::vector<double>& x, const CsrMatrix& l, double eps, double rho);

/// sqrt(x^T (L+eps I)^(rho) x) via the Hadamard-power term; integer rho >= 1.
/// A norm for eps > 0, a semi-norm at eps = 0.
double sparse_sobolev_norm(const std::vector<double>& x, const CsrMatrix& l, double eps,
                           unsigned rho);

/// |lambda_max| / |lambda_min| of a symmetric positive definite matrix;
/// nullopt signals ill-conditioning (lambda_min <= 1e-12).
std::optional<double> condition_number(const DenseMatrix& m);

/// Builds the partial permutation matrix P_N (P_N(i*N+i, i) = 1), evaluates
/// P_N^T (U x U)(Lambda x Lambda)(U^T x U^T) P_N and returns the max-abs
/// deviation from L o L. Dense-feasible sizes only (n <= 200).
double hadamard_spectrum_check(const CsrMatrix& l);

/// One normalized eigenvalue-penalization pair per rho: the spectrum of the
/// matrix power L^rho and of the Hadamard power L^(rho), each sorted
/// ascending and scaled so the maximum absolute value is 1.
struct PenalizationTable {
    std::vector<unsigned> rho_values;
    std::vector<std::vector<double>> non_sparse;  // one curve per rho
    std::vector<std::vector<double>> sparse;
};

PenalizationTable penalization_curves(const CsrMatrix& l, const std::vector<unsigned>& rho_list);

/// Cosine similarity of two equal-length vectors (0 when either is zero).
double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace sobgnn
