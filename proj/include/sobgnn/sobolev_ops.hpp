#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "sobgnn/csr_matrix.hpp"

namespace sobgnn {

/// Precomputed normalized propagation operators, one per Hadamard power
/// rho = 1..alpha. Built once from the adjacency and shared by all layers.
struct SobolevCascade {
    double eps = 1.0;
    std::size_t alpha = 1;
    std::vector<CsrMatrix> operators;  // operators[rho-1], rho = 1..alpha

    const CsrMatrix& op(std::size_t rho) const { return operators[rho - 1]; }
};

/// (a + eps*I)^(rho): Hadamard power of the shifted matrix. The pattern is
/// pattern(a) plus the full diagonal.
CsrMatrix sparse_sobolev_term(const CsrMatrix& a, double eps, unsigned rho);

/// Same mechanics on a Laplacian; signed entries are fine.
CsrMatrix sobolev_laplacian_term(const CsrMatrix& l, double eps, unsigned rho);

/// operators[rho] = sym_normalize(sparse_sobolev_term(a, eps, rho)) for
/// rho = 1..alpha. Throws NumericalError naming the offending rho when a
/// term underflows to all-zero (max |entry| < 1e-300).
SobolevCascade build_cascade(const CsrMatrix& a, double eps, std::size_t alpha);

// Cache format: COO blocks back to back in one file, sidecar JSON
// {eps, alpha} at PATH + ".meta.json".
void save_cascade(const SobolevCascade& cascade, const std::string& path);
SobolevCascade load_cascade(const std::string& path);

}  // namespace sobgnn
