#include "sobgnn/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sobgnn/errors.hpp"

namespace sobgnn {

namespace {

double off_diagonal_norm(const DenseMatrix& m) {
    double s = 0.0;
    for (std::size_t i = 0; i < m.n_rows; ++i)
        for (std::size_t j = 0; j < m.n_cols; ++j)
            if (i != j) s += m(i, j) * m(i, j);
    return std::sqrt(s);
}

}  // namespace

Spectrum sym_eigendecomposition(const DenseMatrix& input, const EigOptions& opts) {
    if (input.n_rows != input.n_cols)
        throw DimensionError("sym_eigendecomposition: matrix not square");
    if (input.n_rows > opts.size_cap)
        throw ParameterError("sym_eigendecomposition: size " + std::to_string(input.n_rows) +
                             " exceeds cap " + std::to_string(opts.size_cap));
    if (asymmetry(input) > opts.asymmetry_tol)
        throw DomainError("sym_eigendecomposition: matrix asymmetric beyond tolerance");

    const std::size_t n = input.n_rows;
    DenseMatrix a = input;
    DenseMatrix v = DenseMatrix::identity(n);
    const double threshold = 1e-12 * frobenius_norm(input);

    const int max_sweeps = 100;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        if (off_diagonal_norm(a) < threshold || n < 2) break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);

                const double app = a(p, p), aqq = a(q, q);
                a(p, p) = app - t * apq;
                a(q, q) = aqq + t * apq;
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (std::size_t r = 0; r < n; ++r) {
                    if (r != p && r != q) {
                        const double arp = a(r, p), arq = a(r, q);
                        a(r, p) = a(p, r) = arp - s * (arq + tau * arp);
                        a(r, q) = a(q, r) = arq + s * (arp - tau * arq);
                    }
                    const double vrp = v(r, p), vrq = v(r, q);
                    v(r, p) = vrp - s * (vrq + tau * vrp);
                    v(r, q) = vrq + s * (vrp - tau * vrq);
                }
            }
        }
    }

    // sort ascending, carrying eigenvector columns along
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        if (a(i, i) != a(j, j)) return a(i, i) < a(j, j);
        return i < j;
    });
    Spectrum spec;
    spec.eigenvalues.resize(n);
    spec.eigenvectors = DenseMatrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        spec.eigenvalues[k] = a(order[k], order[k]);
        for (std::size_t r = 0; r < n; ++r) spec.eigenvectors(r, k) = v(r, order[k]);
    }
    return spec;
}

std::vector<double> gft(const std::vector<double>& x, const Spectrum& spectrum) {
    const DenseMatrix& u = spectrum.eigenvectors;
    if (x.size() != u.n_rows) throw DimensionError("gft: signal length mismatch");
    std::vector<double> out(u.n_cols, 0.0);
    for (std::size_t k = 0; k < u.n_cols; ++k)
        for (std::size_t i = 0; i < u.n_rows; ++i) out[k] += u(i, k) * x[i];
    return out;
}

std::vector<double> igft(const std::vector<double>& x_hat, const Spectrum& spectrum) {
    const DenseMatrix& u = spectrum.eigenvectors;
    if (x_hat.size() != u.n_cols) throw DimensionError("igft: signal length mismatch");
    std::vector<double> out(u.n_rows, 0.0);
    for (std::size_t i = 0; i < u.n_rows; ++i)
        for (std::size_t k = 0; k < u.n_cols; ++k) out[i] += u(i, k) * x_hat[k];
    return out;
}

double sobolev_norm(const std::vector<double>& x, const CsrMatrix& l, double eps, double rho) {
    if (eps < 0.0) throw ParameterError("sobolev_norm: eps must be >= 0");
    if (x.size() != l.n_rows) throw DimensionError("sobolev_norm: signal length mismatch");
    const Spectrum spec = sym_eigendecomposition(to_dense(l));
    const std::vector<double> x_hat = gft(x, spec);
    double s = 0.0;
    for (std::size_t i = 0; i < x_hat.size(); ++i) {
        double base = spec.eigenvalues[i] + eps;
        // PSD inputs can carry eigenvalues a hair below zero; clamp so
        // fractional powers stay real.
        if (base < 0.0 && base > -1e-9) base = 0.0;
        s += x_hat[i] * x_hat[i] * std::pow(base, rho);
    }
    return std::sqrt(std::max(s, 0.0));
}

double sparse_sobolev_norm(const std::vector<double>& x, const CsrMatrix& l, double eps,
                           unsigned rho) {
    if (eps < 0.0) throw ParameterError("sparse_sobolev_norm: eps must be >= 0");
    if (rho == 0) throw ParameterError("sparse_sobolev_norm: rho must be >= 1");
    if (x.size() != l.n_rows) throw DimensionError("sparse_sobolev_norm: signal length mismatch");
    const CsrMatrix term = hadamard_power(add_scaled_identity(l, eps), rho);
    DenseMatrix xv(x.size(), 1);
    xv.values = x;
    const DenseMatrix mx = spmm(term, xv);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * mx.values[i];
    return std::sqrt(std::max(s, 0.0));  // eps = 0 is a semi-norm; tiny negatives clamp to 0
}

std::optional<double> condition_number(const DenseMatrix& m) {
    const Spectrum spec = sym_eigendecomposition(m);
    const double lo = spec.eigenvalues.front();
    const double hi = spec.eigenvalues.back();
    if (lo <= 1e-12) return std::nullopt;
    return std::fabs(hi) / std::fabs(lo);
}

double hadamard_spectrum_check(const CsrMatrix& l) {
    const std::size_t n = l.n_rows;
    if (n != l.n_cols) throw DimensionError("hadamard_spectrum_check: matrix not square");
    if (n > 200) throw ParameterError("hadamard_spectrum_check: n > 200");
    const DenseMatrix dense = to_dense(l);
    const Spectrum spec = sym_eigendecomposition(dense);
    const DenseMatrix& u = spec.eigenvectors;

    // P_N^T as an explicit sparse matrix: row i selects Kronecker row i*N+i.
    CsrMatrix pt(n, n * n);
    for (std::size_t i = 0; i < n; ++i) {
        pt.col_idx.push_back(i * n + i);
        pt.values.push_back(1.0);
        pt.row_ptr[i + 1] = i + 1;
    }

    // Accumulate P^T (U x U)(Lambda x Lambda)(U^T x U^T) P one Kronecker
    // column u_k x u_l at a time, never materializing the N^2 x N^2 matrix.
    DenseMatrix lhs(n, n);
    DenseMatrix kron_col(n * n, 1);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t m = 0; m < n; ++m) {
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    kron_col.values[i * n + j] = u(i, k) * u(j, m);
            const DenseMatrix w = spmm(pt, kron_col);
            const double scale = spec.eigenvalues[k] * spec.eigenvalues[m];
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    lhs(i, j) += scale * w.values[i] * w.values[j];
        }
    }

    const CsrMatrix had_sq = hadamard_product(l, l);
    return max_abs_diff(lhs, to_dense(had_sq));
}

PenalizationTable penalization_curves(const CsrMatrix& l, const std::vector<unsigned>& rho_list) {
    const DenseMatrix dense = to_dense(l);
    const Spectrum base = sym_eigendecomposition(dense);

    auto normalize_by_max = [](std::vector<double> v) {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::fabs(x));
        if (m > 0.0)
            for (double& x : v) x /= m;
        return v;
    };

    PenalizationTable table;
    table.rho_values = rho_list;
    for (unsigned rho : rho_list) {
        std::vector<double> power(base.eigenvalues.size());
        for (std::size_t i = 0; i < power.size(); ++i)
            power[i] = std::pow(base.eigenvalues[i], static_cast<double>(rho));
        std::sort(power.begin(), power.end());
        table.non_sparse.push_back(normalize_by_max(std::move(power)));

        const Spectrum sparse_spec = sym_eigendecomposition(to_dense(hadamard_power(l, rho)));
        table.sparse.push_back(normalize_by_max(sparse_spec.eigenvalues));
    }
    return table;
}

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw DimensionError("cosine_similarity: length mismatch");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / std::sqrt(na * nb);
}

}  // namespace sobgnn
