#include "sobgnn/csr_matrix.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "sobgnn/errors.hpp"

namespace sobgnn {

double CsrMatrix::at(std::size_t i, std::size_t j) const {
    if (i >= n_rows || j >= n_cols) throw DimensionError("CsrMatrix::at: index out of range");
    const auto begin = col_idx.begin() + static_cast<std::ptrdiff_t>(row_ptr[i]);
    const auto end = col_idx.begin() + static_cast<std::ptrdiff_t>(row_ptr[i + 1]);
    const auto it = std::lower_bound(begin, end, j);
    if (it == end || *it != j) return 0.0;
    return values[static_cast<std::size_t>(it - col_idx.begin())];
}

CsrMatrix CsrMatrix::from_coo(std::size_t rows, std::size_t cols, std::vector<CooEntry> entries) {
    for (const auto& e : entries) {
        if (e.row >= rows || e.col >= cols)
            throw DimensionError("from_coo: entry index out of range");
    }
    std::sort(entries.begin(), entries.end(), [](const CooEntry& a, const CooEntry& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    CsrMatrix m(rows, cols);
    std::size_t i = 0;
    while (i < entries.size()) {
        std::size_t j = i + 1;
        double v = entries[i].value;
        while (j < entries.size() && entries[j].row == entries[i].row &&
               entries[j].col == entries[i].col) {
            v += entries[j].value;  // duplicates summed
            ++j;
        }
        if (v != 0.0) {
            m.col_idx.push_back(entries[i].col);
            m.values.push_back(v);
            ++m.row_ptr[entries[i].row + 1];  // per-row count, prefix-summed below
        }
        i = j;
    }
    for (std::size_t r = 0; r < rows; ++r) m.row_ptr[r + 1] += m.row_ptr[r];
    return m;
}

CsrMatrix CsrMatrix::from_dense(const DenseMatrix& d) {
    CsrMatrix m(d.n_rows, d.n_cols);
    for (std::size_t i = 0; i < d.n_rows; ++i) {
        for (std::size_t j = 0; j < d.n_cols; ++j) {
            if (d(i, j) != 0.0) {
                m.col_idx.push_back(j);
                m.values.push_back(d(i, j));
            }
        }
        m.row_ptr[i + 1] = m.values.size();
    }
    return m;
}

CsrMatrix CsrMatrix::identity(std::size_t n) {
    CsrMatrix m(n, n);
    m.col_idx.resize(n);
    m.values.assign(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        m.col_idx[i] = i;
        m.row_ptr[i + 1] = i + 1;
    }
    return m;
}

bool CsrMatrix::check_canonical() const {
    if (row_ptr.size() != n_rows + 1 || row_ptr[0] != 0) return false;
    if (row_ptr[n_rows] != values.size() || col_idx.size() != values.size()) return false;
    for (std::size_t i = 0; i < n_rows; ++i) {
        if (row_ptr[i] > row_ptr[i + 1]) return false;
        for (std::size_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p) {
            if (col_idx[p] >= n_cols) return false;
            if (p > row_ptr[i] && col_idx[p - 1] >= col_idx[p]) return false;
        }
    }
    return true;
}

DenseMatrix to_dense(const CsrMatrix& m) {
    DenseMatrix d(m.n_rows, m.n_cols);
    for (std::size_t i = 0; i < m.n_rows; ++i)
        for (std::size_t p = m.row_ptr[i]; p < m.row_ptr[i + 1]; ++p)
            d(i, m.col_idx[p]) = m.values[p];
    return d;
}

bool same_pattern(const CsrMatrix& a, const CsrMatrix& b) {
    return a.n_rows == b.n_rows && a.n_cols == b.n_cols && a.row_ptr == b.row_ptr &&
           a.col_idx == b.col_idx;
}

bool is_symmetric(const CsrMatrix& m, double tol) {
    if (m.n_rows != m.n_cols) return false;
    for (std::size_t i = 0; i < m.n_rows; ++i) {
        for (std::size_t p = m.row_ptr[i]; p < m.row_ptr[i + 1]; ++p) {
            const std::size_t j = m.col_idx[p];
            if (std::fabs(m.values[p] - m.at(j, i)) > tol) return false;
        }
    }
    return true;
}

CsrMatrix hadamard_product(const CsrMatrix& a, const CsrMatrix& b) {
    if (a.n_rows != b.n_rows || a.n_cols != b.n_cols)
        throw DimensionError("hadamard_product: shape mismatch");
    CsrMatrix out(a.n_rows, a.n_cols);
    for (std::size_t i = 0; i < a.n_rows; ++i) {
        std::size_t pa = a.row_ptr[i], pb = b.row_ptr[i];
        const std::size_t ea = a.row_ptr[i + 1], eb = b.row_ptr[i + 1];
        while (pa < ea && pb < eb) {  // linear merge over sorted columns
            if (a.col_idx[pa] < b.col_idx[pb]) {
                ++pa;
            } else if (a.col_idx[pa] > b.col_idx[pb]) {
                ++pb;
            } else {
                out.col_idx.push_back(a.col_idx[pa]);
                out.values.push_back(a.values[pa] * b.values[pb]);
                ++pa;
                ++pb;
            }
        }
        out.row_ptr[i + 1] = out.values.size();
    }
    return out;
}

CsrMatrix hadamard_power(const CsrMatrix& m, unsigned rho) {
    if (rho == 0) throw ParameterError("hadamard_power: rho must be >= 1");
    CsrMatrix out = m;
    if (rho == 1) return out;
    for (double& v : out.values) v = std::pow(v, static_cast<double>(rho));
    return out;
}

CsrMatrix add_scaled_identity(const CsrMatrix& m, double eps) {
    if (m.n_rows != m.n_cols) throw DimensionError("add_scaled_identity: matrix not square");
    CsrMatrix out(m.n_rows, m.n_cols);
    out.col_idx.reserve(m.nnz() + m.n_rows);
    out.values.reserve(m.nnz() + m.n_rows);
    for (std::size_t i = 0; i < m.n_rows; ++i) {
        bool placed = false;
        for (std::size_t p = m.row_ptr[i]; p < m.row_ptr[i + 1]; ++p) {
            const std::size_t j = m.col_idx[p];
            if (!placed && j >= i) {
                if (j == i) {
                    out.col_idx.push_back(i);
                    out.values.push_back(m.values[p] + eps);
                    placed = true;
                    continue;
                }
                out.col_idx.push_back(i);
                out.values.push_back(eps);
                placed = true;
            }
            out.col_idx.push_back(j);
            out.values.push_back(m.values[p]);
        }
        if (!placed) {
            out.col_idx.push_back(i);
            out.values.push_back(eps);
        }
        out.row_ptr[i + 1] = out.values.size();
    }
    return out;
}

std::vector<double> row_sums(const CsrMatrix& m) {
    std::vector<double> d(m.n_rows, 0.0);
    for (std::size_t i = 0; i < m.n_rows; ++i)
        for (std::size_t p = m.row_ptr[i]; p < m.row_ptr[i + 1]; ++p) d[i] += m.values[p];
    return d;
}

CsrMatrix sym_normalize(const CsrMatrix& m) {
    if (m.n_rows != m.n_cols) throw DimensionError("sym_normalize: matrix not square");
    for (double v : m.values)
        if (v < 0.0) throw DomainError("sym_normalize: negative entry");
    const std::vector<double> d = row_sums(m);
    std::vector<double> inv_sqrt(d.size());
    for (std::size_t i = 0; i < d.size(); ++i)
        inv_sqrt[i] = d[i] > 0.0 ? 1.0 / std::sqrt(d[i]) : 0.0;  // zero-degree guard
    CsrMatrix out = m;
    for (std::size_t i = 0; i < m.n_rows; ++i)
        for (std::size_t p = m.row_ptr[i]; p < m.row_ptr[i + 1]; ++p)
            // scalar product grouped first so the result stays bit-exact symmetric
            out.values[p] = m.values[p] * (inv_sqrt[i] * inv_sqrt[m.col_idx[p]]);
    return out;
}

DenseMatrix spmm(const CsrMatrix& m, const DenseMatrix& x) {
    if (m.n_cols != x.n_rows) throw DimensionError("spmm: dimension mismatch");
    DenseMatrix out(m.n_rows, x.n_cols);
    for (std::size_t i = 0; i < m.n_rows; ++i) {
        double* out_row = &out.values[i * out.n_cols];
        for (std::size_t p = m.row_ptr[i]; p < m.row_ptr[i + 1]; ++p) {
            const double v = m.values[p];
            const double* x_row = &x.values[m.col_idx[p] * x.n_cols];
            for (std::size_t f = 0; f < x.n_cols; ++f) out_row[f] += v * x_row[f];
        }
    }
    OpCounter::add(static_cast<std::uint64_t>(m.nnz()) * x.n_cols);
    return out;
}

CsrMatrix laplacian(const CsrMatrix& a) {
    if (a.n_rows != a.n_cols) throw DimensionError("laplacian: matrix not square");
    for (double v : a.values)
        if (v < 0.0) throw DomainError("laplacian: negative adjacency entry");
    if (!is_symmetric(a, 0.0)) throw DomainError("laplacian: adjacency not symmetric");
    const std::vector<double> d = row_sums(a);
    std::vector<CooEntry> entries;
    entries.reserve(a.nnz() + a.n_rows);
    for (std::size_t i = 0; i < a.n_rows; ++i) {
        entries.push_back({i, i, d[i]});
        for (std::size_t p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p)
            entries.push_back({i, a.col_idx[p], -a.values[p]});
    }
    return CsrMatrix::from_coo(a.n_rows, a.n_cols, std::move(entries));
}

// -- serialization -----------------------------------------------------------

namespace {

void append_double(std::string& out, double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
}

double parse_double(const char* first, const char* last, std::size_t line_no) {
    double v = 0.0;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last)
        throw DataError("coo parse: line " + std::to_string(line_no) + ": bad value");
    return v;
}

std::size_t parse_index(const std::string& tok, std::size_t line_no) {
    std::size_t v = 0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
        throw DataError("coo parse: line " + std::to_string(line_no) + ": bad index");
    return v;
}

}  // namespace

std::string to_coo_text(const CsrMatrix& m) {
    std::string out;
    out += std::to_string(m.n_rows);
    out += ' ';
    out += std::to_string(m.n_cols);
    out += ' ';
    out += std::to_string(m.nnz());
    out += '\n';
    for (std::size_t i = 0; i < m.n_rows; ++i) {
        for (std::size_t p = m.row_ptr[i]; p < m.row_ptr[i + 1]; ++p) {
            out += std::to_string(i);
            out += ' ';
            out += std::to_string(m.col_idx[p]);
            out += ' ';
            append_double(out, m.values[p]);
            out += '\n';
        }
    }
    return out;
}

void write_coo_stream(std::ostream& os, const CsrMatrix& m) { os << to_coo_text(m); }

CsrMatrix read_coo_stream(std::istream& is) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty()) break;
    }
    if (line.empty()) throw DataError("coo parse: missing header");
    std::istringstream hdr(line);
    std::size_t rows, cols, count;
    if (!(hdr >> rows >> cols >> count))
        throw DataError("coo parse: line " + std::to_string(line_no) + ": bad header");
    std::vector<CooEntry> entries;
    entries.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        if (!std::getline(is, line))
            throw DataError("coo parse: expected " + std::to_string(count) + " entries, got " +
                            std::to_string(k));
        ++line_no;
        const auto s1 = line.find(' ');
        const auto s2 = line.find(' ', s1 == std::string::npos ? s1 : s1 + 1);
        if (s1 == std::string::npos || s2 == std::string::npos)
            throw DataError("coo parse: line " + std::to_string(line_no) + ": expected 'i j value'");
        const std::size_t i = parse_index(line.substr(0, s1), line_no);
        const std::size_t j = parse_index(line.substr(s1 + 1, s2 - s1 - 1), line_no);
        const double v = parse_double(line.data() + s2 + 1, line.data() + line.size(), line_no);
        if (i >= rows || j >= cols)
            throw DataError("coo parse: line " + std::to_string(line_no) + ": index out of range");
        entries.push_back({i, j, v});
    }
    return CsrMatrix::from_coo(rows, cols, std::move(entries));
}

CsrMatrix from_coo_text(const std::string& text) {
    std::istringstream is(text);
    return read_coo_stream(is);
}

// -- op counter ---------------------------------------------------------------

namespace {
thread_local std::uint64_t g_op_count = 0;
}

std::uint64_t OpCounter::get() { return g_op_count; }
void OpCounter::reset() { g_op_count = 0; }
void OpCounter::add(std::uint64_t n) { g_op_count += n; }

}  // namespace sobgnn
