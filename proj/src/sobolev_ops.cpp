#include "sobgnn/sobolev_ops.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "sobgnn/errors.hpp"
#include "sobgnn/io.hpp"

namespace sobgnn {

CsrMatrix sparse_sobolev_term(const CsrMatrix& a, double eps, unsigned rho) {
    if (eps < 0.0) throw ParameterError("sparse_sobolev_term: eps must be >= 0");
    if (!is_symmetric(a, 0.0)) throw DomainError("sparse_sobolev_term: matrix not symmetric");
    return hadamard_power(add_scaled_identity(a, eps), rho);
}

CsrMatrix sobolev_laplacian_term(const CsrMatrix& l, double eps, unsigned rho) {
    if (eps < 0.0) throw ParameterError("sobolev_laplacian_term: eps must be >= 0");
    return hadamard_power(add_scaled_identity(l, eps), rho);
}

SobolevCascade build_cascade(const CsrMatrix& a, double eps, std::size_t alpha) {
    if (alpha < 1) throw ParameterError("build_cascade: alpha must be >= 1");
    SobolevCascade cascade;
    cascade.eps = eps;
    cascade.alpha = alpha;
    cascade.operators.reserve(alpha);
    for (unsigned rho = 1; rho <= alpha; ++rho) {
        CsrMatrix term = sparse_sobolev_term(a, eps, rho);
        double max_entry = 0.0;
        for (double v : term.values) max_entry = std::max(max_entry, std::fabs(v));
        // Gaussian weights live in (0,1]; high Hadamard powers can underflow
        // the whole matrix to zero. 1e-300 triggers only on true underflow.
        if (max_entry < 1e-300)
            throw NumericalError("cascade degenerate at rho=" + std::to_string(rho) +
                                 ": all entries underflow to zero");
        cascade.operators.push_back(sym_normalize(term));
    }
    return cascade;
}

void save_cascade(const SobolevCascade& cascade, const std::string& path) {
    std::string body;
    for (const CsrMatrix& op : cascade.operators) body += to_coo_text(op);
    write_file_atomic(path, body);
    nlohmann::json meta = {{"eps", cascade.eps}, {"alpha", cascade.alpha}};
    write_file_atomic(path + ".meta.json", meta.dump(2) + "\n");
}

SobolevCascade load_cascade(const std::string& path) {
    const nlohmann::json meta = nlohmann::json::parse(read_file(path + ".meta.json"));
    SobolevCascade cascade;
    cascade.eps = meta.at("eps").get<double>();
    cascade.alpha = meta.at("alpha").get<std::size_t>();
    std::istringstream is(read_file(path));
    for (std::size_t i = 0; i < cascade.alpha; ++i)
        cascade.operators.push_back(read_coo_stream(is));
    if (cascade.operators.size() != cascade.alpha)
        throw DataError("cascade cache " + path + ": operator count mismatch");
    return cascade;
}

}  // namespace sobgnn
