#include "sobgnn/network.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "sobgnn/errors.hpp"
#include "sobgnn/io.hpp"

namespace sobgnn {

std::string to_string(CombineMode m) { return m == CombineMode::scalar ? "scalar" : "project"; }

CombineMode combine_mode_from_string(const std::string& s) {
    if (s == "scalar") return CombineMode::scalar;
    if (s == "project") return CombineMode::project;
    throw ParameterError("unknown combine mode '" + s + "' (expected scalar|project)");
}

namespace {

DenseMatrix glorot_uniform(std::size_t rows, std::size_t cols, Rng& rng) {
    DenseMatrix w(rows, cols);
    const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
    for (double& v : w.values) v = rng.uniform(-limit, limit);
    return w;
}

}  // namespace

ModelParams init_params(const ModelArch& arch, Rng& rng) {
    if (arch.n_layers < 1) throw ParameterError("init_params: need at least one layer");
    if (arch.alpha < 1) throw ParameterError("init_params: alpha must be >= 1");
    ModelParams p;
    p.combine = arch.combine;
    p.use_bias = arch.use_bias;
    for (std::size_t l = 0; l < arch.n_layers; ++l) {
        const std::size_t f_in = l == 0 ? arch.in_features : arch.hidden_units;
        const std::size_t f_out = l + 1 == arch.n_layers ? arch.n_classes : arch.hidden_units;
        LayerParams layer;
        for (std::size_t r = 0; r < arch.alpha; ++r)
            layer.filter_weights.push_back(glorot_uniform(f_in, f_out, rng));
        if (arch.combine == CombineMode::scalar) {
            layer.combination.assign(arch.alpha, 1.0 / static_cast<double>(arch.alpha));
        } else {
            layer.projection = glorot_uniform(arch.alpha * f_out, f_out, rng);
        }
        if (arch.use_bias)
            layer.bias.assign(arch.alpha, std::vector<double>(f_out, 0.0));
        p.layers.push_back(std::move(layer));
    }
    return p;
}

ModelParams zeros_like(const ModelParams& like) {
    ModelParams z;
    z.combine = like.combine;
    z.use_bias = like.use_bias;
    for (const LayerParams& l : like.layers) {
        LayerParams zl;
        for (const DenseMatrix& w : l.filter_weights)
            zl.filter_weights.emplace_back(w.n_rows, w.n_cols);
        zl.combination.assign(l.combination.size(), 0.0);
        zl.projection = DenseMatrix(l.projection.n_rows, l.projection.n_cols);
        for (const auto& b : l.bias) zl.bias.emplace_back(b.size(), 0.0);
        z.layers.push_back(std::move(zl));
    }
    return z;
}

std::vector<std::vector<double>*> tensor_views(ModelParams& p) {
    std::vector<std::vector<double>*> views;
    for (LayerParams& l : p.layers) {
        for (DenseMatrix& w : l.filter_weights) views.push_back(&w.values);
        if (p.combine == CombineMode::scalar)
            views.push_back(&l.combination);
        else
            views.push_back(&l.projection.values);
        for (auto& b : l.bias) views.push_back(&b);
    }
    return views;
}

std::vector<const std::vector<double>*> tensor_views(const ModelParams& p) {
    std::vector<const std::vector<double>*> views;
    for (const LayerParams& l : p.layers) {
        for (const DenseMatrix& w : l.filter_weights) views.push_back(&w.values);
        if (p.combine == CombineMode::scalar)
            views.push_back(&l.combination);
        else
            views.push_back(&l.projection.values);
        for (const auto& b : l.bias) views.push_back(&b);
    }
    return views;
}

namespace {

void check_finite(const DenseMatrix& m, std::size_t layer, std::size_t filter) {
    if (!all_finite(m))
        throw NumericalError("non-finite activation at layer " + std::to_string(layer) +
                             ", filter rho=" + std::to_string(filter + 1));
}

DenseMatrix concat_columns(const std::vector<DenseMatrix>& blocks) {
    const std::size_t n = blocks.front().n_rows;
    std::size_t cols = 0;
    for (const DenseMatrix& b : blocks) cols += b.n_cols;
    DenseMatrix out(n, cols);
    std::size_t offset = 0;
    for (const DenseMatrix& b : blocks) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < b.n_cols; ++j) out(i, offset + j) = b(i, j);
        offset += b.n_cols;
    }
    return out;
}

}  // namespace

LayerForward sob_layer_forward(const DenseMatrix& h, const SobolevCascade& cascade,
                               const LayerParams& layer, bool apply_relu,
                               std::size_t layer_index) {
    const std::size_t alpha = cascade.alpha;
    if (layer.filter_weights.size() != alpha)
        throw DimensionError("sob_layer_forward: layer has " +
                             std::to_string(layer.filter_weights.size()) + " filters, cascade has " +
                             std::to_string(alpha));
    LayerTrace trace;
    trace.input = h;
    trace.relu_applied = apply_relu;
    for (std::size_t r = 0; r < alpha; ++r) {
        const DenseMatrix& w = layer.filter_weights[r];
        if (h.n_cols != w.n_rows)
            throw DimensionError("sob_layer_forward: input width " + std::to_string(h.n_cols) +
                                 " does not match weight rows " + std::to_string(w.n_rows));
        DenseMatrix propagated = spmm(cascade.operators[r], h);
        DenseMatrix z = matmul(propagated, w);
        if (!layer.bias.empty()) {
            const std::vector<double>& b = layer.bias[r];
            for (std::size_t i = 0; i < z.n_rows; ++i)
                for (std::size_t j = 0; j < z.n_cols; ++j) z(i, j) += b[j];
        }
        check_finite(z, layer_index, r);
        DenseMatrix activated = z;
        if (apply_relu)
            for (double& v : activated.values) v = v > 0.0 ? v : 0.0;
        trace.propagated.push_back(std::move(propagated));
        trace.preact.push_back(std::move(z));
        trace.activated.push_back(std::move(activated));
    }

    DenseMatrix out;
    if (layer.projection.values.empty()) {
        if (layer.combination.size() != alpha)
            throw DimensionError("sob_layer_forward: combination length mismatch");
        out = DenseMatrix(trace.activated[0].n_rows, trace.activated[0].n_cols);
        for (std::size_t r = 0; r < alpha; ++r) {
            const double c = layer.combination[r];
            for (std::size_t i = 0; i < out.values.size(); ++i)
                out.values[i] += c * trace.activated[r].values[i];
        }
    } else {
        out = matmul(concat_columns(trace.activated), layer.projection);
    }
    check_finite(out, layer_index, alpha == 0 ? 0 : alpha - 1);
    return {std::move(out), std::move(trace)};
}

DenseMatrix softmax_rows(const DenseMatrix& logits) {
    DenseMatrix probs(logits.n_rows, logits.n_cols);
    for (std::size_t i = 0; i < logits.n_rows; ++i) {
        double row_max = logits(i, 0);
        for (std::size_t j = 1; j < logits.n_cols; ++j) row_max = std::max(row_max, logits(i, j));
        double q = 0.0;
        for (std::size_t j = 0; j < logits.n_cols; ++j) {
            probs(i, j) = std::exp(logits(i, j) - row_max);
            q += probs(i, j);
        }
        for (std::size_t j = 0; j < logits.n_cols; ++j) probs(i, j) /= q;
    }
    return probs;
}

ForwardTrace model_forward(const DenseMatrix& x, const SobolevCascade& cascade,
                           const ModelParams& params, const DropoutContext* dropout) {
    if (params.layers.empty()) throw ParameterError("model_forward: no layers");
    ForwardTrace trace;
    DenseMatrix h = x;
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        std::vector<std::uint8_t> mask;
        double scale = 1.0;
        if (dropout && dropout->rate > 0.0) {
            if (!dropout->rng) throw ParameterError("model_forward: dropout without rng");
            scale = 1.0 / (1.0 - dropout->rate);
            mask.resize(h.values.size());
            for (std::size_t i = 0; i < mask.size(); ++i) {
                mask[i] = dropout->rng->uniform01() >= dropout->rate ? 1 : 0;
                h.values[i] = mask[i] ? h.values[i] * scale : 0.0;
            }
        }
        const bool hidden = l + 1 < params.layers.size();
        LayerForward lf = sob_layer_forward(h, cascade, params.layers[l], hidden, l);
        lf.trace.dropout_mask = std::move(mask);
        lf.trace.dropout_scale = scale;
        trace.layers.push_back(std::move(lf.trace));
        h = std::move(lf.output);
    }
    trace.logits = std::move(h);
    trace.probs = softmax_rows(trace.logits);
    return trace;
}

double cross_entropy_loss(const DenseMatrix& probs, const std::vector<int>& labels,
                          const std::vector<std::uint8_t>& mask) {
    if (labels.size() != probs.n_rows || mask.size() != probs.n_rows)
        throw DimensionError("cross_entropy_loss: length mismatch");
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < probs.n_rows; ++i) {
        if (!mask[i]) continue;
        const auto label = static_cast<std::size_t>(labels[i]);
        if (label >= probs.n_cols) throw DataError("cross_entropy_loss: label out of range");
        total += -std::log(std::max(probs(i, label), 1e-30));
        ++count;
    }
    return count == 0 ? 0.0 : total / static_cast<double>(count);
}

double accuracy(const DenseMatrix& probs, const std::vector<int>& labels,
                const std::vector<std::uint8_t>& mask) {
    if (labels.size() != probs.n_rows || mask.size() != probs.n_rows)
        throw DimensionError("accuracy: length mismatch");
    std::size_t correct = 0, count = 0;
    for (std::size_t i = 0; i < probs.n_rows; ++i) {
        if (!mask[i]) continue;
        std::size_t argmax = 0;
        for (std::size_t j = 1; j < probs.n_cols; ++j)
            if (probs(i, j) > probs(i, argmax)) argmax = j;
        if (static_cast<int>(argmax) == labels[i]) ++correct;
        ++count;
    }
    return count == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(count);
}

ModelParams model_backward(const ForwardTrace& trace, const std::vector<int>& labels,
                           const std::vector<std::uint8_t>& mask, const ModelParams& params,
                           const SobolevCascade& cascade) {
    if (trace.layers.size() != params.layers.size())
        throw DimensionError("model_backward: trace does not match params (stale trace?)");
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        if (trace.layers[l].preact.size() != params.layers[l].filter_weights.size() ||
            trace.layers[l].input.n_cols != params.layers[l].filter_weights[0].n_rows)
            throw DimensionError("model_backward: layer " + std::to_string(l) +
                                 " shapes drifted since forward (stale trace)");
    }

    ModelParams grads = zeros_like(params);
    const std::size_t n = trace.probs.n_rows;
    std::size_t n_masked = 0;
    for (std::size_t i = 0; i < n; ++i) n_masked += mask[i] ? 1 : 0;
    if (n_masked == 0) return grads;

    // softmax + cross-entropy collapse to (p - onehot) / n_masked on masked rows
    DenseMatrix upstream(n, trace.probs.n_cols);
    const double inv = 1.0 / static_cast<double>(n_masked);
    for (std::size_t i = 0; i < n; ++i) {
        if (!mask[i]) continue;
        for (std::size_t j = 0; j < trace.probs.n_cols; ++j)
            upstream(i, j) = trace.probs(i, j) * inv;
        upstream(i, static_cast<std::size_t>(labels[i])) -= inv;
    }

    for (std::size_t l = params.layers.size(); l-- > 0;) {
        const LayerParams& layer = params.layers[l];
        const LayerTrace& lt = trace.layers[l];
        LayerParams& g = grads.layers[l];
        const std::size_t alpha = layer.filter_weights.size();

        std::vector<DenseMatrix> d_activated(alpha);
        if (layer.projection.values.empty()) {
            for (std::size_t r = 0; r < alpha; ++r) {
                double dot = 0.0;
                for (std::size_t i = 0; i < upstream.values.size(); ++i)
                    dot += upstream.values[i] * lt.activated[r].values[i];
                g.combination[r] = dot;
                d_activated[r] = scale(upstream, layer.combination[r]);
            }
        } else {
            const DenseMatrix concat = concat_columns(lt.activated);
            g.projection = matmul(transpose(concat), upstream);
            const DenseMatrix d_concat = matmul(upstream, transpose(layer.projection));
            const std::size_t f_out = lt.activated[0].n_cols;
            for (std::size_t r = 0; r < alpha; ++r) {
                DenseMatrix block(n, f_out);
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = 0; j < f_out; ++j)
                        block(i, j) = d_concat(i, r * f_out + j);
                d_activated[r] = std::move(block);
            }
        }

        DenseMatrix d_input(lt.input.n_rows, lt.input.n_cols);
        for (std::size_t r = 0; r < alpha; ++r) {
            DenseMatrix d_preact = std::move(d_activated[r]);
            if (lt.relu_applied) {
                for (std::size_t i = 0; i < d_preact.values.size(); ++i)
                    if (lt.preact[r].values[i] <= 0.0) d_preact.values[i] = 0.0;
            }
            if (!layer.bias.empty()) {
                std::vector<double>& db = g.bias[r];
                for (std::size_t i = 0; i < d_preact.n_rows; ++i)
                    for (std::size_t j = 0; j < d_preact.n_cols; ++j)
                        db[j] += d_preact(i, j);
            }
            g.filter_weights[r] = matmul(transpose(lt.propagated[r]), d_preact);
            // operators are symmetric, so op^T = op in the propagation transpose
            const DenseMatrix d_propagated = matmul(d_preact, transpose(layer.filter_weights[r]));
            const DenseMatrix back = spmm(cascade.operators[r], d_propagated);
            for (std::size_t i = 0; i < d_input.values.size(); ++i)
                d_input.values[i] += back.values[i];
        }

        if (!lt.dropout_mask.empty()) {
            for (std::size_t i = 0; i < d_input.values.size(); ++i)
                d_input.values[i] = lt.dropout_mask[i] ? d_input.values[i] * lt.dropout_scale : 0.0;
        }
        upstream = std::move(d_input);
    }
    return grads;
}

CsrMatrix build_gcn_operator(const CsrMatrix& a) {
    return sym_normalize(add_scaled_identity(a, 1.0));
}

DenseMatrix gcn_layer_forward(const DenseMatrix& h, const CsrMatrix& a, const DenseMatrix& w,
                              bool apply_relu) {
    const CsrMatrix op = build_gcn_operator(a);
    DenseMatrix out = matmul(spmm(op, h), w);
    if (apply_relu)
        for (double& v : out.values) v = v > 0.0 ? v : 0.0;
    return out;
}

// -- checkpointing -----------------------------------------------------------

namespace {

nlohmann::json dense_to_json(const DenseMatrix& m) {
    return {{"rows", m.n_rows}, {"cols", m.n_cols}, {"values", m.values}};
}

DenseMatrix dense_from_json(const nlohmann::json& j) {
    DenseMatrix m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
    m.values = j.at("values").get<std::vector<double>>();
    if (m.values.size() != m.n_rows * m.n_cols)
        throw DataError("checkpoint: tensor size mismatch");
    return m;
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
    nlohmann::json j;
    j["format_version"] = 1;
    j["eps"] = ckpt.eps;
    j["alpha"] = ckpt.alpha;
    j["model_kind"] = ckpt.model_kind;
    j["combine"] = to_string(ckpt.params.combine);
    j["use_bias"] = ckpt.params.use_bias;
    nlohmann::json layers = nlohmann::json::array();
    for (const LayerParams& l : ckpt.params.layers) {
        nlohmann::json jl;
        jl["filters"] = nlohmann::json::array();
        for (const DenseMatrix& w : l.filter_weights) jl["filters"].push_back(dense_to_json(w));
        jl["combination"] = l.combination;
        if (!l.projection.values.empty()) jl["projection"] = dense_to_json(l.projection);
        if (!l.bias.empty()) jl["bias"] = l.bias;
        layers.push_back(std::move(jl));
    }
    j["layers"] = std::move(layers);
    write_file_atomic(path, j.dump(2) + "\n");
}

Checkpoint load_checkpoint(const std::string& path) {
    const nlohmann::json j = nlohmann::json::parse(read_file(path));
    if (j.at("format_version").get<int>() != 1)
        throw DataError("checkpoint " + path + ": unsupported format version");
    Checkpoint ckpt;
    ckpt.eps = j.at("eps").get<double>();
    ckpt.alpha = j.at("alpha").get<std::size_t>();
    ckpt.model_kind = j.at("model_kind").get<std::string>();
    ckpt.params.combine = combine_mode_from_string(j.at("combine").get<std::string>());
    ckpt.params.use_bias = j.at("use_bias").get<bool>();
    for (const auto& jl : j.at("layers")) {
        LayerParams l;
        for (const auto& jw : jl.at("filters")) l.filter_weights.push_back(dense_from_json(jw));
        l.combination = jl.at("combination").get<std::vector<double>>();
        if (jl.contains("projection")) l.projection = dense_from_json(jl.at("projection"));
        if (jl.contains("bias")) l.bias = jl.at("bias").get<std::vector<std::vector<double>>>();
        ckpt.params.layers.push_back(std::move(l));
    }
    return ckpt;
}

}  // namespace sobgnn
