#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "sobgnn/csr_matrix.hpp"
#include "sobgnn/dense_matrix.hpp"
#include "sobgnn/rng.hpp"
#include "sobgnn/sobolev_ops.hpp"

namespace sobgnn {

/// How the alpha filter outputs of a layer are merged: a learned scalar per
/// filter (default), or a learned projection of the concatenated outputs.
enum class CombineMode { scalar, project };

std::string to_string(CombineMode m);
CombineMode combine_mode_from_string(const std::string& s);

struct LayerParams {
    std::vector<DenseMatrix> filter_weights;    // alpha matrices, F_in x F_out
    std::vector<double> combination;            // scalar mode, length alpha
    DenseMatrix projection;                     // project mode, (alpha*F_out) x F_out
    std::vector<std::vector<double>> bias;      // per filter, F_out; empty when disabled
};

struct ModelParams {
    CombineMode combine = CombineMode::scalar;
    bool use_bias = false;
    std::vector<LayerParams> layers;
};

struct ModelArch {
    std::size_t in_features = 0;
    std::size_t hidden_units = 16;
    std::size_t n_classes = 2;
    std::size_t n_layers = 2;
    std::size_t alpha = 1;
    CombineMode combine = CombineMode::scalar;
    bool use_bias = false;
};

/// Glorot-uniform weights, combination scalars at 1/alpha, zero biases.
ModelParams init_params(const ModelArch& arch, Rng& rng);

/// Same tensor shapes as `like`, all values zero. Used for gradients and
/// optimizer state.
ModelParams zeros_like(const ModelParams& like);

/// All parameter tensors in a fixed order (weights, combination/projection,
/// biases per layer); grads and optimizer state iterate in lockstep.
std::vector<std::vector<double>*> tensor_views(ModelParams& p);
std::vector<const std::vector<double>*> tensor_views(const ModelParams& p);

struct LayerTrace {
    DenseMatrix input;                       // post-dropout layer input
    std::vector<DenseMatrix> propagated;     // op_rho * input
    std::vector<DenseMatrix> preact;         // propagated * W_rho (+ bias)
    std::vector<DenseMatrix> activated;      // relu(preact) or preact
    std::vector<std::uint8_t> dropout_mask;  // over input entries; empty if no dropout
    double dropout_scale = 1.0;
    bool relu_applied = false;
};

struct ForwardTrace {
    std::vector<LayerTrace> layers;
    DenseMatrix logits;
    DenseMatrix probs;  // row-stochastic
};

/// Training-mode dropout on layer inputs (inverted scaling). Absent in
/// evaluation calls.
struct DropoutContext {
    double rate = 0.0;
    Rng* rng = nullptr;
};

struct LayerForward {
    DenseMatrix output;
    LayerTrace trace;
};

/// One cascade layer: B_rho = sigma(op_rho * h * W_rho) per filter, merged
/// by the combination. Fails fast with layer/filter indices on non-finite
/// activations.
LayerForward sob_layer_forward(const DenseMatrix& h, const SobolevCascade& cascade,
                               const LayerParams& layer, bool apply_relu,
                               std::size_t layer_index = 0);

/// Full forward pass: ReLU on hidden layers, identity on the last one,
/// row-wise softmax at the end.
ForwardTrace model_forward(const DenseMatrix& x, const SobolevCascade& cascade,
                           const ModelParams& params, const DropoutContext* dropout = nullptr);

DenseMatrix softmax_rows(const DenseMatrix& logits);

/// Mean over masked nodes of -log p[node, label]; log is guarded at 1e-30.
double cross_entropy_loss(const DenseMatrix& probs, const std::vector<int>& labels,
                          const std::vector<std::uint8_t>& mask);

/// Fraction of masked nodes whose argmax row matches the label.
double accuracy(const DenseMatrix& probs, const std::vector<int>& labels,
                const std::vector<std::uint8_t>& mask);

/// Exact reverse-mode gradients of the masked cross-entropy with respect to
/// every parameter. Uses op^T = op in the transpose-propagation step.
ModelParams model_backward(const ForwardTrace& trace, const std::vector<int>& labels,
                           const std::vector<std::uint8_t>& mask, const ModelParams& params,
                           const SobolevCascade& cascade);

/// D~^{-1/2} (A+I) D~^{-1/2}, the single propagation operator of the
/// baseline.
CsrMatrix build_gcn_operator(const CsrMatrix& a);

/// Baseline layer on the renormalized operator built from A + I.
DenseMatrix gcn_layer_forward(const DenseMatrix& h, const CsrMatrix& a, const DenseMatrix& w,
                              bool apply_relu = true);

// -- checkpointing -----------------------------------------------------------

struct Checkpoint {
    ModelParams params;
    double eps = 1.0;
    std::size_t alpha = 1;
    std::string model_kind = "ssobgnn";
};

/// Versioned JSON container; a reload reproduces forward outputs exactly
/// (doubles round-trip through shortest decimal).
void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace sobgnn
