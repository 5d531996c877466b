#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sobgnn/csr_matrix.hpp"
#include "sobgnn/dense_matrix.hpp"

namespace sobgnn {

enum class Symmetrization { union_rule, mutual };

std::string to_string(Symmetrization s);
Symmetrization symmetrization_from_string(const std::string& s);

struct GraphMeta {
    std::size_t k = 0;
    double kernel_bandwidth = 0.0;  // resolved sigma
    Symmetrization symmetrization = Symmetrization::union_rule;
};

/// Weighted undirected graph: symmetric non-negative adjacency with zero
/// diagonal, weights in (0, 1].
struct Graph {
    std::size_t n_nodes = 0;
    CsrMatrix adjacency;
    GraphMeta meta;
};

/// k-NN graph with Gaussian kernel weights exp(-d^2 / (2 sigma^2)).
/// bandwidth = nullopt picks sigma as the mean distance to the k-th nearest
/// neighbor over all nodes. Distance ties break toward the smaller index.
Graph knn_gaussian_graph(const DenseMatrix& features, std::size_t k,
                         std::optional<double> bandwidth = std::nullopt,
                         Symmetrization sym = Symmetrization::union_rule);

/// Train/val/test node masks. The test mask is behind an access guard:
/// reading it while a TestMaskGuard is alive throws, which is how the
/// no-test-leakage contract of training and search is enforced.
class SplitMasks {
  public:
    SplitMasks() = default;
    SplitMasks(std::vector<std::uint8_t> train, std::vector<std::uint8_t> val,
               std::vector<std::uint8_t> test);

    const std::vector<std::uint8_t>& train() const { return train_; }
    const std::vector<std::uint8_t>& val() const { return val_; }
    const std::vector<std::uint8_t>& test() const;  // throws while guarded
    std::size_t size() const { return train_.size(); }

  private:
    std::vector<std::uint8_t> train_, val_, test_;
};

/// While alive (per thread), any SplitMasks::test() read throws DomainError.
class TestMaskGuard {
  public:
    TestMaskGuard();
    ~TestMaskGuard();
    TestMaskGuard(const TestMaskGuard&) = delete;
    TestMaskGuard& operator=(const TestMaskGuard&) = delete;
};

struct SplitFractions {
    double train = 0.10;
    double val = 0.45;
    double test = 0.45;
};

/// Two-stage stratified split: the test set is drawn once from the
/// test_seed shuffle, then train/val are drawn from the remaining
/// development set with dev_seed. Per-class counts stay within 1 of the
/// exact stratified targets.
SplitMasks split_dataset(const std::vector<int>& labels, const SplitFractions& fractions,
                         std::uint64_t test_seed, std::uint64_t dev_seed);

struct Dataset {
    DenseMatrix features;
    std::vector<int> labels;
    SplitMasks masks;

    std::size_t n_nodes() const { return labels.size(); }
    std::size_t n_classes() const;
};

/// Checks feature/label consistency (sizes match, labels contiguous from 0,
/// at least two classes, features finite).
void validate_dataset(const DenseMatrix& features, const std::vector<int>& labels);

// -- ingestion ---------------------------------------------------------------

/// One row per node, comma-separated doubles. Errors carry line numbers.
DenseMatrix read_csv_features(std::istream& is, const std::string& name = "features");
DenseMatrix read_csv_features_file(const std::string& path);

/// Feature file dispatch: ".coo" loads the sparse_core COO format densely,
/// anything else parses as CSV.
DenseMatrix read_features_auto(const std::string& path);

/// One integer label per line.
std::vector<int> read_labels_file(const std::string& path);

}  // namespace sobgnn
