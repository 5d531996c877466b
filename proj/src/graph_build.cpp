#include "sobgnn/graph_build.hpp"

#include <algorithm>
#include <cfloat>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "sobgnn/errors.hpp"
#include "sobgnn/rng.hpp"

namespace sobgnn {

std::string to_string(Symmetrization s) {
    return s == Symmetrization::union_rule ? "union" : "mutual";
}

Symmetrization symmetrization_from_string(const std::string& s) {
    if (s == "union") return Symmetrization::union_rule;
    if (s == "mutual") return Symmetrization::mutual;
    throw ParameterError("unknown symmetrization '" + s + "' (expected union|mutual)");
}

Graph knn_gaussian_graph(const DenseMatrix& features, std::size_t k,
                         std::optional<double> bandwidth, Symmetrization sym) {
    const std::size_t n = features.n_rows;
    if (k < 1) throw ParameterError("knn_gaussian_graph: k must be >= 1");
    if (k >= n) throw ParameterError("knn_gaussian_graph: k must be < number of nodes");
    if (!all_finite(features)) throw DataError("knn_gaussian_graph: non-finite feature");
    if (bandwidth && *bandwidth <= 0.0)
        throw ParameterError("knn_gaussian_graph: bandwidth must be positive");

    struct Candidate {
        double dist_sq;
        std::size_t index;
    };

    std::vector<std::vector<Candidate>> neighbors(n);
    std::vector<double> kth_dist(n);
    std::vector<Candidate> cand(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t c = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            double d2 = 0.0;
            for (std::size_t f = 0; f < features.n_cols; ++f) {
                const double diff = features(i, f) - features(j, f);
                d2 += diff * diff;
            }
            cand[c++] = {d2, j};
        }
        auto closer = [](const Candidate& a, const Candidate& b) {
            if (a.dist_sq != b.dist_sq) return a.dist_sq < b.dist_sq;
            return a.index < b.index;  // deterministic tie-breaking
        };
        std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k),
                          cand.end(), closer);
        neighbors[i].assign(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k));
        kth_dist[i] = std::sqrt(neighbors[i].back().dist_sq);
    }

    double sigma;
    if (bandwidth) {
        sigma = *bandwidth;
    } else {
        sigma = std::accumulate(kth_dist.begin(), kth_dist.end(), 0.0) / static_cast<double>(n);
        if (sigma <= 0.0) sigma = 1.0;  // all k-th neighbors are duplicates; any sigma gives weight 1
    }
    const double denom = 2.0 * sigma * sigma;

    std::vector<CooEntry> directed;
    directed.reserve(n * k * 2);
    for (std::size_t i = 0; i < n; ++i) {
        for (const Candidate& c : neighbors[i]) {
            double w = std::exp(-c.dist_sq / denom);
            if (w <= 0.0) w = DBL_MIN;  // keep underflowed edges in (0,1]
            directed.push_back({i, c.index, w});
            directed.push_back({c.index, i, w});  // transpose shadow for the merge
        }
    }
    std::sort(directed.begin(), directed.end(), [](const CooEntry& a, const CooEntry& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });

    // Each ordered pair now appears once (one k-NN direction hit) or twice
    // (both). Union keeps every pair, mutual only the doubly-hit ones; the
    // kept weight is the max, which is bit-identical in both directions.
    std::vector<CooEntry> merged;
    merged.reserve(directed.size() / 2);
    std::size_t i = 0;
    while (i < directed.size()) {
        std::size_t j = i + 1;
        double w = directed[i].value;
        while (j < directed.size() && directed[j].row == directed[i].row &&
               directed[j].col == directed[i].col) {
            w = std::max(w, directed[j].value);
            ++j;
        }
        const bool both_directions = (j - i) == 2;
        if (sym == Symmetrization::union_rule || both_directions)
            merged.push_back({directed[i].row, directed[i].col, w});
        i = j;
    }

    Graph g;
    g.n_nodes = n;
    g.adjacency = CsrMatrix::from_coo(n, n, std::move(merged));
    g.meta = {k, sigma, sym};
    return g;
}

// -- split masks ---------------------------------------------------------------

namespace {
thread_local int g_test_mask_guard_depth = 0;
}

SplitMasks::SplitMasks(std::vector<std::uint8_t> train, std::vector<std::uint8_t> val,
                       std::vector<std::uint8_t> test)
    : train_(std::move(train)), val_(std::move(val)), test_(std::move(test)) {
    if (train_.size() != val_.size() || train_.size() != test_.size())
        throw DimensionError("SplitMasks: mask lengths differ");
    for (std::size_t i = 0; i < train_.size(); ++i)
        if (train_[i] + val_[i] + test_[i] != 1)
            throw DomainError("SplitMasks: masks must partition the node set");
}

const std::vector<std::uint8_t>& SplitMasks::test() const {
    if (g_test_mask_guard_depth > 0)
        throw DomainError("test mask read inside a no-test-leakage scope");
    return test_;
}

TestMaskGuard::TestMaskGuard() { ++g_test_mask_guard_depth; }
TestMaskGuard::~TestMaskGuard() { --g_test_mask_guard_depth; }

namespace {

// Integer allocation summing to `total`, each entry within 1 of its exact
// share (largest-remainder rounding; ties go to the smaller index).
std::vector<std::size_t> largest_remainder(const std::vector<double>& shares, std::size_t total) {
    const std::size_t n = shares.size();
    std::vector<std::size_t> alloc(n);
    std::vector<double> frac(n);
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < n; ++i) {
        alloc[i] = static_cast<std::size_t>(std::floor(shares[i]));
        frac[i] = shares[i] - static_cast<double>(alloc[i]);
        assigned += alloc[i];
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (frac[a] != frac[b]) return frac[a] > frac[b];
        return a < b;
    });
    for (std::size_t r = 0; assigned < total && r < n; ++r) {
        ++alloc[order[r]];
        ++assigned;
    }
    if (assigned != total) throw NumericalError("largest_remainder: shares inconsistent with total");
    return alloc;
}

}  // namespace

SplitMasks split_dataset(const std::vector<int>& labels, const SplitFractions& fractions,
                         std::uint64_t test_seed, std::uint64_t dev_seed) {
    const std::size_t n = labels.size();
    if (n == 0) throw ParameterError("split_dataset: empty label vector");
    const double total = fractions.train + fractions.val + fractions.test;
    if (fractions.train < 0 || fractions.val < 0 || fractions.test < 0 ||
        std::fabs(total - 1.0) > 1e-9)
        throw ParameterError("split_dataset: fractions must be non-negative and sum to 1");

    int max_label = -1;
    for (int l : labels) {
        if (l < 0) throw DataError("split_dataset: negative label");
        max_label = std::max(max_label, l);
    }
    const std::size_t n_classes = static_cast<std::size_t>(max_label) + 1;
    std::vector<std::vector<std::size_t>> by_class(n_classes);
    for (std::size_t i = 0; i < n; ++i) by_class[static_cast<std::size_t>(labels[i])].push_back(i);
    for (std::size_t c = 0; c < n_classes; ++c)
        if (by_class[c].empty())
            throw ParameterError("split_dataset: class " + std::to_string(c) + " has no samples");

    // Global sizes first, then stratified apportionment within each stage.
    const std::vector<std::size_t> global = largest_remainder(
        {fractions.train * static_cast<double>(n), fractions.val * static_cast<double>(n),
         fractions.test * static_cast<double>(n)},
        n);
    const std::size_t n_train = global[0], n_val = global[1], n_test = global[2];
    if (n_train == 0 || n_val == 0 || n_test == 0)
        throw ParameterError("split_dataset: a fraction produces an empty split");

    std::vector<double> test_shares(n_classes);
    for (std::size_t c = 0; c < n_classes; ++c)
        test_shares[c] = static_cast<double>(n_test) * static_cast<double>(by_class[c].size()) /
                         static_cast<double>(n);
    const std::vector<std::size_t> test_alloc = largest_remainder(test_shares, n_test);

    std::vector<std::uint8_t> train_mask(n, 0), val_mask(n, 0), test_mask(n, 0);
    std::vector<std::vector<std::size_t>> dev_by_class(n_classes);

    Rng test_rng(test_seed);
    for (std::size_t c = 0; c < n_classes; ++c) {
        std::vector<std::size_t> idx = by_class[c];
        test_rng.shuffle(idx);
        for (std::size_t r = 0; r < idx.size(); ++r) {
            if (r < test_alloc[c])
                test_mask[idx[r]] = 1;
            else
                dev_by_class[c].push_back(idx[r]);
        }
    }

    const std::size_t n_dev = n - n_test;
    std::vector<double> train_shares(n_classes);
    for (std::size_t c = 0; c < n_classes; ++c)
        train_shares[c] = static_cast<double>(n_train) *
                          static_cast<double>(dev_by_class[c].size()) / static_cast<double>(n_dev);
    const std::vector<std::size_t> train_alloc = largest_remainder(train_shares, n_train);

    Rng dev_rng(dev_seed);
    for (std::size_t c = 0; c < n_classes; ++c) {
        std::vector<std::size_t>& idx = dev_by_class[c];
        dev_rng.shuffle(idx);
        for (std::size_t r = 0; r < idx.size(); ++r) {
            if (r < train_alloc[c])
                train_mask[idx[r]] = 1;
            else
                val_mask[idx[r]] = 1;
        }
    }

    return SplitMasks(std::move(train_mask), std::move(val_mask), std::move(test_mask));
}

std::size_t Dataset::n_classes() const {
    int max_label = -1;
    for (int l : labels) max_label = std::max(max_label, l);
    return static_cast<std::size_t>(max_label + 1);
}

void validate_dataset(const DenseMatrix& features, const std::vector<int>& labels) {
    if (features.n_rows != labels.size())
        throw DataError("dataset: features have " + std::to_string(features.n_rows) +
                        " rows but there are " + std::to_string(labels.size()) + " labels");
    if (!all_finite(features)) throw DataError("dataset: non-finite feature value");
    int max_label = -1;
    for (int l : labels) {
        if (l < 0) throw DataError("dataset: negative label");
        max_label = std::max(max_label, l);
    }
    if (max_label < 1) throw DataError("dataset: need at least two classes");
    std::vector<std::size_t> counts(static_cast<std::size_t>(max_label) + 1, 0);
    for (int l : labels) ++counts[static_cast<std::size_t>(l)];
    for (std::size_t c = 0; c < counts.size(); ++c)
        if (counts[c] == 0)
            throw DataError("dataset: class " + std::to_string(c) + " has no samples");
}

// -- ingestion ---------------------------------------------------------------

DenseMatrix read_csv_features(std::istream& is, const std::string& name) {
    std::vector<double> values;
    std::size_t n_cols = 0, n_rows = 0, line_no = 0;
    std::string line;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::size_t cols = 0;
        const char* p = line.data();
        const char* end = line.data() + line.size();
        while (p < end) {
            const char* field_end = std::find(p, end, ',');
            double v = 0.0;
            auto res = std::from_chars(p, field_end, v);
            // tolerate surrounding spaces
            if (res.ec != std::errc{}) {
                const char* q = p;
                while (q < field_end && *q == ' ') ++q;
                const char* r = field_end;
                while (r > q && r[-1] == ' ') --r;
                res = std::from_chars(q, r, v);
                if (res.ec != std::errc{} || res.ptr != r)
                    throw DataError(name + ":" + std::to_string(line_no) + ": expected number in field " +
                                    std::to_string(cols + 1));
            } else if (res.ptr != field_end) {
                throw DataError(name + ":" + std::to_string(line_no) + ": trailing garbage in field " +
                                std::to_string(cols + 1));
            }
            values.push_back(v);
            ++cols;
            p = field_end < end ? field_end + 1 : end;
        }
        if (n_rows == 0) {
            n_cols = cols;
        } else if (cols != n_cols) {
            throw DataError(name + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(n_cols) + " fields, got " + std::to_string(cols));
        }
        ++n_rows;
    }
    if (n_rows == 0) throw DataError(name + ": no data rows");
    DenseMatrix m(n_rows, n_cols);
    m.values = std::move(values);
    return m;
}

DenseMatrix read_csv_features_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot open " + path);
    return read_csv_features(is, path);
}

DenseMatrix read_features_auto(const std::string& path) {
    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".coo") == 0) {
        std::ifstream is(path);
        if (!is) throw DataError("cannot open " + path);
        return to_dense(read_coo_stream(is));
    }
    return read_csv_features_file(path);
}

std::vector<int> read_labels_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot open " + path);
    std::vector<int> labels;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        int v = 0;
        const auto res = std::from_chars(line.data(), line.data() + line.size(), v);
        if (res.ec != std::errc{})
            throw DataError(path + ":" + std::to_string(line_no) + ": expected integer label");
        labels.push_back(v);
    }
    if (labels.empty()) throw DataError(path + ": no labels");
    return labels;
}

}  // namespace sobgnn
