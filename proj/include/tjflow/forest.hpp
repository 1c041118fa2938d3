#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "tjflow/rng.hpp"

namespace tjflow {

/// Row-major feature matrix.
struct Matrix {
    long rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(long rows_, int cols_) : rows(rows_), cols(cols_),
        data(static_cast<std::size_t>(rows_) * cols_, 0.0) {}

    double at(long r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
    double& at(long r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
    std::span<const double> row(long r) const {
        return {data.data() + static_cast<std::size_t>(r) * cols, static_cast<std::size_t>(cols)};
    }
};

struct ForestParams {
    int n_trees = 50;
    int mtry = 0;      // 0 = ceil(p / 3)
    int min_leaf = 5;  // bootstrap multiplicity counts as samples
    std::uint64_t seed = 0;
    int jobs = 0;      // 0 = all threads, 1 = serial reference path
};

/// CART regression tree. nodes[0] is the root; feature < 0 marks a leaf.
/// Split rule: x[feature] <= threshold goes left.
struct Tree {
    struct Node {
        int feature = -1;
        double threshold = 0.0;
        int left = -1;
        int right = -1;
        double value = 0.0;
    };
    std::vector<Node> nodes;

    double predict(std::span<const double> x) const;
};

struct Forest {
    std::vector<Tree> trees;
    std::vector<std::vector<int>> oob_indices; // per tree, ascending
    int n_features = 0;
    ForestParams params;

    /// Ensemble mean; throws on feature-dimension mismatch.
    double predict(std::span<const double> x) const;
};

/// Greedy variance-minimizing recursive partitioning over the given sample
/// multiset (indices may repeat, e.g. a bootstrap draw). At each node mtry
/// features are drawn without replacement; candidate thresholds are
/// midpoints between consecutive distinct sorted values; impurity ties are
/// broken by lowest feature index, then lowest threshold. Recursion stops
/// on nodes smaller than 2 * min_leaf, pure nodes (variance < 1e-12), or
/// when no split reduces the sum of squared errors.
Tree fit_tree(const Matrix& X, std::span<const double> y, std::span<const long> sample_indices,
              Rng& rng, const ForestParams& params);

/// Bagged ensemble: each tree fits an n-draw bootstrap sample from an RNG
/// stream derived from (seed, tree index), so training parallelism does
/// not change the model. Throws for n < 2.
Forest fit_forest(const Matrix& X, std::span<const double> y, ForestParams params);

struct OobScores {
    double mse = 0.0;
    double r2 = 0.0;
    long n_included = 0; // samples that were out-of-bag for >= 1 tree
    long n_excluded = 0;
};

OobScores oob_scores(const Forest& forest, const Matrix& X, std::span<const double> y);

/// Versioned text format (`# forest v1`), preorder node list per tree;
/// numbers round-trip exactly, so a loaded forest predicts identically.
void write_forest(std::ostream& out, const Forest& forest, const std::string& tag);
Forest read_forest(std::istream& in, std::string* tag = nullptr);

} // namespace tjflow
