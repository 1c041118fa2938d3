#include "tjflow/forest.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "tjflow/errors.hpp"
#include "tjflow/grid.hpp"
#include "tjflow/parallel.hpp"
#include "tjflow/text.hpp"

namespace tjflow {

double Tree::predict(std::span<const double> x) const {
    int i = 0;
    for (;;) {
        const Node& n = nodes[i];
        if (n.feature < 0) return n.value;
        i = x[n.feature] <= n.threshold ? n.left : n.right;
    }
}

double Forest::predict(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != n_features)
        throw ValidationError("predict: expected " + std::to_string(n_features) +
                              " features, got " + std::to_string(x.size()));
    double acc = 0.0;
    for (const Tree& t : trees) acc += t.predict(x);
    return acc / static_cast<double>(trees.size());
}

namespace {

int resolve_mtry(int requested, int n_features) {
    if (requested > 0) return std::min(requested, n_features);
    return (n_features + 2) / 3; // ceil(p / 3)
}

/// Row indices sorted per feature over the full matrix (by value, then
/// row). Computed once per forest and filtered per tree, which is much
/// cheaper than re-sorting every bootstrap sample.
std::vector<int> presort_features(const Matrix& X) {
    std::vector<int> order(static_cast<std::size_t>(X.cols) * X.rows);
    for (int f = 0; f < X.cols; ++f) {
        int* ord = order.data() + static_cast<std::size_t>(f) * X.rows;
        std::iota(ord, ord + X.rows, 0);
        std::sort(ord, ord + X.rows, [&](int a, int b) {
            const double va = X.at(a, f), vb = X.at(b, f);
            return va < vb || (va == vb && a < b);
        });
    }
    return order;
}

/// Tree builder over presorted per-feature index arrays. Every feature
/// keeps the node's samples in its own sorted order within a shared
/// [lo, hi) range; a split partitions all feature arrays stably, so the
/// orders survive down the tree and no per-node sorting is needed.
class TreeBuilder {
public:
    TreeBuilder(const Matrix& X, std::span<const double> y,
                std::span<const long> sample_indices, std::span<const int> global_order,
                Rng& rng, int mtry, int min_leaf)
        : X_(X), y_(y), rng_(rng), mtry_(mtry), min_leaf_(std::max(1, min_leaf)) {
        // Collapse the sample multiset into unique rows + integer weights.
        std::vector<long> sorted(sample_indices.begin(), sample_indices.end());
        std::sort(sorted.begin(), sorted.end());
        std::vector<int> slot_of_row(X.rows, -1);
        for (std::size_t i = 0; i < sorted.size();) {
            std::size_t j = i;
            while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
            slot_of_row[sorted[i]] = static_cast<int>(uniq_.size());
            uniq_.push_back(sorted[i]);
            weight_.push_back(static_cast<double>(j - i));
            i = j;
        }
        // Per-feature slot order = global row order filtered to in-bag rows.
        const int m = static_cast<int>(uniq_.size());
        order_.assign(static_cast<std::size_t>(X_.cols) * m, 0);
        for (int f = 0; f < X_.cols; ++f) {
            const int* src = global_order.data() + static_cast<std::size_t>(f) * X_.rows;
            int* dst = order_.data() + static_cast<std::size_t>(f) * m;
            int k = 0;
            for (long r = 0; r < X_.rows; ++r)
                if (slot_of_row[src[r]] >= 0) dst[k++] = slot_of_row[src[r]];
        }
        goes_left_.assign(m, 0);
        scratch_.assign(m, 0);
        features_.resize(X_.cols);
        std::iota(features_.begin(), features_.end(), 0);
    }

    Tree build() {
        Tree tree;
        grow(tree, 0, static_cast<int>(uniq_.size()));
        return tree;
    }

private:
    struct Split {
        int feature = -1;
        double threshold = 0.0;
        double impurity = kInf;
    };

    /// Appends the subtree over [lo, hi) and returns its root index.
    int grow(Tree& tree, int lo, int hi) {
        double w_sum = 0.0, y_sum = 0.0, y2_sum = 0.0;
        const int* ord0 = order_.data(); // any feature's slice holds the node set
        for (int i = lo; i < hi; ++i) {
            const int u = ord0[i];
            const double w = weight_[u], yv = y_[uniq_[u]];
            w_sum += w;
            y_sum += w * yv;
            y2_sum += w * yv * yv;
        }
        const double sse = std::max(0.0, y2_sum - y_sum * y_sum / w_sum);

        const int node = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back({});
        tree.nodes[node].value = y_sum / w_sum;
        if (w_sum < 2.0 * min_leaf_ || sse / w_sum < 1e-12) return node;

        const Split split = best_split(lo, hi, w_sum, y_sum, y2_sum, sse);
        if (split.feature < 0) return node;

        const int mid = partition(lo, hi, split);
        tree.nodes[node].feature = split.feature;
        tree.nodes[node].threshold = split.threshold;
        const int left = grow(tree, lo, mid);
        tree.nodes[node].left = left;
        const int right = grow(tree, mid, hi);
        tree.nodes[node].right = right;
        return node;
    }

    Split best_split(int lo, int hi, double w_sum, double y_sum, double y2_sum,
                     double node_sse) {
        // mtry distinct features via partial Fisher-Yates; scanning them in
        // ascending index order lets strict "<" implement the tie-break
        // (lowest feature, then lowest threshold).
        const int p = X_.cols;
        for (int k = 0; k < mtry_; ++k) {
            const int j = k + static_cast<int>(rng_.uniform_index(p - k));
            std::swap(features_[k], features_[j]);
        }
        std::sort(features_.begin(), features_.begin() + mtry_);

        Split best;
        const int m = static_cast<int>(uniq_.size());
        for (int k = 0; k < mtry_; ++k) {
            const int f = features_[k];
            const int* ord = order_.data() + static_cast<std::size_t>(f) * m;
            double wl = 0.0, sl = 0.0, sl2 = 0.0;
            for (int i = lo; i < hi - 1; ++i) {
                const int u = ord[i];
                const double w = weight_[u], yv = y_[uniq_[u]];
                wl += w;
                sl += w * yv;
                sl2 += w * yv * yv;
                const double a = X_.at(uniq_[u], f);
                const double b = X_.at(uniq_[ord[i + 1]], f);
                if (a == b) continue; // cuts only between distinct values
                if (wl < min_leaf_ || w_sum - wl < min_leaf_) continue;
                const double wr = w_sum - wl, sr = y_sum - sl, sr2 = y2_sum - sl2;
                const double imp = std::max(0.0, sl2 - sl * sl / wl) +
                                   std::max(0.0, sr2 - sr * sr / wr);
                if (imp < best.impurity) {
                    double thr = 0.5 * (a + b);
                    if (thr >= b) thr = a; // fp midpoint collapse; "<= thr" stays valid
                    best = {f, thr, imp};
                }
            }
        }
        if (best.feature >= 0 &&
            !(best.impurity < node_sse - 1e-12 * std::max(1.0, node_sse)))
            best.feature = -1; // no split reduces impurity
        return best;
    }

    /// Stable partition of every feature's slice by the chosen split;
    /// returns the boundary position.
    int partition(int lo, int hi, const Split& split) {
        const int m = static_cast<int>(uniq_.size());
        const int* ordf = order_.data() + static_cast<std::size_t>(split.feature) * m;
        int n_left = 0;
        for (int i = lo; i < hi; ++i) {
            const int u = ordf[i];
            const bool l = X_.at(uniq_[u], split.feature) <= split.threshold;
            goes_left_[u] = l;
            n_left += l;
        }
        for (int f = 0; f < X_.cols; ++f) {
            int* ord = order_.data() + static_cast<std::size_t>(f) * m;
            int wl = lo, wr = lo + n_left;
            for (int i = lo; i < hi; ++i) {
                const int u = ord[i];
                scratch_[goes_left_[u] ? wl++ : wr++] = u;
            }
            std::copy(scratch_.begin() + lo, scratch_.begin() + hi, ord + lo);
        }
        return lo + n_left;
    }

    const Matrix& X_;
    std::span<const double> y_;
    Rng& rng_;
    const int mtry_;
    const int min_leaf_;
    std::vector<long> uniq_;
    std::vector<double> weight_;
    std::vector<int> order_;
    std::vector<std::uint8_t> goes_left_;
    std::vector<int> scratch_;
    std::vector<int> features_;
};

} // namespace

Tree fit_tree(const Matrix& X, std::span<const double> y, std::span<const long> sample_indices,
              Rng& rng, const ForestParams& params) {
    if (sample_indices.empty()) throw ValidationError("fit_tree: empty sample set");
    for (const long i : sample_indices)
        if (i < 0 || i >= X.rows) throw ValidationError("fit_tree: sample index out of range");
    const std::vector<int> order = presort_features(X);
    TreeBuilder builder(X, y, sample_indices, order, rng, resolve_mtry(params.mtry, X.cols),
                        params.min_leaf);
    return builder.build();
}

Forest fit_forest(const Matrix& X, std::span<const double> y, ForestParams params) {
    if (X.rows < 2) throw ValidationError("fit_forest requires at least 2 samples");
    if (static_cast<long>(y.size()) != X.rows)
        throw ValidationError("fit_forest: X/y size mismatch");
    if (params.n_trees < 1) throw ValidationError("n_trees must be >= 1");
    params.mtry = resolve_mtry(params.mtry, X.cols);
    params.min_leaf = std::max(1, params.min_leaf);

    Forest forest;
    forest.n_features = X.cols;
    forest.params = params;
    forest.trees.resize(params.n_trees);
    forest.oob_indices.resize(params.n_trees);

    const long n = X.rows;
    const std::vector<int> order = presort_features(X);
    const int workers = par::resolve_jobs(params.jobs);
#pragma omp parallel for schedule(dynamic) num_threads(workers) if (workers > 1)
    for (int t = 0; t < params.n_trees; ++t) {
        Rng rng(mix_seed(params.seed, static_cast<std::uint64_t>(t)));
        std::vector<long> boot(n);
        std::vector<std::uint8_t> inbag(n, 0);
        for (long i = 0; i < n; ++i) {
            boot[i] = static_cast<long>(rng.uniform_index(static_cast<std::uint64_t>(n)));
            inbag[boot[i]] = 1;
        }
        TreeBuilder builder(X, y, boot, order, rng, params.mtry, params.min_leaf);
        forest.trees[t] = builder.build();
        for (long i = 0; i < n; ++i)
            if (!inbag[i]) forest.oob_indices[t].push_back(static_cast<int>(i));
    }
    return forest;
}

OobScores oob_scores(const Forest& forest, const Matrix& X, std::span<const double> y) {
    if (static_cast<long>(y.size()) != X.rows)
        throw ValidationError("oob_scores: X/y size mismatch");
    std::vector<double> acc(X.rows, 0.0);
    std::vector<long> cnt(X.rows, 0);
    for (std::size_t t = 0; t < forest.trees.size(); ++t)
        for (const int i : forest.oob_indices[t]) {
            acc[i] += forest.trees[t].predict(X.row(i));
            ++cnt[i];
        }
    OobScores s;
    double y_mean = 0.0;
    for (long i = 0; i < X.rows; ++i) {
        if (cnt[i] == 0) {
            ++s.n_excluded;
            continue;
        }
        ++s.n_included;
        y_mean += y[i];
    }
    if (s.n_included == 0)
        throw ValidationError("oob_scores: no sample is out-of-bag for any tree");
    y_mean /= static_cast<double>(s.n_included);
    double ss_res = 0.0, ss_tot = 0.0;
    for (long i = 0; i < X.rows; ++i) {
        if (cnt[i] == 0) continue;
        const double pred = acc[i] / static_cast<double>(cnt[i]);
        ss_res += (y[i] - pred) * (y[i] - pred);
        ss_tot += (y[i] - y_mean) * (y[i] - y_mean);
    }
    s.mse = ss_res / static_cast<double>(s.n_included);
    s.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
    return s;
}

namespace {

void write_node_preorder(std::ostream& out, const Tree& tree, int i) {
    const Tree::Node& n = tree.nodes[i];
    if (n.feature < 0) {
        out << "leaf " << format_double(n.value) << '\n';
        return;
    }
    out << "split " << n.feature << ' ' << format_double(n.threshold) << '\n';
    write_node_preorder(out, tree, n.left);
    write_node_preorder(out, tree, n.right);
}

int read_node_preorder(std::istream& in, Tree& tree, long& line_no) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("unexpected end of forest file", line_no + 1);
    ++line_no;
    std::istringstream ls(line);
    std::string kind;
    ls >> kind;
    const int slot = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back({});
    if (kind == "leaf") {
        std::string v;
        ls >> v;
        tree.nodes[slot].value = parse_double(v, line_no);
    } else if (kind == "split") {
        std::string f, thr;
        ls >> f >> thr;
        tree.nodes[slot].feature = static_cast<int>(parse_int(f, line_no));
        tree.nodes[slot].threshold = parse_double(thr, line_no);
        const int left = read_node_preorder(in, tree, line_no);
        tree.nodes[slot].left = left;
        const int right = read_node_preorder(in, tree, line_no);
        tree.nodes[slot].right = right;
    } else {
        throw ParseError("expected `leaf` or `split`, got '" + kind + "'", line_no);
    }
    return slot;
}

} // namespace

void write_forest(std::ostream& out, const Forest& forest, const std::string& tag) {
    out << "# forest v1 tag=" << tag << " n_features=" << forest.n_features
        << " n_trees=" << forest.trees.size() << " mtry=" << forest.params.mtry
        << " min_leaf=" << forest.params.min_leaf << " seed=" << forest.params.seed << '\n';
    for (std::size_t t = 0; t < forest.trees.size(); ++t) {
        out << "tree " << t << ' ' << forest.trees[t].nodes.size() << '\n';
        write_node_preorder(out, forest.trees[t], 0);
    }
}

Forest read_forest(std::istream& in, std::string* tag) {
    std::string line;
    long line_no = 0;
    if (!std::getline(in, line)) throw ParseError("empty forest file", 1);
    ++line_no;
    const std::string magic = "# forest v1 ";
    if (line.rfind(magic, 0) != 0) throw ParseError("not a forest v1 file", 1);
    Forest forest;
    {
        std::istringstream hs(line.substr(magic.size()));
        std::string tok;
        long n_trees = 0;
        while (hs >> tok) {
            const auto eq = tok.find('=');
            if (eq == std::string::npos) continue;
            const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
            if (key == "tag" && tag) *tag = val;
            else if (key == "n_features") forest.n_features = static_cast<int>(parse_int(val, 1));
            else if (key == "n_trees") n_trees = parse_int(val, 1);
            else if (key == "mtry") forest.params.mtry = static_cast<int>(parse_int(val, 1));
            else if (key == "min_leaf") forest.params.min_leaf = static_cast<int>(parse_int(val, 1));
            else if (key == "seed") forest.params.seed = static_cast<std::uint64_t>(parse_int(val, 1));
        }
        forest.params.n_trees = static_cast<int>(n_trees);
        forest.trees.reserve(n_trees);
    }
    for (int t = 0; t < forest.params.n_trees; ++t) {
        if (!std::getline(in, line)) throw ParseError("missing tree header", line_no + 1);
        ++line_no;
        std::istringstream ts(line);
        std::string kw;
        long index = 0, n_nodes = 0;
        ts >> kw >> index >> n_nodes;
        if (kw != "tree" || index != t) throw ParseError("malformed tree header", line_no);
        Tree tree;
        tree.nodes.reserve(n_nodes);
        read_node_preorder(in, tree, line_no);
        if (static_cast<long>(tree.nodes.size()) != n_nodes)
            throw ParseError("tree node count mismatch", line_no);
        forest.trees.push_back(std::move(tree));
    }
    forest.oob_indices.assign(forest.trees.size(), {});
    return forest;
}

} // namespace tjflow
