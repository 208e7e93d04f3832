#include <algorithm>
#include <cmath>
#include <numeric>

#include "internal.hpp"
#include "wastebench/errors.hpp"
#include "wastebench/parallel.hpp"
#include "wastebench/random.hpp"

namespace wastebench {

const TreeNode& Tree::leaf_for(std::span<const double> x) const {
    const TreeNode* node = &nodes.front();
    while (node->feature >= 0) node = &nodes[x[node->feature] <= node->threshold ? node->left : node->right];
    return *node;
}

namespace {

// n * gini for integer class counts.
double weighted_gini(const std::vector<double>& counts, double n) {
    if (n <= 0) return 0.0;
    double sq = 0.0;
    for (double c : counts) sq += c * c;
    return n - sq / n;
}

struct Split {
    int feature = -1;
    double threshold = 0.0;
    double score = 0.0;  // weighted child impurity
};

class CartBuilder {
public:
    CartBuilder(const Matrix& X, const Labels& y, int classes, int max_depth, int min_leaf, int max_features,
                std::uint64_t seed)
        : X_(X), y_(y), classes_(classes), max_depth_(max_depth), min_leaf_(min_leaf),
          max_features_(max_features), rng_(seed), features_(static_cast<std::size_t>(X.cols())) {
        std::iota(features_.begin(), features_.end(), 0);
    }

    TreeFit build(std::span<const int> rows) {
        fit_.importance.assign(static_cast<std::size_t>(X_.cols()), 0.0);
        n_root_ = static_cast<double>(rows.size());
        std::vector<int> r(rows.begin(), rows.end());
        grow(std::move(r), 0);
        for (double& v : fit_.importance) v /= n_root_;
        return std::move(fit_);
    }

private:
    int grow(std::vector<int> rows, int depth) {
        const int id = static_cast<int>(fit_.tree.nodes.size());
        fit_.tree.nodes.emplace_back();
        std::vector<double> counts(static_cast<std::size_t>(classes_), 0.0);
        for (int r : rows) counts[static_cast<std::size_t>(y_[r])] += 1.0;
        const double n = static_cast<double>(rows.size());
        const double parent = weighted_gini(counts, n);

        Split best;
        const bool can_split = parent > 0 && depth < max_depth_ && rows.size() >= 2u * min_leaf_;
        if (can_split) best = find_split(rows, counts);

        if (best.feature < 0) {
            auto& node = fit_.tree.nodes[id];
            node.value = counts;
            for (double& v : node.value) v /= n;
            return id;
        }
        fit_.importance[best.feature] += parent - best.score;
        std::vector<int> left, right;
        for (int r : rows) (X_(r, best.feature) <= best.threshold ? left : right).push_back(r);
        rows.clear();
        rows.shrink_to_fit();
        const int l = grow(std::move(left), depth + 1);
        const int rr = grow(std::move(right), depth + 1);
        auto& node = fit_.tree.nodes[id];
        node.feature = best.feature;
        node.threshold = best.threshold;
        node.left = l;
        node.right = rr;
        return id;
    }

    Split find_split(const std::vector<int>& rows, const std::vector<double>& counts) {
        const auto d = features_.size();
        std::size_t tries = d;
        if (max_features_ > 0 && static_cast<std::size_t>(max_features_) < d) {
            rng_.shuffle(std::span<int>(features_));
            tries = static_cast<std::size_t>(max_features_);
        }
        Split best;
        // Keep drawing beyond max_features until some feature admits a split.
        for (std::size_t f = 0; f < d; ++f) {
            if (f >= tries && best.feature >= 0) break;
            consider(features_[f], rows, counts, best);
        }
        if (tries < d) std::sort(features_.begin(), features_.end());
        return best;
    }

    void consider(int f, const std::vector<int>& rows, const std::vector<double>& counts, Split& best) {
        order_.assign(rows.begin(), rows.end());
        std::stable_sort(order_.begin(), order_.end(), [&](int a, int b) { return X_(a, f) < X_(b, f); });
        std::vector<double> left(counts.size(), 0.0);
        std::vector<double> right = counts;
        const double n = static_cast<double>(rows.size());
        for (std::size_t i = 0; i + 1 < order_.size(); ++i) {
            const auto c = static_cast<std::size_t>(y_[order_[i]]);
            left[c] += 1.0;
            right[c] -= 1.0;
            const double a = X_(order_[i], f);
            const double b = X_(order_[i + 1], f);
            if (!(a < b)) continue;
            const double nl = static_cast<double>(i + 1);
            if (nl < min_leaf_ || n - nl < min_leaf_) continue;
            const double score = weighted_gini(left, nl) + weighted_gini(right, n - nl);
            double thr = a + (b - a) / 2;
            if (!(thr < b)) thr = a;
            if (best.feature < 0 || score < best.score ||
                (score == best.score && (f < best.feature || (f == best.feature && thr < best.threshold)))) {
                best = {f, thr, score};
            }
        }
    }

    const Matrix& X_;
    const Labels& y_;
    int classes_;
    int max_depth_;
    int min_leaf_;
    int max_features_;
    Rng rng_;
    std::vector<int> features_;
    std::vector<int> order_;
    TreeFit fit_;
    double n_root_ = 1.0;
};

}  // namespace

TreeFit fit_cart(const Matrix& X, const Labels& y, int class_count, std::span<const int> rows, int max_depth,
                 int min_leaf, int max_features, std::uint64_t seed) {
    if (rows.empty()) throw TrainingError("cannot grow a tree on zero rows");
    CartBuilder b(X, y, class_count, max_depth, min_leaf, max_features, seed);
    return b.build(rows);
}

ForestModel fit_forest(const ForestParams& p, const Matrix& X, const Labels& y, int class_count,
                       std::uint64_t seed) {
    const auto n = static_cast<std::size_t>(X.rows());
    const auto d = static_cast<int>(X.cols());
    const int mtry = p.max_features > 0 ? std::min(p.max_features, d)
                                        : std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(d)))));
    const auto T = static_cast<std::size_t>(p.trees);
    std::vector<TreeFit> fits(T);
    std::vector<std::vector<char>> in_bag(T, std::vector<char>(n, 0));
    parallel_for(T, [&](std::size_t t) {
        Rng rng(derive_seed(seed, 2 * t));
        std::vector<int> rows(n);
        for (auto& r : rows) {
            r = static_cast<int>(rng.index(n));
            in_bag[t][static_cast<std::size_t>(r)] = 1;
        }
        fits[t] = fit_cart(X, y, class_count, rows, p.max_depth, p.min_leaf, mtry, derive_seed(seed, 2 * t + 1));
    });

    ForestModel m;
    m.importances.assign(static_cast<std::size_t>(d), 0.0);
    for (auto& f : fits) {
        for (int j = 0; j < d; ++j) m.importances[j] += f.importance[j] / static_cast<double>(T);
        m.trees.push_back(std::move(f.tree));
    }

    std::size_t scored = 0;
    std::size_t hits = 0;
    std::vector<double> acc(static_cast<std::size_t>(class_count));
    for (std::size_t i = 0; i < n; ++i) {
        std::fill(acc.begin(), acc.end(), 0.0);
        bool any = false;
        const std::span<const double> x(X.row(static_cast<Eigen::Index>(i)).data(), static_cast<std::size_t>(d));
        for (std::size_t t = 0; t < T; ++t) {
            if (in_bag[t][i]) continue;
            any = true;
            const auto& v = m.trees[t].leaf_for(x).value;
            for (std::size_t c = 0; c < acc.size(); ++c) acc[c] += v[c];
        }
        if (!any) continue;
        ++scored;
        hits += static_cast<int>(std::max_element(acc.begin(), acc.end()) - acc.begin()) == y[i];
    }
    m.oob_accuracy = scored ? static_cast<double>(hits) / static_cast<double>(scored) : 0.0;
    return m;
}

namespace detail {

std::vector<double> tree_scores(const Tree& t, int, std::span<const double> x) { return t.leaf_for(x).value; }

std::vector<double> forest_scores(const ForestModel& m, int class_count, std::span<const double> x) {
    std::vector<double> acc(static_cast<std::size_t>(class_count), 0.0);
    for (const auto& t : m.trees) {
        const auto& v = t.leaf_for(x).value;
        for (std::size_t c = 0; c < acc.size(); ++c) acc[c] += v[c];
    }
    for (double& v : acc) v /= static_cast<double>(m.trees.size());
    return acc;
}

}  // namespace detail

}  // namespace wastebench
