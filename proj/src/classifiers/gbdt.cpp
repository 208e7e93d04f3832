#include <algorithm>
#include <cmath>
#include <queue>

#include "internal.hpp"
#include "wastebench/errors.hpp"
#include "wastebench/parallel.hpp"

namespace wastebench {

double softmax_loss(const Matrix& raw, const Labels& y) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < raw.rows(); ++i) {
        const double hi = raw.row(i).maxCoeff();
        const double lse = hi + std::log((raw.row(i).array() - hi).exp().sum());
        total += lse - raw(i, y[static_cast<std::size_t>(i)]);
    }
    return total / static_cast<double>(raw.rows());
}

namespace {

struct Binned {
    std::vector<std::vector<double>> thresholds;  // per feature, ascending; bin b <=> x <= thresholds[b]
    std::vector<std::uint16_t> codes;             // feature-major, n per feature
    std::size_t n = 0;

    std::uint16_t code(std::size_t feature, std::size_t row) const { return codes[feature * n + row]; }
};

Binned bin_features(const Matrix& X, int max_bins) {
    Binned b;
    b.n = static_cast<std::size_t>(X.rows());
    const auto d = static_cast<std::size_t>(X.cols());
    b.thresholds.resize(d);
    b.codes.resize(d * b.n);
    parallel_for(d, [&](std::size_t j) {
        std::vector<double> v(b.n);
        for (std::size_t i = 0; i < b.n; ++i) v[i] = X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        std::vector<double> sorted = v;
        std::sort(sorted.begin(), sorted.end());
        std::vector<double> uniq = sorted;
        uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
        auto& thr = b.thresholds[j];
        if (uniq.size() <= static_cast<std::size_t>(max_bins)) {
            for (std::size_t k = 0; k + 1 < uniq.size(); ++k) {
                double t = uniq[k] + (uniq[k + 1] - uniq[k]) / 2;
                if (!(t < uniq[k + 1])) t = uniq[k];
                thr.push_back(t);
            }
        } else {
            for (int k = 1; k < max_bins; ++k) {
                const double t = sorted[static_cast<std::size_t>(k) * b.n / static_cast<std::size_t>(max_bins)];
                if (thr.empty() || t > thr.back()) thr.push_back(t);
            }
            // The largest value must fall in a bin of its own right of the last cut.
            if (!thr.empty() && thr.back() >= sorted.back()) thr.pop_back();
        }
        for (std::size_t i = 0; i < b.n; ++i) {
            b.codes[j * b.n + i] =
                static_cast<std::uint16_t>(std::lower_bound(thr.begin(), thr.end(), v[i]) - thr.begin());
        }
    });
    return b;
}

struct Candidate {
    double gain = 0.0;
    int feature = -1;
    int bin = -1;
};

class TreeGrower {
public:
    TreeGrower(const Binned& bins, const GbdtParams& p, const std::vector<double>& g, const std::vector<double>& h)
        : bins_(bins), p_(p), g_(g), h_(h) {}

    Tree grow() {
        Tree t;
        std::vector<int> all(bins_.n);
        for (std::size_t i = 0; i < bins_.n; ++i) all[i] = static_cast<int>(i);
        t.nodes.push_back(leaf(all));
        std::vector<Pending> frontier;
        frontier.push_back({0, 0, std::move(all), Candidate{}});
        if (p_.growth == Growth::LeafWise || p_.max_depth > 0) frontier.back().split = best_split(frontier.back().rows, 0);

        if (p_.growth == Growth::LevelWise) {
            while (!frontier.empty()) {
                std::vector<Pending> next;
                for (auto& node : frontier) {
                    if (node.depth >= p_.max_depth || node.split.feature < 0) continue;
                    split(t, node, next);
                }
                frontier = std::move(next);
            }
        } else {
            int leaves = 1;
            while (leaves < p_.max_leaves) {
                // Highest gain first, oldest node on ties.
                std::size_t pick = frontier.size();
                for (std::size_t k = 0; k < frontier.size(); ++k) {
                    if (frontier[k].split.feature < 0) continue;
                    if (pick == frontier.size() || frontier[k].split.gain > frontier[pick].split.gain) pick = k;
                }
                if (pick == frontier.size()) break;
                Pending node = std::move(frontier[pick]);
                frontier.erase(frontier.begin() + static_cast<std::ptrdiff_t>(pick));
                split(t, node, frontier);
                ++leaves;
            }
        }
        return t;
    }

private:
    struct Pending {
        int id;
        int depth;
        std::vector<int> rows;
        Candidate split;
    };

    TreeNode leaf(const std::vector<int>& rows) const {
        double G = 0.0, H = 0.0;
        for (int r : rows) {
            G += g_[r];
            H += h_[r];
        }
        TreeNode n;
        n.value = {-G / (H + p_.lambda)};
        return n;
    }

    void split(Tree& t, Pending& node, std::vector<Pending>& out) {
        const auto f = static_cast<std::size_t>(node.split.feature);
        std::vector<int> left, right;
        for (int r : node.rows) (bins_.code(f, static_cast<std::size_t>(r)) <= node.split.bin ? left : right).push_back(r);
        const int l = static_cast<int>(t.nodes.size());
        t.nodes.push_back(leaf(left));
        const int rr = static_cast<int>(t.nodes.size());
        t.nodes.push_back(leaf(right));
        auto& n = t.nodes[static_cast<std::size_t>(node.id)];
        n.feature = node.split.feature;
        n.threshold = bins_.thresholds[f][static_cast<std::size_t>(node.split.bin)];
        n.left = l;
        n.right = rr;
        n.value.clear();
        const int depth = node.depth + 1;
        const bool deeper = p_.growth == Growth::LeafWise || depth < p_.max_depth;
        Candidate cl = deeper ? best_split(left, depth) : Candidate{};
        Candidate cr = deeper ? best_split(right, depth) : Candidate{};
        out.push_back({l, depth, std::move(left), cl});
        out.push_back({rr, depth, std::move(right), cr});
    }

    Candidate best_split(const std::vector<int>& rows, int) const {
        Candidate best;
        if (rows.size() < 2) return best;
        double G = 0.0, H = 0.0;
        for (int r : rows) {
            G += g_[r];
            H += h_[r];
        }
        const double parent = G * G / (H + p_.lambda);
        const auto d = bins_.thresholds.size();
        std::vector<Candidate> per_feature(d);
        auto scan = [&](std::size_t f) {
            const auto nb = bins_.thresholds[f].size() + 1;
            if (nb < 2) return;
            std::vector<double> hg(nb, 0.0), hh(nb, 0.0);
            for (int r : rows) {
                const auto c = bins_.code(f, static_cast<std::size_t>(r));
                hg[c] += g_[r];
                hh[c] += h_[r];
            }
            double gl = 0.0, hl = 0.0;
            Candidate& c = per_feature[f];
            for (std::size_t b = 0; b + 1 < nb; ++b) {
                gl += hg[b];
                hl += hh[b];
                const double gr = G - gl;
                const double hr = H - hl;
                if (hl < p_.min_child_weight || hr < p_.min_child_weight) continue;
                const double gain = gl * gl / (hl + p_.lambda) + gr * gr / (hr + p_.lambda) - parent;
                if (gain > c.gain) c = {gain, static_cast<int>(f), static_cast<int>(b)};
            }
        };
        if (rows.size() * d > 200000) parallel_for(d, scan);
        else for (std::size_t f = 0; f < d; ++f) scan(f);
        for (const auto& c : per_feature)
            if (c.feature >= 0 && c.gain > 1e-12 && c.gain > best.gain) best = c;
        return best;
    }

    const Binned& bins_;
    const GbdtParams& p_;
    const std::vector<double>& g_;
    const std::vector<double>& h_;
};

void scale_leaves(Tree& t, double factor) {
    for (auto& n : t.nodes)
        if (n.feature < 0) n.value[0] *= factor;
}

}  // namespace

namespace detail {

GbdtModel fit_gbdt(const GbdtParams& p, const Matrix& X, const Labels& y, int class_count) {
    const auto n = static_cast<std::size_t>(X.rows());
    const auto C = static_cast<std::size_t>(class_count);
    const Binned bins = bin_features(X, p.max_bins);

    GbdtModel m;
    std::vector<double> counts(C, 0.0);
    for (int label : y) counts[static_cast<std::size_t>(label)] += 1.0;
    for (double c : counts) m.base_score.push_back(c > 0 ? std::log(c / static_cast<double>(n)) : -30.0);

    Matrix raw(static_cast<Eigen::Index>(n), class_count);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < C; ++c) raw(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = m.base_score[c];
    double loss = softmax_loss(raw, y);

    std::vector<std::vector<double>> g(C, std::vector<double>(n)), h(C, std::vector<double>(n));
    std::vector<double> prob(C);
    for (int round = 0; round < p.rounds; ++round) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t c = 0; c < C; ++c) prob[c] = raw(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c));
            softmax(prob);
            for (std::size_t c = 0; c < C; ++c) {
                const double target = y[i] == static_cast<int>(c) ? 1.0 : 0.0;
                g[c][i] = prob[c] - target;
                h[c][i] = std::max(2.0 * prob[c] * (1.0 - prob[c]), 1e-16);
            }
        }
        std::vector<Tree> trees(C);
        for (std::size_t c = 0; c < C; ++c) {
            trees[c] = TreeGrower(bins, p, g[c], h[c]).grow();
            scale_leaves(trees[c], p.learning_rate);
        }
        // Leaf assignments are fixed, so the per-row update scales linearly.
        Matrix delta(static_cast<Eigen::Index>(n), class_count);
        for (std::size_t i = 0; i < n; ++i) {
            const std::span<const double> x(X.row(static_cast<Eigen::Index>(i)).data(), static_cast<std::size_t>(X.cols()));
            for (std::size_t c = 0; c < C; ++c)
                delta(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = trees[c].leaf_for(x).value[0];
        }
        // Shrink the round until the training loss does not increase.
        double factor = 1.0;
        double new_loss = softmax_loss(raw + delta, y);
        int halvings = 0;
        while (!(new_loss <= loss) && halvings < 40) {
            factor *= 0.5;
            ++halvings;
            new_loss = softmax_loss(raw + factor * delta, y);
        }
        if (!(new_loss <= loss)) {
            factor = 0.0;
            new_loss = loss;
        }
        if (factor != 1.0)
            for (auto& t : trees) scale_leaves(t, factor);
        raw += factor * delta;
        loss = new_loss;
        m.loss_history.push_back(loss);
        m.rounds.push_back(std::move(trees));
    }
    return m;
}

std::vector<double> gbdt_scores(const GbdtModel& m, std::span<const double> x) {
    std::vector<double> z = m.base_score;
    for (const auto& round : m.rounds)
        for (std::size_t c = 0; c < round.size(); ++c) z[c] += round[c].leaf_for(x).value[0];
    softmax(z);
    return z;
}

}  // namespace detail

}  // namespace wastebench
