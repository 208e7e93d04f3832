#include <algorithm>
#include <cmath>

#include "internal.hpp"
#include "wastebench/errors.hpp"

namespace wastebench {

namespace detail {

void softmax(std::span<double> z) {
    const double hi = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double& v : z) {
        v = std::exp(v - hi);
        sum += v;
    }
    for (double& v : z) v /= sum;
}

}  // namespace detail

double logistic_objective(const LogisticParams& p, const Matrix& X, const Labels& y, const Matrix& W,
                          const Vector& b, Matrix* grad_W, Vector* grad_b) {
    const Eigen::Index n = X.rows();
    const Eigen::Index C = W.rows();
    Matrix Z = X * W.transpose();
    Z.rowwise() += b.transpose();

    const bool focal = p.loss == LossKind::Focal;
    Matrix dZ(n, C);
    double loss = 0.0;
    std::vector<double> prob(static_cast<std::size_t>(C));
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index c = 0; c < C; ++c) prob[c] = Z(i, c);
        detail::softmax(prob);
        const int t = y[static_cast<std::size_t>(i)];
        const double pt = prob[t];
        const double log_pt = std::log(std::max(pt, 1e-12));
        // 1 - p_t from the other classes keeps precision when p_t is near 1.
        double q = 0.0;
        for (Eigen::Index c = 0; c < C; ++c)
            if (c != t) q += prob[c];

        // Both losses share the form dL/dz_j = -w * (delta_tj - p_j).
        double w = 1.0;
        if (focal) {
            const double qg = std::pow(q, p.gamma);
            loss += -p.alpha * qg * log_pt;
            double inner = qg;
            if (p.gamma != 0.0 && q > 0.0) inner -= p.gamma * pt * std::pow(q, p.gamma - 1.0) * log_pt;
            w = p.alpha * inner;
        } else {
            loss += -log_pt;
        }
        for (Eigen::Index c = 0; c < C; ++c) dZ(i, c) = w * (prob[c] - (c == t ? 1.0 : 0.0));
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    loss = loss * inv_n + 0.5 * p.l2 * W.squaredNorm();
    if (grad_W) *grad_W = (dZ.transpose() * X) * inv_n + p.l2 * W;
    if (grad_b) *grad_b = dZ.colwise().sum().transpose() * inv_n;
    return loss;
}

namespace detail {

LogisticModel fit_logistic(const LogisticParams& p, const Matrix& X, const Labels& y, int class_count) {
    const Eigen::Index d = X.cols();
    LogisticModel m;
    m.weights = Matrix::Zero(class_count, d);
    m.bias = Vector::Zero(class_count);

    Matrix gW;
    Vector gb;
    double f = logistic_objective(p, X, y, m.weights, m.bias, &gW, &gb);
    double step = 1.0;
    Matrix prev_W, prev_gW;
    Vector prev_b, prev_gb;
    bool have_prev = false;

    for (int it = 0; it < p.max_iter; ++it) {
        const double gnorm = std::max(gW.cwiseAbs().maxCoeff(), gb.cwiseAbs().maxCoeff());
        if (!std::isfinite(f) || !std::isfinite(gnorm)) throw TrainingError("logistic objective became non-finite");
        if (gnorm < p.grad_tol) break;

        // Barzilai-Borwein trial step, then Armijo backtracking.
        if (have_prev) {
            const double sy = (m.weights - prev_W).cwiseProduct(gW - prev_gW).sum() +
                              (m.bias - prev_b).dot(gb - prev_gb);
            const double ss = (m.weights - prev_W).squaredNorm() + (m.bias - prev_b).squaredNorm();
            if (sy > 0 && std::isfinite(ss / sy)) step = ss / sy;
        }
        const double g2 = gW.squaredNorm() + gb.squaredNorm();
        Matrix W_new;
        Vector b_new;
        Matrix gW_new;
        Vector gb_new;
        double f_new = f;
        bool accepted = false;
        for (int halving = 0; halving < 60; ++halving) {
            W_new = m.weights - step * gW;
            b_new = m.bias - step * gb;
            f_new = logistic_objective(p, X, y, W_new, b_new, &gW_new, &gb_new);
            if (f_new <= f - 1e-4 * step * g2) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;  // no descent left at machine precision
        prev_W = std::move(m.weights);
        prev_b = std::move(m.bias);
        prev_gW = std::move(gW);
        prev_gb = std::move(gb);
        have_prev = true;
        m.weights = std::move(W_new);
        m.bias = std::move(b_new);
        gW = std::move(gW_new);
        gb = std::move(gb_new);
        f = f_new;
        m.loss_history.push_back(f);
        m.iterations = it + 1;
    }
    return m;
}

std::vector<double> logistic_scores(const LogisticModel& m, std::span<const double> x) {
    const Eigen::Map<const Vector> v(x.data(), static_cast<Eigen::Index>(x.size()));
    Vector z = m.weights * v + m.bias;
    std::vector<double> out(z.data(), z.data() + z.size());
    softmax(out);
    return out;
}

}  // namespace detail

}  // namespace wastebench
