#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "internal.hpp"
#include "wastebench/errors.hpp"
#include "wastebench/parallel.hpp"

namespace wastebench {

Matrix rbf_kernel(const Matrix& A, const Matrix& B, double gamma) {
    const Vector a2 = A.rowwise().squaredNorm();
    const Vector b2 = B.rowwise().squaredNorm();
    Matrix K = A * B.transpose();
    for (Eigen::Index i = 0; i < K.rows(); ++i)
        for (Eigen::Index j = 0; j < K.cols(); ++j)
            K(i, j) = std::exp(-gamma * std::max(0.0, a2[i] + b2[j] - 2.0 * K(i, j)));
    return K;
}

// Dual coordinate solver with second-order working-set selection.
SmoResult solve_smo(const Matrix& K, const std::vector<double>& y, double C, double tol, std::int64_t max_iter) {
    const auto n = static_cast<Eigen::Index>(y.size());
    constexpr double kTau = 1e-12;
    SmoResult r;
    r.alpha.assign(y.size(), 0.0);
    std::vector<double> G(y.size(), -1.0);  // gradient of 1/2 a'Qa - e'a
    auto& a = r.alpha;
    auto up = [&](Eigen::Index t) { return (y[t] > 0 && a[t] < C) || (y[t] < 0 && a[t] > 0); };
    auto low = [&](Eigen::Index t) { return (y[t] > 0 && a[t] > 0) || (y[t] < 0 && a[t] < C); };

    for (;;) {
        double gmax = -std::numeric_limits<double>::infinity();
        Eigen::Index i = -1;
        for (Eigen::Index t = 0; t < n; ++t)
            if (up(t) && -y[t] * G[t] > gmax) {
                gmax = -y[t] * G[t];
                i = t;
            }
        double gmin = std::numeric_limits<double>::infinity();
        double best = std::numeric_limits<double>::infinity();
        Eigen::Index j = -1;
        for (Eigen::Index t = 0; t < n; ++t) {
            if (!low(t)) continue;
            const double v = -y[t] * G[t];
            gmin = std::min(gmin, v);
            if (i < 0) continue;
            const double b = gmax - v;
            if (b > 0) {
                double qa = K(i, i) + K(t, t) - 2.0 * K(i, t);
                if (qa <= 0) qa = kTau;
                const double obj = -(b * b) / qa;
                if (obj < best) {
                    best = obj;
                    j = t;
                }
            }
        }
        if (i < 0 || j < 0 || gmax - gmin < tol) break;
        if (r.iterations >= max_iter) {
            throw TrainingError("SMO did not converge in " + std::to_string(max_iter) +
                                " iterations (violation " + std::to_string(gmax - gmin) + ")");
        }
        ++r.iterations;

        const double old_ai = a[i];
        const double old_aj = a[j];
        const double Qij = y[i] * y[j] * K(i, j);
        if (y[i] != y[j]) {
            double quad = K(i, i) + K(j, j) + 2.0 * Qij;
            if (quad <= 0) quad = kTau;
            const double delta = (-G[i] - G[j]) / quad;
            const double diff = a[i] - a[j];
            a[i] += delta;
            a[j] += delta;
            if (diff > 0) {
                if (a[j] < 0) { a[j] = 0; a[i] = diff; }
            } else {
                if (a[i] < 0) { a[i] = 0; a[j] = -diff; }
            }
            if (diff > 0) {
                if (a[i] > C) { a[i] = C; a[j] = C - diff; }
            } else {
                if (a[j] > C) { a[j] = C; a[i] = C + diff; }
            }
        } else {
            double quad = K(i, i) + K(j, j) - 2.0 * Qij;
            if (quad <= 0) quad = kTau;
            const double delta = (G[i] - G[j]) / quad;
            const double sum = a[i] + a[j];
            a[i] -= delta;
            a[j] += delta;
            if (sum > C) {
                if (a[i] > C) { a[i] = C; a[j] = sum - C; }
            } else {
                if (a[j] < 0) { a[j] = 0; a[i] = sum; }
            }
            if (sum > C) {
                if (a[j] > C) { a[j] = C; a[i] = sum - C; }
            } else {
                if (a[i] < 0) { a[i] = 0; a[j] = sum; }
            }
        }
        const double di = a[i] - old_ai;
        const double dj = a[j] - old_aj;
        for (Eigen::Index t = 0; t < n; ++t) G[t] += y[t] * (y[i] * K(t, i) * di + y[j] * K(t, j) * dj);
    }

    // rho from free vectors, else the midpoint of the feasible interval.
    double sum_free = 0.0;
    int n_free = 0;
    double ub = std::numeric_limits<double>::infinity();
    double lb = -std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < n; ++t) {
        const double yg = y[t] * G[t];
        if (a[t] > 0 && a[t] < C) {
            sum_free += yg;
            ++n_free;
        } else if ((a[t] >= C && y[t] < 0) || (a[t] <= 0 && y[t] > 0)) {
            ub = std::min(ub, yg);
        } else {
            lb = std::max(lb, yg);
        }
    }
    double rho;
    if (n_free > 0) rho = sum_free / n_free;
    else if (std::isfinite(ub) && std::isfinite(lb)) rho = 0.5 * (ub + lb);
    else rho = std::isfinite(ub) ? ub : (std::isfinite(lb) ? lb : 0.0);
    r.bias = -rho;
    return r;
}

namespace detail {

SvmModel fit_svm(const SvmParams& p, const Matrix& X, const Labels& y, int class_count) {
    SvmModel m;
    m.kernel_gamma = p.kernel_gamma;
    if (m.kernel_gamma <= 0) {
        const double mean = X.mean();
        const double var = (X.array() - mean).square().mean();
        m.kernel_gamma = 1.0 / (static_cast<double>(X.cols()) * (var > 0 ? var : 1.0));
    }
    const Matrix K = rbf_kernel(X, X, m.kernel_gamma);
    std::vector<SmoResult> results(static_cast<std::size_t>(class_count));
    parallel_for(results.size(), [&](std::size_t c) {
        std::vector<double> yy(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) yy[i] = y[i] == static_cast<int>(c) ? 1.0 : -1.0;
        results[c] = solve_smo(K, yy, p.C, p.tol, p.max_iter);
    });

    std::vector<int> slot(y.size(), -1);
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < y.size(); ++i)
        for (const auto& r : results)
            if (r.alpha[i] > 0) {
                slot[i] = static_cast<int>(rows.size());
                rows.push_back(i);
                break;
            }
    m.vectors = select_rows(X, rows);
    for (std::size_t c = 0; c < results.size(); ++c) {
        BinarySvm b;
        b.bias = results[c].bias;
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double al = results[c].alpha[i];
            if (al > 0) {
                b.support.push_back(slot[i]);
                b.coef.push_back(al * (y[i] == static_cast<int>(c) ? 1.0 : -1.0));
            }
        }
        m.machines.push_back(std::move(b));
    }
    return m;
}

std::vector<double> svm_scores(const SvmModel& m, std::span<const double> x) {
    const Eigen::Map<const Eigen::RowVectorXd> v(x.data(), static_cast<Eigen::Index>(x.size()));
    std::vector<double> k(static_cast<std::size_t>(m.vectors.rows()));
    for (Eigen::Index i = 0; i < m.vectors.rows(); ++i)
        k[i] = std::exp(-m.kernel_gamma * (m.vectors.row(i) - v).squaredNorm());
    std::vector<double> out;
    out.reserve(m.machines.size());
    for (const auto& b : m.machines) {
        double f = b.bias;
        for (std::size_t s = 0; s < b.support.size(); ++s) f += b.coef[s] * k[b.support[s]];
        out.push_back(f);
    }
    softmax(out);
    return out;
}

}  // namespace detail

}  // namespace wastebench
