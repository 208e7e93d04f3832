#include <algorithm>
#include <numeric>

#include "internal.hpp"

namespace wastebench::detail {

std::vector<double> knn_scores(const KnnModel& m, int k, int class_count, std::span<const double> x) {
    const auto n = static_cast<std::size_t>(m.train.rows());
    const auto d = static_cast<Eigen::Index>(x.size());
    const Eigen::Map<const Eigen::RowVectorXd> v(x.data(), d);
    std::vector<std::pair<double, std::size_t>> dist(n);
    for (std::size_t i = 0; i < n; ++i) dist[i] = {(m.train.row(static_cast<Eigen::Index>(i)) - v).squaredNorm(), i};
    const std::size_t kk = std::min<std::size_t>(static_cast<std::size_t>(k), n);
    // Pairs compare by distance, then by training index.
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(kk), dist.end());
    std::vector<double> votes(static_cast<std::size_t>(class_count), 0.0);
    for (std::size_t i = 0; i < kk; ++i) votes[static_cast<std::size_t>(m.labels[dist[i].second])] += 1.0;
    for (double& v : votes) v /= static_cast<double>(kk);
    return votes;
}

}  // namespace wastebench::detail
