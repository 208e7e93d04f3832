#include "wastebench/segmentation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "wastebench/errors.hpp"
#include "wastebench/maxflow.hpp"
#include "wastebench/random.hpp"

namespace wastebench {

namespace {

using Color = Eigen::Vector3d;
constexpr double kInfCost = 1e15;

// Hard-assignment colour GMM. The per-pixel cost of component k is
//   -ln pi_k + 1/2 ln|S_k| + 1/2 r' S_k^-1 r + floor/2 tr(S_k^-1)
// whose exact minimiser for fixed assignments is S_k = scatter/n_k + floor*I,
// so every learning step can only lower the Gibbs energy.
class ColorGmm {
public:
    explicit ColorGmm(int components, double floor) : k_(components), floor_(floor), comps_(components) {}

    void fit(const std::vector<Color>& colors, const std::vector<int>& assignment) {
        std::vector<Color> sum(k_, Color::Zero());
        std::vector<Eigen::Matrix3d> outer(k_, Eigen::Matrix3d::Zero());
        std::vector<std::size_t> count(k_, 0);
        for (std::size_t i = 0; i < colors.size(); ++i) {
            const int k = assignment[i];
            sum[k] += colors[i];
            ++count[k];
        }
        std::vector<Color> mean(k_);
        for (int k = 0; k < k_; ++k) mean[k] = count[k] ? Color(sum[k] / static_cast<double>(count[k])) : Color::Zero();
        for (std::size_t i = 0; i < colors.size(); ++i) {
            const int k = assignment[i];
            const Color r = colors[i] - mean[k];
            outer[k] += r * r.transpose();
        }
        const double total = static_cast<double>(colors.size());
        for (int k = 0; k < k_; ++k) {
            Component& c = comps_[k];
            c.valid = count[k] > 0;
            if (!c.valid) continue;
            const double n = static_cast<double>(count[k]);
            c.mean = mean[k];
            const Eigen::Matrix3d cov = outer[k] / n + floor_ * Eigen::Matrix3d::Identity();
            c.inverse = cov.inverse();
            c.constant = -std::log(n / total) + 0.5 * std::log(cov.determinant()) + 0.5 * floor_ * c.inverse.trace();
        }
    }

    double cost(const Color& z, int k) const {
        const Component& c = comps_[k];
        if (!c.valid) return kInfCost;
        const Color r = z - c.mean;
        return c.constant + 0.5 * r.dot(c.inverse * r);
    }

    /// Minimum cost over components and the arg-min (lowest index on ties).
    std::pair<double, int> best(const Color& z) const {
        double best_cost = kInfCost;
        int best_k = 0;
        for (int k = 0; k < k_; ++k) {
            const double c = cost(z, k);
            if (c < best_cost) {
                best_cost = c;
                best_k = k;
            }
        }
        return {best_cost, best_k};
    }

    bool any_valid() const {
        return std::any_of(comps_.begin(), comps_.end(), [](const Component& c) { return c.valid; });
    }
    int components() const { return k_; }

private:
    struct Component {
        bool valid = false;
        Color mean = Color::Zero();
        Eigen::Matrix3d inverse = Eigen::Matrix3d::Identity();
        double constant = 0.0;
    };
    int k_;
    double floor_;
    std::vector<Component> comps_;
};

std::uint64_t image_hash(const ImageBuffer& img) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&h](std::uint64_t v) {
        h ^= v;
        h *= 0x100000001b3ULL;
    };
    feed(static_cast<std::uint64_t>(img.width));
    feed(static_cast<std::uint64_t>(img.height));
    for (auto p : img.pixels) feed(p);
    return mix64(h);
}

// Lloyd's k-means with k-means++ seeding; fewer clusters when the data has
// fewer distinct colours.
std::vector<int> kmeans(const std::vector<Color>& pts, int k, std::uint64_t seed) {
    std::vector<int> labels(pts.size(), 0);
    if (pts.empty()) return labels;
    Rng rng(seed);
    std::vector<Color> centers;
    centers.push_back(pts[rng.index(pts.size())]);
    std::vector<double> d2(pts.size());
    while (static_cast<int>(centers.size()) < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            double best = std::numeric_limits<double>::max();
            for (const auto& c : centers) best = std::min(best, (pts[i] - c).squaredNorm());
            d2[i] = best;
            total += best;
        }
        if (total <= 0.0) break;
        double target = rng.uniform() * total;
        std::size_t pick = pts.size() - 1;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            target -= d2[i];
            if (target < 0 && d2[i] > 0) {
                pick = i;
                break;
            }
        }
        centers.push_back(pts[pick]);
    }

    for (int iter = 0; iter < 10; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            int best_k = 0;
            double best = std::numeric_limits<double>::max();
            for (std::size_t c = 0; c < centers.size(); ++c) {
                const double d = (pts[i] - centers[c]).squaredNorm();
                if (d < best) {
                    best = d;
                    best_k = static_cast<int>(c);
                }
            }
            if (labels[i] != best_k || iter == 0) {
                changed = changed || labels[i] != best_k;
                labels[i] = best_k;
            }
        }
        std::vector<Color> sum(centers.size(), Color::Zero());
        std::vector<std::size_t> count(centers.size(), 0);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            sum[labels[i]] += pts[i];
            ++count[labels[i]];
        }
        for (std::size_t c = 0; c < centers.size(); ++c) {
            if (count[c]) centers[c] = sum[c] / static_cast<double>(count[c]);
        }
        if (!changed && iter > 0) break;
    }
    return labels;
}

struct Neighbor {
    int dx;
    int dy;
    double inv_dist;
};
constexpr std::array<Neighbor, 4> kForward = {{{1, 0, 1.0},
                                               {0, 1, 1.0},
                                               {1, 1, 1.0 / std::numbers::sqrt2},
                                               {-1, 1, 1.0 / std::numbers::sqrt2}}};

}  // namespace

CropBox default_init_rect(int width, int height) {
    const int ix = static_cast<int>(std::lround(0.05 * width));
    const int iy = static_cast<int>(std::lround(0.05 * height));
    return {ix, iy, std::max(1, width - 2 * ix), std::max(1, height - 2 * iy)};
}

GrabCutResult grabcut_segment(const ImageBuffer& img, const CropBox& rect, const GrabCutParams& params) {
    if (img.empty()) throw InitError("empty image");
    if (params.iterations < 1) throw ConfigError("grabcut needs at least one iteration");
    if (params.components < 1) throw ConfigError("grabcut needs at least one GMM component");
    if (rect.w <= 0 || rect.h <= 0 || rect.x < 0 || rect.y < 0 || rect.x + rect.w > img.width ||
        rect.y + rect.h > img.height) {
        throw InitError("init rectangle outside the image");
    }
    if (rect.w == img.width && rect.h == img.height) throw InitError("init rectangle covers the entire image");

    const int W = img.width;
    const int H = img.height;
    const std::size_t N = img.pixel_count();

    GrabCutResult result;
    result.mask = Mask(W, H);
    auto rect_mask = [&] {
        Mask m(W, H);
        for (int y = rect.y; y < rect.y + rect.h; ++y)
            for (int x = rect.x; x < rect.x + rect.w; ++x) m.at(x, y) = 1;
        return m;
    };

    std::vector<Color> z(N);
    for (std::size_t i = 0; i < N; ++i) {
        const auto* p = &img.pixels[3 * i];
        z[i] = Color(p[0], p[1], p[2]);
    }

    // Nothing to separate when the rectangle holds a single colour.
    {
        const Color ref = z[static_cast<std::size_t>(rect.y) * W + rect.x];
        bool uniform = true;
        for (int y = rect.y; y < rect.y + rect.h && uniform; ++y)
            for (int x = rect.x; x < rect.x + rect.w; ++x)
                if (z[static_cast<std::size_t>(y) * W + x] != ref) {
                    uniform = false;
                    break;
                }
        if (uniform) {
            result.mask = rect_mask();
            result.fallback = true;
            return result;
        }
    }

    // Pairwise weights gamma/dist * exp(-beta |dz|^2), forward neighbours only.
    double sum_sq = 0.0;
    std::size_t pairs = 0;
    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
            for (const auto& nb : kForward) {
                const int nx = x + nb.dx, ny = y + nb.dy;
                if (nx < 0 || nx >= W || ny >= H) continue;
                sum_sq += (z[static_cast<std::size_t>(y) * W + x] - z[static_cast<std::size_t>(ny) * W + nx]).squaredNorm();
                ++pairs;
            }
        }
    }
    const double mean_sq = pairs ? sum_sq / static_cast<double>(pairs) : 0.0;
    const double beta = mean_sq > 0 ? 1.0 / (2.0 * mean_sq) : 0.0;
    std::vector<std::array<double, 4>> weight(N, {0, 0, 0, 0});
    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * W + x;
            for (std::size_t e = 0; e < kForward.size(); ++e) {
                const int nx = x + kForward[e].dx, ny = y + kForward[e].dy;
                if (nx < 0 || nx >= W || ny >= H) continue;
                const double d2 = (z[i] - z[static_cast<std::size_t>(ny) * W + nx]).squaredNorm();
                weight[i][e] = params.gamma * kForward[e].inv_dist * std::exp(-beta * d2);
            }
        }
    }

    // alpha: 1 = foreground. Initially the rectangle.
    std::vector<std::uint8_t> alpha(N, 0);
    for (int y = rect.y; y < rect.y + rect.h; ++y)
        for (int x = rect.x; x < rect.x + rect.w; ++x) alpha[static_cast<std::size_t>(y) * W + x] = 1;

    ColorGmm fg(params.components, params.cov_floor);
    ColorGmm bg(params.components, params.cov_floor);

    auto fit_side = [&](ColorGmm& gmm, std::uint8_t side, const std::vector<int>& assignment) {
        std::vector<Color> pts;
        std::vector<int> labels;
        for (std::size_t i = 0; i < N; ++i) {
            if (alpha[i] == side) {
                pts.push_back(z[i]);
                labels.push_back(assignment[i]);
            }
        }
        if (!pts.empty()) gmm.fit(pts, labels);
    };

    const std::uint64_t seed = image_hash(img);
    {
        std::vector<int> assignment(N, 0);
        for (std::uint8_t side = 0; side <= 1; ++side) {
            std::vector<Color> pts;
            std::vector<std::size_t> idx;
            for (std::size_t i = 0; i < N; ++i) {
                if (alpha[i] == side) {
                    pts.push_back(z[i]);
                    idx.push_back(i);
                }
            }
            const auto labels = kmeans(pts, params.components, derive_seed(seed, side));
            for (std::size_t j = 0; j < idx.size(); ++j) assignment[idx[j]] = labels[j];
        }
        fit_side(bg, 0, assignment);
        fit_side(fg, 1, assignment);
    }

    auto energy = [&] {
        double e = 0.0;
        for (std::size_t i = 0; i < N; ++i) e += (alpha[i] ? fg : bg).best(z[i]).first;
        for (int y = 0; y < H; ++y) {
            for (int x = 0; x < W; ++x) {
                const std::size_t i = static_cast<std::size_t>(y) * W + x;
                for (std::size_t k = 0; k < kForward.size(); ++k) {
                    const int nx = x + kForward[k].dx, ny = y + kForward[k].dy;
                    if (nx < 0 || nx >= W || ny >= H) continue;
                    if (alpha[i] != alpha[static_cast<std::size_t>(ny) * W + nx]) e += weight[i][k];
                }
            }
        }
        return e;
    };
    result.energies.push_back(energy());

    // Graph node per rectangle pixel.
    std::vector<int> node(N, -1);
    int node_count = 0;
    for (int y = rect.y; y < rect.y + rect.h; ++y)
        for (int x = rect.x; x < rect.x + rect.w; ++x) node[static_cast<std::size_t>(y) * W + x] = node_count++;

    for (int iter = 0; iter < params.iterations; ++iter) {
        std::vector<int> assignment(N, 0);
        for (std::size_t i = 0; i < N; ++i) assignment[i] = (alpha[i] ? fg : bg).best(z[i]).second;
        fit_side(bg, 0, assignment);
        fit_side(fg, 1, assignment);

        MaxFlowGraph graph(node_count, 4 * node_count);
        std::vector<double> cost_fg(node_count), cost_bg(node_count);
        for (std::size_t i = 0; i < N; ++i) {
            if (node[i] < 0) continue;
            cost_fg[node[i]] = std::min(fg.best(z[i]).first, kInfCost);
            cost_bg[node[i]] = std::min(bg.best(z[i]).first, kInfCost);
        }
        for (int y = 0; y < H; ++y) {
            for (int x = 0; x < W; ++x) {
                const std::size_t i = static_cast<std::size_t>(y) * W + x;
                for (std::size_t k = 0; k < kForward.size(); ++k) {
                    const int nx = x + kForward[k].dx, ny = y + kForward[k].dy;
                    if (nx < 0 || nx >= W || ny >= H) continue;
                    const std::size_t j = static_cast<std::size_t>(ny) * W + nx;
                    const double w = weight[i][k];
                    if (node[i] >= 0 && node[j] >= 0) {
                        graph.add_edge(node[i], node[j], w, w);
                    } else if (node[i] >= 0) {
                        cost_fg[node[i]] += w;  // neighbour fixed to background
                    } else if (node[j] >= 0) {
                        cost_fg[node[j]] += w;
                    }
                }
            }
        }
        for (int n = 0; n < node_count; ++n) {
            const double m = std::min(cost_fg[n], cost_bg[n]);
            graph.add_terminal_weights(n, cost_bg[n] - m, cost_fg[n] - m);
        }
        graph.max_flow();
        for (std::size_t i = 0; i < N; ++i) {
            if (node[i] >= 0) alpha[i] = graph.in_source_segment(node[i]) ? 1 : 0;
        }
        result.energies.push_back(energy());
    }

    for (std::size_t i = 0; i < N; ++i) result.mask.values[i] = alpha[i];
    if (result.mask.count() == 0) {
        result.mask = rect_mask();
        result.fallback = true;
    }
    return result;
}

int otsu_threshold(const std::vector<std::uint64_t>& hist) {
    double total = 0.0, weighted = 0.0;
    int highest = 0;
    for (std::size_t v = 0; v < hist.size(); ++v) {
        total += static_cast<double>(hist[v]);
        weighted += static_cast<double>(v) * static_cast<double>(hist[v]);
        if (hist[v]) highest = static_cast<int>(v);
    }
    if (total == 0) return 0;
    double w0 = 0.0, sum0 = 0.0, best = 0.0;
    int threshold = highest;
    for (std::size_t t = 0; t + 1 < hist.size(); ++t) {
        w0 += static_cast<double>(hist[t]);
        sum0 += static_cast<double>(t) * static_cast<double>(hist[t]);
        const double w1 = total - w0;
        if (w0 == 0 || w1 == 0) continue;
        const double m0 = sum0 / w0;
        const double m1 = (weighted - sum0) / w1;
        const double between = w0 * w1 * (m0 - m1) * (m0 - m1);
        if (between > best) {
            best = between;
            threshold = static_cast<int>(t);
        }
    }
    return threshold;
}

Components connected_components(const Mask& mask) {
    Components out;
    out.labels.assign(mask.values.size(), 0);
    std::vector<std::size_t> stack;
    int next = 0;
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            const std::size_t start = static_cast<std::size_t>(y) * mask.width + x;
            if (!mask.values[start] || out.labels[start]) continue;
            ++next;
            std::size_t size = 0;
            out.labels[start] = next;
            stack.push_back(start);
            while (!stack.empty()) {
                const std::size_t p = stack.back();
                stack.pop_back();
                ++size;
                const int px = static_cast<int>(p % mask.width);
                const int py = static_cast<int>(p / mask.width);
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int qx = px + dx, qy = py + dy;
                        if (qx < 0 || qy < 0 || qx >= mask.width || qy >= mask.height) continue;
                        const std::size_t q = static_cast<std::size_t>(qy) * mask.width + qx;
                        if (mask.values[q] && !out.labels[q]) {
                            out.labels[q] = next;
                            stack.push_back(q);
                        }
                    }
                }
            }
            out.sizes.push_back(size);
        }
    }
    return out;
}

Mask largest_component(const Mask& mask) {
    const Components cc = connected_components(mask);
    Mask out(mask.width, mask.height);
    if (cc.sizes.empty()) return out;
    const auto best = static_cast<int>(std::max_element(cc.sizes.begin(), cc.sizes.end()) - cc.sizes.begin()) + 1;
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = cc.labels[i] == best;
    return out;
}

ThresholdCropResult threshold_crop(const ImageBuffer& img, const Mask& mask) {
    if (mask.width != img.width || mask.height != img.height) throw ValidationError("mask size differs from image");
    if (mask.count() == 0) throw DegenerateInput("empty mask");

    // Otsu on the masked grayscale image (background zeroed).
    const auto gray = gray8_plane(img);
    std::vector<std::uint64_t> hist(256, 0);
    std::vector<std::uint8_t> masked(gray.size());
    for (std::size_t i = 0; i < gray.size(); ++i) {
        masked[i] = mask.values[i] ? gray[i] : 0;
        ++hist[masked[i]];
    }
    const int t = otsu_threshold(hist);
    Mask binary(img.width, img.height);
    for (std::size_t i = 0; i < masked.size(); ++i) binary.values[i] = masked[i] > t;

    const Mask object = largest_component(binary);
    ThresholdCropResult out;
    if (object.count() == 0) {
        out.flagged = true;
        out.box = {0, 0, img.width, img.height};
        out.image = apply_mask(img, mask);
        out.mask = mask;
        return out;
    }
    int x0 = img.width, y0 = img.height, x1 = -1, y1 = -1;
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            if (!object.at(x, y)) continue;
            x0 = std::min(x0, x);
            x1 = std::max(x1, x);
            y0 = std::min(y0, y);
            y1 = std::max(y1, y);
        }
    }
    out.box = {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
    out.mask = crop(object, out.box);
    out.image = apply_mask(crop(img, out.box), out.mask);
    return out;
}

}  // namespace wastebench
