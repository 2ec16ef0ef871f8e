#pragma once

// Straight-line re-implementations used as test oracles. They share no code
// with the library beyond its data types.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "typeswap/image.hpp"
#include "typeswap/model.hpp"

namespace typeswap::oracle {

inline double catmull_rom(double x) {
    x = std::abs(x);
    if (x < 1.0) return 1.5 * x * x * x - 2.5 * x * x + 1.0;
    if (x < 2.0) return -0.5 * x * x * x + 2.5 * x * x - 4.0 * x + 2.0;
    return 0.0;
}

/// Non-separable 2-D bicubic: every output pixel is a direct weighted sum
/// over the full source with the product kernel, stretched by the scale
/// factor when shrinking, normalised by the total in-bounds weight.
template <int C, class Tag>
Raster<C, Tag> bicubic_direct(const Raster<C, Tag>& src, int ow, int oh) {
    const double sx = static_cast<double>(src.width()) / ow;
    const double sy = static_cast<double>(src.height()) / oh;
    const double fx = std::max(sx, 1.0), fy = std::max(sy, 1.0);
    Raster<C, Tag> out(ow, oh);
    for (int oy = 0; oy < oh; ++oy)
        for (int ox = 0; ox < ow; ++ox) {
            const double cx = (ox + 0.5) * sx, cy = (oy + 0.5) * sy;
            std::array<double, C> acc{};
            double wsum = 0.0;
            for (int y = 0; y < src.height(); ++y)
                for (int x = 0; x < src.width(); ++x) {
                    const double w = catmull_rom((x + 0.5 - cx) / fx) * catmull_rom((y + 0.5 - cy) / fy);
                    if (w == 0.0) continue;
                    wsum += w;
                    for (int c = 0; c < C; ++c) acc[static_cast<std::size_t>(c)] += w * src.at(x, y, c);
                }
            for (int c = 0; c < C; ++c)
                out.at(ox, oy, c) = std::clamp(acc[static_cast<std::size_t>(c)] / wsum, 0.0, 1.0);
        }
    return out;
}

/// Strict rank tables from a distance matrix with the documented tie-break.
struct Ranks {
    std::vector<std::vector<int>> image_rank;  // [i][t]
    std::vector<std::vector<int>> type_rank;   // [t][i]
};

inline Ranks ranks(const std::vector<std::vector<double>>& d) {
    const std::size_t n = d.size(), k = d.empty() ? 0 : d[0].size();
    Ranks r{std::vector<std::vector<int>>(n, std::vector<int>(k)), std::vector<std::vector<int>>(k, std::vector<int>(n))};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t t = 0; t < k; ++t) {
            int rank = 0;
            for (std::size_t u = 0; u < k; ++u)
                if (d[i][u] < d[i][t] || (d[i][u] == d[i][t] && u < t)) ++rank;
            r.image_rank[i][t] = rank;
        }
    for (std::size_t t = 0; t < k; ++t)
        for (std::size_t i = 0; i < n; ++i) {
            int rank = 0;
            for (std::size_t j = 0; j < n; ++j)
                if (d[j][t] < d[i][t] || (d[j][t] == d[i][t] && j < i)) ++rank;
            r.type_rank[t][i] = rank;
        }
    return r;
}

/// Number of (image, type) blocking pairs for a complete assignment.
inline int blocking_pairs(const Ranks& r, const std::vector<std::size_t>& match,
                          const std::vector<std::size_t>& quota) {
    const std::size_t n = match.size(), k = quota.size();
    std::vector<std::size_t> count(k, 0);
    for (auto t : match) ++count[t];
    int blocks = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t t = 0; t < k; ++t) {
            if (t == match[i] || r.image_rank[i][t] > r.image_rank[i][match[i]]) continue;
            if (quota[t] == 0) continue;
            bool t_wants = count[t] < quota[t];
            for (std::size_t j = 0; j < n && !t_wants; ++j)
                if (match[j] == t && r.type_rank[t][i] < r.type_rank[t][j]) t_wants = true;
            if (t_wants) ++blocks;
        }
    return blocks;
}

/// Enumerates every capacity-exact assignment, keeps the stable ones and
/// returns the one that is weakly best for every image (nullopt if no
/// stable matching dominates all others, which theory rules out).
inline std::optional<std::vector<std::size_t>> image_optimal_stable(const std::vector<std::vector<double>>& d,
                                                                    const std::vector<std::size_t>& quota) {
    const Ranks r = ranks(d);
    const std::size_t n = d.size(), k = quota.size();
    std::vector<std::vector<std::size_t>> stable;
    std::vector<std::size_t> cur(n), left = quota;
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == n) {
            if (blocking_pairs(r, cur, quota) == 0) stable.push_back(cur);
            return;
        }
        for (std::size_t t = 0; t < k; ++t) {
            if (left[t] == 0) continue;
            --left[t];
            cur[i] = t;
            rec(i + 1);
            ++left[t];
        }
    };
    rec(0);
    for (const auto& m : stable) {
        bool best = true;
        for (const auto& o : stable)
            for (std::size_t i = 0; i < n && best; ++i)
                if (r.image_rank[i][o[i]] < r.image_rank[i][m[i]]) best = false;
        if (best) return m;
    }
    return std::nullopt;
}

inline double bce(double logit, double target) {
    // log(sigmoid(x)) and log(1 - sigmoid(x)) written out separately.
    const double log_p = -std::log1p(std::exp(-logit));
    const double log_q = -logit - std::log1p(std::exp(-logit));
    return -(target * log_p + (1.0 - target) * log_q);
}

/// Batch-mean loss from a forward state, summed element by element.
inline double naive_loss(const Batch& batch, const ForwardState& s, bool type_loss) {
    const Eigen::Index n = batch.images.rows();
    const Eigen::Index pixels = batch.images.cols();
    double total = 0.0;
    for (Eigen::Index b = 0; b < n; ++b) {
        double sample = 0.0;
        for (Eigen::Index p = 0; p < pixels; ++p) {
            const Eigen::Index row = b * (pixels / 3) + p / 3;
            sample += bce(s.logits(row, p % 3), batch.images(b, p));
        }
        if (type_loss)
            for (Eigen::Index t = 0; t < batch.types.cols(); ++t)
                sample += bce(s.type_logits(b, t), std::clamp(batch.types(b, t), 0.0, 1.0));
        for (Eigen::Index d = 0; d < s.mean.cols(); ++d) {
            const double mu = s.mean(b, d), lv = s.log_var(b, d);
            sample += -0.5 * (1.0 + lv - mu * mu - std::exp(lv));
        }
        total += sample;
    }
    return total / static_cast<double>(n);
}

template <class A, class B>
double naive_mse(const A& a, const B& b) {
    double s = 0.0;
    for (int y = 0; y < a.height(); ++y)
        for (int x = 0; x < a.width(); ++x)
            for (int c = 0; c < 3; ++c) {
                const double d = a.at(x, y, c) - b.at(x, y, c);
                s += d * d;
            }
    return s / (3.0 * a.width() * a.height());
}

}  // namespace typeswap::oracle
