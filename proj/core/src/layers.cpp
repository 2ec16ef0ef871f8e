#include "typeswap/layers.hpp"

#include <cmath>
#include <stdexcept>

namespace typeswap::layers {

Matrix gather_patches(const Matrix& x, int batch, int height, int width) {
    if (height % 2 || width % 2) throw std::invalid_argument("gather_patches: odd spatial size");
    const Eigen::Index c = x.cols();
    const int oh = height / 2, ow = width / 2;
    Matrix p(static_cast<Eigen::Index>(batch) * oh * ow, 4 * c);
    for (int n = 0; n < batch; ++n)
        for (int oy = 0; oy < oh; ++oy)
            for (int ox = 0; ox < ow; ++ox) {
                const Eigen::Index row = (static_cast<Eigen::Index>(n) * oh + oy) * ow + ox;
                for (int dy = 0; dy < 2; ++dy)
                    for (int dx = 0; dx < 2; ++dx) {
                        const Eigen::Index src =
                            (static_cast<Eigen::Index>(n) * height + 2 * oy + dy) * width + 2 * ox + dx;
                        p.row(row).segment((dy * 2 + dx) * c, c) = x.row(src);
                    }
            }
    return p;
}

Matrix scatter_patches(const Matrix& patches, int batch, int height, int width) {
    if (height % 2 || width % 2) throw std::invalid_argument("scatter_patches: odd spatial size");
    const Eigen::Index c = patches.cols() / 4;
    const int oh = height / 2, ow = width / 2;
    Matrix x(static_cast<Eigen::Index>(batch) * height * width, c);
    for (int n = 0; n < batch; ++n)
        for (int oy = 0; oy < oh; ++oy)
            for (int ox = 0; ox < ow; ++ox) {
                const Eigen::Index row = (static_cast<Eigen::Index>(n) * oh + oy) * ow + ox;
                for (int dy = 0; dy < 2; ++dy)
                    for (int dx = 0; dx < 2; ++dx) {
                        const Eigen::Index dst =
                            (static_cast<Eigen::Index>(n) * height + 2 * oy + dy) * width + 2 * ox + dx;
                        x.row(dst) = patches.row(row).segment((dy * 2 + dx) * c, c);
                    }
            }
    return x;
}

Matrix shift_accumulate(const Matrix& taps, int batch, int height, int width, int filters) {
    Matrix out = Matrix::Zero(static_cast<Eigen::Index>(batch) * height * width, filters);
    for (int n = 0; n < batch; ++n)
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x) {
                const Eigen::Index dst = (static_cast<Eigen::Index>(n) * height + y) * width + x;
                for (int dy = 0; dy < 2; ++dy)
                    for (int dx = 0; dx < 2; ++dx) {
                        const int sy = y - dy, sx = x - dx;
                        if (sy < 0 || sx < 0) continue;
                        const Eigen::Index src = (static_cast<Eigen::Index>(n) * height + sy) * width + sx;
                        out.row(dst) += taps.row(src).segment((dy * 2 + dx) * filters, filters);
                    }
            }
    return out;
}

Matrix shift_spread(const Matrix& grad_out, int batch, int height, int width, int filters) {
    Matrix taps = Matrix::Zero(static_cast<Eigen::Index>(batch) * height * width, 4 * filters);
    for (int n = 0; n < batch; ++n)
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x) {
                const Eigen::Index row = (static_cast<Eigen::Index>(n) * height + y) * width + x;
                for (int dy = 0; dy < 2; ++dy)
                    for (int dx = 0; dx < 2; ++dx) {
                        const int ty = y + dy, tx = x + dx;
                        if (ty >= height || tx >= width) continue;
                        const Eigen::Index src = (static_cast<Eigen::Index>(n) * height + ty) * width + tx;
                        taps.row(row).segment((dy * 2 + dx) * filters, filters) = grad_out.row(src);
                    }
            }
    return taps;
}

void leaky_relu_inplace(Matrix& z, double slope) {
    z = z.unaryExpr([slope](double v) { return v > 0.0 ? v : slope * v; });
}

Matrix leaky_relu(const Matrix& z, double slope) {
    Matrix out = z;
    leaky_relu_inplace(out, slope);
    return out;
}

void leaky_relu_backward_inplace(Matrix& grad, const Matrix& pre, double slope) {
    grad = grad.binaryExpr(pre, [slope](double g, double p) { return p > 0.0 ? g : slope * g; });
}

double bce_with_logits(double logit, double target) {
    return std::max(logit, 0.0) - logit * target + std::log1p(std::exp(-std::abs(logit)));
}

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

}  // namespace typeswap::layers
