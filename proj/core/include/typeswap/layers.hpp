#pragma once

#include <Eigen/Core>

namespace typeswap {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<Matrix>;
using ConstMatrixMap = Eigen::Map<const Matrix>;
using RowVector = Eigen::Matrix<double, 1, Eigen::Dynamic>;

namespace layers {

// Activations are stored NHWC: an [N*H*W, C] row-major matrix.

/// Rearranges an [N*H*W, C] feature map into non-overlapping 2x2 patches,
/// [N*(H/2)*(W/2), 4*C], column block (dy*2+dx)*C. H and W must be even.
/// The mapping is a permutation, so a 2x2/stride-2 convolution is
/// gather_patches(x) * W and a 2x2/stride-2 transposed convolution is
/// scatter_patches(x * W).
Matrix gather_patches(const Matrix& x, int batch, int height, int width);
/// Inverse of gather_patches; height/width refer to the full-resolution map.
Matrix scatter_patches(const Matrix& patches, int batch, int height, int width);

/// 2x2, stride-1, "same" transposed convolution tap layout. Given the
/// per-tap products T = x * W ([N*H*W, 4*F], column block k = dy*2+dx),
/// out[n,y,x] = sum_k T[n, y-dy, x-dx, k] with out-of-range taps dropped.
Matrix shift_accumulate(const Matrix& taps, int batch, int height, int width, int filters);
/// Adjoint of shift_accumulate: dT[n,y,x,k] = dOut[n, y+dy, x+dx].
Matrix shift_spread(const Matrix& grad_out, int batch, int height, int width, int filters);

void leaky_relu_inplace(Matrix& z, double slope);
Matrix leaky_relu(const Matrix& z, double slope);
/// grad *= leaky'(pre)
void leaky_relu_backward_inplace(Matrix& grad, const Matrix& pre, double slope);

/// Numerically stable binary cross-entropy on logits:
/// max(x,0) - x*z + log(1 + exp(-|x|)).
double bce_with_logits(double logit, double target);
double sigmoid(double x);

}  // namespace layers
}  // namespace typeswap
