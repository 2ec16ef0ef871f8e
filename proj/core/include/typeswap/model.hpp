#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "typeswap/image.hpp"
#include "typeswap/layers.hpp"
#include "typeswap/type_vector.hpp"

namespace typeswap {

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class OutputActivation {
    /// sigmoid(logits): the distribution the cross-entropy is fitted to.
    sigmoid,
    /// clamp(relu(logits), 0, 1)
    relu_clamp,
};

/// Architecture. Encoder: conv(2x2,s2,F1) -> conv(2x2,s2,F2) -> [flatten | type]
/// -> mean/log-variance heads. Decoder: fc -> split(image | 18 type logits)
/// -> deconv(2x2,s2,F2) -> deconv(2x2,s2,F1) -> deconv(2x2,s1,3).
struct ModelConfig {
    int image_size = 32;
    int conv1_filters = 512;
    int conv2_filters = 1024;
    int latent_dim = 128;
    double leaky_slope = 0.2;
    OutputActivation output_activation = OutputActivation::sigmoid;
    /// Whether the 18 reconstructed type logits enter the loss.
    bool type_loss = true;

    int grid() const { return image_size / 4; }
    int flat_features() const { return grid() * grid() * conv2_filters; }
    int encoder_features() const { return flat_features() + static_cast<int>(kNumTypes); }
    int decoder_features() const { return flat_features() + static_cast<int>(kNumTypes); }
    int pixels() const { return image_size * image_size * 3; }

    /// 32x32, 512/1024 filters, latent 128.
    static ModelConfig full();
    /// Reduced widths (32x32, 32/64 filters, latent 128) for desk-scale runs.
    static ModelConfig desk();
    /// 8x8, 4/8 filters, latent 4; exists for gradient checks.
    static ModelConfig miniature();

    void validate() const;
    bool same_architecture(const ModelConfig& other) const;
    bool operator==(const ModelConfig&) const = default;
};

void to_json(nlohmann::json& j, const ModelConfig& c);
void from_json(const nlohmann::json& j, ModelConfig& c);

/// Named parameter tensors in one flat buffer.
class ParameterSet {
public:
    struct Tensor {
        std::string name;
        int rows = 0;
        int cols = 0;
        std::size_t offset = 0;
        std::size_t size() const { return static_cast<std::size_t>(rows) * cols; }
    };

    ParameterSet() = default;
    explicit ParameterSet(const ModelConfig& config);

    const std::vector<Tensor>& tensors() const { return tensors_; }
    const Tensor& tensor(std::string_view name) const;

    MatrixMap matrix(std::string_view name);
    ConstMatrixMap matrix(std::string_view name) const;

    std::span<double> values() { return data_; }
    std::span<const double> values() const { return data_; }
    std::size_t size() const { return data_.size(); }

    /// Same tensors, all zero.
    ParameterSet zeros_like() const;
    void set_zero();

    bool operator==(const ParameterSet& other) const {
        return data_ == other.data_ && layout_equal(other);
    }
    bool layout_equal(const ParameterSet& other) const;

private:
    void add(std::string name, int rows, int cols);
    std::vector<Tensor> tensors_;
    std::vector<double> data_;
};

struct LatentCode {
    std::vector<double> mean;
    std::vector<double> log_variance;
    std::vector<double> sample;
};

struct ModelOutput {
    /// Pre-activation image values, HWC order.
    std::vector<double> image_logits;
    HsvImage image;
    std::vector<double> type_logits;
};

/// Row n of `images` is one HSV image flattened HWC; row n of `types` its
/// type vector.
struct Batch {
    Matrix images;
    Matrix types;

    int size() const { return static_cast<int>(images.rows()); }
};

Batch make_batch(std::span<const HsvImage> images, std::span<const TypeVector> types);

/// Intermediate activations kept for the backward pass. Shapes for batch N
/// (S = image size, F1/F2 filters, L latent):
///   conv1 [N*(S/2)^2, F1], conv2 [N*(S/4)^2, F2], mean/log_var/eps/z [N, L],
///   dec_fc [N, (S/4)^2*F2 + 18], deconv1 [N*(S/2)^2, F2], deconv2 [N*S^2, F1],
///   logits [N*S^2, 3].
struct ForwardState {
    Matrix input_patches;
    Matrix conv1_pre;
    Matrix conv1_patches;
    Matrix conv2_pre;
    Matrix encoder_features;
    Matrix mean;
    Matrix log_var;
    Matrix eps;
    Matrix z;
    Matrix dec_fc;
    Matrix dec_image;  // leaky(dec_fc image part), [N*(S/4)^2, F2]
    Matrix deconv1_pre;
    Matrix deconv1;
    Matrix deconv2_pre;
    Matrix deconv2;
    Matrix logits;
    Matrix type_logits;
};

struct LossTerms {
    double total = 0.0;
    double image_bce = 0.0;
    double type_bce = 0.0;
    double kl = 0.0;
};

/// Closed-form KL(N(mu, sigma^2) || N(0, I)) summed over dimensions.
double kl_divergence(std::span<const double> mean, std::span<const double> log_variance);
double kl_divergence(const LatentCode& code);

/// Batch-mean of (image BCE + type BCE + KL). Type targets are clamped to [0,1].
LossTerms compute_loss(const ModelConfig& config, const Batch& batch, const ForwardState& state);

class Cvae {
public:
    /// Glorot-uniform weights, zero biases.
    Cvae(ModelConfig config, std::uint64_t init_seed);
    Cvae(ModelConfig config, ParameterSet params);

    static Cvae zeros(ModelConfig config);

    const ModelConfig& config() const { return config_; }
    ParameterSet& params() { return params_; }
    const ParameterSet& params() const { return params_; }

    /// Full forward pass with the given reparameterisation noise ([N, L]).
    ForwardState forward(const Batch& batch, const Matrix& eps) const;

    /// Loss and its gradient with respect to every parameter, accumulated
    /// into `grad` scaled by `weight` (use weight = micro/total for
    /// micro-batching). Returns unscaled loss terms of this batch.
    LossTerms loss_and_gradient(const Batch& batch, const Matrix& eps, ParameterSet& grad,
                                double weight = 1.0) const;

    /// Single image. `noise` may be null, in which case sample == mean.
    LatentCode encode(const HsvImage& image, const TypeVector& types,
                      std::mt19937_64* noise = nullptr) const;
    ModelOutput decode(std::span<const double> latent) const;

    /// Encoder heads only: [N, L] mean and log-variance.
    std::pair<Matrix, Matrix> encode_batch(const Batch& batch) const;
    /// Decoder only; returns (logits [N*S^2,3], type logits [N,18]).
    std::pair<Matrix, Matrix> decode_batch(const Matrix& z) const;

    /// Applies the configured output activation.
    double activate(double logit) const;

private:
    void encoder_pass(const Batch& batch, ForwardState& s) const;
    void decoder_pass(ForwardState& s) const;

    ModelConfig config_;
    ParameterSet params_;
};

/// Throws NumericalError naming `what` if any entry is NaN or infinite.
void require_finite(const Matrix& m, const char* what);

}  // namespace typeswap
