#include "typeswap/model.hpp"

#include <algorithm>
#include <cmath>

namespace typeswap {

namespace {

constexpr int kTypes = static_cast<int>(kNumTypes);

Matrix with_bias(Matrix m, ConstMatrixMap bias) {
    m.rowwise() += bias.row(0);
    return m;
}

RowVector column_sums(const Matrix& m) { return m.colwise().sum(); }

}  // namespace

// ---------------------------------------------------------------------------
// ModelConfig

ModelConfig ModelConfig::full() { return {}; }

ModelConfig ModelConfig::desk() {
    ModelConfig c;
    c.conv1_filters = 32;
    c.conv2_filters = 64;
    return c;
}

ModelConfig ModelConfig::miniature() {
    ModelConfig c;
    c.image_size = 8;
    c.conv1_filters = 4;
    c.conv2_filters = 8;
    c.latent_dim = 4;
    return c;
}

void ModelConfig::validate() const {
    if (image_size < 4 || image_size % 4 != 0)
        throw std::invalid_argument("image_size must be a positive multiple of 4");
    if (conv1_filters < 1 || conv2_filters < 1 || latent_dim < 1)
        throw std::invalid_argument("filter counts and latent_dim must be positive");
    if (!(leaky_slope >= 0.0 && leaky_slope < 1.0))
        throw std::invalid_argument("leaky_slope must lie in [0,1)");
}

bool ModelConfig::same_architecture(const ModelConfig& o) const {
    return image_size == o.image_size && conv1_filters == o.conv1_filters &&
           conv2_filters == o.conv2_filters && latent_dim == o.latent_dim;
}

void to_json(nlohmann::json& j, const ModelConfig& c) {
    j = {{"image_size", c.image_size},
         {"conv1_filters", c.conv1_filters},
         {"conv2_filters", c.conv2_filters},
         {"latent_dim", c.latent_dim},
         {"leaky_slope", c.leaky_slope},
         {"output_activation",
          c.output_activation == OutputActivation::sigmoid ? "sigmoid" : "relu_clamp"},
         {"type_loss", c.type_loss}};
}

void from_json(const nlohmann::json& j, ModelConfig& c) {
    c.image_size = j.at("image_size").get<int>();
    c.conv1_filters = j.at("conv1_filters").get<int>();
    c.conv2_filters = j.at("conv2_filters").get<int>();
    c.latent_dim = j.at("latent_dim").get<int>();
    c.leaky_slope = j.value("leaky_slope", 0.2);
    const auto act = j.value("output_activation", std::string("sigmoid"));
    if (act == "sigmoid")
        c.output_activation = OutputActivation::sigmoid;
    else if (act == "relu_clamp")
        c.output_activation = OutputActivation::relu_clamp;
    else
        throw std::invalid_argument("unknown output_activation: " + act);
    c.type_loss = j.value("type_loss", true);
}

// ---------------------------------------------------------------------------
// ParameterSet

ParameterSet::ParameterSet(const ModelConfig& c) {
    c.validate();
    const int f1 = c.conv1_filters, f2 = c.conv2_filters, l = c.latent_dim;
    add("enc.conv1.w", 4 * 3, f1);
    add("enc.conv1.b", 1, f1);
    add("enc.conv2.w", 4 * f1, f2);
    add("enc.conv2.b", 1, f2);
    add("enc.mean.w", c.encoder_features(), l);
    add("enc.mean.b", 1, l);
    add("enc.logvar.w", c.encoder_features(), l);
    add("enc.logvar.b", 1, l);
    add("dec.fc.w", l, c.decoder_features());
    add("dec.fc.b", 1, c.decoder_features());
    add("dec.deconv1.w", f2, 4 * f2);
    add("dec.deconv1.b", 1, f2);
    add("dec.deconv2.w", f2, 4 * f1);
    add("dec.deconv2.b", 1, f1);
    add("dec.deconv3.w", f1, 4 * 3);
    add("dec.deconv3.b", 1, 3);
}

void ParameterSet::add(std::string name, int rows, int cols) {
    Tensor t{std::move(name), rows, cols, data_.size()};
    data_.resize(data_.size() + t.size(), 0.0);
    tensors_.push_back(std::move(t));
}

const ParameterSet::Tensor& ParameterSet::tensor(std::string_view name) const {
    for (const auto& t : tensors_)
        if (t.name == name) return t;
    throw std::out_of_range("no parameter tensor named " + std::string(name));
}

MatrixMap ParameterSet::matrix(std::string_view name) {
    const auto& t = tensor(name);
    return MatrixMap(data_.data() + t.offset, t.rows, t.cols);
}

ConstMatrixMap ParameterSet::matrix(std::string_view name) const {
    const auto& t = tensor(name);
    return ConstMatrixMap(data_.data() + t.offset, t.rows, t.cols);
}

ParameterSet ParameterSet::zeros_like() const {
    ParameterSet p = *this;
    p.set_zero();
    return p;
}

void ParameterSet::set_zero() { std::fill(data_.begin(), data_.end(), 0.0); }

bool ParameterSet::layout_equal(const ParameterSet& o) const {
    if (tensors_.size() != o.tensors_.size()) return false;
    for (std::size_t i = 0; i < tensors_.size(); ++i) {
        const auto &a = tensors_[i], &b = o.tensors_[i];
        if (a.name != b.name || a.rows != b.rows || a.cols != b.cols || a.offset != b.offset)
            return false;
    }
    return true;
}

// ---------------------------------------------------------------------------

Batch make_batch(std::span<const HsvImage> images, std::span<const TypeVector> types) {
    if (images.size() != types.size()) throw std::invalid_argument("make_batch: size mismatch");
    if (images.empty()) throw std::invalid_argument("make_batch: empty batch");
    const auto pixels = static_cast<Eigen::Index>(images.front().size());
    Batch b;
    b.images.resize(static_cast<Eigen::Index>(images.size()), pixels);
    b.types.resize(static_cast<Eigen::Index>(images.size()), kTypes);
    for (std::size_t n = 0; n < images.size(); ++n) {
        const auto px = images[n].pixels();
        if (static_cast<Eigen::Index>(px.size()) != pixels)
            throw std::invalid_argument("make_batch: images differ in size");
        const auto row = static_cast<Eigen::Index>(n);
        for (Eigen::Index i = 0; i < pixels; ++i) b.images(row, i) = px[static_cast<std::size_t>(i)];
        for (int t = 0; t < kTypes; ++t) b.types(row, t) = types[n][static_cast<std::size_t>(t)];
    }
    return b;
}

void require_finite(const Matrix& m, const char* what) {
    if (!m.allFinite()) throw NumericalError(std::string("non-finite values in ") + what);
}

double kl_divergence(std::span<const double> mean, std::span<const double> log_variance) {
    if (mean.size() != log_variance.size()) throw std::invalid_argument("kl: size mismatch");
    double kl = 0.0;
    for (std::size_t d = 0; d < mean.size(); ++d)
        kl += -0.5 * (1.0 + log_variance[d] - mean[d] * mean[d] - std::exp(log_variance[d]));
    return kl;
}

double kl_divergence(const LatentCode& code) { return kl_divergence(code.mean, code.log_variance); }

LossTerms compute_loss(const ModelConfig& config, const Batch& batch, const ForwardState& s) {
    const int n = batch.size();
    LossTerms t;
    const ConstMatrixMap targets(batch.images.data(), s.logits.rows(), 3);
    for (Eigen::Index i = 0; i < s.logits.rows(); ++i)
        for (int c = 0; c < 3; ++c) t.image_bce += layers::bce_with_logits(s.logits(i, c), targets(i, c));
    if (config.type_loss)
        for (int r = 0; r < n; ++r)
            for (int k = 0; k < kTypes; ++k)
                t.type_bce += layers::bce_with_logits(s.type_logits(r, k),
                                                      std::clamp(batch.types(r, k), 0.0, 1.0));
    for (int r = 0; r < n; ++r)
        for (Eigen::Index d = 0; d < s.mean.cols(); ++d) {
            const double mu = s.mean(r, d), lv = s.log_var(r, d);
            t.kl += -0.5 * (1.0 + lv - mu * mu - std::exp(lv));
        }
    t.image_bce /= n;
    t.type_bce /= n;
    t.kl /= n;
    t.total = t.image_bce + t.type_bce + t.kl;
    return t;
}

// ---------------------------------------------------------------------------
// Cvae

Cvae::Cvae(ModelConfig config, std::uint64_t init_seed) : config_(config), params_(config) {
    std::mt19937_64 rng(init_seed);
    for (const auto& t : params_.tensors()) {
        if (t.rows == 1) continue;  // biases start at zero
        // Conv kernels count their 2x2 taps in both fans.
        double fan_in = t.rows, fan_out = t.cols;
        if (t.name.find("conv") != std::string::npos) {
            if (t.name.rfind("enc.", 0) == 0)
                fan_out *= 4;
            else
                fan_in *= 4;
        }
        const double limit = std::sqrt(6.0 / (fan_in + fan_out));
        std::uniform_real_distribution<double> u(-limit, limit);
        auto vals = params_.values().subspan(t.offset, t.size());
        for (double& v : vals) v = u(rng);
    }
}

Cvae::Cvae(ModelConfig config, ParameterSet params) : config_(config), params_(std::move(params)) {
    if (!params_.layout_equal(ParameterSet(config_)))
        throw std::invalid_argument("parameter layout does not match the model configuration");
}

Cvae Cvae::zeros(ModelConfig config) { return Cvae(config, ParameterSet(config)); }

double Cvae::activate(double logit) const {
    if (config_.output_activation == OutputActivation::sigmoid) return layers::sigmoid(logit);
    return std::clamp(logit, 0.0, 1.0);
}

void Cvae::encoder_pass(const Batch& batch, ForwardState& s) const {
    const int n = batch.size();
    const int size = config_.image_size, half = size / 2;
    const double slope = config_.leaky_slope;
    if (batch.images.cols() != config_.pixels())
        throw std::invalid_argument("batch images do not match the configured image size");

    const ConstMatrixMap input(batch.images.data(), static_cast<Eigen::Index>(n) * size * size, 3);
    s.input_patches = layers::gather_patches(input, n, size, size);
    s.conv1_pre = with_bias(s.input_patches * params_.matrix("enc.conv1.w"), params_.matrix("enc.conv1.b"));
    const Matrix conv1 = layers::leaky_relu(s.conv1_pre, slope);
    s.conv1_patches = layers::gather_patches(conv1, n, half, half);
    s.conv2_pre = with_bias(s.conv1_patches * params_.matrix("enc.conv2.w"), params_.matrix("enc.conv2.b"));

    const int flat = config_.flat_features();
    s.encoder_features.resize(n, config_.encoder_features());
    const Matrix conv2 = layers::leaky_relu(s.conv2_pre, slope);
    s.encoder_features.leftCols(flat) = ConstMatrixMap(conv2.data(), n, flat);
    s.encoder_features.rightCols(kTypes) = batch.types;

    s.mean = with_bias(s.encoder_features * params_.matrix("enc.mean.w"), params_.matrix("enc.mean.b"));
    s.log_var = with_bias(s.encoder_features * params_.matrix("enc.logvar.w"), params_.matrix("enc.logvar.b"));
    require_finite(s.mean, "latent mean");
    require_finite(s.log_var, "latent log-variance");
}

void Cvae::decoder_pass(ForwardState& s) const {
    const int n = static_cast<int>(s.z.rows());
    const int size = config_.image_size, half = size / 2, grid = config_.grid();
    const int flat = config_.flat_features();
    const double slope = config_.leaky_slope;

    s.dec_fc = with_bias(s.z * params_.matrix("dec.fc.w"), params_.matrix("dec.fc.b"));
    s.type_logits = s.dec_fc.rightCols(kTypes);
    Matrix img = s.dec_fc.leftCols(flat);
    layers::leaky_relu_inplace(img, slope);
    s.dec_image = ConstMatrixMap(img.data(), static_cast<Eigen::Index>(n) * grid * grid, config_.conv2_filters);

    s.deconv1_pre = with_bias(layers::scatter_patches(s.dec_image * params_.matrix("dec.deconv1.w"), n, half, half),
                              params_.matrix("dec.deconv1.b"));
    s.deconv1 = layers::leaky_relu(s.deconv1_pre, slope);
    s.deconv2_pre = with_bias(layers::scatter_patches(s.deconv1 * params_.matrix("dec.deconv2.w"), n, size, size),
                              params_.matrix("dec.deconv2.b"));
    s.deconv2 = layers::leaky_relu(s.deconv2_pre, slope);
    s.logits = with_bias(
        layers::shift_accumulate(s.deconv2 * params_.matrix("dec.deconv3.w"), n, size, size, 3),
        params_.matrix("dec.deconv3.b"));
    require_finite(s.logits, "decoder output");
    require_finite(s.type_logits, "decoder type logits");
}

ForwardState Cvae::forward(const Batch& batch, const Matrix& eps) const {
    ForwardState s;
    encoder_pass(batch, s);
    if (eps.rows() != batch.size() || eps.cols() != config_.latent_dim)
        throw std::invalid_argument("noise matrix has the wrong shape");
    s.eps = eps;
    s.z = s.mean.array() + (0.5 * s.log_var.array()).exp() * eps.array();
    require_finite(s.z, "latent sample");
    decoder_pass(s);
    return s;
}

LossTerms Cvae::loss_and_gradient(const Batch& batch, const Matrix& eps, ParameterSet& grad,
                                  double weight) const {
    if (!grad.layout_equal(params_)) throw std::invalid_argument("gradient layout mismatch");
    const ForwardState s = forward(batch, eps);
    const LossTerms terms = compute_loss(config_, batch, s);

    const int n = batch.size();
    const int size = config_.image_size, half = size / 2, grid = config_.grid();
    const int flat = config_.flat_features();
    const double slope = config_.leaky_slope;
    const double scale = weight / n;

    // d(loss)/d(logits) = (sigmoid(logit) - target) / N
    const ConstMatrixMap targets(batch.images.data(), s.logits.rows(), 3);
    Matrix d_logits = s.logits.unaryExpr([](double v) { return layers::sigmoid(v); }) - targets;
    d_logits *= scale;

    grad.matrix("dec.deconv3.b") += column_sums(d_logits);
    const Matrix d_taps3 = layers::shift_spread(d_logits, n, size, size, 3);
    grad.matrix("dec.deconv3.w").noalias() += s.deconv2.transpose() * d_taps3;
    Matrix d_deconv2 = d_taps3 * params_.matrix("dec.deconv3.w").transpose();

    layers::leaky_relu_backward_inplace(d_deconv2, s.deconv2_pre, slope);
    grad.matrix("dec.deconv2.b") += column_sums(d_deconv2);
    const Matrix d_taps2 = layers::gather_patches(d_deconv2, n, size, size);
    grad.matrix("dec.deconv2.w").noalias() += s.deconv1.transpose() * d_taps2;
    Matrix d_deconv1 = d_taps2 * params_.matrix("dec.deconv2.w").transpose();

    layers::leaky_relu_backward_inplace(d_deconv1, s.deconv1_pre, slope);
    grad.matrix("dec.deconv1.b") += column_sums(d_deconv1);
    const Matrix d_taps1 = layers::gather_patches(d_deconv1, n, half, half);
    grad.matrix("dec.deconv1.w").noalias() += s.dec_image.transpose() * d_taps1;
    const Matrix d_dec_image = d_taps1 * params_.matrix("dec.deconv1.w").transpose();

    Matrix d_fc(n, config_.decoder_features());
    d_fc.leftCols(flat) = ConstMatrixMap(d_dec_image.data(), n, flat);
    {
        Matrix pre = s.dec_fc.leftCols(flat);
        Matrix g = d_fc.leftCols(flat);
        layers::leaky_relu_backward_inplace(g, pre, slope);
        d_fc.leftCols(flat) = g;
    }
    if (config_.type_loss) {
        Matrix d_type = s.type_logits.unaryExpr([](double v) { return layers::sigmoid(v); }) -
                        batch.types.unaryExpr([](double v) { return std::clamp(v, 0.0, 1.0); });
        d_fc.rightCols(kTypes) = d_type * scale;
    } else {
        d_fc.rightCols(kTypes).setZero();
    }

    grad.matrix("dec.fc.b") += column_sums(d_fc);
    grad.matrix("dec.fc.w").noalias() += s.z.transpose() * d_fc;
    const Matrix d_z = d_fc * params_.matrix("dec.fc.w").transpose();

    const Matrix std_dev = (0.5 * s.log_var.array()).exp().matrix();
    const Matrix d_mean = d_z + s.mean * scale;
    const Matrix d_log_var =
        (d_z.array() * s.eps.array() * std_dev.array() * 0.5 +
         0.5 * scale * (s.log_var.array().exp() - 1.0))
            .matrix();

    grad.matrix("enc.mean.b") += column_sums(d_mean);
    grad.matrix("enc.logvar.b") += column_sums(d_log_var);
    grad.matrix("enc.mean.w").noalias() += s.encoder_features.transpose() * d_mean;
    grad.matrix("enc.logvar.w").noalias() += s.encoder_features.transpose() * d_log_var;
    Matrix d_features = d_mean * params_.matrix("enc.mean.w").transpose();
    d_features.noalias() += d_log_var * params_.matrix("enc.logvar.w").transpose();

    Matrix d_conv2 = ConstMatrixMap(d_features.leftCols(flat).eval().data(),
                                    static_cast<Eigen::Index>(n) * grid * grid, config_.conv2_filters);
    layers::leaky_relu_backward_inplace(d_conv2, s.conv2_pre, slope);
    grad.matrix("enc.conv2.b") += column_sums(d_conv2);
    grad.matrix("enc.conv2.w").noalias() += s.conv1_patches.transpose() * d_conv2;
    const Matrix d_conv1_patches = d_conv2 * params_.matrix("enc.conv2.w").transpose();

    Matrix d_conv1 = layers::scatter_patches(d_conv1_patches, n, half, half);
    layers::leaky_relu_backward_inplace(d_conv1, s.conv1_pre, slope);
    grad.matrix("enc.conv1.b") += column_sums(d_conv1);
    grad.matrix("enc.conv1.w").noalias() += s.input_patches.transpose() * d_conv1;

    return terms;
}

std::pair<Matrix, Matrix> Cvae::encode_batch(const Batch& batch) const {
    ForwardState s;
    encoder_pass(batch, s);
    return {std::move(s.mean), std::move(s.log_var)};
}

std::pair<Matrix, Matrix> Cvae::decode_batch(const Matrix& z) const {
    if (z.cols() != config_.latent_dim) throw std::invalid_argument("latent has the wrong width");
    require_finite(z, "latent input");
    ForwardState s;
    s.z = z;
    decoder_pass(s);
    return {std::move(s.logits), std::move(s.type_logits)};
}

LatentCode Cvae::encode(const HsvImage& image, const TypeVector& types, std::mt19937_64* noise) const {
    const Batch b = make_batch(std::span(&image, 1), std::span(&types, 1));
    auto [mean, log_var] = encode_batch(b);
    LatentCode code;
    code.mean.assign(mean.data(), mean.data() + mean.size());
    code.log_variance.assign(log_var.data(), log_var.data() + log_var.size());
    code.sample = code.mean;
    if (noise) {
        std::normal_distribution<double> normal(0.0, 1.0);
        for (std::size_t d = 0; d < code.sample.size(); ++d)
            code.sample[d] += std::exp(0.5 * code.log_variance[d]) * normal(*noise);
    }
    return code;
}

ModelOutput Cvae::decode(std::span<const double> latent) const {
    Matrix z(1, config_.latent_dim);
    if (static_cast<int>(latent.size()) != config_.latent_dim)
        throw std::invalid_argument("latent has the wrong length");
    for (int d = 0; d < config_.latent_dim; ++d) z(0, d) = latent[static_cast<std::size_t>(d)];
    auto [logits, type_logits] = decode_batch(z);
    ModelOutput out;
    out.image_logits.assign(logits.data(), logits.data() + logits.size());
    out.type_logits.assign(type_logits.data(), type_logits.data() + type_logits.size());
    std::vector<double> px(out.image_logits.size());
    std::transform(out.image_logits.begin(), out.image_logits.end(), px.begin(),
                   [this](double v) { return activate(v); });
    out.image = HsvImage(config_.image_size, config_.image_size, std::move(px));
    return out;
}

}  // namespace typeswap
