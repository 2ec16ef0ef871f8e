#include <doctest.h>

#include <cmath>
#include <random>

#include "../support/fixtures.hpp"
#include "../support/oracles.hpp"
#include "typeswap/model.hpp"

using namespace typeswap;
using testing::gaussian_matrix;
using testing::random_image;

namespace {

Batch random_batch(const ModelConfig& cfg, int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<HsvImage> imgs;
    std::vector<TypeVector> tvs;
    for (int i = 0; i < n; ++i) {
        imgs.push_back(random_image<HsvImage>(cfg.image_size, cfg.image_size, rng));
        tvs.push_back(i % 2 ? encode_type_vector({"Grass", "Fairy"}) : encode_type_vector({kTypeNames[static_cast<std::size_t>(i) % 18]}));
    }
    return make_batch(imgs, tvs);
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("patch gather and scatter are inverse permutations") {
    const Matrix x = gaussian_matrix(2 * 4 * 6, 3, 1);
    const Matrix p = layers::gather_patches(x, 2, 4, 6);
    CHECK(p.rows() == 2 * 2 * 3);
    CHECK(p.cols() == 12);
    CHECK(layers::scatter_patches(p, 2, 4, 6) == x);
    // Patch (n=1, py=1, px=2), tap (dy=1, dx=0) reads pixel (y=3, x=4).
    const int row = 1 * 6 + 1 * 3 + 2;
    for (int c = 0; c < 3; ++c) CHECK(p(row, (1 * 2 + 0) * 3 + c) == x((1 * 4 * 6) + 3 * 6 + 4, c));
}

TEST_CASE("shift_spread is the adjoint of shift_accumulate") {
    const int n = 2, h = 3, w = 5, f = 2;
    const Matrix taps = gaussian_matrix(n * h * w, 4 * f, 2);
    const Matrix g = gaussian_matrix(n * h * w, f, 3);
    const double lhs = (layers::shift_accumulate(taps, n, h, w, f).array() * g.array()).sum();
    const double rhs = (taps.array() * layers::shift_spread(g, n, h, w, f).array()).sum();
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("stable binary cross-entropy") {
    CHECK(layers::bce_with_logits(0.0, 0.5) == doctest::Approx(std::log(2.0)));
    CHECK(layers::bce_with_logits(800.0, 1.0) == doctest::Approx(0.0));
    CHECK(layers::bce_with_logits(-800.0, 1.0) == doctest::Approx(800.0));
    CHECK(std::isfinite(layers::bce_with_logits(-1e5, 0.0)));
    CHECK(layers::bce_with_logits(1.3, 0.2) == doctest::Approx(oracle::bce(1.3, 0.2)).epsilon(1e-12));
}

TEST_CASE("KL divergence") {
    const std::vector<double> zero(4, 0.0);
    CHECK(kl_divergence(zero, zero) == 0.0);
    CHECK(kl_divergence(std::vector<double>{1.0}, std::vector<double>{0.0}) == doctest::Approx(0.5));
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n(0, 1);
    for (int i = 0; i < 100; ++i) {
        std::vector<double> mu(5), lv(5);
        for (int d = 0; d < 5; ++d) {
            mu[d] = n(rng);
            lv[d] = n(rng);
        }
        CHECK(kl_divergence(mu, lv) >= 0.0);
    }
}

TEST_CASE("KL matches a Monte-Carlo estimate within 3 standard errors") {
    const std::vector<double> mu{0.7, -0.3, 1.2}, lv{-0.5, 0.4, 0.1};
    std::mt19937_64 rng(11);
    std::normal_distribution<double> n(0, 1);
    const int draws = 1000000;
    double sum = 0, sq = 0;
    for (int k = 0; k < draws; ++k) {
        // log q(z) - log p(z) for z ~ q
        double lr = 0;
        for (std::size_t d = 0; d < mu.size(); ++d) {
            const double e = n(rng), s = std::exp(0.5 * lv[d]), z = mu[d] + s * e;
            lr += -0.5 * e * e - 0.5 * lv[d] + 0.5 * z * z;
        }
        sum += lr;
        sq += lr * lr;
    }
    const double mean = sum / draws, se = std::sqrt((sq / draws - mean * mean) / draws);
    CHECK(std::abs(kl_divergence(mu, lv) - mean) < 3 * se);
}

TEST_CASE("loss matches the naive summation oracle") {
    for (const bool type_loss : {true, false}) {
        ModelConfig cfg = ModelConfig::miniature();
        cfg.type_loss = type_loss;
        const Cvae model(cfg, 5);
        const Batch b = random_batch(cfg, 3, 6);
        const auto s = model.forward(b, gaussian_matrix(3, cfg.latent_dim, 7));
        const LossTerms l = compute_loss(cfg, b, s);
        CHECK(l.total == doctest::Approx(oracle::naive_loss(b, s, type_loss)).epsilon(1e-5));
        CHECK(l.total == doctest::Approx(l.image_bce + l.type_bce + l.kl).epsilon(1e-12));
        if (!type_loss) CHECK(l.type_bce == 0.0);
    }
}

TEST_CASE("loss of a batch of identical samples equals the single-sample loss") {
    const ModelConfig cfg = ModelConfig::miniature();
    const Cvae model(cfg, 8);
    std::mt19937_64 rng(1);
    const auto img = random_image<HsvImage>(8, 8, rng);
    const auto tv = encode_type_vector({"Ice"});
    const Batch one = make_batch(std::vector{img}, std::vector{tv});
    const Batch three = make_batch(std::vector{img, img, img}, std::vector{tv, tv, tv});
    const Matrix eps1 = gaussian_matrix(1, cfg.latent_dim, 2);
    const Matrix eps3 = eps1.replicate(3, 1);
    CHECK(compute_loss(cfg, three, model.forward(three, eps3)).total ==
          doctest::Approx(compute_loss(cfg, one, model.forward(one, eps1)).total).epsilon(1e-12));
}

TEST_CASE("perfect logits leave only the target entropy") {
    ModelConfig cfg = ModelConfig::miniature();
    cfg.type_loss = false;
    const Batch b = random_batch(cfg, 2, 3);
    ForwardState s;
    s.logits = Matrix(2 * 64, 3);
    s.type_logits = Matrix::Zero(2, 18);
    s.mean = Matrix::Zero(2, cfg.latent_dim);
    s.log_var = Matrix::Zero(2, cfg.latent_dim);
    double entropy = 0;
    for (int n = 0; n < 2; ++n)
        for (int p = 0; p < 192; ++p) {
            const double t = b.images(n, p);
            s.logits(n * 64 + p / 3, p % 3) = std::log(t / (1 - t));
            entropy -= t * std::log(t) + (1 - t) * std::log(1 - t);
        }
    const LossTerms l = compute_loss(cfg, b, s);
    CHECK(l.kl == 0.0);
    CHECK(l.total == doctest::Approx(entropy / 2).epsilon(1e-9));
}

TEST_CASE("zero weights encode to zero and decode to zero") {
    ModelConfig cfg = ModelConfig::miniature();
    cfg.output_activation = OutputActivation::relu_clamp;
    const Cvae model = Cvae::zeros(cfg);
    std::mt19937_64 rng(4);
    const auto img = random_image<HsvImage>(8, 8, rng);
    std::mt19937_64 noise(9), noise_copy(9);
    const LatentCode code = model.encode(img, encode_type_vector({"Fire"}), &noise);
    std::normal_distribution<double> n(0, 1);
    for (int d = 0; d < cfg.latent_dim; ++d) {
        CHECK(code.mean[static_cast<std::size_t>(d)] == 0.0);
        CHECK(code.log_variance[static_cast<std::size_t>(d)] == 0.0);
        CHECK(code.sample[static_cast<std::size_t>(d)] == n(noise_copy));
    }
    const ModelOutput out = model.decode(std::vector<double>(4, 0.0));
    for (double v : out.image.pixels()) CHECK(v == 0.0);
    for (double v : out.type_logits) CHECK(v == 0.0);
}

TEST_CASE("sampling and determinism") {
    const ModelConfig cfg = ModelConfig::miniature();
    const Cvae model(cfg, 12);
    std::mt19937_64 rng(4);
    const auto img = random_image<HsvImage>(8, 8, rng);
    const auto tv = encode_type_vector({"Rock", "Steel"});
    const auto plain = model.encode(img, tv);
    CHECK(plain.sample == plain.mean);
    std::mt19937_64 a(1), b(1);
    CHECK(model.encode(img, tv, &a).sample == model.encode(img, tv, &b).sample);
    CHECK(Cvae(cfg, 12).params() == model.params());
    CHECK_FALSE(Cvae(cfg, 13).params() == model.params());

    const Batch batch = random_batch(cfg, 2, 5);
    const Matrix zero = Matrix::Zero(2, cfg.latent_dim);
    const auto s = model.forward(batch, zero);
    CHECK(s.z == s.mean);
}

TEST_CASE("decoded images stay in [0,1] for both activations") {
    for (auto act : {OutputActivation::sigmoid, OutputActivation::relu_clamp}) {
        ModelConfig cfg = ModelConfig::miniature();
        cfg.output_activation = act;
        const Cvae model(cfg, 3);
        for (int k = 0; k < 5; ++k) {
            std::vector<double> z(4);
            std::mt19937_64 rng(static_cast<std::uint64_t>(k));
            std::normal_distribution<double> n(0, 10);
            for (auto& v : z) v = n(rng);
            const auto out = model.decode(z);
            CHECK(in_unit_range(out.image));
            CHECK(out.image_logits.size() == 192);
            CHECK(out.type_logits.size() == 18);
        }
    }
}

TEST_CASE("non-finite activations fail fast") {
    const Cvae model(ModelConfig::miniature(), 1);
    std::vector<double> z(4, 0.0);
    z[2] = std::nan("");
    CHECK_THROWS_AS(model.decode(z), NumericalError);
    HsvImage img(8, 8, 0.5);
    img.at(1, 1, 1) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(model.encode(img, encode_type_vector({"Fire"})), NumericalError);
}

TEST_CASE("gradient accumulation over micro-batches equals the full batch") {
    const ModelConfig cfg = ModelConfig::miniature();
    const Cvae model(cfg, 2);
    const Batch b = random_batch(cfg, 4, 9);
    const Matrix eps = gaussian_matrix(4, cfg.latent_dim, 1);
    ParameterSet full = model.params().zeros_like(), parts = model.params().zeros_like();
    model.loss_and_gradient(b, eps, full);
    for (int half = 0; half < 2; ++half) {
        Batch h{b.images.middleRows(half * 2, 2), b.types.middleRows(half * 2, 2)};
        model.loss_and_gradient(h, eps.middleRows(half * 2, 2), parts, 0.5);
    }
    for (std::size_t i = 0; i < full.size(); ++i)
        CHECK(parts.values()[i] == doctest::Approx(full.values()[i]).epsilon(1e-9).scale(1e-9));
}

TEST_CASE("analytic gradient matches finite differences on a sample of parameters") {
    const ModelConfig cfg = ModelConfig::miniature();
    Cvae model(cfg, 21);
    const Batch b = random_batch(cfg, 2, 4);
    const Matrix eps = gaussian_matrix(2, cfg.latent_dim, 5);
    ParameterSet g = model.params().zeros_like();
    model.loss_and_gradient(b, eps, g);
    auto p = model.params().values();
    int ok = 0, total = 0;
    for (std::size_t i = 0; i < p.size(); i += 7) {
        const double saved = p[i];
        p[i] = saved + 1e-4;
        const double up = compute_loss(cfg, b, model.forward(b, eps)).total;
        p[i] = saved - 1e-4;
        const double down = compute_loss(cfg, b, model.forward(b, eps)).total;
        p[i] = saved;
        const double num = (up - down) / 2e-4, ana = g.values()[i];
        ok += std::abs(num - ana) / std::max({std::abs(num), std::abs(ana), 1e-6}) < 1e-4;
        ++total;
    }
    CHECK(ok >= 0.95 * total);
}

TEST_CASE("configs") {
    const auto full = ModelConfig::full();
    CHECK(full.flat_features() == 65536);
    CHECK(full.decoder_features() == 65554);
    CHECK(ParameterSet(full).tensor("dec.fc.w").cols == 65554);
    ModelConfig bad = ModelConfig::miniature();
    bad.image_size = 10;
    CHECK_THROWS(bad.validate());
    nlohmann::json j = ModelConfig::desk();
    CHECK(j.get<ModelConfig>() == ModelConfig::desk());
}

}
