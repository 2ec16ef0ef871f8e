#include "typeswap/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "typeswap/checkpoint.hpp"
#include "typeswap/hash.hpp"

namespace typeswap {

void StageConfig::validate() const {
    if (epochs < 1) throw std::invalid_argument("stage epochs must be >= 1");
    if (batch_size < 1) throw std::invalid_argument("stage batch_size must be >= 1");
    if (!(learning_rate > 0.0)) throw std::invalid_argument("stage learning_rate must be positive");
}

TrainingPlan TrainingPlan::scaled(double factor) const {
    if (!(factor > 0.0)) throw std::invalid_argument("scale factor must be positive");
    TrainingPlan p = *this;
    for (auto& s : p.stages)
        s.epochs = std::max(1, static_cast<int>(std::ceil(s.epochs * factor - 1e-9)));
    return p;
}

void TrainingPlan::validate() const {
    if (stages.empty()) throw std::invalid_argument("plan has no stages");
    bool seen_pokemon = false;
    for (const auto& s : stages) {
        s.validate();
        if (s.dataset == StageDataset::pokemon) seen_pokemon = true;
        else if (seen_pokemon)
            throw std::invalid_argument("faces stages must precede pokemon stages");
    }
}

int TrainingPlan::total_epochs() const {
    int n = 0;
    for (const auto& s : stages) n += s.epochs;
    return n;
}

void to_json(nlohmann::json& j, const StageConfig& s) {
    j = {{"dataset", s.dataset == StageDataset::faces ? "faces" : "pokemon"},
         {"epochs", s.epochs},
         {"learning_rate", s.learning_rate},
         {"batch_size", s.batch_size},
         {"optimizer", {{"name", "adam"}, {"beta1", s.beta1}, {"beta2", s.beta2}, {"epsilon", s.epsilon}}},
         {"seed", s.seed}};
}

void from_json(const nlohmann::json& j, StageConfig& s) {
    const auto ds = j.at("dataset").get<std::string>();
    if (ds == "faces") s.dataset = StageDataset::faces;
    else if (ds == "pokemon") s.dataset = StageDataset::pokemon;
    else throw std::invalid_argument("unknown stage dataset: " + ds);
    s.epochs = j.at("epochs").get<int>();
    s.learning_rate = j.at("learning_rate").get<double>();
    s.batch_size = j.at("batch_size").get<int>();
    if (j.contains("optimizer")) {
        const auto& o = j.at("optimizer");
        s.beta1 = o.value("beta1", 0.9);
        s.beta2 = o.value("beta2", 0.999);
        s.epsilon = o.value("epsilon", 1e-7);
    }
    s.seed = j.value("seed", std::uint64_t{0});
}

void to_json(nlohmann::json& j, const TrainingPlan& p) {
    j = {{"name", p.name},
         {"initialization", p.initialization == Initialization::fresh ? "fresh" : "from_checkpoint"},
         {"stages", p.stages}};
}

void from_json(const nlohmann::json& j, TrainingPlan& p) {
    p.name = j.value("name", std::string{});
    const auto init = j.value("initialization", std::string("fresh"));
    if (init == "fresh") p.initialization = Initialization::fresh;
    else if (init == "from_checkpoint") p.initialization = Initialization::from_checkpoint;
    else throw std::invalid_argument("unknown initialization: " + init);
    p.stages = j.at("stages").get<std::vector<StageConfig>>();
}

namespace {

StageConfig stage(StageDataset d, int epochs, double lr, int batch, std::uint64_t seed) {
    StageConfig s;
    s.dataset = d;
    s.epochs = epochs;
    s.learning_rate = lr;
    s.batch_size = batch;
    s.seed = seed;
    return s;
}

}  // namespace

TrainingPlan transfer_plan(std::uint64_t seed) {
    TrainingPlan p;
    p.name = "transfer";
    p.initialization = Initialization::fresh;
    p.stages = {stage(StageDataset::faces, 10, 1e-4, 128, seed),
                stage(StageDataset::faces, 50, 1e-5, 128, seed),
                stage(StageDataset::pokemon, 100, 5e-5, 256, seed),
                stage(StageDataset::pokemon, 100, 2e-5, 256, seed),
                stage(StageDataset::pokemon, 100, 1e-5, 256, seed)};
    return p;
}

TrainingPlan baseline_plan(std::uint64_t seed) {
    TrainingPlan p;
    p.name = "baseline";
    p.initialization = Initialization::fresh;
    p.stages.push_back(stage(StageDataset::pokemon, 50, 1e-4, 128, seed));
    for (int i = 0; i < 10; ++i) p.stages.push_back(stage(StageDataset::pokemon, 50, 1e-5, 256, seed));
    return p;
}

TrainingPlan load_plan(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open plan: " + path.string());
    TrainingPlan p = nlohmann::json::parse(in).get<TrainingPlan>();
    p.validate();
    return p;
}

void save_plan(const std::filesystem::path& path, const TrainingPlan& plan) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write plan: " + path.string());
    out << nlohmann::json(plan).dump(2) << '\n';
}

std::vector<TrainingSample> samples_from(const std::vector<AugmentedInstance>& instances) {
    std::vector<TrainingSample> out;
    out.reserve(instances.size());
    for (const auto& i : instances) out.push_back({i.image, i.type_vector});
    return out;
}

nlohmann::json to_json(const EpochRecord& e) {
    return {{"stage", e.stage},     {"epoch", e.epoch},   {"steps", e.steps},
            {"mean_loss", e.mean_loss}, {"image_bce", e.image_bce}, {"type_bce", e.type_bce},
            {"kl", e.kl}};
}

std::string TrainingLog::to_jsonl() const {
    std::ostringstream out;
    for (const auto& e : epochs) {
        auto j = to_json(e);
        j["kind"] = "epoch";
        out << j.dump() << '\n';
    }
    for (const auto& s : stages)
        out << nlohmann::json{{"kind", "stage"},
                              {"stage", s.stage},
                              {"dataset", s.dataset},
                              {"wall_seconds", s.wall_seconds},
                              {"checkpoint", s.checkpoint},
                              {"seed", seed}}
                   .dump()
            << '\n';
    return out.str();
}

namespace {

Matrix draw_noise(int rows, int cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix eps(rows, cols);
    for (Eigen::Index i = 0; i < eps.size(); ++i) eps.data()[i] = normal(rng);
    return eps;
}

Batch gather_batch(std::span<const TrainingSample> data, std::span<const std::size_t> idx) {
    std::vector<HsvImage> imgs;
    std::vector<TypeVector> types;
    imgs.reserve(idx.size());
    types.reserve(idx.size());
    for (auto i : idx) {
        imgs.push_back(data[i].image);
        types.push_back(data[i].types);
    }
    return make_batch(imgs, types);
}

}  // namespace

std::vector<EpochRecord> train_stage(Cvae& model, std::span<const TrainingSample> data,
                                     const StageConfig& config, int stage_index,
                                     const TrainOptions& options) {
    config.validate();
    if (data.empty()) throw std::invalid_argument("train_stage: no training data");
    if (options.micro_batch < 1) throw std::invalid_argument("micro_batch must be >= 1");

    const std::size_t n = data.size();
    const std::size_t batch = static_cast<std::size_t>(config.batch_size);
    Adam adam(config.adam(), model.params().size());
    ParameterSet grad = model.params().zeros_like();
    std::vector<EpochRecord> records;
    long step = 0;

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        const std::uint64_t epoch_seed =
            mix_seed(mix_seed(config.seed, static_cast<std::uint64_t>(stage_index)),
                     static_cast<std::uint64_t>(epoch));
        std::mt19937_64 shuffle_rng(epoch_seed);
        std::shuffle(order.begin(), order.end(), shuffle_rng);

        EpochRecord rec;
        rec.stage = stage_index;
        rec.epoch = epoch;
        double seen = 0.0;
        for (std::size_t start = 0; start < n; start += batch) {
            const std::size_t end = std::min(n, start + batch);
            const double batch_n = static_cast<double>(end - start);
            grad.set_zero();
            LossTerms step_terms;
            for (std::size_t m = start; m < end; m += static_cast<std::size_t>(options.micro_batch)) {
                const std::size_t mend = std::min(end, m + static_cast<std::size_t>(options.micro_batch));
                const std::span<const std::size_t> idx(order.data() + m, mend - m);
                const Batch b = gather_batch(data, idx);
                const Matrix eps = draw_noise(b.size(), model.config().latent_dim,
                                              mix_seed(epoch_seed, static_cast<std::uint64_t>(m)));
                const double w = static_cast<double>(mend - m) / batch_n;
                LossTerms t;
                try {
                    t = model.loss_and_gradient(b, eps, grad, w);
                } catch (const NumericalError& e) {
                    throw TrainingDiverged(std::string("stage ") + std::to_string(stage_index) +
                                           " epoch " + std::to_string(epoch) + ": " + e.what());
                }
                step_terms.total += t.total * w;
                step_terms.image_bce += t.image_bce * w;
                step_terms.type_bce += t.type_bce * w;
                step_terms.kl += t.kl * w;
            }
            if (!std::isfinite(step_terms.total))
                throw TrainingDiverged("non-finite loss at stage " + std::to_string(stage_index) +
                                       " epoch " + std::to_string(epoch));
            adam.step(model.params(), grad);
            ++step;
            rec.mean_loss += step_terms.total * batch_n;
            rec.image_bce += step_terms.image_bce * batch_n;
            rec.type_bce += step_terms.type_bce * batch_n;
            rec.kl += step_terms.kl * batch_n;
            seen += batch_n;
            if (options.max_steps > 0 && step >= options.max_steps) break;
        }
        rec.mean_loss /= seen;
        rec.image_bce /= seen;
        rec.type_bce /= seen;
        rec.kl /= seen;
        rec.steps = step;
        records.push_back(rec);
        if (options.on_epoch) options.on_epoch(rec);
        if (options.max_steps > 0 && step >= options.max_steps) break;
    }
    return records;
}

TrainingLog run_plan(Cvae& model, const TrainingPlan& plan, const PlanData& data,
                     const std::filesystem::path& out_dir, const TrainOptions& options) {
    plan.validate();
    std::filesystem::create_directories(out_dir);
    TrainingLog log;
    log.seed = plan.stages.front().seed;
    std::string last_good;
    std::ofstream jsonl(out_dir / "log.jsonl");

    for (std::size_t k = 0; k < plan.stages.size(); ++k) {
        const auto& st = plan.stages[k];
        const auto samples = st.dataset == StageDataset::faces ? data.faces : data.pokemon;
        const auto t0 = std::chrono::steady_clock::now();
        TrainOptions opts = options;
        opts.on_epoch = [&](const EpochRecord& e) {
            auto j = to_json(e);
            j["kind"] = "epoch";
            jsonl << j.dump() << '\n' << std::flush;
            if (options.on_epoch) options.on_epoch(e);
        };
        std::vector<EpochRecord> recs;
        try {
            recs = train_stage(model, samples, st, static_cast<int>(k), opts);
        } catch (const TrainingDiverged& e) {
            throw TrainingDiverged(e.what(), last_good);
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const auto ckpt = out_dir / ("stage" + std::to_string(k) + ".ckpt");
        save_checkpoint(ckpt, model,
                        plan.name + "/stage" + std::to_string(k) + ":" +
                            (st.dataset == StageDataset::faces ? "faces" : "pokemon"));
        last_good = ckpt.string();
        log.epochs.insert(log.epochs.end(), recs.begin(), recs.end());
        StageSummary sum{static_cast<int>(k), st.dataset == StageDataset::faces ? "faces" : "pokemon", secs,
                         ckpt.string()};
        jsonl << nlohmann::json{{"kind", "stage"},        {"stage", sum.stage},
                                {"dataset", sum.dataset}, {"wall_seconds", sum.wall_seconds},
                                {"checkpoint", sum.checkpoint}, {"seed", st.seed}}
                     .dump()
              << '\n';
        log.stages.push_back(std::move(sum));
    }
    save_checkpoint(out_dir / "final.ckpt", model, plan.name + "/final");
    return log;
}

}  // namespace typeswap
