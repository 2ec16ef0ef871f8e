#include "commands.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "typeswap/checkpoint.hpp"
#include "typeswap/color.hpp"
#include "typeswap/dataset.hpp"
#include "typeswap/eval.hpp"
#include "typeswap/hash.hpp"
#include "typeswap/png_io.hpp"
#include "typeswap/service.hpp"
#include "typeswap/synth.hpp"
#include "typeswap/training.hpp"
#include "typeswap/typeassign.hpp"

namespace typeswap::cli {

namespace {

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

std::string tag_of(const Checkpoint& c, const std::string& override_tag) {
    if (!override_tag.empty()) return override_tag;
    const auto slash = c.provenance.find('/');
    return slash == std::string::npos ? c.provenance : c.provenance.substr(0, slash);
}

std::vector<TrainingSample> face_samples(const fs::path& index, const fs::path& labels_csv) {
    const auto faces = load_face_index(index);
    std::map<std::string, std::size_t> label;
    for (const auto& [id, t] : read_assignment_csv(labels_csv)) label[id] = t;
    std::vector<TrainingSample> out;
    out.reserve(faces.size());
    for (const auto& f : faces) {
        auto it = label.find(f.id);
        if (it == label.end()) throw std::runtime_error("face without assigned type: " + f.id);
        out.push_back({f.image, encode_type_vector({type_name(it->second)})});
    }
    return out;
}

TrainingPlan resolve_plan(const TrainArgs& a) {
    if (a.plan == "transfer") return transfer_plan(a.seed);
    if (a.plan == "baseline") return baseline_plan(a.seed);
    return load_plan(a.plan);
}

std::vector<RgbImage> hsv_row_to_rgb(const std::vector<HsvImage>& row) {
    std::vector<RgbImage> out;
    for (const auto& h : row) out.push_back(hsv_to_rgb(h));
    return out;
}

}  // namespace

int run_synth(const SynthArgs& a) {
    if (a.what == "catalog") {
        const auto records = synth::write_catalog(a.out, a.count, a.seed);
        std::cout << "wrote " << records.size() << " sprites to " << (a.out / "manifest.csv") << '\n';
    } else if (a.what == "faces") {
        synth::write_faces(a.out, a.count, a.seed);
        std::cout << "wrote " << a.count << " faces to " << (a.out / "index.json") << '\n';
    } else {
        if (a.catalog.empty()) throw std::invalid_argument("regional needs --catalog");
        const auto catalog = load_manifest(a.catalog / "manifest.csv");
        synth::write_regional(a.out, catalog, a.count, a.seed);
        std::cout << "wrote regional variants to " << (a.out / "regional.csv") << '\n';
    }
    return 0;
}

int run_prepare(const PrepareArgs& a) {
    const auto records = load_manifest(a.manifest);
    auto split = split_dataset(records, a.test_fraction, a.seed);
    std::vector<SpriteRecord> all = split.train;
    all.insert(all.end(), split.test.begin(), split.test.end());
    const auto instances = build_augmented_set(all, a.seed);
    write_augmented_cache(a.out, instances);

    nlohmann::json j{{"seed", a.seed}, {"test_fraction", a.test_fraction}};
    for (const auto& r : split.train) j["train"].push_back(r.id);
    for (const auto& r : split.test) j["test"].push_back(r.id);
    write_text(a.out / "split.json", j.dump(2) + "\n");

    const auto n_test = std::count_if(instances.begin(), instances.end(),
                                      [](const auto& i) { return i.split == Split::test; });
    std::cout << split.train.size() << " train / " << split.test.size() << " test creatures; "
              << instances.size() - static_cast<std::size_t>(n_test) << " train / " << n_test
              << " test instances\n";
    return 0;
}

int run_assign(const AssignArgs& a) {
    const auto catalog = load_manifest(a.manifest);
    const auto faces = load_face_index(a.faces);
    const FaceLabels labels = assign_face_types(catalog, faces);
    write_assignment_csv(a.out_csv, labels);
    const auto audit = labels.audit.to_json();
    if (!a.audit_json.empty()) write_text(a.audit_json, audit.dump(2) + "\n");
    std::cout << "assigned " << labels.image_ids.size() << " faces\n";
    return 0;
}

int run_train(const TrainArgs& a) {
    TrainingPlan plan = resolve_plan(a);
    if (a.scale != 1.0) plan = plan.scaled(a.scale);
    plan.validate();

    const ModelConfig config = a.arch == "desk" ? ModelConfig::desk() : ModelConfig::full();
    Cvae model = a.init.empty() ? Cvae(config, mix_seed(a.seed, 0x1a17ULL))
                                : load_checkpoint(a.init, config).model();

    const bool need_faces = std::any_of(plan.stages.begin(), plan.stages.end(),
                                        [](const auto& s) { return s.dataset == StageDataset::faces; });
    const bool need_sprites = std::any_of(plan.stages.begin(), plan.stages.end(),
                                          [](const auto& s) { return s.dataset == StageDataset::pokemon; });

    std::vector<TrainingSample> faces, sprites;
    if (need_faces) {
        if (a.faces.empty() || a.face_types.empty())
            throw std::invalid_argument("plan has faces stages: pass --faces and --face-types");
        faces = face_samples(a.faces, a.face_types);
    }
    if (need_sprites) {
        if (a.cache.empty()) throw std::invalid_argument("plan has sprite stages: pass --cache");
        auto instances = read_augmented_cache(a.cache);
        std::erase_if(instances, [](const auto& i) { return i.split != Split::train; });
        sprites = samples_from(instances);
    }

    fs::create_directories(a.out);
    save_plan(a.out / "plan.json", plan);
    TrainOptions opts;
    opts.max_steps = a.max_steps;
    opts.micro_batch = a.micro_batch;
    opts.on_epoch = [](const EpochRecord& e) {
        std::cout << "stage " << e.stage << " epoch " << e.epoch << " loss " << e.mean_loss << '\n';
    };
    try {
        run_plan(model, plan, {faces, sprites}, a.out, opts);
    } catch (const TrainingDiverged& e) {
        std::cerr << "diverged: " << e.what() << "; last good checkpoint: "
                  << (e.last_good_checkpoint().empty() ? "(none)" : e.last_good_checkpoint()) << '\n';
        return 2;
    }
    std::cout << "final checkpoint " << (a.out / "final.ckpt") << '\n';
    return 0;
}

int run_evaluate(const EvaluateArgs& a) {
    const Checkpoint ckpt = load_checkpoint(a.model);
    const Cvae model = ckpt.model();
    if (model.config().image_size != kSpriteSize)
        throw std::invalid_argument("evaluation needs a 32x32 model");
    const std::string tag = tag_of(ckpt, a.tag);
    fs::create_directories(a.out);

    if (a.task == "recon") {
        if (a.cache.empty()) throw std::invalid_argument("recon needs --cache");
        const auto instances = read_augmented_cache(a.cache);
        const EvalReport report = reconstruction_report(model, instances, tag, a.all_backgrounds);
        write_text(a.out / "recon.json", report.to_json().dump(2) + "\n");
        write_text(a.out / "recon_tables.txt", "MSE\n" + render_quality_table({report}, "mse") + "\nSSIM\n" +
                                                   render_quality_table({report}, "ssim"));
        std::vector<std::vector<RgbImage>> rows;
        for (const auto& inst : instances) {
            if (rows.size() >= a.sheet_rows) break;
            if (inst.background != Background::black || inst.flipped) continue;
            rows.push_back({hsv_to_rgb(inst.image), hsv_to_rgb(reconstruct(model, inst.image, inst.type_vector))});
        }
        write_png(a.out / "recon_sheet.png", contact_sheet(rows));
        std::cout << render_quality_table({report}, "mse");
        return 0;
    }

    if (a.manifest.empty()) throw std::invalid_argument(a.task + " needs --manifest");
    const auto catalog = load_manifest(a.manifest);

    if (a.task == "swap") {
        std::vector<std::string> types;
        for (const auto& t : a.types) types.emplace_back(type_name(require_type_index(t)));
        std::vector<const SpriteRecord*> chosen;
        for (const auto& r : catalog) {
            if (!a.ids.empty() && std::find(a.ids.begin(), a.ids.end(), r.id) == a.ids.end()) continue;
            chosen.push_back(&r);
            if (a.ids.empty() && chosen.size() >= a.sheet_rows) break;
        }
        nlohmann::json j{{"model", tag}, {"types", types}, {"magnitude", a.magnitude}};
        std::vector<std::vector<RgbImage>> rows;
        for (const auto* r : chosen) {
            const HsvImage input = prepare_for_eval(r->image, 0, r->id);
            const HsvImage recon = reconstruct(model, input, r->type_vector());
            const HsvImage swapped = type_swap(model, input, types, a.magnitude);
            const RgbImage rgb_in = hsv_to_rgb(input), rgb_out = hsv_to_rgb(swapped);
            rows.push_back({rgb_in, hsv_to_rgb(recon), rgb_out});
            j["sprites"].push_back({{"id", r->id},
                                    {"original_types", r->types},
                                    {"mse_vs_input", mse_rgb(rgb_in, rgb_out)},
                                    {"ssim_vs_input", ssim_yuv(rgb_in, rgb_out)}});
        }
        write_text(a.out / "swap.json", j.dump(2) + "\n");
        write_png(a.out / "swap_sheet.png", contact_sheet(rows));
        std::cout << "swapped " << chosen.size() << " sprites to " << types.front()
                  << (types.size() > 1 ? "/" + types[1] : "") << '\n';
        return 0;
    }

    if (a.regional.empty()) throw std::invalid_argument("regional needs --regional");
    const auto pairs = load_regional_pairs(a.regional, catalog);
    const EvalReport report = original_to_regional_report(model, pairs, tag, a.magnitude);
    const EvalReport own = original_to_regional_report(model, pairs, tag + "/own-types", a.magnitude, true);
    write_text(a.out / "regional.json",
               nlohmann::json{{"variant_types", report.to_json()}, {"own_types", own.to_json()}}.dump(2) + "\n");
    write_text(a.out / "regional_table.txt", render_regional_table({report, own}));
    std::vector<std::vector<RgbImage>> rows;
    for (const auto& p : pairs) {
        if (rows.size() >= a.sheet_rows) break;
        const HsvImage input = prepare_for_eval(p.original.image, 0, p.original.id);
        const HsvImage target = prepare_for_eval(p.variant_image, 0, p.variant_id);
        rows.push_back(hsv_row_to_rgb({input, type_swap(model, input, p.variant_types, a.magnitude), target}));
    }
    write_png(a.out / "regional_sheet.png", contact_sheet(rows));
    std::cout << render_regional_table({report, own});
    return 0;
}

int run_serve(const ServeArgs& a) {
    auto catalog = load_manifest(a.catalog);
    std::optional<Checkpoint> ckpt;
    std::string hash;
    if (!a.checkpoint.empty()) {
        ckpt = load_checkpoint(a.checkpoint);
        hash = checkpoint_hash(a.checkpoint);
    }
    const SpriteService service(std::move(catalog), std::move(ckpt), hash);
    std::cout << "listening on " << a.host << ':' << a.port << '\n';
    serve(service, a.host, a.port);
    return 0;
}

}  // namespace typeswap::cli
