#include <CLI11.hpp>

#include <exception>
#include <iostream>

#include "commands.hpp"

using namespace typeswap::cli;

int main(int argc, char** argv) {
    CLI::App app{"typeswap: type-conditioned sprite VAE"};
    app.require_subcommand(1);

    SynthArgs synth;
    auto* s = app.add_subcommand("synth", "Generate procedural catalog, face or regional data");
    s->add_option("what", synth.what, "catalog | faces | regional")
        ->required()
        ->check(CLI::IsMember({"catalog", "faces", "regional"}));
    s->add_option("--out", synth.out, "Output directory")->required();
    s->add_option("--catalog", synth.catalog, "Catalog directory (regional)");
    s->add_option("--count", synth.count, "Number of items")->required();
    s->add_option("--seed", synth.seed, "Generator seed (regional: the catalog's seed)");

    PrepareArgs prep;
    auto* p = app.add_subcommand("prepare", "Split a manifest and write the augmented cache");
    p->add_option("--manifest", prep.manifest)->required()->check(CLI::ExistingFile);
    p->add_option("--out", prep.out)->required();
    p->add_option("--test-fraction", prep.test_fraction)->check(CLI::Range(0.0, 1.0));
    p->add_option("--seed", prep.seed);

    AssignArgs assign;
    auto* a = app.add_subcommand("assign-types", "Label face images with types by stable matching");
    a->add_option("--manifest", assign.manifest)->required()->check(CLI::ExistingFile);
    a->add_option("--faces", assign.faces, "Face index.json")->required()->check(CLI::ExistingFile);
    a->add_option("--out", assign.out_csv, "image_id,assigned_type CSV")->required();
    a->add_option("--audit", assign.audit_json, "Audit JSON path");

    TrainArgs train;
    auto* t = app.add_subcommand("train", "Run a training plan");
    t->add_option("--plan", train.plan, "transfer | baseline | plan JSON file");
    t->add_option("--scale", train.scale, "Epoch scale factor")->check(CLI::PositiveNumber);
    t->add_option("--seed", train.seed);
    t->add_option("--out", train.out)->required();
    t->add_option("--cache", train.cache, "Augmented sprite cache");
    t->add_option("--faces", train.faces, "Face index.json");
    t->add_option("--face-types", train.face_types, "Face assignment CSV");
    t->add_option("--init", train.init, "Start from this checkpoint");
    t->add_option("--arch", train.arch)->check(CLI::IsMember({"full", "desk"}));
    t->add_option("--max-steps", train.max_steps, "Cap optimiser steps per stage (0 = none)");
    t->add_option("--micro-batch", train.micro_batch)->check(CLI::PositiveNumber);

    EvaluateArgs eval;
    auto* e = app.add_subcommand("evaluate", "Score a checkpoint");
    e->add_option("--task", eval.task)->check(CLI::IsMember({"recon", "swap", "regional"}));
    e->add_option("--model", eval.model)->required()->check(CLI::ExistingFile);
    e->add_option("--cache", eval.cache, "Augmented cache (recon)");
    e->add_option("--manifest", eval.manifest, "Catalog manifest (swap, regional)");
    e->add_option("--regional", eval.regional, "Regional CSV (regional)");
    e->add_option("--out", eval.out)->required();
    e->add_option("--tag", eval.tag, "Model tag (default: checkpoint provenance)");
    e->add_option("--types", eval.types, "Target types (swap)")->delimiter(',');
    e->add_option("--ids", eval.ids, "Sprite ids (swap)")->delimiter(',');
    e->add_option("--magnitude", eval.magnitude)->check(CLI::PositiveNumber);
    e->add_flag("--all-backgrounds", eval.all_backgrounds);
    e->add_option("--sheet-rows", eval.sheet_rows);

    ServeArgs serve;
    auto* v = app.add_subcommand("serve", "HTTP API");
    v->add_option("--host", serve.host);
    v->add_option("--port", serve.port);
    v->add_option("--checkpoint", serve.checkpoint)->check(CLI::ExistingFile);
    v->add_option("--catalog", serve.catalog, "Catalog manifest")->required()->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*s) return run_synth(synth);
        if (*p) return run_prepare(prep);
        if (*a) return run_assign(assign);
        if (*t) return run_train(train);
        if (*e) return run_evaluate(eval);
        if (*v) return run_serve(serve);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 1;
    }
    return 0;
}
