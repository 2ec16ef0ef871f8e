#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace typeswap::cli {

namespace fs = std::filesystem;

struct SynthArgs {
    std::string what;  // catalog | faces | regional
    fs::path out;
    fs::path catalog;  // regional only: directory holding manifest.csv
    std::size_t count = 0;
    std::uint64_t seed = 7;
};

struct PrepareArgs {
    fs::path manifest;
    fs::path out;
    double test_fraction = 147.0 / 974.0;
    std::uint64_t seed = 0;
};

struct AssignArgs {
    fs::path manifest;
    fs::path faces;
    fs::path out_csv;
    fs::path audit_json;
};

struct TrainArgs {
    std::string plan = "transfer";
    double scale = 1.0;
    std::uint64_t seed = 0;
    fs::path out;
    fs::path cache;
    fs::path faces;
    fs::path face_types;
    fs::path init;
    std::string arch = "full";
    long max_steps = 0;
    int micro_batch = 32;
};

struct EvaluateArgs {
    std::string task = "recon";
    fs::path model;
    fs::path cache;
    fs::path manifest;
    fs::path regional;
    fs::path out;
    std::string tag;
    std::vector<std::string> types{"fire"};
    std::vector<std::string> ids;
    double magnitude = 20.0;
    bool all_backgrounds = false;
    std::size_t sheet_rows = 8;
};

struct ServeArgs {
    std::string host = "0.0.0.0";
    int port = 8080;
    fs::path checkpoint;
    fs::path catalog;
};

int run_synth(const SynthArgs& a);
int run_prepare(const PrepareArgs& a);
int run_assign(const AssignArgs& a);
int run_train(const TrainArgs& a);
int run_evaluate(const EvaluateArgs& a);
int run_serve(const ServeArgs& a);

}  // namespace typeswap::cli
