// Command-line front end: run the two design procedures from a JSON config,
// design directly from stored data batches, re-verify a stored report, or
// reproduce the canned benchmark studies. Exit code 0 iff every requested
// certification passed.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ddc/batching.hpp"
#include "ddc/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json load_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    json j;
    in >> j;
    return j;
}

void write_json(const json& j, const fs::path& path) {
    fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

void maybe_dump(const json& j, const std::string& out_dir, const std::string& name) {
    if (out_dir.empty()) return;
    fs::create_directories(out_dir);
    write_json(j, fs::path(out_dir) / name);
}

ddc::ExperimentConfig load_config(const std::string& path, bool has_seed, std::uint64_t seed,
                                  bool has_delta, double delta) {
    ddc::ExperimentConfig config = ddc::ExperimentConfig::from_json(load_json(path));
    if (has_seed) {
        config.seed = seed;
        config.x0.reset();   // an explicit seed overrides a stored x0
    }
    if (has_delta) config.delta = delta;
    return config;
}

int finish_design(const ddc::DesignReport& report, const std::string& out_dir,
                  const std::string& name, bool require_certified) {
    std::cout << report.summary();
    maybe_dump(report.to_json(), out_dir, name);
    if (!report.stage_error.empty()) return 1;
    if (report.solver_status != ddc::SolveStatus::Feasible) return 1;
    if (require_certified && !report.certified()) return 1;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Data-driven stabilization via filtered non-minimal realizations"};
    app.require_subcommand(1);

    std::string config_path, batch_dir, report_path, out_dir;
    std::uint64_t seed = 0;
    double delta = 1e-3;
    bool has_seed = false, has_delta = false;
    std::string which = "both";
    int sweep_seeds = 100;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--out", out_dir, "directory for JSON reports");
        cmd->add_option("--seed", seed, "override the config seed (redraws x0)")
            ->each([&](const std::string&) { has_seed = true; });
        cmd->add_option("--delta", delta, "override the LMI decay margin")
            ->each([&](const std::string&) { has_delta = true; });
    };

    auto* design_state = app.add_subcommand(
        "design-state", "state-feedback design from a JSON experiment config");
    design_state->add_option("config", config_path, "experiment config JSON")->required();
    add_common(design_state);

    auto* design_output = app.add_subcommand(
        "design-output", "output-feedback design from a JSON experiment config");
    design_output->add_option("config", config_path, "experiment config JSON")->required();
    add_common(design_output);

    auto* from_batch = app.add_subcommand(
        "design-from-batch", "design from stored data batches (no simulator)");
    from_batch->add_option("batch-dir", batch_dir, "directory with batch CSVs + meta.json")
        ->required();
    from_batch->add_option("--out", out_dir, "directory for JSON reports");
    from_batch->add_option("--delta", delta, "LMI decay margin")
        ->each([&](const std::string&) { has_delta = true; });

    auto* verify = app.add_subcommand("verify", "re-certify a stored design report");
    verify->add_option("report", report_path, "design report JSON")->required();
    verify->add_option("--out", out_dir, "directory for JSON reports");

    auto* repro = app.add_subcommand("reproduce-paper", "run the canned benchmark studies");
    repro->add_option("--which", which, "state | output | both")
        ->check(CLI::IsMember({"state", "output", "both"}));
    repro->add_option("--seeds", sweep_seeds, "number of random initial conditions per sweep")
        ->check(CLI::PositiveNumber);
    repro->add_option("--out", out_dir, "directory for JSON reports");

    CLI11_PARSE(app, argc, argv);

    try {
        if (design_state->parsed()) {
            const auto config = load_config(config_path, has_seed, seed, has_delta, delta);
            return finish_design(ddc::run_algorithm1(config), out_dir, "design_state.json", true);
        }
        if (design_output->parsed()) {
            const auto config = load_config(config_path, has_seed, seed, has_delta, delta);
            return finish_design(ddc::run_algorithm2(config), out_dir, "design_output.json", true);
        }
        if (from_batch->parsed()) {
            const std::string kind = ddc::batch_kind(batch_dir);
            ddc::DesignReport report;
            if (kind == "state") {
                report = ddc::design_from_state_batch(ddc::load_state_batch(batch_dir), delta);
            } else {
                report = ddc::design_from_output_batch(ddc::load_output_batch(batch_dir), delta);
            }
            // no ground truth here: success means a feasible, exciting design
            return finish_design(report, out_dir, "design_from_batch.json", false);
        }
        if (verify->parsed()) {
            const json stored = load_json(report_path);
            const ddc::VerifyResult result = ddc::verify_report(stored);
            const bool ok = result.certification == ddc::Certification::Certified;
            std::cout << "certification : " << (ok ? "certified" : "failed") << '\n'
                      << "abscissa      : " << result.abscissa << '\n';
            json j{{"certification", ok ? "certified" : "failed"},
                   {"abscissa", result.abscissa}};
            maybe_dump(j, out_dir, "verify.json");
            return ok ? 0 : 1;
        }
        if (repro->parsed()) {
            ddc::PaperCase which_case = ddc::PaperCase::Both;
            if (which == "state") which_case = ddc::PaperCase::State;
            if (which == "output") which_case = ddc::PaperCase::Output;
            const ddc::PaperReproduction bundle = ddc::reproduce_paper(which_case, sweep_seeds);
            std::cout << bundle.summary();
            maybe_dump(bundle.to_json(), out_dir, "reproduce.json");
            return bundle.all_passed() ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
