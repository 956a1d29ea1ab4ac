// Command-line front end: experiment orchestration, sweeps, theory
// certification and dataset utilities.
//
// Exit codes: 0 success, 1 configuration error, 2 certification failure,
// 3 I/O failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hv/data.hpp"
#include "hv/errors.hpp"
#include "hv/experiment.hpp"

namespace {

struct CommonOptions {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir;
    int workers = 0;  // 0 = take from config
    std::string seed_list;
};

std::string default_out_dir() {
    if (const char* env = std::getenv("HV_OUT_DIR")) return env;
    return "out";
}

hv::KeyValueMap collect_key_values(const CommonOptions& opts) {
    hv::KeyValueMap kv;
    if (!opts.config_path.empty()) {
        std::ifstream in(opts.config_path);
        if (!in) throw hv::IoError("cannot open config file " + opts.config_path);
        kv = hv::parse_key_values(in);
    }
    for (const std::string& assignment : opts.overrides) hv::apply_override(kv, assignment);
    if (!opts.seed_list.empty()) kv["seeds"] = opts.seed_list;
    if (opts.workers > 0) kv["workers"] = std::to_string(opts.workers);
    if (!opts.out_dir.empty())
        kv["out"] = opts.out_dir;
    else if (kv.find("out") == kv.end())
        kv["out"] = default_out_dir();
    return kv;
}

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--config", opts.config_path, "flat key = value configuration file");
    cmd->add_option("--set", opts.overrides, "override KEY=VALUE (repeatable)");
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--workers", opts.workers, "parallel sweep cells");
    cmd->add_option("--seed-list", opts.seed_list, "comma-separated seeds");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Single-solution hypervolume maximization: training runs, sweeps and "
                 "numerical theory certification"};
    app.require_subcommand(1);

    CommonOptions train_opts;
    auto* train_cmd = app.add_subcommand("train", "train the first variant on the first seed");
    add_common(train_cmd, train_opts);

    CommonOptions sweep_opts;
    auto* sweep_cmd = app.add_subcommand("sweep", "train every variant x seed cell");
    add_common(sweep_cmd, sweep_opts);

    CommonOptions theory_opts;
    hv::TheoryBatteryOptions battery;
    auto* theory_cmd =
        app.add_subcommand("validate-theory", "run the bound-certification battery");
    add_common(theory_cmd, theory_opts);
    theory_cmd->add_option("--nu", battery.nu, "target nu for the mean-to-hypervolume bound");
    theory_cmd->add_option("--grid", battery.grid, "delta samples per ladder rung");
    theory_cmd->add_option("--epsilon", battery.epsilon, "neighborhood radius");
    theory_cmd->add_option("--problems", battery.problems, "number of random toy problems");

    auto* gradcheck_cmd =
        app.add_subcommand("gradcheck", "cross-check analytic gradients against differences");
    std::uint64_t gradcheck_seed = 17;
    gradcheck_cmd->add_option("--seed", gradcheck_seed, "random seed");

    auto* gen_cmd = app.add_subcommand("gen-data", "write a synthetic dataset as IDX files");
    std::string gen_kind = "rare";
    int gen_n = 600;
    std::uint64_t gen_seed = 7;
    std::string gen_out = default_out_dir();
    gen_cmd->add_option("--kind", gen_kind, "blobs | rare");
    gen_cmd->add_option("--n", gen_n, "samples per class");
    gen_cmd->add_option("--seed", gen_seed, "generator seed");
    gen_cmd->add_option("--out", gen_out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (train_cmd->parsed() || sweep_cmd->parsed()) {
            const CommonOptions& opts = train_cmd->parsed() ? train_opts : sweep_opts;
            hv::KeyValueMap kv = collect_key_values(opts);
            hv::ExperimentConfig config = hv::experiment_from_kv(kv);
            if (train_cmd->parsed()) {
                config.variants.resize(1);
                config.seeds.resize(1);
            }
            return hv::run_experiment(config);
        }
        if (theory_cmd->parsed()) {
            const hv::KeyValueMap kv = collect_key_values(theory_opts);
            return hv::validate_theory(battery, kv.at("out"), std::cout);
        }
        if (gradcheck_cmd->parsed()) {
            return hv::run_gradcheck(std::cout, gradcheck_seed);
        }
        if (gen_cmd->parsed()) {
            const hv::SplitDataset data =
                hv::gen_synthetic(hv::synthetic_kind_from_name(gen_kind), gen_n, gen_seed);
            std::error_code ec;
            std::filesystem::create_directories(gen_out, ec);
            if (ec) throw hv::IoError("cannot create output directory " + gen_out);
            hv::write_idx(data.train, gen_out + "/train-images-idx3-ubyte",
                          gen_out + "/train-labels-idx1-ubyte");
            hv::write_idx(data.validation, gen_out + "/val-images-idx3-ubyte",
                          gen_out + "/val-labels-idx1-ubyte");
            hv::write_idx(data.test, gen_out + "/test-images-idx3-ubyte",
                          gen_out + "/test-labels-idx1-ubyte");
            std::cout << "wrote " << data.train.size() << "/" << data.validation.size() << "/"
                      << data.test.size() << " train/val/test samples to " << gen_out << "\n";
            return 0;
        }
    } catch (const hv::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const hv::IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 3;
    } catch (const hv::FormatError& e) {
        std::cerr << "format error: " << e.what() << "\n";
        return 3;
    } catch (const hv::MismatchError& e) {
        std::cerr << "format error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
