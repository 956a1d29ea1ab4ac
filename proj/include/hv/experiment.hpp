#ifndef HV_EXPERIMENT_HPP
#define HV_EXPERIMENT_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "hv/theory.hpp"
#include "hv/trainer.hpp"

namespace hv {

// Flat key = value configuration text: '#' comments, later keys win.
using KeyValueMap = std::map<std::string, std::string>;

KeyValueMap parse_key_values(std::istream& in);
void apply_override(KeyValueMap& kv, const std::string& assignment);  // "key=value"

// One sweep variant: the mean-loss baseline or a hypervolume xi schedule.
struct VariantSpec {
    std::string id;
    Aggregator aggregator = Aggregator::Hypervolume;
    std::vector<double> xi_schedule;
};

// Parses "mean" or a comma-separated xi ladder such as "-3,-2,-1,0,inf".
VariantSpec parse_variant(const std::string& text);

struct ExperimentConfig {
    RunConfig base;  // model + optimizer hyperparameters (seed unused here)
    std::string dataset = "rare";  // "blobs" | "rare" | "idx"
    int n_per_class = 600;
    std::uint64_t data_seed = 7;
    int subset_per_class = 0;  // 0 = keep everything (idx datasets)
    int mnist_val_count = 10000;
    std::string idx_train_images, idx_train_labels, idx_test_images, idx_test_labels;
    std::vector<std::uint64_t> seeds;
    std::vector<VariantSpec> variants;
    std::string out_dir;
    int workers = 1;
};

// Builds and validates a full configuration from parsed key-values.
ExperimentConfig experiment_from_kv(const KeyValueMap& kv);

// Loads (or generates) the dataset named by the configuration and fills in
// the model's input dimension and class count from its metadata.
SplitDataset load_dataset(const ExperimentConfig& config);

// Per-epoch records of every (variant x seed) cell plus per-cell summary.
struct SweepResult {
    struct Cell {
        std::string variant_id;
        std::uint64_t seed = 0;
        RunLog log;
    };
    std::vector<Cell> cells;
};

// Trains every variant x seed cell (up to `workers` in parallel; cells
// share only the read-only dataset) in a deterministic order.
SweepResult run_sweep(const ExperimentConfig& config, const SplitDataset& dataset);

// runs.csv: one row per (variant, seed, epoch).
void write_runs_csv(const SweepResult& sweep, std::ostream& out);

// summary.csv: per-variant median/mean/min of the best-validation test
// errors across seeds, and the relative reduction vs the mean baseline.
void write_summary_csv(const SweepResult& sweep, std::ostream& out);

// Full train-and-emit pipeline. Writes runs.csv and summary.csv under
// config.out_dir. Returns a process exit status (0 ok).
int run_experiment(const ExperimentConfig& config);

// Runs the certification battery, writing certificates.txt under out_dir
// and a per-certificate line to `report`. Returns 0, or 2 on any
// applicable-certificate failure.
int validate_theory(const TheoryBatteryOptions& options, const std::string& out_dir,
                    std::ostream& report);

// Gradient cross-checks (model backprop and the hypervolume gradient vs
// central differences). Returns 0, or 2 when any check exceeds tolerance.
int run_gradcheck(std::ostream& report, std::uint64_t seed = 17);

}  // namespace hv

#endif  // HV_EXPERIMENT_HPP
