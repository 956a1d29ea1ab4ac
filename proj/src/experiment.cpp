#include "hv/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <mutex>
#include <ostream>
#include <span>
#include <sstream>
#include <thread>
#include <type_traits>

#include "hv/csv.hpp"
#include "hv/errors.hpp"
#include "hv/rng.hpp"

namespace hv {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    return parts;
}

double parse_double(const std::string& raw, const std::string& what) {
    const std::string s = trim(raw);
    if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("cannot parse " + what + ": '" + raw + "'");
    }
}

long parse_int(const std::string& raw, const std::string& what) {
    const std::string s = trim(raw);
    try {
        std::size_t pos = 0;
        const long v = std::stol(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("cannot parse " + what + ": '" + raw + "'");
    }
}

template <typename T>
void set_if(const KeyValueMap& kv, const std::string& key, T& out) {
    const auto it = kv.find(key);
    if (it == kv.end()) return;
    if constexpr (std::is_same_v<T, std::string>) {
        out = trim(it->second);
    } else if constexpr (std::is_floating_point_v<T>) {
        out = parse_double(it->second, key);
    } else {
        out = static_cast<T>(parse_int(it->second, key));
    }
}

double relative_error(std::span<const double> got, std::span<const double> want) {
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < got.size(); ++k) {
        const double d = got[k] - want[k];
        num += d * d;
        den += want[k] * want[k];
    }
    num = std::sqrt(num);
    if (num <= 1e-12) return 0.0;
    return num / std::max(std::sqrt(den), 1e-10);
}

}  // namespace

KeyValueMap parse_key_values(std::istream& in) {
    KeyValueMap kv;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(body.substr(0, eq));
        if (key.empty())
            throw ConfigError("line " + std::to_string(line_no) + ": empty key");
        kv[key] = trim(body.substr(eq + 1));
    }
    return kv;
}

void apply_override(KeyValueMap& kv, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override must look like key=value: '" + assignment + "'");
    const std::string key = trim(assignment.substr(0, eq));
    if (key.empty()) throw ConfigError("override has an empty key: '" + assignment + "'");
    kv[key] = trim(assignment.substr(eq + 1));
}

VariantSpec parse_variant(const std::string& text) {
    const std::string body = trim(text);
    if (body.empty()) throw ConfigError("empty variant");
    VariantSpec v;
    if (body == "mean") {
        v.id = "mean";
        v.aggregator = Aggregator::Mean;
        v.xi_schedule = {std::numeric_limits<double>::infinity()};
        return v;
    }
    v.aggregator = Aggregator::Hypervolume;
    std::string id = "xi";
    for (const std::string& part : split(body, ',')) {
        const double xi = parse_double(part, "xi schedule entry");
        v.xi_schedule.push_back(xi);
        char tag[32];
        if (xi == std::numeric_limits<double>::infinity())
            std::snprintf(tag, sizeof tag, "_inf");
        else
            std::snprintf(tag, sizeof tag, "_%g", xi);
        id += tag;
    }
    v.id = id;
    return v;
}

ExperimentConfig experiment_from_kv(const KeyValueMap& kv) {
    ExperimentConfig c;

    std::string model = "logistic";
    set_if(kv, "model", model);
    if (model == "logistic") {
        c.base.model.kind = ModelKind::Logistic;
    } else if (model == "mlp") {
        c.base.model.kind = ModelKind::Mlp;
        c.base.model.hidden_dim = 32;
    } else {
        throw ConfigError("unknown model: " + model);
    }
    set_if(kv, "hidden_dim", c.base.model.hidden_dim);
    set_if(kv, "dropout", c.base.model.dropout_prob);

    set_if(kv, "batch_size", c.base.batch_size);
    set_if(kv, "lr", c.base.base_lr);
    set_if(kv, "momentum", c.base.momentum);
    set_if(kv, "patience", c.base.patience);
    set_if(kv, "lr_decay", c.base.lr_decay);
    set_if(kv, "lr_floor", c.base.lr_floor);
    set_if(kv, "max_epochs", c.base.max_epochs);

    set_if(kv, "dataset", c.dataset);
    set_if(kv, "n_per_class", c.n_per_class);
    set_if(kv, "data_seed", c.data_seed);
    set_if(kv, "subset_per_class", c.subset_per_class);
    set_if(kv, "mnist_val_count", c.mnist_val_count);
    set_if(kv, "idx_train_images", c.idx_train_images);
    set_if(kv, "idx_train_labels", c.idx_train_labels);
    set_if(kv, "idx_test_images", c.idx_test_images);
    set_if(kv, "idx_test_labels", c.idx_test_labels);

    if (const auto it = kv.find("seeds"); it != kv.end()) {
        c.seeds.clear();
        for (const std::string& part : split(it->second, ',')) {
            if (trim(part).empty()) continue;
            c.seeds.push_back(static_cast<std::uint64_t>(parse_int(part, "seed")));
        }
    }
    if (c.seeds.empty()) throw ConfigError("at least one seed is required");

    if (const auto it = kv.find("variants"); it != kv.end()) {
        c.variants.clear();
        for (const std::string& part : split(it->second, '|'))
            c.variants.push_back(parse_variant(part));
    }
    if (c.variants.empty()) throw ConfigError("at least one variant is required");

    set_if(kv, "out", c.out_dir);
    set_if(kv, "workers", c.workers);
    if (c.workers < 1) throw ConfigError("workers must be >= 1");

    // Every variant must produce a valid schedule under these
    // hyperparameters; make() throws ConfigError otherwise.
    for (const auto& v : c.variants) {
        (void)ScheduleState::make(v.xi_schedule, c.base.base_lr, c.base.lr_floor,
                                  c.base.lr_decay, c.base.patience, c.base.max_epochs);
    }
    return c;
}

SplitDataset load_dataset(const ExperimentConfig& config) {
    SplitDataset data = [&] {
        if (config.dataset == "idx") {
            if (config.idx_train_images.empty() || config.idx_train_labels.empty() ||
                config.idx_test_images.empty() || config.idx_test_labels.empty())
                throw ConfigError("idx dataset needs idx_train_images/idx_train_labels/"
                                  "idx_test_images/idx_test_labels");
            SplitDataset d = load_mnist_split(config.idx_train_images, config.idx_train_labels,
                                              config.idx_test_images, config.idx_test_labels,
                                              config.mnist_val_count);
            if (config.subset_per_class > 0)
                d.train = subset_per_class(d.train, config.subset_per_class, config.data_seed);
            return d;
        }
        return gen_synthetic(synthetic_kind_from_name(config.dataset), config.n_per_class,
                             config.data_seed);
    }();
    return data;
}

SweepResult run_sweep(const ExperimentConfig& config, const SplitDataset& dataset) {
    std::vector<std::pair<std::size_t, std::uint64_t>> cells;  // (variant index, seed)
    for (std::size_t v = 0; v < config.variants.size(); ++v)
        for (std::uint64_t seed : config.seeds) cells.emplace_back(v, seed);

    SweepResult result;
    result.cells.resize(cells.size());

    RunConfig base = config.base;
    base.model.input_dim = dataset.meta.feature_dim;
    base.model.num_classes = dataset.meta.num_classes;

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::string failure;
    std::mutex failure_mutex;

    const auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size() || failed.load()) return;
            const auto& [vi, seed] = cells[i];
            try {
                RunConfig run = base;
                run.aggregator = config.variants[vi].aggregator;
                run.xi_schedule = config.variants[vi].xi_schedule;
                run.seed = seed;
                result.cells[i] = {config.variants[vi].id, seed, train(run, dataset)};
            } catch (const std::exception& e) {
                const std::lock_guard<std::mutex> lock(failure_mutex);
                failure = e.what();
                failed.store(true);
                return;
            }
        }
    };

    const std::size_t n_workers =
        std::min<std::size_t>(std::max(config.workers, 1), cells.size());
    if (n_workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (failed.load()) throw IoError("sweep cell failed: " + failure);
    return result;
}

void write_runs_csv(const SweepResult& sweep, std::ostream& out) {
    out << "variant_id,seed,epoch,xi,lr,mu_batch_mean,train_mean_loss,train_max_loss,"
           "val_error,test_error\n";
    for (const auto& cell : sweep.cells) {
        for (const EpochRecord& r : cell.log.epochs) {
            out << cell.variant_id << ',' << cell.seed << ',' << r.epoch << ','
                << format_g17(r.xi) << ',' << format_g17(r.learning_rate) << ','
                << format_g17(r.mu_batch_mean) << ',' << format_g17(r.train_mean_loss) << ','
                << format_g17(r.train_max_loss) << ',' << format_g17(r.val_error) << ','
                << format_g17(r.test_error) << '\n';
        }
    }
}

void write_summary_csv(const SweepResult& sweep, std::ostream& out) {
    struct VariantStats {
        std::string id;
        bool is_mean = false;
        std::vector<double> best_test_errors;
    };
    std::vector<VariantStats> stats;
    for (const auto& cell : sweep.cells) {
        auto it = std::find_if(stats.begin(), stats.end(),
                               [&](const VariantStats& s) { return s.id == cell.variant_id; });
        if (it == stats.end()) {
            stats.push_back({cell.variant_id, cell.variant_id == "mean", {}});
            it = stats.end() - 1;
        }
        it->best_test_errors.push_back(cell.log.test_error_at_best);
    }

    const auto median = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        const std::size_t n = v.size();
        return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    };
    const auto mean = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x;
        return s / static_cast<double>(v.size());
    };

    double mean_baseline = kNaN;
    for (const auto& s : stats)
        if (s.is_mean) mean_baseline = mean(s.best_test_errors);

    out << "variant_id,median_test_error,mean_test_error,min_test_error,"
           "rel_reduction_vs_mean\n";
    for (const auto& s : stats) {
        const double m = mean(s.best_test_errors);
        const double reduction =
            std::isnan(mean_baseline) ? kNaN : (mean_baseline - m) / mean_baseline;
        out << s.id << ',' << format_g17(median(s.best_test_errors)) << ',' << format_g17(m)
            << ',' << format_g17(*std::min_element(s.best_test_errors.begin(),
                                                   s.best_test_errors.end()))
            << ',' << format_g17(reduction) << '\n';
    }
}

int run_experiment(const ExperimentConfig& config) {
    const SplitDataset dataset = load_dataset(config);
    const SweepResult sweep = run_sweep(config, dataset);

    std::error_code ec;
    std::filesystem::create_directories(config.out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + config.out_dir);

    const auto write_file = [&](const std::string& name, auto&& writer) {
        const std::string path = config.out_dir + "/" + name;
        std::ofstream out(path);
        if (!out) throw IoError("cannot create " + path);
        writer(out);
        if (!out) throw IoError("write failed: " + path);
    };
    write_file("runs.csv", [&](std::ostream& o) { write_runs_csv(sweep, o); });
    write_file("summary.csv", [&](std::ostream& o) { write_summary_csv(sweep, o); });
    return 0;
}

int validate_theory(const TheoryBatteryOptions& options, const std::string& out_dir,
                    std::ostream& report) {
    const TheoryBatteryResult result = run_theory_battery(options);

    std::ostringstream body;
    for (const auto& cert : result.certificates) body << cert.to_line() << '\n';
    body << "weight_deviation_cases=" << options.deviation_cases
         << " worst_slack=" << format_g17(result.worst_weight_deviation_slack) << '\n';
    body << "limit_batches=" << options.limit_batches
         << " worst_deviation=" << format_g17(result.worst_limit_deviation) << '\n';
    body << "applicable=" << result.applicable << " failed=" << result.failed
         << " pass=" << (result.pass ? 1 : 0) << '\n';

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir);
    const std::string path = out_dir + "/certificates.txt";
    std::ofstream out(path);
    if (!out) throw IoError("cannot create " + path);
    out << body.str();
    if (!out) throw IoError("write failed: " + path);

    report << body.str();
    return result.pass ? 0 : 2;
}

int run_gradcheck(std::ostream& report, std::uint64_t seed) {
    Rng rng(seed);
    double worst_model = 0.0;
    const double fd_step = 1e-6;

    for (int trial = 0; trial < 30; ++trial) {
        ModelSpec spec;
        if (trial % 3 == 0) {
            spec.kind = ModelKind::Logistic;
        } else {
            spec.kind = ModelKind::Mlp;
            spec.hidden_dim = 3 + static_cast<int>(rng.below(5));
            if (trial % 3 == 2) spec.dropout_prob = 0.5;
        }
        spec.input_dim = 2 + static_cast<int>(rng.below(5));
        spec.num_classes = 2 + static_cast<int>(rng.below(3));

        const std::size_t n = 1 + rng.below(6);
        std::vector<double> features(n * spec.input_dim);
        for (double& f : features) f = rng.uniform(0.0, 1.0);
        std::vector<int> labels(n);
        for (int& y : labels) y = static_cast<int>(rng.below(spec.num_classes));
        const Batch batch(std::move(features), std::move(labels), spec.input_dim);

        ParameterVector params = init_params(spec, rng.next_u64());
        for (double& p : params.values) p += 0.1 * rng.normal();
        const std::optional<std::uint64_t> noise =
            spec.dropout_prob > 0.0 ? std::optional<std::uint64_t>(rng.next_u64())
                                    : std::nullopt;

        const GradientMatrix grads = per_sample_gradients(spec, params, batch, noise);
        for (std::size_t i = 0; i < batch.size(); ++i) {
            std::vector<std::size_t> one{i};
            const Batch single = batch.gather(one);
            const auto fd = finite_diff_gradient(
                [&](const ParameterVector& p) {
                    return per_sample_losses(spec, p, single, noise)[0];
                },
                params, fd_step);
            worst_model = std::max(worst_model, relative_error(grads.row(i), fd));
        }
    }

    double worst_hv = 0.0;
    for (int trial = 0; trial < 30; ++trial) {
        const ToyProblem problem = random_toy_problem(rng.next_u64());
        std::vector<double> theta(problem.dim());
        for (double& t : theta) t = rng.uniform(-1.5, 1.5);
        double max_loss = 0.0;
        for (std::size_t i = 0; i < problem.num_losses(); ++i)
            max_loss = std::max(max_loss, problem.loss(i, theta));
        const double mu = max_loss * rng.uniform(1.5, 3.0) + 1.0;

        const auto analytic = problem.hv_gradient(mu, theta);
        const auto fd = finite_diff_gradient(
            [&](const ParameterVector& p) { return problem.hypervolume(mu, p.values); },
            ParameterVector{theta}, fd_step);
        worst_hv = std::max(worst_hv, relative_error(analytic, fd));
    }

    report << "gradcheck model_max_rel_error=" << format_g17(worst_model)
           << " hv_max_rel_error=" << format_g17(worst_hv) << '\n';
    const bool ok = worst_model <= 1e-5 && worst_hv <= 1e-5;
    report << (ok ? "gradcheck pass" : "gradcheck FAIL") << '\n';
    return ok ? 0 : 2;
}

}  // namespace hv
