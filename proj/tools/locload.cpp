// locload — command-line front end for the locality-aware data-loading
// toolkit. Subcommands:
//
//   model      closed-form epoch-cost table across node counts
//   imbalance  Monte Carlo of per-step batch imbalance (box-plot data)
//   balance    greedy transfer schedule for a counts file
//   bench      concurrent loader throughput on a generated dataset
//   equiv      scheme-equivalence verdict on the toy objective
//   gen-data   synthetic file-per-sample dataset generator
//   simulate   epoch-cost curves with sampled imbalance, or a
//              balls-in-bins tail-bound check
//
// Every run is deterministic given (--config, --seed). CSV outputs start
// with a `# config:` comment naming the full parameter set.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "locload/balance.hpp"
#include "locload/equivalence.hpp"
#include "locload/model.hpp"
#include "locload/pipeline.hpp"
#include "locload/rng.hpp"
#include "locload/simulate.hpp"

using json = nlohmann::json;
using namespace locload;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitCheckFailed = 3;

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

// Output sink: --out path, or stdout when empty.
class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) {
                throw std::invalid_argument("cannot open output file: " + path);
            }
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

using KV = std::vector<std::pair<std::string, std::string>>;

void write_config_comment(std::ostream& os, const std::string& cmd, const KV& kv) {
    os << "# config: cmd=" << cmd;
    for (const auto& [k, v] : kv) {
        os << ' ' << k << '=' << v;
    }
    os << '\n';
}

std::string join(const std::vector<std::string>& parts, char sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

template <typename T>
std::string join_nums(const std::vector<T>& xs) {
    std::vector<std::string> parts;
    parts.reserve(xs.size());
    for (const T& x : xs) {
        parts.push_back(std::to_string(x));
    }
    return join(parts, ',');
}

// ---------------------------------------------------------------------------
// model

struct ModelOpts {
    ModelParams mp;
    std::vector<std::uint32_t> p_list;
    std::uint32_t p_max = 256;
};

int run_model(const ModelOpts& opts, std::uint64_t seed, const std::string& out_path) {
    (void)seed;
    std::vector<std::uint32_t> ps = opts.p_list;
    if (ps.empty()) {
        for (std::uint32_t p = 1; p <= opts.p_max; p *= 2) {
            ps.push_back(p);
        }
    }

    Output out(out_path);
    std::ostream& os = out.stream();
    write_config_comment(os, "model",
                         {{"d", fmt(opts.mp.d)},
                          {"v", fmt(opts.mp.v)},
                          {"r", fmt(opts.mp.r)},
                          {"rc", fmt(opts.mp.r_c)},
                          {"rb", fmt(opts.mp.r_b)},
                          {"u", fmt(opts.mp.u)},
                          {"alpha", fmt(opts.mp.alpha)},
                          {"beta", fmt(opts.mp.beta)},
                          {"p_list", join_nums(ps)}});
    os << "p,scheme,training_s,io_s,preprocess_s,true_cost_s\n";
    for (std::uint32_t p : ps) {
        ModelParams mp = opts.mp;
        mp.p = static_cast<double>(p);
        validate(mp);
        for (Scheme scheme : {Scheme::regular, Scheme::distcache, Scheme::locality}) {
            double io = 0;
            switch (scheme) {
                case Scheme::regular: io = io_time_regular(mp); break;
                case Scheme::distcache: io = io_time_distcache(mp); break;
                case Scheme::locality: io = io_time_locality(mp); break;
            }
            const CostBreakdown b = breakdown(mp, io);
            os << p << ',' << scheme_name(scheme) << ',' << fmt(b.training_s) << ','
               << fmt(b.sample_io_s) << ',' << fmt(b.preprocessing_s) << ','
               << fmt(b.true_cost_s) << '\n';
        }
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// imbalance

struct ImbalanceOpts {
    std::uint64_t d = 1'280'000;
    std::vector<std::uint32_t> p_list = {8, 16, 32, 64};
    std::vector<std::uint64_t> local_batch_list = {32, 64, 128};
    std::uint64_t steps = 500;
    double alpha = 1.0;
};

int run_imbalance(const ImbalanceOpts& opts, std::uint64_t seed, const std::string& out_path) {
    Output out(out_path);
    std::ostream& os = out.stream();
    write_config_comment(os, "imbalance",
                         {{"seed", std::to_string(seed)},
                          {"d", std::to_string(opts.d)},
                          {"p_list", join_nums(opts.p_list)},
                          {"local_batch_list", join_nums(opts.local_batch_list)},
                          {"steps", std::to_string(opts.steps)},
                          {"alpha", fmt(opts.alpha)}});
    os << "row_type,p,local_batch,step,beta,median,q1,q3,whisker_lo,whisker_hi\n";
    for (std::uint64_t lb : opts.local_batch_list) {
        for (std::uint32_t p : opts.p_list) {
            const ImbalanceStats stats =
                simulate_imbalance(opts.d, p, lb, opts.steps, derive_seed(seed, p, lb),
                                   opts.alpha);
            for (std::uint64_t step = 0; step < stats.steps; ++step) {
                os << "raw," << p << ',' << lb << ',' << step << ','
                   << fmt(stats.betas[step]) << ",,,,,\n";
            }
            const BoxSummary& s = stats.summary;
            os << "summary," << p << ',' << lb << ",,," << fmt(s.median) << ','
               << fmt(s.q1) << ',' << fmt(s.q3) << ',' << fmt(s.whisker_lo) << ','
               << fmt(s.whisker_hi) << '\n';
        }
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// balance

struct BalanceOpts {
    std::string counts_file;
    std::uint64_t self_check = 0;
};

ImbalanceVector read_counts(std::istream& in) {
    ImbalanceVector iv;
    std::int64_t value = 0;
    while (in >> value) {
        if (value < 0) {
            throw std::invalid_argument("counts must be non-negative");
        }
        iv.counts.push_back(value);
    }
    if (iv.counts.empty()) {
        throw std::invalid_argument("counts file holds no numbers");
    }
    iv.targets = targets(iv.total(), static_cast<std::uint32_t>(iv.counts.size()));
    return iv;
}

int run_balance_schedule(const BalanceOpts& opts, const std::string& out_path) {
    ImbalanceVector iv;
    if (opts.counts_file == "-") {
        iv = read_counts(std::cin);
    } else {
        std::ifstream in(opts.counts_file);
        if (!in) {
            throw std::invalid_argument("cannot open counts file: " + opts.counts_file);
        }
        iv = read_counts(in);
    }

    const TransferSchedule schedule = balance(iv);
    Output out(out_path);
    for (const Move& m : schedule.moves) {
        json row;
        row["sender"] = m.sender;
        row["receiver"] = m.receiver;
        row["count"] = m.count;
        out.stream() << row.dump() << '\n';
    }
    return kExitOk;
}

int run_balance_self_check(std::uint64_t instances, std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::uint64_t checked = 0;
    for (std::uint64_t i = 0; i < instances; ++i) {
        const std::uint32_t p = 1 + static_cast<std::uint32_t>(rng.bounded(64));
        const std::int64_t b = static_cast<std::int64_t>(rng.bounded(8 * p + 1));
        ImbalanceVector iv;
        iv.counts.assign(p, 0);
        for (std::int64_t k = 0; k < b; ++k) {
            ++iv.counts[rng.bounded(p)];
        }
        iv.targets = targets(b, p);

        const TransferSchedule schedule = balance(iv);
        std::vector<std::int64_t> net(p, 0);
        bool ok = schedule.moves.size() <= p - 1;
        for (const Move& m : schedule.moves) {
            ok = ok && m.count >= 1 && m.sender != m.receiver;
            net[m.sender] -= m.count;
            net[m.receiver] += m.count;
        }
        for (std::uint32_t j = 0; j < p; ++j) {
            ok = ok && net[j] == iv.targets[j] - iv.counts[j];
        }
        if (!ok) {
            std::cerr << "self-check failed on instance " << i << " (p=" << p << ")\n";
            return kExitCheckFailed;
        }
        ++checked;
    }
    std::cout << "self-check passed: " << checked << " instances\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// bench and gen-data

struct DataOpts {
    std::string root;
    std::uint64_t n = 2048;
    std::uint64_t sample_bytes = 1024;
};

struct BenchOpts {
    DataOpts data;
    std::vector<std::uint32_t> workers_list = {1};
    std::vector<std::uint32_t> threads_list = {1};
    std::uint32_t prefetch = 4;
    std::uint64_t batch = 64;
    std::string preprocess = "none";
    std::uint64_t preprocess_us = 0;
    std::string cache = "off";
    std::uint64_t cache_capacity = 0;
    std::uint64_t epochs = 1;
};

DatasetSpec to_spec(const DataOpts& opts) {
    DatasetSpec spec;
    spec.root = opts.root;
    spec.n = opts.n;
    spec.sample_bytes = opts.sample_bytes;
    return spec;
}

int run_gen_data(const DataOpts& opts, std::uint64_t seed) {
    const DatasetSpec spec = to_spec(opts);
    generate_dataset(spec, seed);
    std::cout << "generated " << spec.n << " samples of " << spec.sample_bytes
              << " bytes under " << spec.root << "\n";
    return kExitOk;
}

json report_to_json(const ThroughputReport& report) {
    json j;
    j["epoch"] = report.epoch;
    j["batches"] = report.batches;
    j["samples"] = report.samples;
    j["wall_s"] = report.wall_s;
    j["samples_per_second"] = report.samples_per_second;
    j["cache_hits"] = report.cache_hits;
    j["cache_misses"] = report.cache_misses;
    if (!report.batch_latency_s.empty()) {
        std::vector<double> lat = report.batch_latency_s;
        j["batch_latency_s"] = {{"p50", quantile(lat, 0.5)},
                                {"p95", quantile(lat, 0.95)},
                                {"max", quantile(lat, 1.0)}};
    }
    return j;
}

int run_bench(const BenchOpts& opts, std::uint64_t seed, const std::string& out_path) {
    const DatasetSpec spec = to_spec(opts.data);
    if (!std::filesystem::exists(sample_path(spec, 0))) {
        throw std::invalid_argument("dataset not found under " + spec.root.string() +
                                    "; run gen-data first");
    }

    LoaderConfig base;
    base.prefetch_depth = opts.prefetch;
    base.batch_size = opts.batch;
    if (opts.preprocess == "none") {
        base.preprocess.mode = PreprocessSpec::Mode::none;
    } else if (opts.preprocess == "spin") {
        base.preprocess.mode = PreprocessSpec::Mode::spin;
    } else if (opts.preprocess == "sleep") {
        base.preprocess.mode = PreprocessSpec::Mode::sleep;
    } else {
        throw std::invalid_argument("unknown preprocess mode: " + opts.preprocess);
    }
    base.preprocess.micros_per_sample = opts.preprocess_us;
    if (opts.cache == "off") {
        base.cache.mode = CacheSpec::Mode::off;
    } else if (opts.cache == "memory") {
        base.cache.mode = CacheSpec::Mode::memory;
    } else {
        throw std::invalid_argument("unknown cache mode: " + opts.cache);
    }
    base.cache.capacity_samples = opts.cache_capacity;

    json cells = json::array();
    for (std::uint32_t w : opts.workers_list) {
        for (std::uint32_t t : opts.threads_list) {
            LoaderConfig cfg = base;
            cfg.workers = w;
            cfg.intra_batch_parallelism = t;
            Loader loader(spec, cfg);
            json cell;
            cell["workers"] = w;
            cell["threads"] = t;
            cell["prefetch"] = cfg.prefetch_depth;
            cell["batch_size"] = cfg.batch_size;
            cell["preprocess"] = opts.preprocess;
            cell["preprocess_us"] = opts.preprocess_us;
            cell["cache"] = opts.cache;
            json reports = json::array();
            for (std::uint64_t e = 0; e < opts.epochs; ++e) {
                reports.push_back(report_to_json(loader.run_epoch(seed, e)));
            }
            cell["epochs"] = std::move(reports);
            cells.push_back(std::move(cell));
        }
    }

    Output out(out_path);
    out.stream() << cells.dump(2) << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------------------
// equiv

struct EquivOpts {
    std::vector<std::uint32_t> p_list = {1, 2, 3, 4, 8};
    std::vector<std::uint64_t> batch_list = {12, 64};
    std::uint64_t steps = 100;
    std::uint64_t seeds = 5;
    std::uint64_t d = 640;
    std::size_t dims = 8;
    double lr = 0.01;
    bool non_canonical = false;
    double tol = 1e-9;
    double oracle_tol = 1e-12;
};

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double out = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        out = std::max(out, std::abs(a[i] - b[i]));
    }
    return out;
}

int run_equiv(const EquivOpts& opts, std::uint64_t seed) {
    const Aggregation agg =
        opts.non_canonical ? Aggregation::learner_order : Aggregation::canonical;
    const ToyObjective obj = ToyObjective::synthesize(opts.d, opts.dims, derive_seed(seed, 1));

    bool all_ok = true;
    double worst_scheme_diff = 0;
    double worst_oracle_err = 0;

    for (std::uint64_t s = 0; s < opts.seeds; ++s) {
        const std::uint64_t run_seed = derive_seed(seed, 100 + s);
        for (std::uint32_t p : opts.p_list) {
            for (std::uint64_t b : opts.batch_list) {
                const TrainingRun loc = run_training(obj, SchemeKind::locality, p, b,
                                                     opts.steps, run_seed, opts.lr, agg);
                const TrainingRun bal = run_training(obj, SchemeKind::locality_balanced, p, b,
                                                     opts.steps, run_seed, opts.lr, agg);
                const bool reg_valid = b % p == 0;
                TrainingRun reg;
                if (reg_valid) {
                    reg = run_training(obj, SchemeKind::regular, p, b, opts.steps, run_seed,
                                       opts.lr, agg);
                }

                double diff = max_abs_diff(loc.final_weights, bal.final_weights);
                for (std::uint64_t t = 0; t < opts.steps; ++t) {
                    diff = std::max(diff,
                                    max_abs_diff(loc.step_gradients[t], bal.step_gradients[t]));
                }
                if (reg_valid) {
                    diff = std::max(diff, max_abs_diff(loc.final_weights, reg.final_weights));
                    for (std::uint64_t t = 0; t < opts.steps; ++t) {
                        diff = std::max(diff, max_abs_diff(loc.step_gradients[t],
                                                           reg.step_gradients[t]));
                    }
                }
                worst_scheme_diff = std::max(worst_scheme_diff, diff);

                // Replay against the single-pass oracle.
                std::vector<double> w(opts.dims, 0.0);
                const std::uint64_t spe = opts.d / b;
                for (std::uint64_t t = 0; t < opts.steps; ++t) {
                    const auto eb = batches(permute_epoch(run_seed, t / spe, opts.d), b);
                    const std::vector<double> oracle =
                        full_batch_gradient(obj, w, eb[t % spe]);
                    double num = 0, den = 0;
                    for (std::size_t k = 0; k < w.size(); ++k) {
                        const double e = oracle[k] - loc.step_gradients[t][k];
                        num += e * e;
                        den += oracle[k] * oracle[k];
                        w[k] -= opts.lr * loc.step_gradients[t][k];
                    }
                    worst_oracle_err =
                        std::max(worst_oracle_err, den == 0 ? std::sqrt(num)
                                                            : std::sqrt(num / den));
                }

                const bool ok = opts.non_canonical ? diff <= opts.tol : diff == 0.0;
                if (!ok) {
                    all_ok = false;
                }
                std::cout << (ok ? "ok  " : "FAIL") << " p=" << p << " b=" << b
                          << " seed_index=" << s
                          << (reg_valid ? "" : " (reg skipped: p does not divide b)")
                          << " max_diff=" << fmt(diff) << "\n";
            }
        }
    }
    if (worst_oracle_err > opts.oracle_tol) {
        all_ok = false;
    }

    std::cout << "aggregation: " << (opts.non_canonical ? "learner-order" : "canonical")
              << "\n";
    std::cout << "max scheme difference: " << fmt(worst_scheme_diff) << "\n";
    std::cout << "max oracle relative error: " << fmt(worst_oracle_err) << "\n";
    if (all_ok) {
        std::cout << (opts.non_canonical ? "verdict: equivalent within tolerance\n"
                                         : "verdict: identical\n");
        return kExitOk;
    }
    std::cout << "verdict: MISMATCH\n";
    return kExitCheckFailed;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOpts {
    std::string mode = "costs";
    std::string scheme = "all";
    std::vector<std::uint32_t> p_list = {1, 2, 4, 8, 16, 32, 64, 128, 256};
    std::uint64_t epochs = 1;
    std::uint64_t local_batch = 64;
    ModelParams mp;
    // balls mode
    std::uint64_t balls = 1107;
    std::uint32_t bins = 64;
    double alpha_param = 1.5;
    std::uint64_t trials = 10'000;
};

int run_simulate(const SimulateOpts& opts, std::uint64_t seed, const std::string& out_path) {
    Output out(out_path);
    std::ostream& os = out.stream();

    if (opts.mode == "balls") {
        const BallsBinsCheck check =
            balls_in_bins_check(opts.balls, opts.bins, opts.alpha_param, opts.trials, seed);
        write_config_comment(os, "simulate",
                             {{"mode", "balls"},
                              {"seed", std::to_string(seed)},
                              {"b", std::to_string(check.b)},
                              {"p", std::to_string(check.p)},
                              {"alpha_param", fmt(check.alpha_param)},
                              {"trials", std::to_string(check.trials)}});
        os << "b,p,alpha_param,k_alpha,trials,exceed_count,exceed_rate\n";
        os << check.b << ',' << check.p << ',' << fmt(check.alpha_param) << ','
           << fmt(check.k_alpha) << ',' << check.trials << ',' << check.exceed_count << ','
           << fmt(check.exceed_rate) << '\n';
        return kExitOk;
    }
    if (opts.mode != "costs") {
        throw std::invalid_argument("unknown simulate mode: " + opts.mode);
    }

    std::vector<Scheme> schemes;
    if (opts.scheme == "all") {
        schemes = {Scheme::regular, Scheme::distcache, Scheme::locality};
    } else {
        schemes = {scheme_from_name(opts.scheme)};
    }

    write_config_comment(os, "simulate",
                         {{"mode", "costs"},
                          {"seed", std::to_string(seed)},
                          {"scheme", opts.scheme},
                          {"p_list", join_nums(opts.p_list)},
                          {"epochs", std::to_string(opts.epochs)},
                          {"local_batch", std::to_string(opts.local_batch)},
                          {"d", fmt(opts.mp.d)},
                          {"v", fmt(opts.mp.v)},
                          {"r", fmt(opts.mp.r)},
                          {"rc", fmt(opts.mp.r_c)},
                          {"rb", fmt(opts.mp.r_b)},
                          {"u", fmt(opts.mp.u)},
                          {"alpha", fmt(opts.mp.alpha)}});
    os << "p,epoch,scheme,beta,training_s,io_s,preprocess_s,loading_s,waiting_s,total_s\n";
    for (Scheme scheme : schemes) {
        const auto rows = simulate_epoch_costs(opts.mp, opts.p_list, scheme, opts.epochs,
                                               opts.local_batch, seed);
        for (const EpochCostRow& row : rows) {
            os << row.p << ',' << row.epoch << ',' << scheme_name(row.scheme) << ','
               << fmt(row.beta) << ',' << fmt(row.training_s) << ',' << fmt(row.io_s) << ','
               << fmt(row.preprocess_s) << ',' << fmt(row.loading_s) << ','
               << fmt(row.waiting_s) << ',' << fmt(row.total_s) << '\n';
        }
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"locality-aware distributed data-loading toolkit"};
    app.fallthrough();
    app.set_config("--config", "", "flat key=value config file; command-line flags win");

    std::uint64_t seed = 42;
    std::string out_path;
    app.add_option("--seed", seed, "base seed for all randomized runs");
    app.add_option("--out", out_path, "output file (default: stdout)");
    app.require_subcommand(0, 1);

    // model
    ModelOpts model_opts;
    model_opts.mp.d = 1'280'000;
    model_opts.mp.v = 100;
    model_opts.mp.r = 800;
    model_opts.mp.r_c = 8000;
    model_opts.mp.r_b = 8000;
    model_opts.mp.u = 1000;
    model_opts.mp.alpha = 1.0;
    model_opts.mp.beta = 0.048;
    CLI::App* model_cmd =
        app.add_subcommand("model", "closed-form epoch-cost table (illustrative defaults)");
    model_cmd->add_option("--d", model_opts.mp.d, "dataset size in samples");
    model_cmd->add_option("--v", model_opts.mp.v, "per-node training rate, samples/s");
    model_cmd->add_option("--r", model_opts.mp.r, "storage I/O rate, samples/s");
    model_cmd->add_option("--rc", model_opts.mp.r_c, "remote-cache I/O rate, samples/s");
    model_cmd->add_option("--rb", model_opts.mp.r_b, "balancing I/O rate, samples/s");
    model_cmd->add_option("--u", model_opts.mp.u, "per-node preprocessing rate, samples/s");
    model_cmd->add_option("--alpha", model_opts.mp.alpha, "cached fraction of the dataset");
    model_cmd->add_option("--beta", model_opts.mp.beta, "assumed balancing traffic fraction");
    model_cmd->add_option("--p-list", model_opts.p_list, "explicit node counts")
        ->delimiter(',');
    model_cmd->add_option("--p-max", model_opts.p_max, "sweep powers of two up to this");

    // imbalance
    ImbalanceOpts imb_opts;
    CLI::App* imb_cmd =
        app.add_subcommand("imbalance", "per-step batch imbalance Monte Carlo (CSV)");
    imb_cmd->add_option("--d", imb_opts.d, "dataset size in samples");
    imb_cmd->add_option("--p-list", imb_opts.p_list, "node counts")->delimiter(',');
    imb_cmd->add_option("--local-batch-list", imb_opts.local_batch_list, "local batch sizes")
        ->delimiter(',');
    imb_cmd->add_option("--steps", imb_opts.steps, "steps per configuration");
    imb_cmd->add_option("--alpha", imb_opts.alpha, "cached fraction of the dataset");

    // balance
    BalanceOpts bal_opts;
    CLI::App* bal_cmd =
        app.add_subcommand("balance", "transfer schedule for a counts file (JSON lines)");
    bal_cmd->add_option("counts", bal_opts.counts_file,
                        "file of whitespace-separated counts, or - for stdin");
    bal_cmd->add_option("--self-check", bal_opts.self_check,
                        "validate N random instances instead of reading counts");

    // bench
    BenchOpts bench_opts;
    CLI::App* bench_cmd =
        app.add_subcommand("bench", "concurrent loader throughput (JSON)");
    bench_cmd->add_option("--root", bench_opts.data.root, "dataset directory")->required();
    bench_cmd->add_option("--n", bench_opts.data.n, "sample count");
    bench_cmd->add_option("--sample-bytes", bench_opts.data.sample_bytes, "bytes per sample");
    bench_cmd->add_option("--workers-list", bench_opts.workers_list, "worker counts to sweep")
        ->delimiter(',');
    bench_cmd->add_option("--threads-list", bench_opts.threads_list,
                          "per-batch parallel task counts to sweep")
        ->delimiter(',');
    bench_cmd->add_option("--prefetch", bench_opts.prefetch, "outstanding batch requests");
    bench_cmd->add_option("--batch", bench_opts.batch, "batch size");
    bench_cmd->add_option("--preprocess", bench_opts.preprocess, "none|spin|sleep");
    bench_cmd->add_option("--preprocess-us", bench_opts.preprocess_us,
                          "injected microseconds per sample");
    bench_cmd->add_option("--cache", bench_opts.cache, "off|memory");
    bench_cmd->add_option("--cache-capacity", bench_opts.cache_capacity,
                          "cache capacity in samples");
    bench_cmd->add_option("--epochs", bench_opts.epochs, "epochs per cell");

    // equiv
    EquivOpts equiv_opts;
    CLI::App* equiv_cmd =
        app.add_subcommand("equiv", "scheme-equivalence verdict on the toy objective");
    equiv_cmd->add_option("--p-list", equiv_opts.p_list, "learner counts")->delimiter(',');
    equiv_cmd->add_option("--batch-list", equiv_opts.batch_list, "global batch sizes")
        ->delimiter(',');
    equiv_cmd->add_option("--steps", equiv_opts.steps, "training steps per run");
    equiv_cmd->add_option("--seeds", equiv_opts.seeds, "number of seeds");
    equiv_cmd->add_option("--d", equiv_opts.d, "toy dataset size");
    equiv_cmd->add_option("--dims", equiv_opts.dims, "toy model dimensions");
    equiv_cmd->add_option("--lr", equiv_opts.lr, "learning rate");
    equiv_cmd->add_flag("--non-canonical", equiv_opts.non_canonical,
                        "aggregate in learner order: schemes agree only within --tol");
    equiv_cmd->add_option("--tol", equiv_opts.tol, "tolerance for --non-canonical");

    // gen-data
    DataOpts gen_opts;
    CLI::App* gen_cmd = app.add_subcommand("gen-data", "generate a synthetic dataset");
    gen_cmd->add_option("--root", gen_opts.root, "dataset directory")->required();
    gen_cmd->add_option("--n", gen_opts.n, "sample count");
    gen_cmd->add_option("--sample-bytes", gen_opts.sample_bytes, "bytes per sample");

    // simulate
    SimulateOpts sim_opts;
    sim_opts.mp = model_opts.mp;
    sim_opts.mp.d = 128'000;
    CLI::App* sim_cmd = app.add_subcommand(
        "simulate", "epoch-cost curves with sampled imbalance, or balls-in-bins check");
    sim_cmd->add_option("--mode", sim_opts.mode, "costs|balls");
    sim_cmd->add_option("--scheme", sim_opts.scheme, "regular|distcache|locality|all");
    sim_cmd->add_option("--p-list", sim_opts.p_list, "node counts")->delimiter(',');
    sim_cmd->add_option("--epochs", sim_opts.epochs, "epochs per node count");
    sim_cmd->add_option("--local-batch", sim_opts.local_batch, "local batch size");
    sim_cmd->add_option("--d", sim_opts.mp.d, "dataset size in samples");
    sim_cmd->add_option("--v", sim_opts.mp.v, "per-node training rate, samples/s");
    sim_cmd->add_option("--r", sim_opts.mp.r, "storage I/O rate, samples/s");
    sim_cmd->add_option("--rc", sim_opts.mp.r_c, "remote-cache I/O rate, samples/s");
    sim_cmd->add_option("--rb", sim_opts.mp.r_b, "balancing I/O rate, samples/s");
    sim_cmd->add_option("--u", sim_opts.mp.u, "per-node preprocessing rate, samples/s");
    sim_cmd->add_option("--alpha", sim_opts.mp.alpha, "cached fraction of the dataset");
    sim_cmd->add_option("--balls", sim_opts.balls, "balls for --mode balls");
    sim_cmd->add_option("--bins", sim_opts.bins, "bins for --mode balls");
    sim_cmd->add_option("--alpha-param", sim_opts.alpha_param, "tail-bound multiplier");
    sim_cmd->add_option("--trials", sim_opts.trials, "Monte Carlo trials");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (model_cmd->parsed()) return run_model(model_opts, seed, out_path);
        if (imb_cmd->parsed()) return run_imbalance(imb_opts, seed, out_path);
        if (bal_cmd->parsed()) {
            if (bal_opts.self_check > 0) return run_balance_self_check(bal_opts.self_check, seed);
            if (bal_opts.counts_file.empty()) {
                throw std::invalid_argument("balance: provide a counts file or --self-check");
            }
            return run_balance_schedule(bal_opts, out_path);
        }
        if (bench_cmd->parsed()) return run_bench(bench_opts, seed, out_path);
        if (equiv_cmd->parsed()) return run_equiv(equiv_opts, seed);
        if (gen_cmd->parsed()) return run_gen_data(gen_opts, seed);
        if (sim_cmd->parsed()) return run_simulate(sim_opts, seed, out_path);
        std::cerr << app.help();
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}
