// pmfrec command line: estimate marginals, fit models, predict ratings and
// reproduce the synthetic / evaluation experiments. All heavy lifting lives
// behind the C API in pmfrec.h; this file is argument plumbing, manifests
// and exit-code mapping (0 ok, 2 usage, 3 data, 4 numerical).

#include <pmfrec.h>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

namespace {

using nlohmann::json;

int exit_code_of(pmfrec_status status) {
  switch (status) {
    case PMFREC_OK: return 0;
    case PMFREC_ERR_DIMENSION: return 2;
    case PMFREC_ERR_ARGUMENT: return 2;
    case PMFREC_ERR_DATA: return 3;
    case PMFREC_ERR_IO: return 3;
    case PMFREC_ERR_NUMERIC: return 4;
  }
  return 3;
}

// Thrown after the error has been printed; carries the process exit code.
struct CliFailure {
  int code;
};

void check(pmfrec_status status) {
  if (status != PMFREC_OK) {
    std::fprintf(stderr, "pmfrec: error: %s\n", pmfrec_last_error());
    throw CliFailure{exit_code_of(status)};
  }
}

[[noreturn]] void fail(int code, const std::string& message) {
  std::fprintf(stderr, "pmfrec: error: %s\n", message.c_str());
  throw CliFailure{code};
}

struct DatasetDeleter {
  void operator()(pmfrec_dataset* p) const { pmfrec_dataset_free(p); }
};
struct MarginalsDeleter {
  void operator()(pmfrec_marginals* p) const { pmfrec_marginals_free(p); }
};
struct ModelDeleter {
  void operator()(pmfrec_model* p) const { pmfrec_model_free(p); }
};
struct SolutionDeleter {
  void operator()(pmfrec_solution* p) const { pmfrec_solution_free(p); }
};
using DatasetPtr = std::unique_ptr<pmfrec_dataset, DatasetDeleter>;
using MarginalsPtr = std::unique_ptr<pmfrec_marginals, MarginalsDeleter>;
using ModelPtr = std::unique_ptr<pmfrec_model, ModelDeleter>;
using SolutionPtr = std::unique_ptr<pmfrec_solution, SolutionDeleter>;

DatasetPtr load_dataset(const std::string& path, const std::vector<int>& cards) {
  pmfrec_dataset* raw = nullptr;
  check(pmfrec_dataset_load(path.c_str(), cards.empty() ? nullptr : cards.data(),
                            static_cast<int>(cards.size()), &raw));
  return DatasetPtr(raw);
}

std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// ---------------------------------------------------------------------------
// Shared flag groups.

struct FitFlags {
  int rank = 1;
  int max_cycles = 1500;
  int admm_iters = 50;
  double admm_tol = 1e-6;
  std::string rho = "auto";
  double outer_tol = 1e-10;
  std::uint64_t seed = 0;

  // Experiment subcommands own a master --seed (fit seeds are derived from
  // it), so they suppress rank/seed here.
  void add_to(CLI::App* cmd, bool with_rank_and_seed) {
    if (with_rank_and_seed) {
      cmd->add_option("--rank", rank, "Decomposition rank F")->required();
    }
    cmd->add_option("--max-cycles", max_cycles, "Outer cycle cap")->capture_default_str();
    cmd->add_option("--admm-iters", admm_iters, "Inner ADMM iteration cap")->capture_default_str();
    cmd->add_option("--admm-tol", admm_tol, "ADMM residual threshold")->capture_default_str();
    cmd->add_option("--rho", rho, "ADMM penalty: 'auto' or a positive value")->capture_default_str()
        ->check(CLI::Validator(
            [](std::string& s) -> std::string {
              if (s == "auto") return {};
              try {
                std::size_t pos = 0;
                const double v = std::stod(s, &pos);
                if (pos == s.size() && v > 0.0) return {};
              } catch (...) {
              }
              return "must be 'auto' or a positive number";
            },
            "RHO"));
    cmd->add_option("--outer-tol", outer_tol,
                    "Relative objective-change stopping threshold")->capture_default_str();
    if (with_rank_and_seed) {
      cmd->add_option("--seed", seed, "Random seed")->capture_default_str();
    }
  }

  pmfrec_fit_options to_options() const {
    pmfrec_fit_options o;
    pmfrec_fit_options_init(&o);
    o.rank = rank;
    o.max_cycles = max_cycles;
    o.admm_max_iters = admm_iters;
    o.admm_tol = admm_tol;
    o.rho = rho == "auto" ? 0.0 : std::stod(rho);
    o.outer_tol = outer_tol;
    o.seed = seed;
    return o;
  }

  json to_json(bool with_rank_and_seed) const {
    json j{{"max_cycles", max_cycles},
           {"admm_iters", admm_iters},
           {"admm_tol", admm_tol},
           {"rho", rho},
           {"outer_tol", outer_tol}};
    if (with_rank_and_seed) {
      j["rank"] = rank;
      j["seed"] = seed;
    }
    return j;
  }
};

struct ValueFlags {
  double scale = 1.0;
  double offset = 0.0;
  std::vector<double> values;

  void add_to(CLI::App* cmd) {
    auto* s = cmd->add_option("--value-scale", scale,
                              "Rating value of code c is scale*c + offset")->capture_default_str();
    auto* o = cmd->add_option("--value-offset", offset, "See --value-scale")->capture_default_str();
    cmd->add_option("--values", values,
                    "Explicit rating values for codes 1..I (overrides scale/offset)")
        ->delimiter(',')
        ->excludes(s)
        ->excludes(o);
  }

  pmfrec_value_map to_map() const {
    pmfrec_value_map vm;
    pmfrec_value_map_identity(&vm);
    if (!values.empty()) {
      vm.values = values.data();
      vm.values_len = static_cast<int>(values.size());
    } else {
      vm.scale = scale;
      vm.offset = offset;
    }
    return vm;
  }

  json to_json() const {
    if (!values.empty()) return json{{"values", values}};
    return json{{"value_scale", scale}, {"value_offset", offset}};
  }
};

// ---------------------------------------------------------------------------
// Manifests.

void write_manifest(const std::string& path, const std::string& subcommand,
                    const std::vector<std::string>& argv, const json& params,
                    const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs, std::uint64_t seed,
                    double wall_seconds) {
  json j;
  j["tool"] = "pmfrec";
  j["version"] = pmfrec_version();
  j["subcommand"] = subcommand;
  j["argv"] = argv;
  j["params"] = params;
  j["inputs"] = inputs;
  j["outputs"] = outputs;
  j["seed"] = seed;
  j["wall_seconds"] = wall_seconds;
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(3, "cannot write manifest " + path);
  os << j.dump(2) << "\n";
}

class Stopwatch {
public:
  double seconds() const {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

private:
  std::chrono::steady_clock::time_point start_ =
      std::chrono::steady_clock::now();
};

int run(const std::vector<std::string>& args, bool is_rerun);

// ---------------------------------------------------------------------------
// Subcommands.

struct EstimateOpts {
  std::string data, out, manifest;
  std::vector<int> cards;
  int order = 3;
  double alpha = 0.0;
};

int do_estimate(const EstimateOpts& o, const std::vector<std::string>& argv) {
  Stopwatch watch;
  DatasetPtr data = load_dataset(o.data, o.cards);
  pmfrec_marginals* raw = nullptr;
  check(pmfrec_estimate_marginals(data.get(), o.order, o.alpha, &raw));
  MarginalsPtr marginals(raw);
  check(pmfrec_marginals_save(marginals.get(), o.out.c_str()));
  const json params{{"order", o.order}, {"alpha", o.alpha}, {"cards", o.cards}};
  write_manifest(o.manifest.empty() ? o.out + ".manifest.json" : o.manifest,
                 "estimate", argv, params, {o.data}, {o.out}, 0,
                 watch.seconds());
  std::fprintf(stderr, "pmfrec: wrote %s\n", o.out.c_str());
  return 0;
}

struct FitOpts {
  std::string marginals, out, trace, init, manifest;
  FitFlags fit;
  bool quiet = false;
};

int do_fit(const FitOpts& o, const std::vector<std::string>& argv) {
  Stopwatch watch;
  pmfrec_marginals* raw_m = nullptr;
  check(pmfrec_marginals_load(o.marginals.c_str(), &raw_m));
  MarginalsPtr marginals(raw_m);
  ModelPtr init;
  if (!o.init.empty()) {
    pmfrec_model* raw_init = nullptr;
    check(pmfrec_model_load(o.init.c_str(), &raw_init));
    init.reset(raw_init);
  }
  pmfrec_fit_options options = o.fit.to_options();
  options.log_cycles = o.quiet ? 0 : 1;
  pmfrec_solution* raw_s = nullptr;
  check(pmfrec_fit(marginals.get(), &options, init.get(), &raw_s));
  SolutionPtr solution(raw_s);

  pmfrec_model* raw_model = nullptr;
  check(pmfrec_solution_model(solution.get(), &raw_model));
  ModelPtr model(raw_model);
  check(pmfrec_model_save(model.get(), o.out.c_str()));

  const std::string trace_path = o.trace.empty() ? o.out + ".trace.csv" : o.trace;
  const int64_t len = pmfrec_solution_trace_len(solution.get());
  std::vector<double> trace(static_cast<std::size_t>(len));
  check(pmfrec_solution_trace(solution.get(), trace.data()));
  std::ofstream ts(trace_path, std::ios::binary);
  if (!ts) fail(3, "cannot write trace " + trace_path);
  ts << "cycle,objective\n";
  for (int64_t i = 0; i < len; ++i) {
    ts << i << ',' << format_g17(trace[static_cast<std::size_t>(i)]) << '\n';
  }
  ts.close();

  std::fprintf(stderr, "pmfrec: %d cycles (%s), final objective %s\n",
               pmfrec_solution_cycles(solution.get()),
               pmfrec_solution_termination(solution.get()),
               format_g17(trace.back()).c_str());
  json params = o.fit.to_json(true);
  params["init"] = o.init;
  write_manifest(o.manifest.empty() ? o.out + ".manifest.json" : o.manifest,
                 "fit", argv, params,
                 o.init.empty() ? std::vector<std::string>{o.marginals}
                                : std::vector<std::string>{o.marginals, o.init},
                 {o.out, trace_path}, o.fit.seed, watch.seconds());
  return 0;
}

struct PredictOpts {
  std::string model, query, out, manifest;
  ValueFlags values;
};

int do_predict(const PredictOpts& o, const std::vector<std::string>& argv) {
  Stopwatch watch;
  pmfrec_model* raw = nullptr;
  check(pmfrec_model_load(o.model.c_str(), &raw));
  ModelPtr model(raw);
  const pmfrec_value_map vm = o.values.to_map();
  check(pmfrec_predict_file(model.get(), o.query.c_str(), &vm, o.out.c_str()));
  write_manifest(o.manifest.empty() ? o.out + ".manifest.json" : o.manifest,
                 "predict", argv, o.values.to_json(), {o.model, o.query},
                 {o.out}, 0, watch.seconds());
  std::fprintf(stderr, "pmfrec: wrote %s\n", o.out.c_str());
  return 0;
}

struct SynthOpts {
  int table = 1;
  int order = 3;
  int rank = 5;
  int rank_fit = 0;  // 0: same as rank
  int vars = 5;
  int card = 10;
  int trials = 20;
  double sigma = 1e-6;  // table 2 only
  std::uint64_t seed = 0;
  int threads = 1;
  bool deterministic = false;
  std::string out, manifest;
  FitFlags fit;
};

int do_synth(const SynthOpts& o, const std::vector<std::string>& argv) {
  Stopwatch watch;
  pmfrec_synth_options options;
  pmfrec_synth_options_init(&options);
  options.num_vars = o.vars;
  options.cardinality = o.card;
  options.rank_true = o.rank;
  options.rank_fit = o.rank_fit > 0 ? o.rank_fit : o.rank;
  options.order = o.order;
  options.trials = o.trials;
  options.sigma = o.table == 2 ? o.sigma : 0.0;
  options.seed = o.seed;
  options.threads = o.deterministic ? 1 : o.threads;
  options.fit = o.fit.to_options();
  double median_fact = 0.0, median_ten = 0.0;
  check(pmfrec_run_synthetic(&options, o.out.c_str(), &median_fact, &median_ten));
  std::fprintf(stderr,
               "pmfrec: table %d order %d rank %d: median MRE_fact %s, "
               "median MRE_ten %s\n",
               o.table, o.order, options.rank_fit, format_g17(median_fact).c_str(),
               format_g17(median_ten).c_str());
  json params = o.fit.to_json(false);
  params.update(json{{"table", o.table},
                     {"order", o.order},
                     {"rank_true", options.rank_true},
                     {"rank_fit", options.rank_fit},
                     {"vars", o.vars},
                     {"card", o.card},
                     {"trials", o.trials},
                     {"sigma", options.sigma},
                     {"threads", options.threads}});
  params["seed"] = o.seed;
  write_manifest(o.manifest.empty() ? o.out + ".manifest.json" : o.manifest,
                 "synth", argv, params, {}, {o.out}, o.seed, watch.seconds());
  return 0;
}

struct EvaluateOpts {
  std::string data, out, manifest;
  std::vector<int> cards;
  std::vector<int> orders = {2, 3, 4};
  int rank = 5;
  double alpha = 0.1;
  double test_frac = 0.20;
  double val_frac = 0.10;
  std::uint64_t seed = 0;
  std::vector<std::string> methods = {"averages", "bmf", "cp"};
  int bmf_rank = 8;
  double bmf_lr = 0.01;
  double bmf_reg = 0.02;
  int bmf_epochs = 100;
  int check_every = 10;
  int patience = 5;
  std::vector<int> rank_sweep;
  ValueFlags values;
  FitFlags fit;
};

int do_evaluate(const EvaluateOpts& o, const std::vector<std::string>& argv) {
  Stopwatch watch;
  for (const std::string& m : o.methods) {
    if (m != "averages" && m != "bmf" && m != "cp") {
      fail(2, "unknown method '" + m + "' (choose from averages, bmf, cp)");
    }
  }
  DatasetPtr data = load_dataset(o.data, o.cards);
  pmfrec_evaluate_options options;
  pmfrec_evaluate_options_init(&options);
  const bool with_cp =
      std::find(o.methods.begin(), o.methods.end(), "cp") != o.methods.end();
  // Dropping "cp" from --methods drops the per-order columns entirely; a
  // non-null orders pointer with length 0 encodes that, NULL means default.
  static const int kNoOrders[1] = {0};
  if (with_cp) {
    options.orders = o.orders.data();
    options.num_orders = static_cast<int>(o.orders.size());
  } else {
    options.orders = kNoOrders;
    options.num_orders = 0;
  }
  options.rank = o.rank;
  options.alpha = o.alpha;
  options.test_fraction = o.test_frac;
  options.validation_fraction = o.val_frac;
  options.seed = o.seed;
  options.with_averages =
      std::find(o.methods.begin(), o.methods.end(), "averages") != o.methods.end();
  options.with_bmf =
      std::find(o.methods.begin(), o.methods.end(), "bmf") != o.methods.end();
  options.bmf_rank = o.bmf_rank;
  options.bmf_learning_rate = o.bmf_lr;
  options.bmf_regularization = o.bmf_reg;
  options.bmf_max_epochs = o.bmf_epochs;
  options.check_every = o.check_every;
  options.patience = o.patience;
  options.values = o.values.to_map();
  options.fit = o.fit.to_options();
  if (!o.rank_sweep.empty()) {
    check(pmfrec_run_rank_sweep(data.get(), &options, o.rank_sweep.data(),
                                static_cast<int>(o.rank_sweep.size()),
                                o.out.c_str()));
  } else {
    check(pmfrec_run_evaluate(data.get(), &options, o.out.c_str()));
  }
  json params = o.fit.to_json(false);
  params.update(o.values.to_json());
  params.update(json{{"orders", o.orders},
                     {"rank", o.rank},
                     {"alpha", o.alpha},
                     {"test_frac", o.test_frac},
                     {"val_frac", o.val_frac},
                     {"methods", o.methods},
                     {"bmf_rank", o.bmf_rank},
                     {"bmf_lr", o.bmf_lr},
                     {"bmf_reg", o.bmf_reg},
                     {"bmf_epochs", o.bmf_epochs},
                     {"check_every", o.check_every},
                     {"patience", o.patience},
                     {"rank_sweep", o.rank_sweep},
                     {"cards", o.cards}});
  params["seed"] = o.seed;
  write_manifest(o.manifest.empty() ? o.out + ".manifest.json" : o.manifest,
                 "evaluate", argv, params, {o.data}, {o.out}, o.seed,
                 watch.seconds());
  std::fprintf(stderr, "pmfrec: wrote %s\n", o.out.c_str());
  return 0;
}

int do_rerun(const std::string& manifest_path) {
  std::ifstream is(manifest_path, std::ios::binary);
  if (!is) fail(3, "cannot read manifest " + manifest_path);
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    fail(3, manifest_path + ": " + e.what());
  }
  std::vector<std::string> argv;
  try {
    if (j.at("tool").get<std::string>() != "pmfrec") {
      fail(3, manifest_path + ": not a pmfrec manifest");
    }
    argv = j.at("argv").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    fail(3, manifest_path + ": " + e.what());
  }
  if (!argv.empty() && argv[0] == "rerun") {
    fail(3, manifest_path + ": refusing to rerun a rerun");
  }
  return run(argv, true);
}

// ---------------------------------------------------------------------------

int run(const std::vector<std::string>& args, bool is_rerun) {
  CLI::App app{"Joint-PMF recovery from low-order marginals, with conditional "
               "inference and rating prediction"};
  app.set_version_flag("--version", std::string("pmfrec ") + pmfrec_version());
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from a TOML/INI file");
  app.allow_config_extras(CLI::config_extras_mode::error);

  EstimateOpts est;
  CLI::App* est_cmd =
      app.add_subcommand("estimate", "Estimate order-m marginals from a table")->configurable()->fallthrough();
  est_cmd->add_option("--data", est.data, "Ratings table")->required();
  est_cmd->add_option("--cards", est.cards,
                      "Per-variable cardinalities (else sidecar or inferred)")
      ->delimiter(',');
  est_cmd->add_option("--order", est.order, "Marginal order m")->capture_default_str()
      ->check(CLI::IsMember({2, 3, 4}));
  est_cmd->add_option("--alpha", est.alpha, "Additive smoothing")->capture_default_str();
  est_cmd->add_option("--out", est.out, "Output marginals file")->required();
  est_cmd->add_option("--manifest", est.manifest, "Manifest path");

  FitOpts fit;
  CLI::App* fit_cmd =
      app.add_subcommand("fit", "Fit a rank-F model to saved marginals")->configurable()->fallthrough();
  fit_cmd->add_option("--marginals", fit.marginals, "Marginals file")->required();
  fit.fit.add_to(fit_cmd, true);
  fit_cmd->add_option("--init", fit.init, "Warm-start model file");
  fit_cmd->add_option("--out", fit.out, "Output model file")->required();
  fit_cmd->add_option("--trace", fit.trace,
                      "Objective trace CSV (default: <out>.trace.csv)");
  fit_cmd->add_flag("--quiet", fit.quiet, "Suppress the per-cycle objective log");
  fit_cmd->add_option("--manifest", fit.manifest, "Manifest path");

  PredictOpts pred;
  CLI::App* pred_cmd = app.add_subcommand(
      "predict", "Batch conditional predictions for '?' cells in a query table")->configurable()->fallthrough();
  pred_cmd->add_option("--model", pred.model, "Model file")->required();
  pred_cmd->add_option("--query", pred.query, "Query table with '?' targets")
      ->required();
  pred.values.add_to(pred_cmd);
  pred_cmd->add_option("--out", pred.out, "Predictions CSV")->required();
  pred_cmd->add_option("--manifest", pred.manifest, "Manifest path");

  SynthOpts synth;
  CLI::App* synth_cmd = app.add_subcommand(
      "synth", "Synthetic recovery experiment (noiseless or noisy marginals)")->configurable()->fallthrough();
  synth_cmd->add_option("--table", synth.table,
                        "1: noiseless marginals, 2: noisy joint")->capture_default_str()
      ->check(CLI::IsMember({1, 2}));
  synth_cmd->add_option("--order", synth.order, "Marginal order m")->capture_default_str()
      ->check(CLI::IsMember({2, 3, 4}));
  synth_cmd->add_option("--rank", synth.rank, "True (and default fitted) rank")->capture_default_str();
  synth_cmd->add_option("--rank-fit", synth.rank_fit,
                        "Fitted rank when different from --rank");
  synth_cmd->add_option("--vars", synth.vars, "Number of variables N")->capture_default_str();
  synth_cmd->add_option("--card", synth.card, "Cardinality I of every variable")->capture_default_str();
  synth_cmd->add_option("--trials", synth.trials, "Monte Carlo trials K")->capture_default_str();
  synth_cmd->add_option("--sigma", synth.sigma,
                        "Noise standard deviation (table 2)")->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed, "Master seed")->capture_default_str();
  synth_cmd->add_option("--threads", synth.threads, "Worker threads for trials")->capture_default_str()
      ->check(CLI::PositiveNumber);
  synth_cmd->add_flag("--deterministic", synth.deterministic,
                      "Force single-threaded trials");
  synth.fit.add_to(synth_cmd, false);
  synth_cmd->add_option("--out", synth.out, "Results CSV")->required();
  synth_cmd->add_option("--manifest", synth.manifest, "Manifest path");

  EvaluateOpts eval;
  CLI::App* eval_cmd = app.add_subcommand(
      "evaluate", "Split a ratings table and compare prediction methods")->configurable()->fallthrough();
  eval_cmd->add_option("--data", eval.data, "Ratings table")->required();
  eval_cmd->add_option("--cards", eval.cards,
                       "Per-variable cardinalities (else sidecar or inferred)")
      ->delimiter(',');
  eval_cmd->add_option("--orders", eval.orders, "Marginal orders to evaluate")->capture_default_str()
      ->delimiter(',')
      ->check(CLI::IsMember({2, 3, 4}));
  eval_cmd->add_option("--rank", eval.rank, "Decomposition rank F")->capture_default_str();
  eval_cmd->add_option("--alpha", eval.alpha, "Additive smoothing")->capture_default_str();
  eval_cmd->add_option("--test-frac", eval.test_frac, "Test fraction")->capture_default_str();
  eval_cmd->add_option("--val-frac", eval.val_frac, "Validation fraction")->capture_default_str();
  eval_cmd->add_option("--seed", eval.seed, "Master seed")->capture_default_str();
  eval_cmd->add_option("--methods", eval.methods,
                       "Subset of averages,bmf,cp")->capture_default_str()
      ->delimiter(',');
  eval_cmd->add_option("--bmf-rank", eval.bmf_rank, "BMF rank")->capture_default_str();
  eval_cmd->add_option("--bmf-lr", eval.bmf_lr, "BMF learning rate")->capture_default_str();
  eval_cmd->add_option("--bmf-reg", eval.bmf_reg, "BMF regularization")->capture_default_str();
  eval_cmd->add_option("--bmf-epochs", eval.bmf_epochs, "BMF epoch cap")->capture_default_str();
  eval_cmd->add_option("--check-every", eval.check_every,
                       "Cycles between validation checks")->capture_default_str();
  eval_cmd->add_option("--patience", eval.patience,
                       "Validation checks without improvement")->capture_default_str();
  eval_cmd->add_option("--rank-sweep", eval.rank_sweep,
                       "Emit validation RMSE per rank instead of the method table")
      ->delimiter(',');
  eval.values.add_to(eval_cmd);
  eval.fit.add_to(eval_cmd, false);
  eval_cmd->add_option("--out", eval.out, "Results CSV")->required();
  eval_cmd->add_option("--manifest", eval.manifest, "Manifest path");

  std::string rerun_manifest;
  CLI::App* rerun_cmd =
      app.add_subcommand("rerun", "Re-execute a run from its manifest")->configurable()->fallthrough();
  rerun_cmd->add_option("--manifest", rerun_manifest, "Manifest file")->required();

  std::vector<const char*> cargs;
  cargs.reserve(args.size() + 1);
  cargs.push_back("pmfrec");
  for (const std::string& a : args) cargs.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*est_cmd) return do_estimate(est, args);
    if (*fit_cmd) return do_fit(fit, args);
    if (*pred_cmd) return do_predict(pred, args);
    if (*synth_cmd) return do_synth(synth, args);
    if (*eval_cmd) return do_evaluate(eval, args);
    if (*rerun_cmd) {
      if (is_rerun) fail(3, "nested rerun");
      return do_rerun(rerun_manifest);
    }
  } catch (const CliFailure& f) {
    return f.code;
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  return run(std::vector<std::string>(argv + 1, argv + argc), false);
}
