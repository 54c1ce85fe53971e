#include "cli.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "swat/buckets.hpp"
#include "swat/dataio.hpp"
#include "swat/errors.hpp"
#include "swat/heads.hpp"
#include "swat/metrics.hpp"
#include "swat/predictor.hpp"
#include "swat/simulate.hpp"
#include "swat/verify.hpp"

namespace swat::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::shared_ptr<spdlog::logger> logger() {
  static auto log = [] {
    auto l = spdlog::stderr_logger_st("swat");
    l->set_pattern("[%l] %v");
    const char* level = std::getenv("SWAT_LOG");
    l->set_level(level ? spdlog::level::from_str(level) : spdlog::level::warn);
    return l;
  }();
  return log;
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::string file_digest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "";
  std::ostringstream buf;
  buf << in.rdbuf();
  std::ostringstream hex;
  hex << "fnv1a64:" << std::hex << std::setw(16) << std::setfill('0')
      << hash_token(buf.str(), 0);
  return hex.str();
}

struct Manifest {
  std::string command;
  json config = json::object();
  std::uint64_t seed = 0;
  std::string started = utc_now();
  std::vector<fs::path> inputs;
  std::vector<fs::path> outputs;

  void write(const fs::path& path) const {
    json j = {{"command", command},
              {"config", config},
              {"seed", seed},
              {"started_at", started},
              {"finished_at", utc_now()}};
    j["inputs"] = json::array();
    for (const auto& p : inputs) {
      j["inputs"].push_back({{"path", p.string()}, {"digest", file_digest(p)}});
    }
    j["outputs"] = json::array();
    for (const auto& p : outputs) j["outputs"].push_back(p.string());
    std::ofstream out(path);
    if (!out) throw InputError(path.string() + ": cannot write manifest");
    out << j.dump(2) << '\n';
  }
};

fs::path manifest_beside(const fs::path& file) {
  auto p = file;
  p.replace_extension(".manifest.json");
  return p;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError(dir.string() + ": " + ec.message());
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw InputError(path.string() + ": cannot write");
  out << j.dump(2) << '\n';
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& tok : split_list(text, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) throw std::invalid_argument("'" + tok + "' is not a number");
    out.push_back(v);
  }
  return out;
}

// Dataset flags shared by buckets, train and eval.
struct DataOptions {
  std::string data;
  std::string config;
  std::string preset;
  std::optional<double> c;
  std::optional<double> ratio;
  std::optional<std::uint64_t> seed;

  void add_to(CLI::App* app, bool with_split) {
    app->add_option("--data", data, "input CSV with a header row");
    app->add_option("--config", config, "key = value file (columns, c, ratio, seed)");
    app->add_option("--preset", preset, "column layout: kuairec, cikm or simulate");
    app->add_option("--c", c, "target scaling constant (training target = round(c * raw))");
    app->add_option("--seed", seed, "run seed");
    if (with_split) app->add_option("--ratio", ratio, "train share of a seeded split");
  }

  // Folds config-file values into unset flags.
  KeyValueConfig resolve() {
    KeyValueConfig kv;
    if (!config.empty()) kv = load_config(config);
    if (preset.empty() && kv.count("preset")) preset = kv["preset"];
    if (!c && kv.count("c")) c = std::stod(kv["c"]);
    if (!ratio && kv.count("ratio")) ratio = std::stod(kv["ratio"]);
    if (!seed && kv.count("seed")) seed = std::stoull(kv["seed"]);
    return kv;
  }

  Dataset load(const KeyValueConfig& kv, double default_c) const {
    if (data.empty()) throw std::invalid_argument("--data is required");
    if (!fs::exists(data)) throw InputError(data + ": no such file");
    const auto schema = schema_from_config(kv, preset_schema(preset));
    auto ds = load_csv(data, schema, c.value_or(default_c));
    logger()->info("loaded {} rows from {} ({} skipped)", ds.samples.size(), data,
                   ds.provenance.skipped);
    return ds;
  }

  json describe() const {
    json j = {{"data", data}, {"config", config}, {"preset", preset}};
    j["c"] = c ? json(*c) : json(nullptr);
    j["ratio"] = ratio ? json(*ratio) : json(nullptr);
    return j;
  }
};

// ---------------------------------------------------------------- buckets

struct BucketsOptions {
  DataOptions data;
  std::optional<int> choice;
  std::optional<double> percent_step;
  std::string endpoints;
  std::string head;
  bool tail_open = false;
  std::string out = "scheme.json";
};

BucketScheme build_scheme(const BucketsOptions& o, const std::vector<std::int64_t>& targets,
                          bool tail_open) {
  if (!o.endpoints.empty()) {
    return BucketScheme::from_endpoints(parse_endpoint_list(o.endpoints), tail_open);
  }
  if (o.choice) return BucketScheme::ablation_choice(targets, *o.choice, tail_open);
  return BucketScheme::from_percentiles(targets, o.percent_step.value_or(1.0), tail_open);
}

int cmd_buckets(BucketsOptions o, std::ostream& out) {
  Manifest manifest;
  manifest.command = "buckets";
  const auto kv = o.data.resolve();
  bool tail_open = o.tail_open;
  if (!o.head.empty()) tail_open = parse_head(o.head) == HeadKind::Geo;

  std::vector<std::int64_t> targets;
  if (o.endpoints.empty()) {
    const auto ds = o.data.load(kv, preset_scale(o.data.preset));
    targets = ds.targets();
    manifest.inputs.push_back(o.data.data);
  }
  const auto scheme = build_scheme(o, targets, tail_open);

  const fs::path path = o.out;
  if (path.has_parent_path()) ensure_dir(path.parent_path());
  write_json(path, to_json(scheme));
  manifest.outputs.push_back(path);
  manifest.config = {{"data", o.data.describe()},
                     {"choice", o.choice ? json(*o.choice) : json(nullptr)},
                     {"percent_step", o.percent_step ? json(*o.percent_step) : json(nullptr)},
                     {"endpoints", o.endpoints},
                     {"tail_open", tail_open}};
  manifest.write(manifest_beside(path));

  out << "N = " << scheme.size() << "\nendpoints:";
  for (auto e : scheme.endpoints()) out << ' ' << e;
  out << "\ntail_open: " << (scheme.tail_open() ? "true" : "false") << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- train

struct TrainOptions {
  DataOptions data;
  std::string head;
  std::string scheme_path;
  std::string endpoints;
  std::optional<double> percent_step;
  std::optional<int> choice;
  std::string labels = "encoded";
  double lr = 2e-3;
  double weight_decay = 0.0;
  std::size_t epochs = 20;
  std::size_t batch = 1024;
  std::size_t hidden = 16;
  std::uint32_t hash_dim = 1u << 15;
  double tolerance = 1e-4;
  std::string out = "swat_out";
};

std::optional<BucketScheme> resolve_scheme(const TrainOptions& o, HeadKind head,
                                           const Dataset& train_set) {
  if (head == HeadKind::VGeo || head == HeadKind::WLR) return std::nullopt;
  const bool tail_open = head == HeadKind::Geo;
  if (!o.scheme_path.empty()) {
    std::ifstream in(o.scheme_path);
    if (!in) throw InputError(o.scheme_path + ": cannot open scheme");
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw InputError(o.scheme_path + ": " + e.what());
    }
    auto scheme = scheme_from_json(j);
    check_head_scheme(head, &scheme);
    return scheme;
  }
  if (!o.endpoints.empty()) {
    return BucketScheme::from_endpoints(parse_endpoint_list(o.endpoints), tail_open);
  }
  if (o.choice) return BucketScheme::ablation_choice(train_set.targets(), *o.choice, tail_open);
  if (o.percent_step) {
    return BucketScheme::from_percentiles(train_set.targets(), *o.percent_step, tail_open);
  }
  throw std::invalid_argument(std::string(head_name(head)) +
                              " head needs --scheme, --endpoints, --percent-step or --choice");
}

int cmd_train(TrainOptions o, std::ostream& out) {
  Manifest manifest;
  manifest.command = "train";
  const auto kv = o.data.resolve();
  const auto head = parse_head(o.head);
  const std::uint64_t seed = o.data.seed.value_or(0);

  auto full = o.data.load(kv, preset_scale(o.data.preset));
  manifest.inputs.push_back(o.data.data);
  Dataset train_set = o.data.ratio ? split(full, *o.data.ratio, seed).first : std::move(full);
  if (!o.scheme_path.empty()) manifest.inputs.push_back(o.scheme_path);

  TrainConfig config;
  config.head = head;
  config.scheme = resolve_scheme(o, head, train_set);
  if (o.labels == "bucket_times") {
    config.label_source = LabelSource::BucketTimes;
  } else if (o.labels != "encoded") {
    throw std::invalid_argument("--labels must be encoded or bucket_times");
  }
  config.features.hash_dim = o.hash_dim;
  config.features.hash_seed = seed;
  config.features.numeric_dims =
      static_cast<std::uint32_t>(train_set.samples.front().numeric.size());
  config.hidden = o.hidden;
  config.optimizer.lr = o.lr;
  config.optimizer.weight_decay = o.weight_decay;
  config.batch = o.batch;
  config.max_epochs = o.epochs;
  config.tolerance = o.tolerance;
  config.seed = seed;

  const fs::path dir = o.out;
  ensure_dir(dir);
  const auto result = train(train_set, config);
  if (result.clipped > 0) {
    logger()->warn("{} training targets exceeded the last endpoint and were clipped",
                   result.clipped);
  }

  const auto model_path = dir / "model.json";
  const auto trace_path = dir / "loss_trace.csv";
  save_predictor(model_path, result.predictor);
  {
    std::ofstream trace(trace_path);
    if (!trace) throw InputError(trace_path.string() + ": cannot write");
    trace << std::setprecision(17) << "epoch,loss\n";
    for (std::size_t e = 0; e < result.loss_trace.size(); ++e) {
      trace << e << ',' << result.loss_trace[e] << '\n';
    }
  }
  manifest.seed = seed;
  manifest.config = to_json(config);
  manifest.config["data"] = o.data.describe();
  manifest.config["train_rows"] = train_set.samples.size();
  manifest.outputs = {model_path, trace_path};
  manifest.write(dir / "manifest.json");

  out << "head " << head_name(head) << ", " << train_set.samples.size() << " samples, "
      << result.epochs << " epochs" << (result.converged ? " (converged)" : "")
      << ", final loss " << std::setprecision(6) << result.loss_trace.back() << '\n'
      << "model written to " << model_path.string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- eval

struct EvalOptions {
  DataOptions data;
  std::string model;
  std::optional<std::uint64_t> pair_budget;
  std::string out = "swat_eval";
};

int cmd_eval(EvalOptions o, std::ostream& out) {
  Manifest manifest;
  manifest.command = "eval";
  if (o.model.empty()) throw std::invalid_argument("--model is required");
  if (!fs::exists(o.model)) throw InputError(o.model + ": no such file");
  const auto predictor = load_predictor(o.model);
  const auto kv = o.data.resolve();
  const std::uint64_t seed = o.data.seed.value_or(0);
  const double c = o.data.c.value_or(predictor.scale);
  o.data.c = c;

  auto full = o.data.load(kv, c);
  Dataset test_set = o.data.ratio ? split(full, *o.data.ratio, seed).second : std::move(full);
  if (test_set.samples.size() < 2) {
    throw std::invalid_argument("evaluation needs at least 2 samples");
  }

  std::vector<double> preds;
  preds.reserve(test_set.samples.size());
  for (const auto& s : test_set.samples) preds.push_back(unscale(predictor.predict(s), c));
  const auto targets = test_set.raw_targets();
  const auto budget = o.pair_budget.value_or(default_pair_budget(preds.size()));
  const auto report = evaluate(preds, targets, budget, seed);

  const fs::path dir = o.out;
  ensure_dir(dir);
  const auto report_path = dir / "report.json";
  const auto preds_path = dir / "predictions.csv";
  write_json(report_path, to_json(report));
  write_predictions(preds_path, test_set, preds);
  manifest.seed = seed;
  manifest.config = {{"data", o.data.describe()},
                     {"model", o.model},
                     {"pair_budget", budget},
                     {"c", c}};
  manifest.inputs = {o.model, o.data.data};
  manifest.outputs = {report_path, preds_path};
  manifest.write(dir / "manifest.json");

  out << format_table(report);
  return kExitOk;
}

// ---------------------------------------------------------------- simulate

struct SimulateOptions {
  std::string behavior = "focused";
  std::string endpoints;
  std::string probs;
  std::size_t n = 10000;
  std::uint64_t seed = 0;
  std::string out = "simulated.csv";
};

int cmd_simulate(const SimulateOptions& o, std::ostream& out) {
  BehaviorProfile profile;
  if (o.behavior == "wandering") {
    profile.kind = Behavior::Wandering;
  } else if (o.behavior == "focused") {
    profile.kind = Behavior::Focused;
  } else if (o.behavior == "stationary") {
    profile.kind = Behavior::Stationary;
  } else {
    throw std::invalid_argument("--behavior must be wandering, focused or stationary");
  }
  if (profile.kind != Behavior::Stationary) {
    if (o.endpoints.empty()) throw std::invalid_argument("--endpoints is required");
    profile.scheme = BucketScheme::from_endpoints(parse_endpoint_list(o.endpoints),
                                                  profile.kind == Behavior::Focused);
  }
  profile.probs = parse_double_list(o.probs);
  profile.seed = o.seed;
  BehaviorSampler sampler(profile);

  const fs::path path = o.out;
  if (path.has_parent_path()) ensure_dir(path.parent_path());
  std::ofstream csv(path);
  if (!csv) throw InputError(path.string() + ": cannot write");
  csv << "sample_id,segment,watch_time,bucket_times\n";
  for (std::size_t i = 0; i < o.n; ++i) {
    csv << i << ",all,";
    if (profile.kind == Behavior::Wandering) {
      const auto d = sampler.draw_wandering();
      csv << d.total << ',';
      for (std::size_t k = 0; k < d.per_bucket.size(); ++k) {
        csv << (k ? ";" : "") << d.per_bucket[k];
      }
      csv << '\n';
    } else {
      csv << sampler.draw_total() << ",\n";
    }
  }
  Manifest manifest;
  manifest.command = "simulate";
  manifest.seed = o.seed;
  manifest.config = {{"behavior", o.behavior}, {"endpoints", o.endpoints},
                     {"probs", profile.probs}, {"n", o.n}};
  manifest.outputs = {path};
  manifest.write(manifest_beside(path));
  out << "wrote " << o.n << " samples to " << path.string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- verify

struct VerifyCliOptions {
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  std::string out;
  std::string corrupt;
};

int cmd_verify(const VerifyCliOptions& o, std::ostream& out, std::ostream& err) {
  VerifyOptions options;
  options.trials = o.trials;
  options.seed = o.seed;
  if (!o.corrupt.empty()) options.corrupt_gradient = parse_head(o.corrupt);
  const auto report = run_verification(options);

  for (const auto& p : report.properties) {
    out << (p.passed ? "PASS  " : "FAIL  ") << std::left << std::setw(34) << p.name
        << p.detail << '\n';
  }
  if (!o.out.empty()) {
    const fs::path path = o.out;
    if (path.has_parent_path()) ensure_dir(path.parent_path());
    write_json(path, to_json(report));
    Manifest manifest;
    manifest.command = "verify";
    manifest.seed = o.seed;
    manifest.config = {{"trials", o.trials},
                       {"corrupt_gradient", o.corrupt.empty() ? json(nullptr) : json(o.corrupt)}};
    manifest.outputs = {path};
    manifest.write(manifest_beside(path));
  }
  if (!report.passed()) {
    err << "verification failed:";
    for (const auto& name : report.failed()) err << ' ' << name;
    err << '\n';
    return kExitVerifyFailed;
  }
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Watch-time prediction with bucketized statistical heads", "swat"};
  app.require_subcommand(1);

  BucketsOptions buckets;
  auto* b = app.add_subcommand("buckets", "build a bucket scheme");
  buckets.data.add_to(b, false);
  b->add_option("--choice", buckets.choice, "endpoint layout 1..6")->check(CLI::Range(1, 6));
  b->add_option("--percent-step", buckets.percent_step, "percentile grid step (default 1)");
  b->add_option("--endpoints", buckets.endpoints, "explicit endpoints, e.g. 5,12,22");
  b->add_option("--head", buckets.head, "binom (closed tail) or geo (open tail)");
  b->add_flag("--tail-open", buckets.tail_open, "include the unbounded last bucket");
  b->add_option("--out", buckets.out, "scheme JSON path");

  TrainOptions tr;
  auto* t = app.add_subcommand("train", "fit a predictor");
  tr.data.add_to(t, true);
  t->add_option("--head", tr.head, "binom, geo, vgeo or wlr")->required();
  t->add_option("--scheme", tr.scheme_path, "scheme JSON from `buckets`");
  t->add_option("--endpoints", tr.endpoints, "explicit endpoints, e.g. 5,12,22");
  t->add_option("--percent-step", tr.percent_step, "percentile buckets from training targets");
  t->add_option("--choice", tr.choice, "endpoint layout 1..6")->check(CLI::Range(1, 6));
  t->add_option("--labels", tr.labels, "binom labels: encoded or bucket_times");
  t->add_option("--lr", tr.lr, "AdamW learning rate");
  t->add_option("--weight-decay", tr.weight_decay, "decoupled weight decay");
  t->add_option("--epochs", tr.epochs, "maximum epochs");
  t->add_option("--batch", tr.batch, "mini-batch size");
  t->add_option("--hidden", tr.hidden, "hidden units (0 = linear)");
  t->add_option("--hash-dim", tr.hash_dim, "hashed feature width")->check(CLI::Range(2u, 1u << 30));
  t->add_option("--tolerance", tr.tolerance, "relative loss improvement to stop at");
  t->add_option("--out", tr.out, "output directory");

  EvalOptions ev;
  auto* e = app.add_subcommand("eval", "evaluate a predictor");
  ev.data.add_to(e, true);
  e->add_option("--model", ev.model, "model JSON from `train`")->required();
  e->add_option("--pair-budget", ev.pair_budget, "XAUC pair budget");
  e->add_option("--out", ev.out, "output directory");

  SimulateOptions sim;
  auto* s = app.add_subcommand("simulate", "draw synthetic watch times");
  s->add_option("--behavior", sim.behavior, "wandering, focused or stationary");
  s->add_option("--endpoints", sim.endpoints, "bucket endpoints");
  s->add_option("--probs", sim.probs, "per-bucket probabilities")->required();
  s->add_option("--n", sim.n, "number of samples");
  s->add_option("--seed", sim.seed, "sampler seed");
  s->add_option("--out", sim.out, "CSV path");

  VerifyCliOptions ver;
  auto* v = app.add_subcommand("verify", "run the property suite");
  v->add_option("--trials", ver.trials, "random draws per property");
  v->add_option("--seed", ver.seed, "suite seed");
  v->add_option("--out", ver.out, "results JSON path");
  v->add_option("--corrupt-gradient", ver.corrupt, "test hook: flip a head's gradient sign");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& ex) {
    err << "usage error: " << ex.what() << '\n';
    return kExitUsage;
  }

  try {
    if (b->parsed()) return cmd_buckets(buckets, out);
    if (t->parsed()) return cmd_train(tr, out);
    if (e->parsed()) return cmd_eval(ev, out);
    if (s->parsed()) return cmd_simulate(sim, out);
    if (v->parsed()) return cmd_verify(ver, out, err);
  } catch (const NumericError& ex) {
    err << "numeric failure: " << ex.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace swat::cli
