#include "glassbox/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "glassbox/census.hpp"
#include "glassbox/common.hpp"
#include "glassbox/fairness.hpp"
#include "glassbox/gbt.hpp"
#include "glassbox/global.hpp"
#include "glassbox/lime.hpp"
#include "glassbox/metrics.hpp"
#include "glassbox/parallel.hpp"
#include "glassbox/report.hpp"
#include "glassbox/rng.hpp"
#include "glassbox/shap.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace glassbox {
namespace {

constexpr std::uint64_t kSaltBackground = 0x4247;
constexpr std::uint64_t kSaltPi = 0x5049;
constexpr std::uint64_t kSaltShap = 0x53484150;
constexpr std::uint64_t kSaltLimeSingle = 0x4C31;
constexpr std::uint64_t kSaltLimeW = 0x4C57;
constexpr std::uint64_t kSaltStability = 0x4C53;
constexpr std::uint64_t kSaltAudit = 0x4155;

std::string resolve_data_path(const std::string& path) {
  if (fs::exists(path)) return path;
  if (const char* dir = std::getenv("GLASSBOX_DATA_DIR")) {
    const fs::path candidate = fs::path(dir) / path;
    if (fs::exists(candidate)) return candidate.string();
  }
  return path;
}

struct DataBundle {
  EncodedDataset data;
  std::string sha256;
};

DataBundle load_data(const std::string& path) {
  const std::string resolved = resolve_data_path(path);
  const std::string bytes = read_file(resolved);
  std::istringstream stream(bytes);
  const RawTable table = parse_census(stream);
  const FeatureSchema schema = build_schema(table);
  return DataBundle{encode(table, schema), sha256_hex(bytes)};
}

SplitPair make_split(const std::string& data_path, double ratio, std::uint64_t seed) {
  const DataBundle bundle = load_data(data_path);
  return train_test_split(bundle.data, ratio, seed);
}

const EncodedDataset& pick_split(const SplitPair& splits, const std::string& name) {
  if (name == "train") return splits.train;
  if (name == "test") return splits.test;
  throw validation_error("unknown split: " + name + " (expected train or test)");
}

void emit_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_file(out_path, text);
  }
}

std::string fetch_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw validation_error("url must start with http:// or https://");
  }
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw validation_error("unsupported url scheme: " + scheme);
  }
  const std::string rest = url.substr(scheme_end + 3);
  const auto slash = rest.find('/');
  const std::string host = scheme + "://" + (slash == std::string::npos ? rest : rest.substr(0, slash));
  const std::string path = slash == std::string::npos ? "/" : rest.substr(slash);
  httplib::Client client(host);
  client.set_follow_location(true);
  auto res = client.Get(path);
  if (!res) throw io_error("fetch failed: " + httplib::to_string(res.error()));
  if (res->status != 200) {
    throw io_error("fetch failed with status " + std::to_string(res->status));
  }
  return res->body;
}

// Permutation units expanded to their encoded member columns, preserving
// the unit ranking order; this puts SHAP and PI rankings in one namespace.
std::vector<std::string> expand_pi_ranking(const PermutationReport& report,
                                           const EncodedDataset& data) {
  std::vector<std::string> out;
  for (const auto& entry : report.ranking) {
    for (const auto& group : data.groups) {
      if (group.name == entry.feature) {
        for (std::size_t member : group.members) out.push_back(data.feature_names[member]);
        break;
      }
    }
  }
  return out;
}

std::vector<std::string> ranking_names(const std::vector<std::pair<std::string, double>>& ranked) {
  std::vector<std::string> names;
  names.reserve(ranked.size());
  for (const auto& [name, score] : ranked) names.push_back(name);
  return names;
}

std::string metrics_table(const MetricReport& train, const MetricReport& test) {
  const std::vector<std::string> headers = {"split",  "accuracy", "precision",
                                            "recall", "f1",       "auc"};
  auto row = [](const std::string& name, const MetricReport& m) {
    return std::vector<std::string>{name,
                                    format_metric(m.accuracy),
                                    format_metric(m.precision),
                                    format_metric(m.recall),
                                    format_metric(m.f1),
                                    format_metric(m.auc)};
  };
  return emit_text_table(headers, {row("Train", train), row("Test", test)});
}

ChartSpec audit_chart(const DependenceReport& report) {
  std::vector<DependenceEntry> sorted = report.entries;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    if (a.normalized != b.normalized) return a.normalized > b.normalized;
    return a.feature < b.feature;
  });
  std::vector<std::string> labels;
  std::vector<double> values;
  for (const auto& e : sorted) {
    labels.push_back(e.sensitive ? e.feature + " *" : e.feature);
    values.push_back(e.normalized);
  }
  return ChartSpec::hbar("Fairness audit: normalized dependence", std::move(labels),
                         std::move(values), "normalized dependence");
}

ChartSpec pi_chart(const PermutationReport& report, const std::string& split) {
  std::vector<std::string> labels;
  std::vector<double> values;
  for (const auto& e : report.ranking) {
    labels.push_back(e.feature);
    values.push_back(e.mean_drop);
  }
  return ChartSpec::hbar("Permutation importance (" + split + ")", std::move(labels),
                         std::move(values), "mean AUC drop");
}

// ---------------------------------------------------------------------------
// subcommand options

struct IngestOptions {
  std::string data;
  std::string fetch;
  std::string expected_sha256;
  std::string save;
  std::string out;
};

struct TrainOptions {
  std::string data;
  double ratio = 0.8;
  std::uint64_t seed = 42;
  GbtConfig gbt;
  std::string out = "model.json";
};

struct EvalOptions {
  std::string model;
  std::string data;
  double ratio = 0.8;
  std::uint64_t split_seed = 42;
  std::string split = "test";
  std::string out;
};

struct ShapOptions {
  std::string model;
  std::string data;
  double ratio = 0.8;
  std::uint64_t split_seed = 42;
  std::vector<std::int64_t> instances = {0};
  bool exact = false;
  bool kernel = false;
  std::size_t n_coalitions = 2048;
  std::size_t background_size = 100;
  std::uint64_t seed = 0;
  bool logodds = false;
  std::string out;
};

struct LimeOptions {
  std::string model;
  std::string data;
  double ratio = 0.8;
  std::uint64_t split_seed = 42;
  std::int64_t instance = 0;
  std::size_t n_samples = 5000;
  std::size_t top_k = 6;
  std::optional<std::uint64_t> seed;
  int runs = 1;
  std::string out;
};

struct PiOptions {
  std::string model;
  std::string data;
  double ratio = 0.8;
  std::uint64_t split_seed = 42;
  std::string split = "test";
  int repeats = 10;
  std::uint64_t seed = 0;
  std::string out;
};

struct SurrogateOptions {
  std::string model;
  std::string data;
  double ratio = 0.8;
  std::uint64_t split_seed = 42;
  std::string kind = "tree";
  std::string out;
};

struct SpLimeOptions {
  std::string model;
  std::string data;
  double ratio = 0.8;
  std::uint64_t split_seed = 42;
  std::size_t budget = 5;
  std::size_t n_explained = 200;
  std::size_t top_k = 8;
  std::uint64_t seed = 0;
  std::string out;
};

struct AuditOptions {
  std::string model;
  std::string data;
  double ratio = 0.8;
  std::uint64_t split_seed = 42;
  std::string split = "train";
  std::size_t sample_size = 0;  // 0: min(2000, rows)
  std::uint64_t seed = 0;
  std::vector<std::string> sensitive;
  std::string out;
};

struct ReproduceOptions {
  std::string data;
  std::uint64_t seed = 42;
  double ratio = 0.8;
  GbtConfig gbt;
  std::string out = "run";
};

// ---------------------------------------------------------------------------
// subcommand implementations

int cmd_ingest(const IngestOptions& opt) {
  if (opt.data.empty() == opt.fetch.empty()) {
    throw validation_error("ingest needs exactly one of --data or --fetch");
  }
  std::string bytes;
  std::string source;
  if (!opt.fetch.empty()) {
    bytes = fetch_url(opt.fetch);
    source = opt.fetch;
  } else {
    const std::string resolved = resolve_data_path(opt.data);
    bytes = read_file(resolved);
    source = resolved;
  }
  const std::string digest = sha256_hex(bytes);
  if (!opt.expected_sha256.empty() && digest != opt.expected_sha256) {
    throw validation_error("sha256 mismatch: expected " + opt.expected_sha256 + ", got " + digest);
  }
  if (!opt.save.empty()) write_file(opt.save, bytes);

  std::istringstream stream(bytes);
  const RawTable table = parse_census(stream);
  const FeatureSchema schema = build_schema(table);
  const EncodedDataset data = encode(table, schema);

  std::size_t positives = 0;
  for (int label : data.y) positives += static_cast<std::size_t>(label);
  ordered_json j;
  j["format"] = "glassbox.schema";
  j["version"] = 1;
  j["source"] = source;
  j["sha256"] = digest;
  j["rows"] = data.X.rows;
  j["positives"] = positives;
  j["encoded_width"] = data.X.cols;
  j["numeric_columns"] = schema.numeric_columns;
  j["categorical_columns"] = ordered_json::array();
  for (const auto& col : schema.categorical_columns) {
    j["categorical_columns"].push_back(
        {{"source", col.source}, {"prefix", col.prefix}, {"categories", col.categories.size()}});
  }
  j["units"] = ordered_json::array();
  for (const auto& group : data.groups) {
    const char* kind = group.kind == GroupKind::numeric  ? "numeric"
                       : group.kind == GroupKind::binary ? "binary"
                                                         : "onehot";
    j["units"].push_back(
        {{"name", group.name}, {"kind", kind}, {"columns", group.members.size()}});
  }
  emit_output(j.dump(2) + "\n", opt.out);
  return 0;
}

int cmd_train(const TrainOptions& opt) {
  SplitPair splits = make_split(opt.data, opt.ratio, opt.seed);
  GbtConfig config = opt.gbt;
  if (config.subsample_seed == 0) config.subsample_seed = opt.seed;
  const GbtModel model = GbtModel::train(splits.train, config);
  model.save(opt.out);
  const MetricReport train_metrics =
      evaluate_scores(model.predict_proba(splits.train.X), splits.train.y);
  const MetricReport test_metrics =
      evaluate_scores(model.predict_proba(splits.test.X), splits.test.y);
  std::cout << metrics_table(train_metrics, test_metrics);
  std::cout << "model written to " << opt.out << "\n";
  return 0;
}

int cmd_eval(const EvalOptions& opt) {
  const GbtModel model = GbtModel::load(opt.model);
  const SplitPair splits = make_split(opt.data, opt.ratio, opt.split_seed);
  const EncodedDataset& data = pick_split(splits, opt.split);
  const MetricReport metrics = evaluate_scores(model.predict_proba(data.X), data.y);
  emit_output(emit_json(metrics), opt.out);
  return 0;
}

int cmd_explain_shap(const ShapOptions& opt) {
  if (opt.exact && opt.kernel) {
    throw validation_error("--exact and --kernel are mutually exclusive");
  }
  const GbtModel model = GbtModel::load(opt.model);
  const SplitPair splits = make_split(opt.data, opt.ratio, opt.split_seed);
  const EncodedDataset& test = splits.test;
  Matrix X(0, test.X.cols);
  for (std::int64_t id : opt.instances) {
    if (id < 0 || static_cast<std::size_t>(id) >= test.X.rows) {
      throw validation_error("instance index out of range: " + std::to_string(id));
    }
    X.push_row(test.X.row(static_cast<std::size_t>(id)));
  }
  const BackgroundSet background =
      sample_background(splits.train.X, opt.background_size,
                        stable_hash({opt.seed, kSaltBackground}));
  const Predictor f = opt.logodds ? model.margin_predictor() : model.predictor();
  const ShapMethod method = opt.exact ? ShapMethod::exact : ShapMethod::kernel;
  KernelShapConfig config;
  config.n_coalitions = opt.n_coalitions;
  config.seed = opt.seed;
  const AttributionMatrix attrs =
      explain_matrix(f, X, test.feature_names, background, method, config, opt.instances);
  emit_output(emit_json(attrs), opt.out);
  return 0;
}

int cmd_explain_lime(const LimeOptions& opt) {
  const GbtModel model = GbtModel::load(opt.model);
  const SplitPair splits = make_split(opt.data, opt.ratio, opt.split_seed);
  const EncodedDataset& test = splits.test;
  if (opt.instance < 0 || static_cast<std::size_t>(opt.instance) >= test.X.rows) {
    throw validation_error("instance index out of range: " + std::to_string(opt.instance));
  }
  const LimeStats stats = lime_stats(splits.train);
  LimeConfig config;
  config.n_samples = opt.n_samples;
  config.top_k = opt.top_k;
  config.seed = opt.seed;
  const auto instance = test.X.row(static_cast<std::size_t>(opt.instance));
  const Predictor f = model.predictor();
  if (opt.runs >= 2) {
    const StabilityReport report = stability(f, instance, stats, opt.runs, config);
    emit_output(emit_json(report), opt.out);
  } else {
    const LimeExplanation explanation = lime_explain(f, instance, stats, config, opt.instance);
    emit_output(emit_json(explanation), opt.out);
  }
  return 0;
}

int cmd_global_importance(const PiOptions& opt) {
  const GbtModel model = GbtModel::load(opt.model);
  const SplitPair splits = make_split(opt.data, opt.ratio, opt.split_seed);
  const EncodedDataset& data = pick_split(splits, opt.split);
  const PermutationReport report =
      permutation_importance(model.predictor(), data, opt.repeats, opt.seed);
  emit_output(emit_json(report), opt.out);
  return 0;
}

int cmd_surrogate(const SurrogateOptions& opt) {
  const GbtModel model = GbtModel::load(opt.model);
  const SplitPair splits = make_split(opt.data, opt.ratio, opt.split_seed);
  SurrogateKind kind;
  if (opt.kind == "tree") {
    kind = SurrogateKind::decision_tree;
  } else if (opt.kind == "logistic") {
    kind = SurrogateKind::logistic;
  } else {
    throw validation_error("unknown surrogate kind: " + opt.kind + " (expected tree or logistic)");
  }
  const SurrogateReport report = fit_global_surrogate(model.predictor(), splits, kind);
  emit_output(emit_json(report), opt.out);
  if (kind == SurrogateKind::decision_tree) {
    std::cout << report.tree_text;
    if (!opt.out.empty()) {
      write_file(fs::path(opt.out).replace_extension(".txt").string(), report.tree_text);
    }
  }
  return 0;
}

// Local explanation matrix for SP-LIME: one row per explained test instance,
// one column per interpretable unit, seeded per instance so the result is
// independent of scheduling.
Matrix build_w_matrix(const Predictor& f, const EncodedDataset& test, const LimeStats& stats,
                      std::size_t n_explained, std::size_t top_k, std::uint64_t seed,
                      std::vector<LimeExplanation>* explanations_out) {
  const std::size_t n = std::min(n_explained, test.X.rows);
  if (n == 0) throw validation_error("sp-lime needs at least one instance");
  std::map<std::string, std::size_t> unit_index;
  for (std::size_t u = 0; u < stats.units.size(); ++u) unit_index[stats.units[u].name] = u;
  Matrix W(n, stats.units.size());
  std::vector<LimeExplanation> explanations(n);
  parallel_for(n, [&](std::size_t i) {
    LimeConfig config;
    config.top_k = top_k;
    config.seed = stable_hash({seed, kSaltLimeW, static_cast<std::uint64_t>(i)});
    explanations[i] =
        lime_explain(f, test.X.row(i), stats, config, static_cast<std::int64_t>(i));
    for (const auto& [name, weight] : explanations[i].coefficients) {
      W(i, unit_index.at(name)) = weight;
    }
  });
  if (explanations_out) *explanations_out = std::move(explanations);
  return W;
}

ordered_json picks_json(const PickResult& picks,
                        const std::vector<LimeExplanation>& explanations) {
  ordered_json j;
  j["format"] = "glassbox.sp_lime_picks";
  j["version"] = 1;
  j["picks"] = ordered_json::array();
  for (std::size_t id : picks.selected) {
    const LimeExplanation& e = explanations[id];
    ordered_json coeffs = ordered_json::array();
    for (const auto& [name, weight] : e.coefficients) {
      coeffs.push_back({{"feature", name}, {"weight", weight}});
    }
    j["picks"].push_back({{"instance", id},
                          {"features", e.selected_features()},
                          {"coefficients", coeffs}});
  }
  return j;
}

int cmd_sp_lime(const SpLimeOptions& opt) {
  const GbtModel model = GbtModel::load(opt.model);
  const SplitPair splits = make_split(opt.data, opt.ratio, opt.split_seed);
  const LimeStats stats = lime_stats(splits.train);
  std::vector<LimeExplanation> explanations;
  const Matrix W = build_w_matrix(model.predictor(), splits.test, stats, opt.n_explained,
                                  opt.top_k, opt.seed, &explanations);
  const PickResult picks = sp_lime(W, opt.budget);
  emit_output(emit_json(picks), opt.out);
  if (!opt.out.empty()) {
    write_file(fs::path(opt.out).replace_extension(".picks.json").string(),
               picks_json(picks, explanations).dump(2) + "\n");
  }
  return 0;
}

int cmd_audit(const AuditOptions& opt) {
  const GbtModel model = GbtModel::load(opt.model);
  const SplitPair splits = make_split(opt.data, opt.ratio, opt.split_seed);
  const EncodedDataset& data = pick_split(splits, opt.split);
  AuditConfig config;
  config.sample_size = opt.sample_size == 0 ? std::min<std::size_t>(2000, data.X.rows)
                                            : opt.sample_size;
  config.seed = opt.seed;
  if (!opt.sensitive.empty()) config.sensitive_features = opt.sensitive;
  const DependenceReport report = audit(model.predictor(), data, config);
  emit_output(emit_json(report), opt.out);
  if (!opt.out.empty()) {
    emit_svg_file(audit_chart(report), fs::path(opt.out).replace_extension(".svg").string());
  }
  return 0;
}

// ---------------------------------------------------------------------------
// reproduce: the full pipeline with a manifest

class RunDir {
 public:
  explicit RunDir(std::string dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw io_error("cannot create output directory " + dir_ + ": " + ec.message());
  }

  void add(const std::string& name, const std::string& bytes) {
    write_file((fs::path(dir_) / name).string(), bytes);
    entries_.emplace_back(name, sha256_hex(bytes));
  }

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
  const std::string& dir() const { return dir_; }

 private:
  std::string dir_;
  std::vector<std::pair<std::string, std::string>> entries_;
};

class StageClock {
 public:
  void start(const std::string& stage) {
    stage_ = stage;
    t0_ = std::chrono::steady_clock::now();
  }
  void stop() {
    const auto dt = std::chrono::steady_clock::now() - t0_;
    timings_.emplace_back(
        stage_, std::chrono::duration_cast<std::chrono::milliseconds>(dt).count());
  }
  const std::vector<std::pair<std::string, std::int64_t>>& timings() const { return timings_; }

 private:
  std::string stage_;
  std::chrono::steady_clock::time_point t0_;
  std::vector<std::pair<std::string, std::int64_t>> timings_;
};

int cmd_reproduce(const ReproduceOptions& opt) {
  RunDir run(opt.out);
  StageClock clock;
  const std::uint64_t seed = opt.seed;

  clock.start("ingest");
  const DataBundle bundle = load_data(opt.data);
  const SplitPair splits = train_test_split(bundle.data, opt.ratio, seed);
  clock.stop();

  clock.start("train");
  GbtConfig gbt_config = opt.gbt;
  gbt_config.subsample_seed = seed;
  const GbtModel model = GbtModel::train(splits.train, gbt_config);
  run.add("model.json", model.to_json_string());
  clock.stop();

  clock.start("eval");
  const std::vector<double> p_train = model.predict_proba(splits.train.X);
  const std::vector<double> p_test = model.predict_proba(splits.test.X);
  const MetricReport train_metrics = evaluate_scores(p_train, splits.train.y);
  const MetricReport test_metrics = evaluate_scores(p_test, splits.test.y);
  run.add("metrics_train.json", emit_json(train_metrics));
  run.add("metrics_test.json", emit_json(test_metrics));
  run.add("metrics.txt", metrics_table(train_metrics, test_metrics));
  clock.stop();

  const Predictor f = model.predictor();

  clock.start("permutation_importance");
  const PermutationReport pi_train = permutation_importance(
      f, splits.train, 10, stable_hash({seed, kSaltPi, 0}));
  const PermutationReport pi_test = permutation_importance(
      f, splits.test, 10, stable_hash({seed, kSaltPi, 1}));
  run.add("pi_train.json", emit_json(pi_train));
  run.add("pi_test.json", emit_json(pi_test));
  run.add("pi_test.svg", emit_svg(pi_chart(pi_test, "test")));
  clock.stop();

  clock.start("gain_importance");
  const auto gain = model.gain_importance();
  run.add("gain_importance.json", emit_ranking_json("gain", gain));
  clock.stop();

  clock.start("shap");
  const BackgroundSet background =
      sample_background(splits.train.X, 100, stable_hash({seed, kSaltBackground}));
  const std::size_t n_explain = std::min<std::size_t>(100, splits.test.X.rows);
  Matrix X_explain(0, splits.test.X.cols);
  std::vector<std::int64_t> explain_ids;
  for (std::size_t i = 0; i < n_explain; ++i) {
    X_explain.push_row(splits.test.X.row(i));
    explain_ids.push_back(static_cast<std::int64_t>(i));
  }
  KernelShapConfig shap_config;
  shap_config.seed = stable_hash({seed, kSaltShap});
  const AttributionMatrix attrs = explain_matrix(
      f, X_explain, splits.test.feature_names, background, ShapMethod::kernel, shap_config,
      explain_ids);
  run.add("shap_test.json", emit_json(attrs));
  const auto shap_rank = shap_importance(attrs);
  run.add("shap_importance.json", emit_ranking_json("mean_abs_shap", shap_rank));

  const auto summary = summary_data(attrs, X_explain);
  run.add("summary.json", emit_json(summary));
  {
    const std::size_t n_rows = std::min<std::size_t>(15, summary.size());
    std::vector<std::string> labels;
    std::vector<std::vector<std::pair<double, double>>> rows;
    for (std::size_t i = 0; i < n_rows; ++i) {
      labels.push_back(summary[i].feature);
      std::vector<std::pair<double, double>> row;
      row.reserve(summary[i].points.size());
      for (const auto& p : summary[i].points) row.emplace_back(p.phi, p.normalized_value);
      rows.push_back(std::move(row));
    }
    run.add("summary.svg", emit_svg(ChartSpec::beeswarm("SHAP summary (test)", labels, rows,
                                                        "phi (probability)")));
  }

  const DependencyPoints dependency =
      dependency_data(attrs, X_explain, "education.num", std::nullopt);
  run.add("dependency.json", emit_json(dependency));
  run.add("dependency.svg",
          emit_svg(ChartSpec::scatter("SHAP dependency: education.num (color: " +
                                          dependency.interaction + ")",
                                      dependency.feature_values, dependency.phi_values,
                                      dependency.interaction_values, "education.num", "phi")));

  const ForceData force = force_data(attrs.rows[0], X_explain.row(0), attrs.feature_names);
  run.add("force_0.json", emit_json(force));
  {
    const std::size_t n_rows = std::min<std::size_t>(15, force.entries.size());
    std::vector<std::string> labels;
    std::vector<double> values;
    for (std::size_t i = 0; i < n_rows; ++i) {
      labels.push_back(force.entries[i].feature + " = " + format_metric(force.entries[i].value));
      values.push_back(force.entries[i].phi);
    }
    run.add("force_0.svg",
            emit_svg(ChartSpec::hbar("SHAP force: test instance 0", labels, values, "phi")));
  }

  const DecisionData decision = decision_data(attrs, {});
  run.add("decision.json", emit_json(decision));
  {
    std::vector<std::vector<double>> paths;
    paths.reserve(decision.paths.size());
    for (const auto& p : decision.paths) {
      std::vector<double> path;
      path.reserve(p.cumulative.size() + 1);
      path.push_back(decision.base_value);
      path.insert(path.end(), p.cumulative.begin(), p.cumulative.end());
      paths.push_back(std::move(path));
    }
    run.add("decision.svg",
            emit_svg(ChartSpec::path("SHAP decision paths (test)", decision.feature_order,
                                     paths, decision.base_value, "model output")));
  }
  clock.stop();

  clock.start("lime");
  const LimeStats stats = lime_stats(splits.train);
  {
    LimeConfig config;
    config.seed = stable_hash({seed, kSaltLimeSingle});
    run.add("lime_instance_0.json",
            emit_json(lime_explain(f, splits.test.X.row(0), stats, config, 0)));
  }
  const std::size_t n_stability =
      std::min<std::size_t>(5, splits.test.X.rows);
  for (std::size_t i = 0; i < n_stability; ++i) {
    constexpr int kRuns = 10;
    std::vector<LimeExplanation> runs(kRuns);
    parallel_for(kRuns, [&](std::size_t r) {
      LimeConfig config;
      config.seed = stable_hash({seed, kSaltStability, static_cast<std::uint64_t>(i),
                                 static_cast<std::uint64_t>(r)});
      runs[r] = lime_explain(f, splits.test.X.row(i), stats, config,
                             static_cast<std::int64_t>(i));
    });
    run.add("lime_stability_" + std::to_string(i) + ".json",
            emit_json(summarize_stability(runs, stats)));
  }
  clock.stop();

  clock.start("surrogate");
  const SurrogateReport tree_surrogate =
      fit_global_surrogate(f, splits, SurrogateKind::decision_tree);
  run.add("surrogate_tree.json", emit_json(tree_surrogate));
  run.add("surrogate_tree.txt", tree_surrogate.tree_text);
  const SurrogateReport logistic_surrogate =
      fit_global_surrogate(f, splits, SurrogateKind::logistic);
  run.add("surrogate_logistic.json", emit_json(logistic_surrogate));
  clock.stop();

  clock.start("sp_lime");
  std::vector<LimeExplanation> w_explanations;
  const Matrix W = build_w_matrix(f, splits.test, stats, 200, 8, seed, &w_explanations);
  const PickResult picks = sp_lime(W, 5);
  run.add("sp_lime.json", emit_json(picks));
  run.add("sp_lime_picks.json", picks_json(picks, w_explanations).dump(2) + "\n");
  clock.stop();

  clock.start("audit");
  AuditConfig audit_config;
  audit_config.sample_size = std::min<std::size_t>(2000, splits.train.X.rows);
  audit_config.seed = stable_hash({seed, kSaltAudit});
  const DependenceReport dependence = audit(f, splits.train, audit_config);
  run.add("audit.json", emit_json(dependence));
  run.add("audit.svg", emit_svg(audit_chart(dependence)));

  const std::vector<std::string> gaps = compare_with_importance(
      dependence, ranking_names(shap_rank), expand_pi_ranking(pi_train, splits.train));
  {
    ordered_json j;
    j["format"] = "glassbox.audit_gaps";
    j["version"] = 1;
    j["threshold"] = 0.25;
    j["features"] = gaps;
    run.add("audit_gaps.json", j.dump(2) + "\n");
  }
  clock.stop();

  // manifest: run_hash covers config, input and artifact hashes; wall-clock
  // timings go to stdout only so repeated runs are byte-identical
  ordered_json config_json;
  config_json["ratio"] = opt.ratio;
  config_json["seed"] = seed;
  config_json["gbt"] = {{"n_trees", gbt_config.n_trees},
                        {"max_depth", gbt_config.max_depth},
                        {"learning_rate", gbt_config.learning_rate},
                        {"min_child_weight", gbt_config.min_child_weight},
                        {"subsample", gbt_config.subsample}};
  config_json["shap"] = {{"method", "kernel"},
                         {"n_coalitions", shap_config.n_coalitions},
                         {"background_size", background.rows.rows},
                         {"explained_instances", n_explain}};
  config_json["lime"] = {{"n_samples", 5000},
                         {"top_k", 6},
                         {"stability_instances", n_stability},
                         {"stability_runs", 10},
                         {"w_instances", W.rows},
                         {"w_top_k", 8}};
  config_json["sp_lime_budget"] = 5;
  config_json["audit"] = {{"sample_size", audit_config.sample_size},
                          {"sensitive", audit_config.sensitive_features},
                          {"split", "train"}};

  std::string hash_input = "config:" + config_json.dump() + "\n";
  hash_input += "input:" + bundle.sha256 + "\n";
  std::vector<std::pair<std::string, std::string>> sorted_entries = run.entries();
  std::sort(sorted_entries.begin(), sorted_entries.end());
  for (const auto& [name, digest] : sorted_entries) {
    hash_input += name + ":" + digest + "\n";
  }
  const std::string run_hash = sha256_hex(hash_input);

  ordered_json manifest;
  manifest["format"] = "glassbox.manifest";
  manifest["version"] = 1;
  manifest["input"] = {{"path", opt.data}, {"sha256", bundle.sha256}};
  manifest["config"] = config_json;
  manifest["seeds"] = {
      {"split", seed},
      {"subsample", gbt_config.subsample_seed},
      {"background", stable_hash({seed, kSaltBackground})},
      {"shap", shap_config.seed},
      {"pi_train", stable_hash({seed, kSaltPi, 0})},
      {"pi_test", stable_hash({seed, kSaltPi, 1})},
      {"lime_instance", stable_hash({seed, kSaltLimeSingle})},
      {"audit", audit_config.seed}};
  manifest["artifacts"] = ordered_json::array();
  for (const auto& [name, digest] : sorted_entries) {
    manifest["artifacts"].push_back({{"path", name}, {"sha256", digest}});
  }
  manifest["run_hash"] = run_hash;
  write_file((fs::path(run.dir()) / "manifest.json").string(), manifest.dump(2) + "\n");

  for (const auto& [stage, ms] : clock.timings())
    std::cout << "stage " << stage << " " << ms << "ms\n";
  std::cout << "run_hash " << run_hash << "\n";
  std::cout << "artifacts " << sorted_entries.size() + 1 << " -> " << run.dir() << "\n";
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"glassbox: explainability and fairness audit toolkit for tabular binary classifiers"};
  app.require_subcommand(1);
  std::size_t threads = 0;
  app.add_option("--threads", threads, "worker thread cap (0 = hardware)");

  IngestOptions ingest_opt;
  auto* ingest = app.add_subcommand("ingest", "parse a census csv and print its schema");
  ingest->add_option("--data", ingest_opt.data, "local csv path");
  ingest->add_option("--fetch", ingest_opt.fetch, "download csv from this url");
  ingest->add_option("--sha256", ingest_opt.expected_sha256, "expected content hash");
  ingest->add_option("--save", ingest_opt.save, "store the (fetched) csv here");
  ingest->add_option("--out", ingest_opt.out, "write schema json here instead of stdout");

  TrainOptions train_opt;
  auto* train = app.add_subcommand("train", "train the gradient boosted tree black box");
  train->add_option("--data", train_opt.data, "census csv")->required();
  train->add_option("--ratio", train_opt.ratio, "train fraction");
  train->add_option("--seed", train_opt.seed, "split + subsample seed");
  train->add_option("--n-trees", train_opt.gbt.n_trees, "boosting rounds");
  train->add_option("--max-depth", train_opt.gbt.max_depth, "tree depth");
  train->add_option("--learning-rate", train_opt.gbt.learning_rate, "shrinkage");
  train->add_option("--min-child-weight", train_opt.gbt.min_child_weight, "min hessian per child");
  train->add_option("--subsample", train_opt.gbt.subsample, "row subsample fraction");
  train->add_option("--out", train_opt.out, "model json path");

  EvalOptions eval_opt;
  auto* eval = app.add_subcommand("eval", "score a trained model on a split");
  eval->add_option("--model", eval_opt.model, "model json")->required();
  eval->add_option("--data", eval_opt.data, "census csv")->required();
  eval->add_option("--ratio", eval_opt.ratio, "train fraction");
  eval->add_option("--split-seed", eval_opt.split_seed, "split seed");
  eval->add_option("--split", eval_opt.split, "train|test");
  eval->add_option("--out", eval_opt.out, "metrics json path");

  ShapOptions shap_opt;
  auto* shap = app.add_subcommand("explain-shap", "shapley attributions for test instances");
  shap->add_option("--model", shap_opt.model)->required();
  shap->add_option("--data", shap_opt.data)->required();
  shap->add_option("--ratio", shap_opt.ratio, "train fraction");
  shap->add_option("--split-seed", shap_opt.split_seed, "split seed");
  shap->add_option("--instances", shap_opt.instances, "test row indices")->delimiter(',');
  shap->add_flag("--exact", shap_opt.exact, "exact enumeration (M <= 20)");
  shap->add_flag("--kernel", shap_opt.kernel, "kernel shap (default)");
  shap->add_option("--n-coalitions", shap_opt.n_coalitions, "sampled coalitions");
  shap->add_option("--background-size", shap_opt.background_size, "background rows");
  shap->add_option("--seed", shap_opt.seed, "coalition seed");
  shap->add_flag("--logodds", shap_opt.logodds, "attribute log-odds instead of probability");
  shap->add_option("--out", shap_opt.out, "attributions json path");

  LimeOptions lime_opt;
  auto* lime = app.add_subcommand("explain-lime", "local surrogate explanation for one instance");
  lime->add_option("--model", lime_opt.model)->required();
  lime->add_option("--data", lime_opt.data)->required();
  lime->add_option("--ratio", lime_opt.ratio, "train fraction");
  lime->add_option("--split-seed", lime_opt.split_seed, "split seed");
  lime->add_option("--instance", lime_opt.instance, "test row index");
  lime->add_option("--n-samples", lime_opt.n_samples, "neighborhood size");
  lime->add_option("--top-k", lime_opt.top_k, "selected features");
  lime->add_option("--seed", lime_opt.seed, "sampling seed (omit for fresh entropy)");
  lime->add_option("--runs", lime_opt.runs, ">= 2 switches to stability mode");
  lime->add_option("--out", lime_opt.out, "json path");

  PiOptions pi_opt;
  auto* pi = app.add_subcommand("global-importance", "permutation importance per feature unit");
  pi->add_option("--model", pi_opt.model)->required();
  pi->add_option("--data", pi_opt.data)->required();
  pi->add_option("--ratio", pi_opt.ratio, "train fraction");
  pi->add_option("--split-seed", pi_opt.split_seed, "split seed");
  pi->add_option("--split", pi_opt.split, "train|test");
  pi->add_option("--repeats", pi_opt.repeats, "permutation repeats");
  pi->add_option("--seed", pi_opt.seed, "permutation seed");
  pi->add_option("--out", pi_opt.out, "json path");

  SurrogateOptions surrogate_opt;
  auto* surrogate = app.add_subcommand("surrogate", "global surrogate with fidelity gating");
  surrogate->add_option("--model", surrogate_opt.model)->required();
  surrogate->add_option("--data", surrogate_opt.data)->required();
  surrogate->add_option("--ratio", surrogate_opt.ratio, "train fraction");
  surrogate->add_option("--split-seed", surrogate_opt.split_seed, "split seed");
  surrogate->add_option("--kind", surrogate_opt.kind, "tree|logistic");
  surrogate->add_option("--out", surrogate_opt.out, "json path");

  SpLimeOptions sp_opt;
  auto* sp = app.add_subcommand("sp-lime", "submodular pick over local explanations");
  sp->add_option("--model", sp_opt.model)->required();
  sp->add_option("--data", sp_opt.data)->required();
  sp->add_option("--ratio", sp_opt.ratio, "train fraction");
  sp->add_option("--split-seed", sp_opt.split_seed, "split seed");
  sp->add_option("--budget", sp_opt.budget, "instances to pick");
  sp->add_option("--n-explained", sp_opt.n_explained, "test instances to explain");
  sp->add_option("--top-k", sp_opt.top_k, "features per local explanation");
  sp->add_option("--seed", sp_opt.seed, "lime seed");
  sp->add_option("--out", sp_opt.out, "json path");

  AuditOptions audit_opt;
  auto* audit_cmd = app.add_subcommand("audit", "orthogonal-projection fairness audit");
  audit_cmd->add_option("--model", audit_opt.model)->required();
  audit_cmd->add_option("--data", audit_opt.data)->required();
  audit_cmd->add_option("--ratio", audit_opt.ratio, "train fraction");
  audit_cmd->add_option("--split-seed", audit_opt.split_seed, "split seed");
  audit_cmd->add_option("--split", audit_opt.split, "train|test");
  audit_cmd->add_option("--sample-size", audit_opt.sample_size, "audit rows (0 = min(2000, rows))");
  audit_cmd->add_option("--seed", audit_opt.seed, "sample + permutation seed");
  audit_cmd->add_option("--sensitive", audit_opt.sensitive, "sensitive name globs")
      ->delimiter(',');
  audit_cmd->add_option("--out", audit_opt.out, "json path (svg written alongside)");

  ReproduceOptions repro_opt;
  auto* repro = app.add_subcommand("reproduce", "run the full pipeline and write a manifest");
  repro->add_option("--data", repro_opt.data, "census csv")->required();
  repro->add_option("--seed", repro_opt.seed, "master seed");
  repro->add_option("--ratio", repro_opt.ratio, "train fraction");
  repro->add_option("--n-trees", repro_opt.gbt.n_trees, "boosting rounds");
  repro->add_option("--max-depth", repro_opt.gbt.max_depth, "tree depth");
  repro->add_option("--learning-rate", repro_opt.gbt.learning_rate, "shrinkage");
  repro->add_option("--out", repro_opt.out, "output directory");

  // Lets the app-level --threads flag appear after the subcommand name too.
  for (auto* sub : app.get_subcommands([](const CLI::App*) { return true; })) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  set_max_threads(threads);
  try {
    if (*ingest) return cmd_ingest(ingest_opt);
    if (*train) return cmd_train(train_opt);
    if (*eval) return cmd_eval(eval_opt);
    if (*shap) return cmd_explain_shap(shap_opt);
    if (*lime) return cmd_explain_lime(lime_opt);
    if (*pi) return cmd_global_importance(pi_opt);
    if (*surrogate) return cmd_surrogate(surrogate_opt);
    if (*sp) return cmd_sp_lime(sp_opt);
    if (*audit_cmd) return cmd_audit(audit_opt);
    if (*repro) return cmd_reproduce(repro_opt);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::io ? 3 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<std::string> full;
  full.reserve(args.size() + 1);
  full.push_back("glassbox");
  full.insert(full.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  argv.reserve(full.size());
  for (const auto& arg : full) argv.push_back(arg.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace glassbox
