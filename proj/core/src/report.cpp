#include "glassbox/report.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <span>
#include <sstream>

#include <nlohmann/json.hpp>

#include "glassbox/rng.hpp"

namespace glassbox {

using ordered_json = nlohmann::ordered_json;

namespace {

void check_finite_json(const ordered_json& j, const std::string& where) {
  if (j.is_number_float() && !std::isfinite(j.get<double>())) {
    throw numeric_error("refusing to serialize non-finite number in " + where);
  }
  if (j.is_object() || j.is_array()) {
    for (const auto& item : j) check_finite_json(item, where);
  }
}

std::string dump(const ordered_json& j, const std::string& where) {
  check_finite_json(j, where);
  return j.dump(2) + "\n";
}

ordered_json metric_fields(const MetricReport& m) {
  ordered_json j;
  j["accuracy"] = m.accuracy;
  j["precision"] = m.precision;
  j["recall"] = m.recall;
  j["f1"] = m.f1;
  j["auc"] = m.auc;
  j["threshold"] = m.threshold;
  return j;
}

const char* surrogate_kind_name(SurrogateKind kind) {
  switch (kind) {
    case SurrogateKind::decision_tree: return "decision_tree";
    case SurrogateKind::logistic: return "logistic";
    case SurrogateKind::self: return "self";
  }
  return "unknown";
}

}  // namespace

std::string emit_json(const MetricReport& report) {
  ordered_json j;
  j["format"] = "glassbox.metrics";
  j["version"] = 1;
  j.update(metric_fields(report));
  return dump(j, "metrics");
}

MetricReport parse_metric_report(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw io_error(std::string("invalid metrics json: ") + e.what());
  }
  if (j.value("format", "") != "glassbox.metrics") {
    throw validation_error("unexpected format tag: " + j.value("format", std::string("<missing>")));
  }
  if (j.value("version", 0) != 1) {
    throw validation_error("unsupported metrics version");
  }
  MetricReport m;
  try {
    m.accuracy = j.at("accuracy").get<double>();
    m.precision = j.at("precision").get<double>();
    m.recall = j.at("recall").get<double>();
    m.f1 = j.at("f1").get<double>();
    m.auc = j.at("auc").get<double>();
    m.threshold = j.at("threshold").get<double>();
  } catch (const std::exception& e) {
    throw validation_error(std::string("incomplete metrics json: ") + e.what());
  }
  return m;
}

std::string emit_json(const PermutationReport& report) {
  ordered_json j;
  j["format"] = "glassbox.permutation_importance";
  j["version"] = 1;
  j["metric"] = "auc";
  j["baseline_auc"] = report.baseline_auc;
  j["repeats"] = report.repeats;
  j["seed"] = report.seed;
  j["ranking"] = ordered_json::array();
  for (const auto& e : report.ranking) {
    j["ranking"].push_back({{"feature", e.feature}, {"mean_drop", e.mean_drop}, {"stddev", e.stddev}});
  }
  return dump(j, "permutation importance");
}

std::string emit_json(const SurrogateReport& report) {
  ordered_json j;
  j["format"] = "glassbox.surrogate";
  j["version"] = 1;
  j["kind"] = surrogate_kind_name(report.kind);
  j["r2_train"] = report.r2_train;
  j["r2_test"] = report.r2_test;
  j["accepted"] = report.accepted;
  j["train_metrics"] = metric_fields(report.train_metrics);
  j["test_metrics"] = metric_fields(report.test_metrics);
  if (!report.tree_text.empty()) j["tree_text"] = report.tree_text;
  return dump(j, "surrogate report");
}

std::string emit_json(const AttributionMatrix& attrs) { return attrs.to_json_string(); }

std::string emit_json(const LimeExplanation& explanation) {
  ordered_json j;
  j["format"] = "glassbox.lime";
  j["version"] = 1;
  j["instance_id"] = explanation.instance_id;
  j["intercept"] = explanation.intercept;
  j["local_r2"] = explanation.local_r2;
  j["predicted_local"] = explanation.predicted_local;
  j["coefficients"] = ordered_json::array();
  for (const auto& [name, weight] : explanation.coefficients) {
    j["coefficients"].push_back({{"feature", name}, {"weight", weight}});
  }
  return dump(j, "lime explanation");
}

std::string emit_json(const StabilityReport& report) {
  ordered_json j;
  j["format"] = "glassbox.lime_stability";
  j["version"] = 1;
  j["runs"] = report.runs;
  j["mean_pairwise_jaccard_topk"] = report.mean_pairwise_jaccard_topk;
  j["distinct_topk_sets"] = report.distinct_topk_sets;
  j["coefficient_stddev"] = ordered_json::array();
  for (std::size_t u = 0; u < report.unit_names.size(); ++u) {
    j["coefficient_stddev"].push_back(
        {{"feature", report.unit_names[u]}, {"stddev", report.coefficient_stddev[u]}});
  }
  return dump(j, "lime stability");
}

std::string emit_json(const DependenceReport& report) {
  ordered_json j;
  j["format"] = "glassbox.audit";
  j["version"] = 1;
  j["sample_size"] = report.sample_size;
  j["seed"] = report.seed;
  j["entries"] = ordered_json::array();
  for (const auto& e : report.entries) {
    j["entries"].push_back({{"feature", e.feature},
                            {"raw", e.raw},
                            {"normalized", e.normalized},
                            {"sensitive", e.sensitive}});
  }
  return dump(j, "audit report");
}

std::string emit_json(const PickResult& result) {
  ordered_json j;
  j["format"] = "glassbox.sp_lime";
  j["version"] = 1;
  j["budget"] = result.budget;
  j["selected"] = result.selected;
  j["coverage"] = result.coverage;
  j["coverage_steps"] = result.coverage_steps;
  return dump(j, "sp-lime result");
}

std::string emit_json(const ForceData& data) {
  ordered_json j;
  j["format"] = "glassbox.force";
  j["version"] = 1;
  j["base_value"] = data.base_value;
  j["output_value"] = data.output_value;
  j["entries"] = ordered_json::array();
  for (const auto& e : data.entries) {
    j["entries"].push_back({{"feature", e.feature}, {"value", e.value}, {"phi", e.phi}});
  }
  return dump(j, "force data");
}

std::string emit_json(const DecisionData& data) {
  ordered_json j;
  j["format"] = "glassbox.decision";
  j["version"] = 1;
  j["base_value"] = data.base_value;
  j["feature_order"] = data.feature_order;
  j["paths"] = ordered_json::array();
  for (const auto& p : data.paths) {
    j["paths"].push_back({{"instance_id", p.instance_id},
                          {"cumulative", p.cumulative},
                          {"output_value", p.output_value}});
  }
  return dump(j, "decision data");
}

std::string emit_json(const std::vector<SummarySeries>& summary) {
  ordered_json j;
  j["format"] = "glassbox.summary";
  j["version"] = 1;
  j["series"] = ordered_json::array();
  for (const auto& s : summary) {
    ordered_json phi = ordered_json::array();
    ordered_json val = ordered_json::array();
    for (const auto& p : s.points) {
      phi.push_back(p.phi);
      val.push_back(p.normalized_value);
    }
    j["series"].push_back(
        {{"feature", s.feature}, {"phi", phi}, {"normalized_value", val}});
  }
  return dump(j, "summary data");
}

std::string emit_json(const DependencyPoints& points) {
  ordered_json j;
  j["format"] = "glassbox.dependency";
  j["version"] = 1;
  j["feature"] = points.feature;
  j["interaction"] = points.interaction;
  j["feature_values"] = points.feature_values;
  j["phi_values"] = points.phi_values;
  j["interaction_values"] = points.interaction_values;
  return dump(j, "dependency data");
}

std::string emit_ranking_json(const std::string& kind,
                              const std::vector<std::pair<std::string, double>>& ranked) {
  ordered_json j;
  j["format"] = "glassbox.ranking";
  j["version"] = 1;
  j["kind"] = kind;
  j["ranking"] = ordered_json::array();
  for (const auto& [name, score] : ranked) {
    j["ranking"].push_back({{"feature", name}, {"score", score}});
  }
  return dump(j, "ranking");
}

// ---------------------------------------------------------------------------
// SVG charts

namespace {

constexpr double kSvgWidth = 900.0;
constexpr double kSvgHeight = 560.0;

std::string fmt(double v, int decimals = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  // normalize negative zero so identical geometry yields identical bytes
  std::string s(buf);
  if (s == "-0" || s.rfind("-0.", 0) == 0) {
    bool all_zero = true;
    for (char c : s) {
      if (c != '-' && c != '0' && c != '.') { all_zero = false; break; }
    }
    if (all_zero) s.erase(0, 1);
  }
  return s;
}

std::string escape_xml(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

void require_finite_values(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) throw numeric_error(std::string("non-finite value in ") + what);
  }
}

// blue -> red ramp used for shap-style value coloring, t in [0, 1]
std::string ramp_color(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const int r = static_cast<int>(std::lround(0 + t * (255 - 0)));
  const int g = static_cast<int>(std::lround(139 + t * (0 - 139)));
  const int b = static_cast<int>(std::lround(251 + t * (81 - 251)));
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

struct SvgBuilder {
  std::ostringstream out;

  SvgBuilder(const std::string& title) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << fmt(kSvgWidth, 0)
        << " " << fmt(kSvgHeight, 0) << "\" font-family=\"monospace\" font-size=\"13\">\n";
    out << "<rect x=\"0\" y=\"0\" width=\"" << fmt(kSvgWidth, 0) << "\" height=\""
        << fmt(kSvgHeight, 0) << "\" fill=\"#ffffff\"/>\n";
    out << "<text x=\"" << fmt(kSvgWidth / 2, 0)
        << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << escape_xml(title)
        << "</text>\n";
  }

  void line(double x1, double y1, double x2, double y2, const std::string& stroke,
            double width = 1.0) {
    out << "<line x1=\"" << fmt(x1) << "\" y1=\"" << fmt(y1) << "\" x2=\"" << fmt(x2)
        << "\" y2=\"" << fmt(y2) << "\" stroke=\"" << stroke << "\" stroke-width=\""
        << fmt(width, 1) << "\"/>\n";
  }

  void rect(double x, double y, double w, double h, const std::string& fill) {
    out << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" width=\"" << fmt(w)
        << "\" height=\"" << fmt(h) << "\" fill=\"" << fill << "\"/>\n";
  }

  void circle(double cx, double cy, double r, const std::string& fill, double opacity = 1.0) {
    out << "<circle cx=\"" << fmt(cx) << "\" cy=\"" << fmt(cy) << "\" r=\"" << fmt(r, 1)
        << "\" fill=\"" << fill << "\" fill-opacity=\"" << fmt(opacity, 2) << "\"/>\n";
  }

  void text(double x, double y, const std::string& content, const std::string& anchor = "start",
            int size = 13) {
    out << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" text-anchor=\"" << anchor
        << "\" font-size=\"" << size << "\">" << escape_xml(content) << "</text>\n";
  }

  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke) {
    out << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i) out << ' ';
      out << fmt(pts[i].first) << ',' << fmt(pts[i].second);
    }
    out << "\"/>\n";
  }

  std::string finish() {
    out << "</svg>\n";
    return out.str();
  }
};

struct Axis {
  double vmin = 0.0, vmax = 1.0;
  double px0 = 0.0, px1 = 1.0;
  double place(double v) const { return px0 + (v - vmin) / (vmax - vmin) * (px1 - px0); }
};

Axis make_axis(double vmin, double vmax, double px0, double px1) {
  if (vmin == vmax) {
    vmin -= 0.5;
    vmax += 0.5;
  }
  return Axis{vmin, vmax, px0, px1};
}

void draw_x_ticks(SvgBuilder& svg, const Axis& ax, double y_bottom, const std::string& label) {
  for (int t = 0; t <= 4; ++t) {
    const double v = ax.vmin + (ax.vmax - ax.vmin) * t / 4.0;
    const double x = ax.place(v);
    svg.line(x, y_bottom, x, y_bottom + 4, "#333333");
    svg.text(x, y_bottom + 18, fmt(v), "middle", 11);
  }
  if (!label.empty()) {
    svg.text((ax.px0 + ax.px1) / 2, y_bottom + 36, label, "middle", 12);
  }
}

std::string render_hbar(const ChartSpec& spec) {
  SvgBuilder svg(spec.title);
  const double left = 260, right = kSvgWidth - 30, top = 52, bottom = kSvgHeight - 50;
  double vmin = 0.0, vmax = 0.0;
  for (double v : spec.values) {
    vmin = std::min(vmin, v);
    vmax = std::max(vmax, v);
  }
  if (vmin == 0.0 && vmax == 0.0) vmax = 1.0;
  const Axis ax = make_axis(vmin, vmax, left, right);
  const double x_zero = ax.place(0.0);
  const std::size_t n = spec.labels.size();
  const double band = (bottom - top) / static_cast<double>(n);
  const double bar_h = band * 0.72;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = spec.values[i];
    const double y = top + band * static_cast<double>(i) + (band - bar_h) / 2;
    const double x_val = ax.place(v);
    // positive bars darker, matching the audit chart convention
    const std::string fill = v >= 0.0 ? "#1f4e79" : "#9dc3e0";
    svg.rect(std::min(x_zero, x_val), y, std::abs(x_val - x_zero), bar_h, fill);
    svg.text(left - 8, y + bar_h / 2 + 4, spec.labels[i], "end", 12);
    const bool to_right = v >= 0.0;
    svg.text(x_val + (to_right ? 4.0 : -4.0), y + bar_h / 2 + 4, fmt(v, 4),
             to_right ? "start" : "end", 10);
  }
  svg.line(x_zero, top, x_zero, bottom, "#333333");
  draw_x_ticks(svg, ax, bottom, spec.x_label);
  return svg.finish();
}

std::string render_scatter(const ChartSpec& spec) {
  SvgBuilder svg(spec.title);
  const double left = 90, right = kSvgWidth - 40, top = 52, bottom = kSvgHeight - 60;
  double xmin = spec.xs[0], xmax = spec.xs[0], ymin = spec.ys[0], ymax = spec.ys[0];
  for (double v : spec.xs) {
    xmin = std::min(xmin, v);
    xmax = std::max(xmax, v);
  }
  for (double v : spec.ys) {
    ymin = std::min(ymin, v);
    ymax = std::max(ymax, v);
  }
  const Axis ax = make_axis(xmin, xmax, left, right);
  const Axis ay = make_axis(ymin, ymax, bottom, top);  // inverted: larger y higher
  double cmin = 0.0, cmax = 0.0;
  if (!spec.colors.empty()) {
    cmin = *std::min_element(spec.colors.begin(), spec.colors.end());
    cmax = *std::max_element(spec.colors.begin(), spec.colors.end());
  }
  svg.line(left, bottom, right, bottom, "#333333");
  svg.line(left, top, left, bottom, "#333333");
  for (std::size_t i = 0; i < spec.xs.size(); ++i) {
    std::string fill = "#1f4e79";
    if (!spec.colors.empty()) {
      const double t = cmax > cmin ? (spec.colors[i] - cmin) / (cmax - cmin) : 0.5;
      fill = ramp_color(t);
    }
    svg.circle(ax.place(spec.xs[i]), ay.place(spec.ys[i]), 3.0, fill, 0.8);
  }
  draw_x_ticks(svg, ax, bottom, spec.x_label);
  for (int t = 0; t <= 4; ++t) {
    const double v = ymin + (ymax - ymin) * t / 4.0;
    svg.text(left - 8, ay.place(v) + 4, fmt(v), "end", 11);
  }
  if (!spec.y_label.empty()) svg.text(18, (top + bottom) / 2, spec.y_label, "middle", 12);
  return svg.finish();
}

std::string render_beeswarm(const ChartSpec& spec) {
  SvgBuilder svg(spec.title);
  const double left = 260, right = kSvgWidth - 30, top = 52, bottom = kSvgHeight - 50;
  double m = 0.0;
  for (const auto& row : spec.rows) {
    for (const auto& [x, c] : row) m = std::max(m, std::abs(x));
  }
  if (m == 0.0) m = 1.0;
  const Axis ax = make_axis(-m, m, left, right);
  const std::size_t n = spec.labels.size();
  const double band = (bottom - top) / static_cast<double>(n);
  svg.line(ax.place(0.0), top, ax.place(0.0), bottom, "#cccccc");
  for (std::size_t i = 0; i < n; ++i) {
    const double cy0 = top + band * (static_cast<double>(i) + 0.5);
    svg.text(left - 8, cy0 + 4, spec.labels[i], "end", 12);
    for (std::size_t p = 0; p < spec.rows[i].size(); ++p) {
      const auto& [x, c] = spec.rows[i][p];
      // deterministic jitter keyed on the point value and index
      const std::uint64_t h =
          stable_hash({static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(p),
                       std::bit_cast<std::uint64_t>(x)});
      const double jitter = (static_cast<double>(h >> 11) * 0x1.0p-53 - 0.5) * band * 0.66;
      svg.circle(ax.place(x), cy0 + jitter, 2.5, ramp_color(c), 0.75);
    }
  }
  draw_x_ticks(svg, ax, bottom, spec.x_label);
  return svg.finish();
}

std::string render_path(const ChartSpec& spec) {
  SvgBuilder svg(spec.title);
  const double left = 260, right = kSvgWidth - 40, top = 52, bottom = kSvgHeight - 50;
  double vmin = spec.baseline, vmax = spec.baseline;
  for (const auto& path : spec.paths) {
    for (double v : path) {
      vmin = std::min(vmin, v);
      vmax = std::max(vmax, v);
    }
  }
  const Axis ax = make_axis(vmin, vmax, left, right);
  const std::size_t n = spec.labels.size();
  // y positions: row 0 at the bottom (first feature applied), top is the output
  const double band = (bottom - top) / static_cast<double>(n + 1);
  svg.line(ax.place(spec.baseline), top, ax.place(spec.baseline), bottom, "#999999");
  for (std::size_t i = 0; i < n; ++i) {
    const double y = bottom - band * static_cast<double>(i + 1);
    svg.line(left, y, right, y, "#eeeeee");
    svg.text(left - 8, y + 4, spec.labels[i], "end", 12);
  }
  double fmin = spec.paths[0].back(), fmax = fmin;
  for (const auto& path : spec.paths) {
    fmin = std::min(fmin, path.back());
    fmax = std::max(fmax, path.back());
  }
  for (const auto& path : spec.paths) {
    std::vector<std::pair<double, double>> pts;
    pts.reserve(path.size());
    for (std::size_t s = 0; s < path.size(); ++s) {
      pts.emplace_back(ax.place(path[s]), bottom - band * static_cast<double>(s));
    }
    const double t = fmax > fmin ? (path.back() - fmin) / (fmax - fmin) : 0.5;
    svg.polyline(pts, ramp_color(t));
  }
  draw_x_ticks(svg, ax, bottom, spec.x_label);
  return svg.finish();
}

}  // namespace

ChartSpec ChartSpec::hbar(std::string title, std::vector<std::string> labels,
                          std::vector<double> values, std::string x_label) {
  if (labels.empty()) throw validation_error("hbar chart requires at least one bar");
  if (labels.size() != values.size()) {
    throw validation_error("hbar labels and values must have equal length");
  }
  require_finite_values(values, "hbar values");
  ChartSpec spec;
  spec.kind = ChartKind::hbar;
  spec.title = std::move(title);
  spec.labels = std::move(labels);
  spec.values = std::move(values);
  spec.x_label = std::move(x_label);
  return spec;
}

ChartSpec ChartSpec::scatter(std::string title, std::vector<double> xs, std::vector<double> ys,
                             std::vector<double> colors, std::string x_label,
                             std::string y_label) {
  if (xs.empty()) throw validation_error("scatter chart requires at least one point");
  if (xs.size() != ys.size() || (!colors.empty() && colors.size() != xs.size())) {
    throw validation_error("scatter series must have equal length");
  }
  require_finite_values(xs, "scatter x");
  require_finite_values(ys, "scatter y");
  require_finite_values(colors, "scatter colors");
  ChartSpec spec;
  spec.kind = ChartKind::scatter;
  spec.title = std::move(title);
  spec.xs = std::move(xs);
  spec.ys = std::move(ys);
  spec.colors = std::move(colors);
  spec.x_label = std::move(x_label);
  spec.y_label = std::move(y_label);
  return spec;
}

ChartSpec ChartSpec::beeswarm(std::string title, std::vector<std::string> labels,
                              std::vector<std::vector<std::pair<double, double>>> rows,
                              std::string x_label) {
  if (labels.empty()) throw validation_error("beeswarm chart requires at least one feature row");
  if (labels.size() != rows.size()) {
    throw validation_error("beeswarm labels and rows must have equal length");
  }
  for (const auto& row : rows) {
    for (const auto& [x, c] : row) {
      if (!std::isfinite(x) || !std::isfinite(c)) {
        throw numeric_error("non-finite value in beeswarm points");
      }
    }
  }
  ChartSpec spec;
  spec.kind = ChartKind::beeswarm;
  spec.title = std::move(title);
  spec.labels = std::move(labels);
  spec.rows = std::move(rows);
  spec.x_label = std::move(x_label);
  return spec;
}

ChartSpec ChartSpec::path(std::string title, std::vector<std::string> labels,
                          std::vector<std::vector<double>> paths, double baseline,
                          std::string x_label) {
  if (labels.empty() || paths.empty()) {
    throw validation_error("path chart requires features and at least one path");
  }
  for (const auto& p : paths) {
    if (p.size() != labels.size() + 1) {
      throw validation_error("each path needs one value per feature plus the base");
    }
    require_finite_values(p, "path values");
  }
  if (!std::isfinite(baseline)) throw numeric_error("non-finite path baseline");
  ChartSpec spec;
  spec.kind = ChartKind::path;
  spec.title = std::move(title);
  spec.labels = std::move(labels);
  spec.paths = std::move(paths);
  spec.baseline = baseline;
  spec.x_label = std::move(x_label);
  return spec;
}

std::string emit_svg(const ChartSpec& spec) {
  switch (spec.kind) {
    case ChartKind::hbar: return render_hbar(spec);
    case ChartKind::scatter: return render_scatter(spec);
    case ChartKind::beeswarm: return render_beeswarm(spec);
    case ChartKind::path: return render_path(spec);
  }
  throw validation_error("unknown chart kind");
}

void emit_svg_file(const ChartSpec& spec, const std::string& path) {
  write_file(path, emit_svg(spec));
}

std::string emit_text_table(const std::vector<std::string>& headers,
                            const std::vector<std::vector<std::string>>& rows) {
  if (headers.empty()) throw validation_error("table requires at least one column");
  for (const auto& row : rows) {
    if (row.size() != headers.size()) {
      throw validation_error("ragged table row: expected " + std::to_string(headers.size()) +
                             " cells, got " + std::to_string(row.size()));
    }
  }
  std::vector<std::size_t> widths(headers.size());
  for (std::size_t c = 0; c < headers.size(); ++c) widths[c] = headers[c].size();
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], row[c].size());
  }
  std::ostringstream out;
  auto emit_row = [&](const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c) out << "  ";
      out << cells[c];
      if (c + 1 < cells.size()) out << std::string(widths[c] - cells[c].size(), ' ');
    }
    out << '\n';
  };
  emit_row(headers);
  for (std::size_t c = 0; c < headers.size(); ++c) {
    if (c) out << "  ";
    out << std::string(widths[c], '-');
  }
  out << '\n';
  for (const auto& row : rows) emit_row(row);
  return out.str();
}

std::string format_metric(double value) {
  if (!std::isfinite(value)) throw numeric_error("non-finite metric value");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", value);
  return buf;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw numeric_error("sha256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

std::string sha256_file(const std::string& path) { return sha256_hex(read_file(path)); }

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open for writing: " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw io_error("write failed: " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw io_error("read failed: " + path);
  return buf.str();
}

}  // namespace glassbox
