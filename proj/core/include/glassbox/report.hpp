#pragma once

#include <string>
#include <utility>
#include <vector>

#include "glassbox/fairness.hpp"
#include "glassbox/global.hpp"
#include "glassbox/lime.hpp"
#include "glassbox/metrics.hpp"
#include "glassbox/shap.hpp"

namespace glassbox {

// Every emitter returns deterministic bytes: fixed field order, versioned
// format tag, full-precision round-tripping numbers. Non-finite values are
// rejected rather than serialized.
std::string emit_json(const MetricReport& report);
std::string emit_json(const PermutationReport& report);
std::string emit_json(const SurrogateReport& report);
std::string emit_json(const AttributionMatrix& attrs);
std::string emit_json(const LimeExplanation& explanation);
std::string emit_json(const StabilityReport& report);
std::string emit_json(const DependenceReport& report);
std::string emit_json(const PickResult& result);
std::string emit_json(const ForceData& data);
std::string emit_json(const DecisionData& data);
std::string emit_json(const std::vector<SummarySeries>& summary);
std::string emit_json(const DependencyPoints& points);
std::string emit_ranking_json(const std::string& kind,
                              const std::vector<std::pair<std::string, double>>& ranked);

MetricReport parse_metric_report(const std::string& text);

enum class ChartKind { hbar, scatter, beeswarm, path };

struct ChartSpec {
  ChartKind kind = ChartKind::hbar;
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<std::string> labels;                          // hbar, beeswarm, path feature axis
  std::vector<double> values;                               // hbar
  std::vector<double> xs, ys, colors;                       // scatter
  std::vector<std::vector<std::pair<double, double>>> rows; // beeswarm: (x, color 0..1) per label
  std::vector<std::vector<double>> paths;                   // path: cumulative values per line
  double baseline = 0.0;                                    // path: gray reference line

  static ChartSpec hbar(std::string title, std::vector<std::string> labels,
                        std::vector<double> values, std::string x_label = "");
  static ChartSpec scatter(std::string title, std::vector<double> xs, std::vector<double> ys,
                           std::vector<double> colors, std::string x_label = "",
                           std::string y_label = "");
  static ChartSpec beeswarm(std::string title, std::vector<std::string> labels,
                            std::vector<std::vector<std::pair<double, double>>> rows,
                            std::string x_label = "");
  static ChartSpec path(std::string title, std::vector<std::string> labels,
                        std::vector<std::vector<double>> paths, double baseline,
                        std::string x_label = "");
};

std::string emit_svg(const ChartSpec& spec);
void emit_svg_file(const ChartSpec& spec, const std::string& path);

std::string emit_text_table(const std::vector<std::string>& headers,
                            const std::vector<std::vector<std::string>>& rows);

std::string format_metric(double value);  // fixed 2 decimals

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::string& path);

void write_file(const std::string& path, const std::string& bytes);
std::string read_file(const std::string& path);

}  // namespace glassbox
