#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "gradopt/format.hpp"
#include "gradopt/parallel.hpp"
#include "gradopt/scheduler.hpp"

namespace gradopt {

/// One optimizer under comparison. Plain arms step on the raw stochastic
/// gradient with `plain_config`; smoothed arms run `layers` (a single layer
/// is the ordinary smoothed-SGD baseline).
struct ArmSpec {
  enum class Kind { Plain, Smoothed };
  std::string label;
  Kind kind = Kind::Smoothed;
  LayerSchedule layers;
  SolverConfig plain_config;
};

/// A minimizer of interest with its basin radius.
struct BasinTarget {
  Vec point;
  double radius = 0.5;
};

struct ExperimentSpec {
  std::string name;
  ObjectiveHandle objective;
  KernelSpec kernel = KernelSpec::gaussian(1);
  std::vector<ArmSpec> arms;
  BoxDomain init_region{0.0, 1.0, 1};  // defaults to the objective domain
  bool init_region_set = false;
  int n_inits = 200;
  std::uint64_t master_seed = 1;
  std::vector<BasinTarget> targets;
  // Optional epsilon-optimality criterion: fraction with f <= f_star + epsilon.
  std::optional<double> epsilon;
  double f_star = 0.0;
  std::string notes;
};

/// Fraction of finals landing within `radius` of `target`.
inline double basin_fraction(const std::vector<Vec>& finals, const Vec& target,
                             double radius) {
  if (!(radius > 0.0)) throw InvalidArgument("basin_fraction: radius must be > 0");
  if (finals.empty()) return 0.0;
  long hits = 0;
  for (const Vec& x : finals)
    if (distance(x, target) <= radius) ++hits;
  return double(hits) / double(finals.size());
}

/// Fraction of values within epsilon of the reference optimum.
inline double epsilon_optimal_fraction(const std::vector<double>& values,
                                       double f_star, double epsilon) {
  if (epsilon < 0.0) throw InvalidArgument("epsilon must be >= 0");
  if (values.empty()) return 0.0;
  long hits = 0;
  for (double v : values)
    if (v <= f_star + epsilon) ++hits;
  return double(hits) / double(values.size());
}

inline constexpr int kHistogramBins = 101;

struct ArmResult {
  std::string label;
  std::vector<Vec> finals;      // one per init, paired across arms
  std::vector<double> values;   // raw objective at the final point
  std::vector<double> basin_fracs;  // one per target
  double basin_frac_any = 0.0;      // within any target's radius
  double epsilon_frac = 0.0;        // 0 when the spec has no epsilon
  double value_mean = 0.0;
  double value_median = 0.0;
  double value_min = 0.0;
  double value_max = 0.0;
  long boundary_hits = 0;
  std::vector<long> value_hist;  // kHistogramBins bins over the shared range
  // (init index, message) for runs that raised; their values are NaN and they
  // count as misses in every fraction.
  std::vector<std::pair<int, std::string>> failures;
};

struct BatchReport {
  std::string name;
  std::string objective_name;
  BoxDomain domain{0.0, 1.0, 1};
  BoxDomain init_region{0.0, 1.0, 1};
  int n_inits = 0;
  std::uint64_t master_seed = 0;
  std::vector<BasinTarget> targets;
  std::optional<double> epsilon;
  double f_star = 0.0;
  std::vector<Vec> inits;
  std::vector<ArmResult> arms;
  double value_hist_lo = 0.0;  // shared histogram range across arms
  double value_hist_hi = 1.0;
  nlohmann::json config_echo;    // the effective spec, for artifact headers
  double elapsed_seconds = 0.0;  // stdout only; never written to artifacts
};

inline void validate_experiment(const ExperimentSpec& spec) {
  spec.objective.validate();
  if (spec.name.empty()) throw InvalidArgument("experiment name is empty");
  if (spec.arms.empty()) throw InvalidArgument("experiment has no arms");
  if (spec.n_inits < 1) throw InvalidArgument("n_inits must be >= 1");
  if (spec.kernel.dim() != spec.objective.dim())
    throw InvalidArgument("kernel dimension does not match objective");
  if (spec.init_region_set) {
    if (spec.init_region.dim != spec.objective.dim())
      throw InvalidArgument("init_region dimension does not match objective");
    if (spec.init_region.lower < spec.objective.domain.lower ||
        spec.init_region.upper > spec.objective.domain.upper)
      throw InvalidArgument("init_region must lie inside the objective domain");
  }
  if (spec.targets.empty())
    throw InvalidArgument("experiment needs at least one basin target");
  for (const BasinTarget& tgt : spec.targets) {
    require_dim(tgt.point, spec.objective.dim(), "basin target");
    if (!(tgt.radius > 0.0))
      throw InvalidArgument("basin target radius must be positive");
  }
  if (spec.epsilon && *spec.epsilon < 0.0)
    throw InvalidArgument("epsilon must be >= 0");
  std::set<std::string> labels;
  for (const ArmSpec& arm : spec.arms) {
    if (arm.label.empty()) throw InvalidArgument("arm label is empty");
    if (!labels.insert(arm.label).second)
      throw InvalidArgument("duplicate arm label: " + arm.label);
    if (arm.kind == ArmSpec::Kind::Smoothed) {
      auto issues = validate_schedule(arm.layers);
      if (!issues.empty())
        throw InvalidArgument("arm " + arm.label + ": " + issues.front());
    } else if (arm.plain_config.max_iters < 1) {
      throw InvalidArgument("arm " + arm.label + ": max_iters must be >= 1");
    }
  }
}

/// Runs every (arm, init) pair. Inits are drawn once from a dedicated
/// substream (so they are identical, i.e. paired, across arms), and each
/// pair gets its own substream keyed by (arm index, init index); results
/// are therefore independent of `threads`. A run that raises is recorded in
/// the arm's failure list and the report stays partial rather than aborting.
inline BatchReport run_batch(const ExperimentSpec& spec, int threads = 1) {
  validate_experiment(spec);
  RngStream root(spec.master_seed);

  BatchReport report;
  report.name = spec.name;
  report.objective_name = spec.objective.name;
  report.domain = spec.objective.domain;
  report.init_region =
      spec.init_region_set ? spec.init_region : spec.objective.domain;
  report.n_inits = spec.n_inits;
  report.master_seed = spec.master_seed;
  report.targets = spec.targets;
  report.epsilon = spec.epsilon;
  report.f_star = spec.f_star;

  RngStream init_stream = root.derive({0xA0u});
  report.inits.reserve(spec.n_inits);
  for (int i = 0; i < spec.n_inits; ++i)
    report.inits.push_back(init_stream.uniform_vec(report.init_region));

  struct RunOutcome {
    Vec final_point;
    long boundary_hits = 0;
    std::string error;  // empty on success
  };
  std::size_t n_arms = spec.arms.size();
  std::vector<RunOutcome> outcomes(n_arms * spec.n_inits);
  parallel_for(threads, outcomes.size(), [&](std::size_t job) {
    std::size_t a = job / spec.n_inits;
    std::size_t i = job % spec.n_inits;
    RngStream rng = root.derive({0xB0u, a, i});
    const ArmSpec& arm = spec.arms[a];
    RunOutcome out;
    try {
      if (arm.kind == ArmSpec::Kind::Plain) {
        Trajectory traj = sgd_run_plain(spec.objective, arm.plain_config,
                                        report.inits[i], rng);
        out.final_point = traj.final_point;
        out.boundary_hits = traj.boundary_hits;
      } else {
        LayerResults res = run_multilayer(spec.objective, spec.kernel,
                                          arm.layers, report.inits[i], rng);
        out.final_point = res.final_point;
        for (const Trajectory& layer : res.per_layer)
          out.boundary_hits += layer.boundary_hits;
      }
    } catch (const std::exception& e) {
      out.final_point = report.inits[i];
      out.error = e.what();
    }
    outcomes[job] = std::move(out);
  });

  const double quiet_nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t a = 0; a < n_arms; ++a) {
    ArmResult res;
    res.label = spec.arms[a].label;
    res.finals.reserve(spec.n_inits);
    res.values.reserve(spec.n_inits);
    for (int i = 0; i < spec.n_inits; ++i) {
      RunOutcome& out = outcomes[a * spec.n_inits + i];
      if (!out.error.empty()) {
        res.failures.emplace_back(i, out.error);
        res.values.push_back(quiet_nan);
      } else {
        res.values.push_back(spec.objective.value(out.final_point));
      }
      res.finals.push_back(std::move(out.final_point));
      res.boundary_hits += out.boundary_hits;
    }

    long eps_hits = 0;
    std::vector<long> target_hits(spec.targets.size(), 0);
    long any_hits = 0;
    std::vector<double> ok_values;
    for (int i = 0; i < spec.n_inits; ++i) {
      if (std::isnan(res.values[i])) continue;
      ok_values.push_back(res.values[i]);
      bool any = false;
      for (std::size_t t = 0; t < spec.targets.size(); ++t)
        if (distance(res.finals[i], spec.targets[t].point) <=
            spec.targets[t].radius) {
          ++target_hits[t];
          any = true;
        }
      any_hits += any ? 1 : 0;
      if (spec.epsilon && res.values[i] <= spec.f_star + *spec.epsilon)
        ++eps_hits;
    }
    for (long h : target_hits)
      res.basin_fracs.push_back(double(h) / spec.n_inits);
    res.basin_frac_any = double(any_hits) / spec.n_inits;
    res.epsilon_frac = spec.epsilon ? double(eps_hits) / spec.n_inits : 0.0;

    if (ok_values.empty()) ok_values.push_back(quiet_nan);
    std::vector<double> sorted = ok_values;
    std::sort(sorted.begin(), sorted.end());
    res.value_min = sorted.front();
    res.value_max = sorted.back();
    res.value_median = sorted.size() % 2 == 1
                           ? sorted[sorted.size() / 2]
                           : 0.5 * (sorted[sorted.size() / 2 - 1] +
                                    sorted[sorted.size() / 2]);
    double sum = 0.0;
    for (double v : sorted) sum += v;
    res.value_mean = sum / sorted.size();
    report.arms.push_back(std::move(res));
  }

  // Shared-range value histograms (failures excluded; bins sum to n_inits
  // when every run succeeded).
  double lo = 1e300, hi = -1e300;
  for (const ArmResult& arm : report.arms)
    for (double v : arm.values)
      if (!std::isnan(v)) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
  if (!(hi > lo)) {
    lo = lo > 1e299 ? -0.5 : lo - 0.5;
    hi = lo + 1.0;
  }
  for (ArmResult& arm : report.arms) {
    arm.value_hist.assign(kHistogramBins, 0);
    for (double v : arm.values) {
      if (std::isnan(v)) continue;
      int idx = static_cast<int>((v - lo) / (hi - lo) * kHistogramBins);
      arm.value_hist[std::clamp(idx, 0, kHistogramBins - 1)]++;
    }
  }
  report.value_hist_lo = lo;
  report.value_hist_hi = hi;
  return report;
}

// --------------------------------------------------------------- exporters

namespace detail {

inline void write_text_file(const std::filesystem::path& path,
                            const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << body;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace detail

/// Per-run rows: exactly n_inits * arms rows plus one header.
inline std::string report_runs_csv(const BatchReport& report) {
  std::size_t dim = report.inits.empty() ? 0 : report.inits.front().size();
  std::string csv = "arm,init_index";
  for (std::size_t j = 0; j < dim; ++j) csv += ",init_" + std::to_string(j);
  for (std::size_t j = 0; j < dim; ++j) csv += ",final_" + std::to_string(j);
  csv += ",value\n";
  for (const ArmResult& arm : report.arms) {
    for (std::size_t i = 0; i < arm.finals.size(); ++i) {
      csv += arm.label + "," + std::to_string(i);
      for (double v : report.inits[i]) csv += "," + g17(v);
      for (double v : arm.finals[i]) csv += "," + g17(v);
      csv += "," + g17(arm.values[i]) + "\n";
    }
  }
  return csv;
}

inline std::string report_summary_csv(const BatchReport& report) {
  std::string csv =
      "arm,basin_fraction_any,epsilon_fraction,value_mean,value_median,"
      "value_min,value_max,boundary_hits";
  for (std::size_t t = 0; t < report.targets.size(); ++t)
    csv += ",basin_fraction_" + std::to_string(t);
  csv += "\n";
  for (const ArmResult& arm : report.arms) {
    csv += arm.label + "," + g17(arm.basin_frac_any) + "," +
           g17(arm.epsilon_frac) + "," + g17(arm.value_mean) + "," +
           g17(arm.value_median) + "," + g17(arm.value_min) + "," +
           g17(arm.value_max) + "," + std::to_string(arm.boundary_hits);
    for (double f : arm.basin_fracs) csv += "," + g17(f);
    csv += "\n";
  }
  return csv;
}

/// Full report as JSON. Keys are emitted sorted and doubles round-trip, so
/// equal reports serialize to identical bytes.
inline nlohmann::json report_to_json(const BatchReport& report) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["name"] = report.name;
  j["objective"] = report.objective_name;
  j["domain"] = {{"lower", report.domain.lower},
                 {"upper", report.domain.upper},
                 {"dim", report.domain.dim}};
  j["init_region"] = {{"lower", report.init_region.lower},
                      {"upper", report.init_region.upper},
                      {"dim", report.init_region.dim}};
  j["n_inits"] = report.n_inits;
  j["master_seed"] = report.master_seed;
  j["config"] = report.config_echo;
  nlohmann::json targets = nlohmann::json::array();
  for (const BasinTarget& tgt : report.targets)
    targets.push_back({{"point", tgt.point}, {"radius", tgt.radius}});
  j["targets"] = std::move(targets);
  if (report.epsilon) {
    j["epsilon"] = *report.epsilon;
    j["f_star"] = report.f_star;
  }
  j["inits"] = report.inits;
  j["value_hist_range"] = {report.value_hist_lo, report.value_hist_hi};
  nlohmann::json arms = nlohmann::json::array();
  for (const ArmResult& arm : report.arms) {
    nlohmann::json a;
    a["label"] = arm.label;
    a["basin_fractions"] = arm.basin_fracs;
    a["basin_fraction_any"] = arm.basin_frac_any;
    a["epsilon_fraction"] = arm.epsilon_frac;
    a["value_mean"] = arm.value_mean;
    a["value_median"] = arm.value_median;
    a["value_min"] = arm.value_min;
    a["value_max"] = arm.value_max;
    a["boundary_hits"] = arm.boundary_hits;
    a["value_hist"] = arm.value_hist;
    a["finals"] = arm.finals;
    a["values"] = arm.values;
    nlohmann::json fails = nlohmann::json::array();
    for (const auto& [idx, msg] : arm.failures)
      fails.push_back({{"init_index", idx}, {"message", msg}});
    a["failures"] = std::move(fails);
    arms.push_back(std::move(a));
  }
  j["arms"] = std::move(arms);
  return j;
}

namespace detail {

/// One panel: for 1-D runs a histogram of the final coordinate over the
/// domain; for 2-D a scatter of final points. `y off` stacks panels.
inline std::string svg_panel(const BatchReport& report, const ArmResult& arm,
                             double y_off) {
  const double width = 640, height = 360, ml = 50, mr = 15, mt = 40, mb = 40;
  const double plot_w = width - ml - mr, plot_h = height - mt - mb;
  std::string svg = "<g transform=\"translate(0," + g6(y_off) + ")\">\n";
  svg += "<text x=\"50\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">" +
         report.name + " / " + arm.label + " (basin " + g6(arm.basin_frac_any) +
         ")</text>\n";
  std::size_t dim = report.domain.dim;
  double lo = report.domain.lower, hi = report.domain.upper;
  if (dim == 1) {
    std::vector<long> bins(kHistogramBins, 0);
    for (const Vec& x : arm.finals) {
      int idx = static_cast<int>((x[0] - lo) / (hi - lo) * kHistogramBins);
      bins[std::clamp(idx, 0, kHistogramBins - 1)]++;
    }
    long peak = std::max<long>(1, *std::max_element(bins.begin(), bins.end()));
    double bw = plot_w / kHistogramBins;
    for (int b = 0; b < kHistogramBins; ++b) {
      if (bins[b] == 0) continue;
      double h = plot_h * double(bins[b]) / double(peak);
      svg += "<rect x=\"" + g6(ml + b * bw) + "\" y=\"" + g6(mt + plot_h - h) +
             "\" width=\"" + g6(bw) + "\" height=\"" + g6(h) +
             "\" fill=\"#4878a8\"/>\n";
    }
    svg += "<text x=\"8\" y=\"" + g6(mt + 10) +
           "\" font-family=\"sans-serif\" font-size=\"12\">" +
           std::to_string(peak) + "</text>\n";
  } else {
    auto sx = [&](double v) { return ml + (v - lo) / (hi - lo) * plot_w; };
    auto sy = [&](double v) { return mt + (hi - v) / (hi - lo) * plot_h; };
    for (const Vec& x : arm.finals)
      svg += "<circle cx=\"" + g6(sx(x[0])) + "\" cy=\"" + g6(sy(x[1])) +
             "\" r=\"2\" fill=\"#4878a8\" fill-opacity=\"0.5\"/>\n";
    for (const BasinTarget& tgt : report.targets)
      svg += "<circle cx=\"" + g6(sx(tgt.point[0])) + "\" cy=\"" +
             g6(sy(tgt.point[1])) + "\" r=\"" +
             g6(tgt.radius / (hi - lo) * plot_w) +
             "\" fill=\"none\" stroke=\"#c04040\"/>\n";
  }
  svg += "<rect x=\"" + g6(ml) + "\" y=\"" + g6(mt) + "\" width=\"" +
         g6(plot_w) + "\" height=\"" + g6(plot_h) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
  svg += "<text x=\"" + g6(ml) + "\" y=\"" + g6(height - 12) +
         "\" font-family=\"sans-serif\" font-size=\"12\">" + g6(lo) +
         "</text>\n";
  svg += "<text x=\"" + g6(ml + plot_w - 50) + "\" y=\"" + g6(height - 12) +
         "\" font-family=\"sans-serif\" font-size=\"12\">" + g6(hi) +
         "</text>\n";
  svg += "</g>\n";
  return svg;
}

}  // namespace detail

/// Single SVG with one panel per arm, stacked vertically: histograms of the
/// final coordinate for 1-D runs, scatters of the final points for 2-D.
inline std::string report_panels_svg(const BatchReport& report) {
  const double panel_h = 360;
  double total_h = panel_h * report.arms.size();
  std::string svg =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"" +
      g6(total_h) + "\" viewBox=\"0 0 640 " + g6(total_h) + "\">\n" +
      "<rect width=\"640\" height=\"" + g6(total_h) + "\" fill=\"white\"/>\n";
  for (std::size_t a = 0; a < report.arms.size(); ++a)
    svg += detail::svg_panel(report, report.arms[a], a * panel_h);
  svg += "</svg>\n";
  return svg;
}

/// Writes the selected artifact formats under `out_dir` and returns the
/// paths written. Artifacts contain no timing, host, or thread-count
/// information, so repeated runs with the same seed are byte-identical.
inline std::vector<std::filesystem::path> export_report(
    const BatchReport& report, const std::filesystem::path& out_dir,
    const std::set<std::string>& formats) {
  for (const std::string& f : formats)
    if (f != "csv" && f != "json" && f != "svg")
      throw InvalidArgument("unknown export format: " + f);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec)
    throw std::runtime_error("cannot create " + out_dir.string() + ": " +
                             ec.message());
  std::vector<std::filesystem::path> written;
  if (formats.count("csv")) {
    auto runs = out_dir / (report.name + "_runs.csv");
    detail::write_text_file(runs, report_runs_csv(report));
    written.push_back(runs);
    auto summary = out_dir / (report.name + "_summary.csv");
    detail::write_text_file(summary, report_summary_csv(report));
    written.push_back(summary);
  }
  if (formats.count("json")) {
    auto path = out_dir / (report.name + "_report.json");
    detail::write_text_file(path, report_to_json(report).dump(2) + "\n");
    written.push_back(path);
  }
  if (formats.count("svg")) {
    auto path = out_dir / (report.name + "_panels.svg");
    detail::write_text_file(path, report_panels_svg(report));
    written.push_back(path);
  }
  return written;
}

}  // namespace gradopt
