#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "gradopt/diagnostics.hpp"
#include "gradopt/experiments.hpp"

namespace gradopt {

inline constexpr int kSpecSchemaVersion = 1;

namespace detail {

inline const nlohmann::json& need(const nlohmann::json& j, const char* key,
                                  const std::string& ctx) {
  if (!j.is_object() || !j.contains(key))
    throw InvalidArgument(ctx + ": missing required key \"" + key + "\"");
  return j.at(key);
}

inline void check_keys(const nlohmann::json& j,
                       std::initializer_list<const char*> allowed,
                       const std::string& ctx) {
  if (!j.is_object()) throw InvalidArgument(ctx + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed) ok = ok || it.key() == k;
    if (!ok) throw InvalidArgument(ctx + ": unknown key \"" + it.key() + "\"");
  }
}

inline StepSchedule parse_schedule(const nlohmann::json& j,
                                   const std::string& ctx) {
  check_keys(j, {"kind", "alpha", "mu"}, ctx);
  std::string kind = need(j, "kind", ctx).get<std::string>();
  if (kind == "constant")
    return StepSchedule::constant(need(j, "alpha", ctx).get<double>());
  if (kind == "pl-decay")
    return StepSchedule::pl_decay(need(j, "mu", ctx).get<double>());
  throw InvalidArgument(ctx + ": schedule kind must be \"constant\" or "
                        "\"pl-decay\", got \"" + kind + "\"");
}

inline Layer parse_layer(const nlohmann::json& j, const std::string& ctx) {
  check_keys(j, {"t", "nu", "samples", "iters", "schedule"}, ctx);
  bool has_t = j.contains("t"), has_nu = j.contains("nu");
  if (has_t == has_nu)
    throw InvalidArgument(ctx + ": give exactly one of \"t\" or \"nu\"");
  Layer layer;
  layer.scale = has_t ? SmoothingScale::from_t(j.at("t").get<double>())
                      : SmoothingScale::from_nu(j.at("nu").get<double>());
  layer.sample_count = need(j, "samples", ctx).get<int>();
  layer.solver.max_iters = need(j, "iters", ctx).get<long>();
  layer.solver.schedule = parse_schedule(need(j, "schedule", ctx), ctx);
  return layer;
}

inline NoiseSpec parse_noise(const nlohmann::json& j, const std::string& ctx) {
  check_keys(j, {"kind", "sigma"}, ctx);
  std::string kind = need(j, "kind", ctx).get<std::string>();
  if (kind == "none") return NoiseSpec::none();
  if (kind == "additive-gaussian")
    return NoiseSpec::additive_gaussian(need(j, "sigma", ctx).get<double>());
  if (kind == "component-choice") return NoiseSpec::component_choice();
  throw InvalidArgument(ctx + ": noise kind must be \"none\", "
                        "\"additive-gaussian\" or \"component-choice\"");
}

}  // namespace detail

/// Parses an experiment description (schema_version 1). Unknown keys are
/// rejected so typos fail loudly rather than silently using defaults.
inline ExperimentSpec parse_experiment(const nlohmann::json& j) {
  using detail::check_keys;
  using detail::need;
  check_keys(j,
             {"schema_version", "name", "objective", "kernel", "init_region",
              "n_inits", "master_seed", "targets", "epsilon", "f_star", "arms",
              "notes"},
             "spec");
  int version = need(j, "schema_version", "spec").get<int>();
  if (version != kSpecSchemaVersion)
    throw InvalidArgument("unsupported schema_version " +
                          std::to_string(version) + "; this build reads " +
                          std::to_string(kSpecSchemaVersion));

  ExperimentSpec spec;
  spec.name = need(j, "name", "spec").get<std::string>();

  const nlohmann::json& obj = need(j, "objective", "spec");
  if (obj.is_string()) {
    spec.objective = objective_by_name(obj.get<std::string>());
  } else {
    check_keys(obj, {"name", "noise"}, "objective");
    NoiseSpec noise = obj.contains("noise")
                          ? detail::parse_noise(obj.at("noise"), "objective.noise")
                          : NoiseSpec::none();
    spec.objective =
        objective_by_name(need(obj, "name", "objective").get<std::string>(),
                          noise);
  }

  std::string kernel_name =
      j.contains("kernel") ? j.at("kernel").get<std::string>() : "gaussian";
  spec.kernel = KernelSpec::from_name(kernel_name, spec.objective.dim());

  if (j.contains("init_region")) {
    const nlohmann::json& region = j.at("init_region");
    check_keys(region, {"lower", "upper"}, "init_region");
    spec.init_region = BoxDomain(need(region, "lower", "init_region").get<double>(),
                                 need(region, "upper", "init_region").get<double>(),
                                 spec.objective.dim());
    spec.init_region_set = true;
  }

  spec.n_inits = need(j, "n_inits", "spec").get<int>();
  spec.master_seed = need(j, "master_seed", "spec").get<std::uint64_t>();
  if (j.contains("notes")) spec.notes = j.at("notes").get<std::string>();

  for (const auto& tj : need(j, "targets", "spec")) {
    check_keys(tj, {"point", "radius"}, "target");
    BasinTarget tgt;
    tgt.point = need(tj, "point", "target").get<Vec>();
    tgt.radius = need(tj, "radius", "target").get<double>();
    spec.targets.push_back(std::move(tgt));
  }
  if (j.contains("epsilon")) {
    spec.epsilon = j.at("epsilon").get<double>();
    spec.f_star = need(j, "f_star", "spec").get<double>();
  } else if (j.contains("f_star")) {
    throw InvalidArgument("spec: f_star given without epsilon");
  }

  for (const auto& aj : need(j, "arms", "spec")) {
    std::string ctx = "arm";
    if (aj.is_object() && aj.contains("label"))
      ctx += " \"" + aj.at("label").get<std::string>() + "\"";
    check_keys(aj, {"label", "kind", "schedule", "iters", "layers"}, ctx);
    ArmSpec arm;
    arm.label = need(aj, "label", ctx).get<std::string>();
    std::string kind = need(aj, "kind", ctx).get<std::string>();
    if (kind == "plain") {
      arm.kind = ArmSpec::Kind::Plain;
      arm.plain_config.schedule =
          detail::parse_schedule(need(aj, "schedule", ctx), ctx);
      arm.plain_config.max_iters = need(aj, "iters", ctx).get<long>();
    } else if (kind == "smoothed") {
      arm.kind = ArmSpec::Kind::Smoothed;
      int li = 0;
      for (const auto& lj : need(aj, "layers", ctx))
        arm.layers.layers.push_back(
            detail::parse_layer(lj, ctx + " layer " + std::to_string(li++)));
    } else {
      throw InvalidArgument(ctx + ": kind must be \"plain\" or \"smoothed\"");
    }
    spec.arms.push_back(std::move(arm));
  }

  validate_experiment(spec);
  return spec;
}

inline nlohmann::json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument(path.string() + ": " + e.what());
  }
  return j;
}

/// Applies one `--set path.to.key=value` override. The value is parsed as a
/// JSON literal when possible and used as a raw string otherwise.
inline void apply_override(nlohmann::json& j, const std::string& assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw InvalidArgument("override must look like key.path=value: " +
                          assignment);
  std::string path = assignment.substr(0, eq);
  std::string value = assignment.substr(eq + 1);
  std::string pointer = "/";
  for (char ch : path) pointer += (ch == '.') ? '/' : ch;
  nlohmann::json parsed = nlohmann::json::parse(value, nullptr, false);
  if (parsed.is_discarded()) parsed = value;
  try {
    j[nlohmann::json::json_pointer(pointer)] = parsed;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument("override " + assignment + ": " + e.what());
  }
}

// -------------------------------------------------- diagnostics serialization

inline nlohmann::json diagnostics_to_json(
    const std::vector<DiagnosticReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const DiagnosticReport& rep : reports) {
    nlohmann::json r;
    r["name"] = rep.name;
    r["passed"] = rep.passed;
    nlohmann::json measured = nlohmann::json::array();
    for (const auto& [label, value] : rep.measured)
      measured.push_back({{"label", label}, {"value", value}});
    r["measured"] = std::move(measured);
    r["bound"] = rep.bound ? nlohmann::json(*rep.bound) : nlohmann::json();
    r["tolerance_spec"] = rep.tolerance_spec;
    r["seeds_used"] = rep.seeds_used;
    r["notes"] = rep.notes;
    arr.push_back(std::move(r));
  }
  nlohmann::json j;
  j["schema_version"] = 1;
  bool all = true;
  for (const DiagnosticReport& rep : reports) all = all && rep.passed;
  j["all_passed"] = all;
  j["checks"] = std::move(arr);
  return j;
}

}  // namespace gradopt
