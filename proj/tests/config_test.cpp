#include <gtest/gtest.h>

#include <string>

#include "gradopt/config.hpp"

namespace {

using gradopt::apply_override;
using gradopt::DiagnosticReport;
using gradopt::ExperimentSpec;
using gradopt::InvalidArgument;
using gradopt::load_json_file;
using gradopt::parse_experiment;
using nlohmann::json;

json load_bundled(const char* name) {
  return load_json_file(std::string(GRADOPT_SPECS_DIR) + "/" + name);
}

// Minimal valid spec used as a mutation base for error-path tests.
json minimal_spec() {
  return json::parse(R"({
    "schema_version": 1,
    "name": "mini",
    "objective": "quadratic",
    "n_inits": 3,
    "master_seed": 7,
    "targets": [{"point": [0.0], "radius": 0.5}],
    "arms": [
      {"label": "plain", "kind": "plain",
       "schedule": {"kind": "constant", "alpha": 0.1}, "iters": 10},
      {"label": "sm", "kind": "smoothed", "layers": [
        {"t": 0.5, "samples": 2, "iters": 10,
         "schedule": {"kind": "constant", "alpha": 0.1}}]}
    ]
  })");
}

TEST(ParseExperiment, BundledToy1RoundTrip) {
  ExperimentSpec spec = parse_experiment(load_bundled("toy1.spec"));
  EXPECT_EQ(spec.name, "toy1");
  EXPECT_EQ(spec.objective.dim(), 1);
  EXPECT_EQ(spec.n_inits, 1000);
  EXPECT_EQ(spec.master_seed, 4242u);
  ASSERT_TRUE(spec.init_region_set);
  EXPECT_DOUBLE_EQ(spec.init_region.lower, -50.0);
  EXPECT_DOUBLE_EQ(spec.init_region.upper, 50.0);
  ASSERT_EQ(spec.targets.size(), 2u);
  EXPECT_DOUBLE_EQ(spec.targets[1].point[0], 4.724057281053018);
  EXPECT_DOUBLE_EQ(spec.targets[1].radius, 0.5);
  ASSERT_TRUE(spec.epsilon.has_value());
  EXPECT_DOUBLE_EQ(*spec.epsilon, 4.0);
  EXPECT_DOUBLE_EQ(spec.f_star, -24.920639768292512);

  ASSERT_EQ(spec.arms.size(), 6u);
  EXPECT_EQ(spec.arms[0].label, "plain-gd");
  EXPECT_EQ(spec.arms[0].kind, gradopt::ArmSpec::Kind::Plain);
  EXPECT_EQ(spec.arms[5].label, "ml-3");
  ASSERT_EQ(spec.arms[5].layers.layers.size(), 3u);
  EXPECT_DOUBLE_EQ(spec.arms[5].layers.layers[0].scale.t, 50.0);
  EXPECT_DOUBLE_EQ(spec.arms[5].layers.layers[2].scale.t, 0.5);
  EXPECT_EQ(spec.arms[5].layers.layers[1].sample_count, 10);
  EXPECT_EQ(spec.arms[5].layers.layers[1].solver.max_iters, 1000);
}

TEST(ParseExperiment, BundledToy2RoundTrip) {
  ExperimentSpec spec = parse_experiment(load_bundled("toy2.spec"));
  EXPECT_EQ(spec.name, "toy2");
  EXPECT_EQ(spec.objective.dim(), 2);
  ASSERT_EQ(spec.arms.size(), 4u);
  EXPECT_EQ(spec.arms[3].label, "ml-2");
  ASSERT_EQ(spec.arms[3].layers.layers.size(), 2u);
  EXPECT_DOUBLE_EQ(spec.arms[3].layers.layers[0].scale.t, 0.02);
  EXPECT_DOUBLE_EQ(spec.arms[3].layers.layers[1].scale.t, 0.0002);
  // The stochastic oracle is the two-way component split, not the exact
  // gradient: a draw must differ from the gradient at a generic point.
  gradopt::RngStream rng(1);
  gradopt::Vec x{1.0, 1.0};
  auto draw = spec.objective.sample_noise(rng);
  EXPECT_NE(spec.objective.stochastic_gradient(x, draw),
            spec.objective.gradient(x));
}

TEST(ParseExperiment, SchemaVersionGate) {
  json j = minimal_spec();
  j["schema_version"] = 2;
  try {
    parse_experiment(j);
    FAIL() << "expected InvalidArgument";
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("schema_version"), std::string::npos);
  }
  j.erase("schema_version");
  EXPECT_THROW(parse_experiment(j), InvalidArgument);
}

TEST(ParseExperiment, UnknownKeysAreRejectedWithContext) {
  json j = minimal_spec();
  j["n_inits_typo"] = 3;
  try {
    parse_experiment(j);
    FAIL() << "expected InvalidArgument";
  } catch (const InvalidArgument& e) {
    std::string msg = e.what();
    EXPECT_NE(msg.find("unknown key"), std::string::npos);
    EXPECT_NE(msg.find("n_inits_typo"), std::string::npos);
  }

  json k = minimal_spec();
  k["arms"][0]["step"] = 0.1;
  try {
    parse_experiment(k);
    FAIL() << "expected InvalidArgument";
  } catch (const InvalidArgument& e) {
    // Context names the offending arm.
    EXPECT_NE(std::string(e.what()).find("plain"), std::string::npos);
  }
}

TEST(ParseExperiment, LayerScaleKeysAreMutuallyExclusive) {
  json j = minimal_spec();
  j["arms"][1]["layers"][0]["nu"] = 2.0;  // now has both t and nu
  EXPECT_THROW(parse_experiment(j), InvalidArgument);
  j["arms"][1]["layers"][0].erase("t");
  j["arms"][1]["layers"][0].erase("nu");
  EXPECT_THROW(parse_experiment(j), InvalidArgument);
}

TEST(ParseExperiment, NuIsReciprocalOfT) {
  json j = minimal_spec();
  j["arms"][1]["layers"][0].erase("t");
  j["arms"][1]["layers"][0]["nu"] = 4.0;
  ExperimentSpec spec = parse_experiment(j);
  EXPECT_DOUBLE_EQ(spec.arms[1].layers.layers[0].scale.t, 0.25);
}

TEST(ParseExperiment, NoiseClauses) {
  json j = minimal_spec();
  j["objective"] = {{"name", "toy2"},
                    {"noise", {{"kind", "additive-gaussian"}, {"sigma", 1.5}}}};
  j["targets"] = json::array({{{"point", {0.0, 0.0}}, {"radius", 0.5}}});
  ExperimentSpec spec = parse_experiment(j);
  EXPECT_EQ(spec.objective.dim(), 2);

  j["objective"]["noise"] = {{"kind", "white"}};
  EXPECT_THROW(parse_experiment(j), InvalidArgument);

  // component-choice needs an objective that splits into summands.
  json k = minimal_spec();
  k["objective"] = {{"name", "quadratic"},
                    {"noise", {{"kind", "component-choice"}}}};
  EXPECT_THROW(parse_experiment(k), InvalidArgument);
}

TEST(ParseExperiment, ScheduleKinds) {
  json j = minimal_spec();
  j["arms"][0]["schedule"] = {{"kind", "pl-decay"}, {"mu", 2.0}};
  ExperimentSpec spec = parse_experiment(j);
  EXPECT_DOUBLE_EQ(gradopt::step_size(spec.arms[0].plain_config.schedule, 1),
                   3.0 / 16.0);

  j["arms"][0]["schedule"] = {{"kind", "adam"}};
  EXPECT_THROW(parse_experiment(j), InvalidArgument);
}

TEST(ParseExperiment, EpsilonRequiresFStarAndViceVersa) {
  json j = minimal_spec();
  j["f_star"] = 0.0;  // without epsilon
  EXPECT_THROW(parse_experiment(j), InvalidArgument);
  j["epsilon"] = 0.5;
  EXPECT_NO_THROW(parse_experiment(j));
  j.erase("f_star");
  EXPECT_THROW(parse_experiment(j), InvalidArgument);
}

TEST(ParseExperiment, InitRegionMustSitInsideObjectiveDomain) {
  json j = minimal_spec();
  j["init_region"] = {{"lower", -10.0}, {"upper", 10.0}};  // quadratic: [-1,1]
  EXPECT_THROW(parse_experiment(j), InvalidArgument);
}

TEST(LoadJsonFile, ErrorsAreActionable) {
  EXPECT_THROW(load_json_file("/nonexistent/path.spec"), InvalidArgument);
}

TEST(ApplyOverride, ScalarStringAndNestedPaths) {
  json j = minimal_spec();
  apply_override(j, "n_inits=17");
  EXPECT_EQ(j["n_inits"], 17);
  apply_override(j, "name=quick");
  EXPECT_EQ(j["name"], "quick");
  apply_override(j, "arms.0.iters=5");
  EXPECT_EQ(j["arms"][0]["iters"], 5);
  apply_override(j, "arms.1.layers.0.t=0.125");
  EXPECT_DOUBLE_EQ(j["arms"][1]["layers"][0]["t"].get<double>(), 0.125);
  EXPECT_NO_THROW(parse_experiment(j));

  EXPECT_THROW(apply_override(j, "no_equals_sign"), InvalidArgument);
  EXPECT_THROW(apply_override(j, "=5"), InvalidArgument);
}

TEST(DiagnosticsToJson, ShapeAndAggregates) {
  DiagnosticReport ok;
  ok.name = "unbiasedness";
  ok.passed = true;
  ok.add("worst_z", 1.25);
  ok.bound = 4.0;
  ok.tolerance_spec = "z <= 4";
  ok.seeds_used = 100000;

  DiagnosticReport bad;
  bad.name = "variance-bound";
  bad.passed = true;
  bad.fail("ratio 1.2 above 1.10");

  json j = gradopt::diagnostics_to_json({ok, bad});
  EXPECT_EQ(j["schema_version"], 1);
  EXPECT_FALSE(j["all_passed"].get<bool>());
  ASSERT_EQ(j["checks"].size(), 2u);
  EXPECT_EQ(j["checks"][0]["name"], "unbiasedness");
  EXPECT_DOUBLE_EQ(j["checks"][0]["measured"][0]["value"].get<double>(), 1.25);
  EXPECT_DOUBLE_EQ(j["checks"][0]["bound"].get<double>(), 4.0);
  EXPECT_TRUE(j["checks"][1]["bound"].is_null());
  EXPECT_FALSE(j["checks"][1]["passed"].get<bool>());
  EXPECT_EQ(j["checks"][1]["notes"].size(), 1u);
}

}  // namespace
