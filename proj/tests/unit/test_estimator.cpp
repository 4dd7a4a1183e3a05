#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "../support.hpp"

using namespace extruplan;

namespace {

constexpr double kPi = std::numbers::pi;

bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b)); }

ProcessPlan single_op_plan(FeatureKind feature, OperationKind op, std::optional<double> volume) {
  PlanStep step;
  step.feature = DieFeature{feature, {}};
  step.feature->attributes.removal_volume = volume;
  step.operations = {{op, {}, {}}};
  return ProcessPlan{{{DiePartKind::DieCap, {step}}}, 0.0, 0.0};
}

CostModel flat_cost(double rate, double setup = 0.0) {
  CostModel c;
  for (auto p : kAllProcesses) c.hourly_rate[p] = rate;
  c.setup_time = setup;
  return c;
}

}  // namespace

TEST_SUITE("estimator") {

TEST_CASE("turning formulas") {
  CHECK(mrr_turning(4, 0.1, 0.01, 500) == doctest::Approx(2 * kPi));
  CHECK(spindle_speed(100, 4) == doctest::Approx(1200 / (4 * kPi)));
  CHECK(spindle_speed(100, 4) == doctest::Approx(95.493).epsilon(1e-5));
  CHECK(mrr_turning_v(0.1, 0.01, 100) == doctest::Approx(12 * 0.1 * 0.01 * 100));
  CHECK(mrr_straight_turning(2, 1, 0.01, 100) == doctest::Approx(kPi * 3 / 4 * 1.0));
}

TEST_CASE("composition identity over random inputs") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.01, 100.0);
  for (int i = 0; i < 1000; ++i) {
    const double D = u(rng), d = u(rng), f = u(rng), V = u(rng);
    CHECK(rel_close(mrr_turning(D, d, f, spindle_speed(V, D)), mrr_turning_v(d, f, V), 1e-12));
  }
}

TEST_CASE("milling, grinding and feed") {
  CHECK(feed_per_tooth(600, 300, 2) == 1.0);
  CHECK(mrr_milling(10, 2, 50) == 1000.0);
  CHECK(mrr_milling_from_feed(10, 2, 1.0, 300, 2) == doctest::Approx(mrr_milling(10, 2, 600)));
  CHECK(mrr_grinding(0.02, 25, 6000) == doctest::Approx(3000.0));
  CHECK(milling_cutting_speed(10, 100) == doctest::Approx(kPi * 1000));
  CHECK(milling_cutting_speed_m_per_min(10, 100) == doctest::Approx(kPi));
  CHECK_THROWS_AS(mrr_milling(10, 0, 50), NonPositiveInput);
  CHECK_THROWS_AS(mrr_grinding(-1, 25, 6000), NonPositiveInput);
  CHECK_THROWS_AS(feed_per_tooth(600, 300, 0), NonPositiveInput);
}

TEST_CASE("every rate is linear in each factor") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  for (int i = 0; i < 200; ++i) {
    const double a = u(rng), b = u(rng), c = u(rng), e = u(rng), k = u(rng);
    CHECK(rel_close(mrr_turning(a, k * b, c, e), k * mrr_turning(a, b, c, e), 1e-12));
    CHECK(rel_close(mrr_turning(a, b, k * c, e), k * mrr_turning(a, b, c, e), 1e-12));
    CHECK(rel_close(mrr_turning(a, b, c, k * e), k * mrr_turning(a, b, c, e), 1e-12));
    CHECK(rel_close(mrr_turning_v(k * a, b, c), k * mrr_turning_v(a, b, c), 1e-12));
    CHECK(rel_close(mrr_turning_v(a, b, k * c), k * mrr_turning_v(a, b, c), 1e-12));
    CHECK(rel_close(mrr_straight_turning(a + b, b, k * c, e), k * mrr_straight_turning(a + b, b, c, e), 1e-12));
    CHECK(rel_close(mrr_milling(a, k * b, c), k * mrr_milling(a, b, c), 1e-12));
    CHECK(rel_close(mrr_milling(a, b, k * c), k * mrr_milling(a, b, c), 1e-12));
    CHECK(rel_close(mrr_grinding(k * a, b, c), k * mrr_grinding(a, b, c), 1e-12));
    CHECK(rel_close(mrr_grinding(a, b, k * c), k * mrr_grinding(a, b, c), 1e-12));
  }
}

TEST_CASE("straight turning vanishes as the bore reaches the outer diameter") {
  double previous = mrr_straight_turning(2.0, 0.0, 0.01, 500);
  for (double gap : {1.0, 1e-2, 1e-4, 1e-6, 1e-9}) {
    const double now = mrr_straight_turning(2.0, 2.0 - gap, 0.01, 500);
    CHECK(now < previous);
    previous = now;
  }
  CHECK(previous < 1e-7);
  CHECK_THROWS_AS(mrr_straight_turning(2.0, 2.0, 0.01, 500), InvalidInput);
}

TEST_CASE("wire EDM linear speed") {
  CHECK(std::abs(wire_edm_linear_speed(18000, 50) - 6.0) <= 1e-12);
  CHECK(std::abs(wire_edm_linear_speed(45000, 150) - 5.0) <= 1e-12);
  CHECK(std::abs(wire_edm_linear_speed(60, 1) - 1.0) <= 1e-12);
  CHECK_THROWS_AS(wire_edm_linear_speed(60, 0), NonPositiveInput);
}

TEST_CASE("machining time") {
  CHECK(machining_time({100, UnitSystem::Metric}, {10, UnitSystem::Metric}) == 10.0);
  CHECK(machining_time({6.2832, UnitSystem::Imperial}, {6.2832, UnitSystem::Imperial}) == 1.0);
  CHECK_THROWS_AS(machining_time({1, UnitSystem::Imperial}, {1, UnitSystem::Metric}), UnitMismatch);
  double previous = INFINITY;
  for (double rate = 0.5; rate < 100; rate *= 1.7) {
    const double t = machining_time({250, UnitSystem::Metric}, {rate, UnitSystem::Metric});
    CHECK(t < previous);
    previous = t;
  }
}

TEST_CASE("unit conversion") {
  const Volume in3 = convert(Volume{kCubicMmPerCubicInch, UnitSystem::Metric}, UnitSystem::Imperial);
  CHECK(in3.value == doctest::Approx(1.0));
  CHECK(in3.unit == UnitSystem::Imperial);
  CHECK(convert(in3, UnitSystem::Metric).value == doctest::Approx(kCubicMmPerCubicInch));
}

TEST_CASE("one milling operation") {
  MachiningSetup setup;
  setup.milling = MillingParams{10, 100, 50, 2, 10, 2};
  const ProcessPlan out =
      estimate_plan(single_op_plan(FeatureKind::ClosedPocketPlane, OperationKind::RoughMilling, 1000.0), setup,
                    flat_cost(60.0));
  const auto& op = out.parts[0].steps[0].operations[0];
  REQUIRE(op.estimated_time);
  CHECK(*op.estimated_time == doctest::Approx(1.0));
  CHECK(*op.estimated_cost == doctest::Approx(1.0));
  CHECK(out.total_time == doctest::Approx(1.0));
}

TEST_CASE("empty plan has zero totals") {
  const ProcessPlan out = estimate_plan(ProcessPlan{}, MachiningSetup{}, flat_cost(50.0));
  CHECK(out.total_time == 0.0);
  CHECK(out.total_cost == 0.0);
}

TEST_CASE("spark rate outside the EDM range") {
  MachiningSetup setup;
  setup.edm = EdmRates{6000, 500, 40};
  CHECK_THROWS_AS(
      estimate_plan(single_op_plan(FeatureKind::ClosedPocketSculptured, OperationKind::EdmSparking, 100.0), setup,
                    flat_cost(50.0)),
      InvalidInput);
  setup.edm->spark_rate = 1.0;
  CHECK_THROWS_AS(setup.edm->validate(), InvalidInput);
  setup.edm->spark_rate = 2.0;
  CHECK_NOTHROW(setup.edm->validate());
}

TEST_CASE("turning times convert the metric volume") {
  MachiningSetup setup;
  setup.turning = TurningParams{0.1, 0.01, 100};  // 1.2 in^3/min
  const double volume = 1.2 * kCubicMmPerCubicInch;
  const ProcessPlan out =
      estimate_plan(single_op_plan(FeatureKind::OpenPocketCircular, OperationKind::RoughTurning, volume), setup,
                    flat_cost(30.0, 15.0));
  const auto& op = out.parts[0].steps[0].operations[0];
  CHECK(*op.estimated_time == doctest::Approx(1.0));
  CHECK(*op.estimated_cost == doctest::Approx((1.0 + 15.0) / 60.0 * 30.0));
  CHECK(out.total_time == doctest::Approx(1.0));
}

TEST_CASE("wire cutting uses the cut length") {
  MachiningSetup setup;
  setup.edm = EdmRates{18000, 40, 50};  // 6 mm/min
  setup.default_stock[FeatureKind::DeepHole] = FeatureStock{{}, 120.0};
  PlanStep step;
  step.feature = DieFeature{FeatureKind::DeepHole, {}};
  step.operations = {{OperationKind::RoughWireCutting, {}, {}}, {OperationKind::FinishWireCutting, {}, {}}};
  const ProcessPlan out = estimate_plan(ProcessPlan{{{DiePartKind::DieCap, {step}}}, 0, 0}, setup, flat_cost(60));
  CHECK(*out.parts[0].steps[0].operations[0].estimated_time == doctest::Approx(20.0));
  CHECK(out.total_time == doctest::Approx(40.0));
}

TEST_CASE("missing parameters are reported") {
  CHECK_THROWS_AS(estimate_plan(single_op_plan(FeatureKind::ClosedPocketPlane, OperationKind::RoughMilling, 1000.0),
                                MachiningSetup{}, flat_cost(60.0)),
                  MissingParams);
  MachiningSetup setup;
  setup.milling = MillingParams{10, 100, 50, 2, 10, 2};
  CHECK_THROWS_AS(estimate_plan(single_op_plan(FeatureKind::ClosedPocketPlane, OperationKind::RoughMilling, {}),
                                setup, flat_cost(60.0)),
                  MissingParams);
}

TEST_CASE("shipped estimator config annotates every generated plan") {
  const auto& est = testing_support::estimator();
  for (const auto& rec : generate_synthetic_cases(40, 3, testing_support::codec(), testing_support::kb())) {
    const ProcessPlan out = estimate_plan(rec.plan, est.setup, est.cost);
    double total = 0.0;
    for (const auto& part : out.parts)
      for (const auto& step : part.steps)
        for (const auto& op : step.operations) {
          REQUIRE(op.estimated_time);
          CHECK(*op.estimated_time > 0.0);
          total += *op.estimated_time;
        }
    CHECK(out.total_time == doctest::Approx(total));
  }
}

TEST_CASE("estimator config checks units") {
  std::ifstream in(testing_support::config_path());
  Json j = Json::parse(in).at("estimator");
  j["milling"]["v"]["unit"] = "in/min";
  try {
    EstimatorConfig::from_json(j);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    REQUIRE(e.problems().size() == 1);
    CHECK(e.problems()[0].find("in/min") != std::string::npos);
  }
}

}  // TEST_SUITE
