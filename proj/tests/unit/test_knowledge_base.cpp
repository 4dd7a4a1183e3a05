#include <doctest.h>

#include <algorithm>
#include <map>

#include "../support.hpp"
#include "../table4.hpp"

using namespace extruplan;
using testing_support::kb;

namespace {

std::vector<std::string> op_names(const std::vector<MachiningOperation>& ops) {
  std::vector<std::string> out;
  for (const auto& op : ops) out.emplace_back(to_string(op.operation));
  return out;
}

// feature name -> operation names, for every feature step of one part.
std::map<std::string, std::vector<std::string>> feature_ops(const PartPlan& part) {
  std::map<std::string, std::vector<std::string>> out;
  for (const auto& step : part.steps)
    if (step.feature) out[std::string(to_string(step.feature->kind))] = op_names(step.operations);
  return out;
}

DieDesign table4_design() {
  DieDesign d;
  d.die_type = DieType::Hollow;
  d.num_orifices = 1;
  d.extrusion_ratio = 40.0;
  DiePart mandrel{DiePartKind::Mandrel, 55.0, {}};
  for (const auto& [f, ops] : testing_support::table4_mandrel()) mandrel.features.push_back({parse_feature_kind(f), {}});
  DiePart cap{DiePartKind::DieCap, 45.0, {}};
  for (const auto& [f, ops] : testing_support::table4_diecap()) cap.features.push_back({parse_feature_kind(f), {}});
  d.parts = {mandrel, cap};
  return d;
}

Rule classify(std::string id, int priority, std::string value) {
  Rule r;
  r.id = std::move(id);
  r.priority = priority;
  r.consequent = Classification{"die_type", std::move(value)};
  return r;
}

}  // namespace

TEST_SUITE("knowledge_base") {

TEST_CASE("die type classification") {
  CHECK(classify_die_type(case_study_profile(), kb()) == DieType::Hollow);
  CHECK(classify_die_type(testing_support::heat_sink_profile(), kb()) == DieType::Solid);
  ProfileSpec p = testing_support::heat_sink_profile();
  p.tongue_ratio = 6.0;
  CHECK(classify_die_type(p, kb()) == DieType::SemiHollow);
  p.tongue_ratio = 5.0;
  CHECK(classify_die_type(p, kb()) == DieType::Solid);
  p.profile_type = ProfileType::SemiHollow;
  CHECK(classify_die_type(p, kb()) == DieType::SemiHollow);
}

TEST_CASE("tongue-ratio rule fires on the shipped rules") {
  const Facts facts{{"tongue_ratio", 6.0}, {"profile_type", std::string("Solid")}};
  const auto fired = evaluate_rules(facts, kb().rules());
  REQUIRE_FALSE(fired.empty());
  const auto* c = std::get_if<Classification>(&fired.front().consequent);
  REQUIRE(c != nullptr);
  CHECK(c->attribute == "die_type");
  CHECK(c->value == "SemiHollow");
}

TEST_CASE("rule evaluation order and edge cases") {
  CHECK(evaluate_rules({}, std::span<const Rule>{}).empty());

  std::vector<Rule> rules{classify("b", 1, "Hollow"), classify("a", 1, "Solid"), classify("c", 0, "SemiHollow")};
  const auto fired = evaluate_rules({}, rules);
  REQUIRE(fired.size() == 3);
  CHECK(fired[0].rule_id == "c");
  CHECK(fired[1].rule_id == "a");
  CHECK(fired[2].rule_id == "b");

  Predicate missing{"nope", Comparison::Eq, 1.0};
  CHECK_FALSE(missing.holds({}));
  Predicate mixed{"x", Comparison::Lt, 1.0};
  CHECK_FALSE(mixed.holds({{"x", std::string("a")}}));
  Predicate ge{"x", Comparison::Ge, 2.0};
  CHECK(ge.holds({{"x", 2.0}}));
  CHECK_FALSE(ge.holds({{"x", 1.999}}));
}

TEST_CASE("part feature sets") {
  using F = FeatureKind;
  CHECK(part_feature_set(DiePartKind::Feeder, kb()) ==
        std::vector<F>{F::OpenPocketCircular, F::OpenPocketPlane, F::EdgeChamfer, F::Tap, F::ClosedPocketPlane});
  CHECK(part_feature_set(DiePartKind::DieCap, kb()) ==
        std::vector<F>{F::OpenPocketPlane, F::OpenPocketCircular, F::EdgeChamfer, F::CounterBore,
                       F::ClosedPocketPlane, F::DeepHole});
  const auto& mandrel = part_feature_set(DiePartKind::Mandrel, kb());
  CHECK(std::find(mandrel.begin(), mandrel.end(), F::ClosedPocketSculptured) != mandrel.end());
}

TEST_CASE("selected processes") {
  CHECK(op_names(select_processes(FeatureKind::OpenPocketCircular, DiePartKind::Mandrel, kb())) ==
        std::vector<std::string>{"rough turning", "semi-finish turning", "finish turning", "rough facing",
                                 "semi-finish facing", "finish facing"});
  CHECK(op_names(select_processes(FeatureKind::DeepHole, DiePartKind::DieCap, kb())) ==
        std::vector<std::string>{"rough wire cutting", "finish wire cutting"});
  CHECK(op_names(select_processes(FeatureKind::CounterBore, DiePartKind::DieCap, kb())) ==
        std::vector<std::string>{"centering", "drilling", "counter boring"});
  CHECK(op_names(select_processes(FeatureKind::ClosedPocketSculptured, DiePartKind::DieCap, kb())) ==
        std::vector<std::string>{"EDM sparking"});
  CHECK_THROWS_AS(select_processes(FeatureKind::Through, DiePartKind::Mandrel, kb()), NoRule);
}

TEST_CASE("decision table is total over every part feature set") {
  for (auto part : kAllDieParts)
    for (auto f : part_feature_set(part, kb())) {
      CAPTURE(to_string(part));
      CAPTURE(to_string(f));
      CHECK_FALSE(select_processes(f, part, kb()).empty());
    }
}

TEST_CASE("table rows keep their provenance") {
  std::size_t verbatim = 0;
  for (const auto& row : kb().decision_table())
    if (row.provenance == RowProvenance::Table4) {
      ++verbatim;
      CHECK((row.part == DiePartKind::Mandrel || row.part == DiePartKind::DieCap));
    }
  CHECK(verbatim == testing_support::table4_mandrel().size() + testing_support::table4_diecap().size());
}

TEST_CASE("standard route") {
  using P = Process;
  const std::vector<P> expected{P::Turning,       P::Facing,   P::Drilling, P::Milling,
                                P::HeatTreatment, P::Grinding, P::EdmSpark, P::EdmWire};
  for (auto part : kAllDieParts) {
    const auto& route = standard_route(part, kb());
    CHECK(route == expected);
    CHECK(route.front() == P::Turning);
    CHECK(kb().route_rank(part, P::HeatTreatment) < kb().route_rank(part, P::Grinding));
  }
}

TEST_CASE("case-study design yields the table's operations per feature") {
  const ProcessPlan plan = derive_plan(table4_design(), kb());
  REQUIRE(plan.parts.size() == 2);
  const auto mandrel = feature_ops(plan.parts[0]);
  const auto cap = feature_ops(plan.parts[1]);
  CHECK(mandrel.size() == testing_support::table4_mandrel().size());
  CHECK(cap.size() == testing_support::table4_diecap().size());
  for (const auto& [f, ops] : testing_support::table4_mandrel()) CHECK(mandrel.at(f) == ops);
  for (const auto& [f, ops] : testing_support::table4_diecap()) CHECK(cap.at(f) == ops);
  CHECK(check_route_consistency(plan, kb()).empty());
}

TEST_CASE("empty feature sets leave only the part-level steps") {
  DieDesign d = table4_design();
  for (auto& p : d.parts) p.features.clear();
  const ProcessPlan plan = derive_plan(d, kb());
  for (const auto& part : plan.parts) {
    REQUIRE(part.steps.size() == 2);
    CHECK_FALSE(part.steps[0].feature.has_value());
    CHECK(op_names(part.steps[0].operations) == std::vector<std::string>{"heat treatment"});
    CHECK(op_names(part.steps[1].operations) == std::vector<std::string>{"grinding"});
  }
}

TEST_CASE("a through hole on a mandrel has no rule") {
  DieDesign d = table4_design();
  d.parts[0].features.push_back({FeatureKind::Through, {}});
  try {
    derive_plan(d, kb());
    FAIL("expected NoRule");
  } catch (const NoRule& e) {
    CHECK(std::string(e.what()).find("Through") != std::string::npos);
    CHECK(std::string(e.what()).find("Mandrel") != std::string::npos);
  }
}

TEST_CASE("plans are deterministic and route-consistent across a corpus") {
  for (const auto& rec : generate_synthetic_cases(150, 42, testing_support::codec(), kb())) {
    const ProcessPlan a = derive_plan(rec.design, kb());
    const ProcessPlan b = derive_plan(rec.design, kb());
    CHECK(Json(a).dump() == Json(b).dump());
    CHECK(check_route_consistency(a, kb()).empty());
  }
}

TEST_CASE("route violations are reported") {
  ProcessPlan p = derive_plan(table4_design(), kb());
  std::reverse(p.parts[0].steps.begin(), p.parts[0].steps.end());
  CHECK_FALSE(check_route_consistency(p, kb()).empty());
}

TEST_CASE("design construction heuristics") {
  const DieDesign d = construct_design(case_study_profile(), kb());
  CHECK(d.die_type == DieType::Hollow);
  CHECK(d.num_orifices == 1);
  CHECK(d.extrusion_ratio == doctest::Approx(136.0 / 3.4));
  REQUIRE(d.parts.size() == 2);
  CHECK(d.parts[0].kind == DiePartKind::Mandrel);
  CHECK(d.parts[1].kind == DiePartKind::DieCap);
  CHECK(validate_design(d).empty());

  ProfileSpec small = testing_support::heat_sink_profile();
  small.cross_section_area = 0.5;  // 136 / 0.5 = 272 on one orifice
  CHECK(select_num_orifices(small, kb()) == 3);
  small.extrusion_ratio = 30.0;
  CHECK(select_extrusion_ratio(small, 3, kb()) == 30.0);
}

TEST_CASE("knowledge base rejects a route with grinding before heat treatment") {
  Json j = testing_support::kb_json();
  j["route_standard"]["default"] = {"Turning", "Facing", "Drilling", "Milling", "Grinding", "HeatTreatment",
                                    "EdmSpark", "EdmWire"};
  CHECK_THROWS_AS(KnowledgeBase::from_json(j), ConfigError);
}

TEST_CASE("knowledge base rejects a part set feature without a row") {
  Json j = testing_support::kb_json();
  j["part_feature_sets"]["Feeder"].push_back("VGroove");
  try {
    KnowledgeBase::from_json(j);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    bool named = false;
    for (const auto& p : e.problems()) named = named || p.find("VGroove") != std::string::npos;
    CHECK(named);
  }
}

TEST_CASE("fingerprint tracks content") {
  Json j = testing_support::kb_json();
  CHECK(KnowledgeBase::from_json(j).fingerprint() == kb().fingerprint());
  j["thresholds"]["tongue_ratio_cutoff"] = 4.5;
  CHECK(KnowledgeBase::from_json(j).fingerprint() != kb().fingerprint());
}

}  // TEST_SUITE
