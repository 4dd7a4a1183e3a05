#include "extruplan/knowledge_base.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>

namespace extruplan {

namespace {

Comparison parse_comparison(const std::string& s) {
  if (s == "==") return Comparison::Eq;
  if (s == "!=") return Comparison::Ne;
  if (s == "<") return Comparison::Lt;
  if (s == "<=") return Comparison::Le;
  if (s == ">") return Comparison::Gt;
  if (s == ">=") return Comparison::Ge;
  throw InvalidInput("unknown comparison operator '" + s + "'");
}

std::vector<FeatureKind> parse_feature_list(const Json& j) {
  std::vector<FeatureKind> out;
  for (const auto& f : j) out.push_back(parse_feature_kind(f.get<std::string>()));
  return out;
}

std::vector<OperationKind> parse_operation_list(const Json& j) {
  std::vector<OperationKind> out;
  for (const auto& op : j) out.push_back(parse_operation(op.get<std::string>()));
  return out;
}

template <class Fn>
void collect(std::vector<std::string>& problems, const std::string& where, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    problems.push_back(where + ": " + e.what());
  } catch (const nlohmann::json::exception& e) {
    problems.push_back(where + ": " + e.what());
  }
}

}  // namespace

bool Predicate::holds(const Facts& facts) const {
  auto it = facts.find(fact);
  if (it == facts.end() || it->second.index() != value.index()) return false;
  if (const auto* s = std::get_if<std::string>(&value)) {
    const auto& actual = std::get<std::string>(it->second);
    if (op == Comparison::Eq) return actual == *s;
    if (op == Comparison::Ne) return actual != *s;
    return false;
  }
  const double a = std::get<double>(it->second);
  const double b = std::get<double>(value);
  switch (op) {
    case Comparison::Eq: return a == b;
    case Comparison::Ne: return a != b;
    case Comparison::Lt: return a < b;
    case Comparison::Le: return a <= b;
    case Comparison::Gt: return a > b;
    case Comparison::Ge: return a >= b;
  }
  return false;
}

std::vector<FiredRule> evaluate_rules(const Facts& facts, std::span<const Rule> rules) {
  std::vector<const Rule*> fired;
  for (const auto& r : rules)
    if (std::all_of(r.antecedent.begin(), r.antecedent.end(), [&](const Predicate& p) { return p.holds(facts); }))
      fired.push_back(&r);
  std::sort(fired.begin(), fired.end(), [](const Rule* a, const Rule* b) {
    return a->priority != b->priority ? a->priority < b->priority : a->id < b->id;
  });
  std::vector<FiredRule> out;
  out.reserve(fired.size());
  for (const Rule* r : fired) out.push_back({r->id, r->consequent});
  return out;
}

KnowledgeBase KnowledgeBase::from_json(const Json& j) {
  std::vector<std::string> problems;
  KnowledgeBase kb;
  if (!j.is_object()) throw ConfigError({"knowledge base must be a JSON object"});
  kb.source_ = j;

  collect(problems, "thresholds", [&] {
    kb.tongue_cutoff_ = j.at("thresholds").at("tongue_ratio_cutoff").get<double>();
    if (!(kb.tongue_cutoff_ > 0.0)) problems.emplace_back("thresholds.tongue_ratio_cutoff must be > 0");
  });

  std::set<std::string> ids;
  const Json empty_array = Json::array();
  const Json& rules = j.contains("rules") ? j.at("rules") : empty_array;
  for (std::size_t i = 0; i < rules.size(); ++i) {
    const Json& r = rules[i];
    collect(problems, "rules[" + std::to_string(i) + "]", [&] {
      Rule rule;
      rule.id = r.at("id").get<std::string>();
      rule.priority = r.value("priority", 0);
      for (const auto& p : r.at("when")) {
        Predicate pred;
        pred.fact = p.at("fact").get<std::string>();
        pred.op = parse_comparison(p.at("op").get<std::string>());
        if (auto th = p.find("threshold"); th != p.end()) {
          const auto name = th->get<std::string>();
          pred.value = j.at("thresholds").at(name).get<double>();
        } else if (p.at("value").is_string()) {
          pred.value = p.at("value").get<std::string>();
        } else {
          pred.value = p.at("value").get<double>();
        }
        rule.antecedent.push_back(std::move(pred));
      }
      if (rule.antecedent.empty()) throw InvalidInput("rule '" + rule.id + "' has an empty antecedent");
      const Json& then = r.at("then");
      if (auto ops = then.find("operations"); ops != then.end()) {
        rule.consequent = parse_operation_list(*ops);
      } else if (auto dt = then.find("die_type"); dt != then.end()) {
        rule.consequent = Classification{"die_type", std::string(to_string(parse_die_type(dt->get<std::string>())))};
      } else {
        throw InvalidInput("rule '" + rule.id + "' needs a die_type or operations consequent");
      }
      if (!ids.insert(rule.id).second) throw InvalidInput("duplicate rule id '" + rule.id + "'");
      kb.rules_.push_back(std::move(rule));
    });
  }

  collect(problems, "part_feature_sets", [&] {
    for (auto part : kAllDieParts)
      kb.part_sets_[part] = parse_feature_list(j.at("part_feature_sets").at(std::string(to_string(part))));
  });
  collect(problems, "design_templates", [&] {
    for (auto part : kAllDieParts)
      kb.templates_[part] = parse_feature_list(j.at("design_templates").at(std::string(to_string(part))));
  });

  collect(problems, "decision_table", [&] {
    const Json& rows = j.at("decision_table");
    for (std::size_t i = 0; i < rows.size(); ++i) {
      collect(problems, "decision_table[" + std::to_string(i) + "]", [&] {
        DecisionRow row;
        row.feature = parse_feature_kind(rows[i].at("feature").get<std::string>());
        row.part = parse_die_part(rows[i].at("part").get<std::string>());
        row.operations = parse_operation_list(rows[i].at("operations"));
        const auto prov = rows[i].at("provenance").get<std::string>();
        if (prov == "table4")
          row.provenance = RowProvenance::Table4;
        else if (prov == "extrapolated")
          row.provenance = RowProvenance::Extrapolated;
        else
          throw InvalidInput("provenance must be \"table4\" or \"extrapolated\", got \"" + prov + "\"");
        if (row.operations.empty()) throw InvalidInput("row has no operations");
        if (kb.find_row(row.feature, row.part) != nullptr)
          throw InvalidInput("duplicate row for (" + std::string(to_string(row.feature)) + ", " +
                             std::string(to_string(row.part)) + ")");
        kb.table_.push_back(std::move(row));
      });
    }
  });

  collect(problems, "route_standard", [&] {
    const Json& rs = j.at("route_standard");
    std::vector<Process> def;
    for (const auto& p : rs.at("default")) def.push_back(parse_process(p.get<std::string>()));
    for (auto part : kAllDieParts) {
      std::vector<Process> order = def;
      if (auto over = rs.find("parts"); over != rs.end() && over->contains(std::string(to_string(part)))) {
        order.clear();
        for (const auto& p : over->at(std::string(to_string(part)))) order.push_back(parse_process(p.get<std::string>()));
      }
      std::vector<Process> sorted = order;
      std::sort(sorted.begin(), sorted.end());
      const std::vector<Process> all(kAllProcesses.begin(), kAllProcesses.end());
      if (sorted != all)
        problems.push_back("route_standard for " + std::string(to_string(part)) +
                           " must order every process exactly once");
      auto ht = std::find(order.begin(), order.end(), Process::HeatTreatment);
      auto gr = std::find(order.begin(), order.end(), Process::Grinding);
      if (gr < ht) problems.push_back("route_standard for " + std::string(to_string(part)) +
                                      " must place HeatTreatment before Grinding");
      kb.routes_[part] = std::move(order);
    }
    kb.part_level_steps_ = parse_operation_list(rs.at("part_level_steps"));
  });

  collect(problems, "design_heuristics", [&] {
    const Json& h = j.at("design_heuristics");
    kb.default_press_ = parse_press_capacity(h.at("default_press").get<std::string>());
    kb.max_orifices_ = h.at("max_orifices").get<int>();
    kb.max_single_ratio_ = h.at("max_single_orifice_extrusion_ratio").get<double>();
    if (kb.max_orifices_ < 1) problems.emplace_back("design_heuristics.max_orifices must be >= 1");
    if (!(kb.max_single_ratio_ > 1.0))
      problems.emplace_back("design_heuristics.max_single_orifice_extrusion_ratio must be > 1");
    for (auto press : kAllPressCapacities) {
      const std::string name(to_string(press));
      const double area = h.at("container_area_cm2").at(name).get<double>();
      if (!(area > 0.0)) problems.push_back("container_area_cm2." + name + " must be > 0");
      kb.container_area_[press] = area;
      for (auto part : kAllDieParts) {
        const double t = h.at("part_thickness_mm").at(name).at(std::string(to_string(part))).get<double>();
        if (!(t > 0.0)) problems.push_back("part_thickness_mm." + name + "." + std::string(to_string(part)) + " must be > 0");
        kb.thickness_[press][part] = t;
      }
    }
  });

  // Cross-checks once the pieces are in place.
  if (problems.empty()) {
    for (auto part : kAllDieParts) {
      for (auto f : kb.part_sets_[part])
        if (kb.find_row(f, part) == nullptr)
          problems.push_back("decision table has no row for (" + std::string(to_string(f)) + ", " +
                             std::string(to_string(part)) + ") in the part feature set");
      for (auto f : kb.templates_[part])
        if (kb.find_row(f, part) == nullptr)
          problems.push_back("design template feature (" + std::string(to_string(f)) + ", " +
                             std::string(to_string(part)) + ") has no decision-table row");
    }
    for (const auto& row : kb.table_) {
      for (std::size_t k = 1; k < row.operations.size(); ++k)
        if (kb.route_rank(row.part, process_of(row.operations[k])) <
            kb.route_rank(row.part, process_of(row.operations[k - 1])))
          problems.push_back("decision-table row (" + std::string(to_string(row.feature)) + ", " +
                             std::string(to_string(row.part)) + ") breaks the standard route order");
    }
  }

  if (!problems.empty()) throw ConfigError(std::move(problems));
  return kb;
}

KnowledgeBase KnowledgeBase::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open knowledge base " + path.string());
  try {
    return from_json(Json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError({path.string() + ": " + e.what()});
  }
}

std::string KnowledgeBase::fingerprint() const {
  // FNV-1a over the compact canonical dump.
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : source_.dump()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

const std::vector<FeatureKind>& KnowledgeBase::part_feature_set(DiePartKind part) const {
  return part_sets_.at(part);
}

const std::vector<FeatureKind>& KnowledgeBase::design_template(DiePartKind part) const {
  return templates_.at(part);
}

const DecisionRow* KnowledgeBase::find_row(FeatureKind feature, DiePartKind part) const {
  auto it = std::find_if(table_.begin(), table_.end(),
                         [&](const DecisionRow& r) { return r.feature == feature && r.part == part; });
  return it == table_.end() ? nullptr : &*it;
}

const std::vector<Process>& KnowledgeBase::standard_route(DiePartKind part) const { return routes_.at(part); }

std::size_t KnowledgeBase::route_rank(DiePartKind part, Process process) const {
  const auto& order = routes_.at(part);
  return static_cast<std::size_t>(std::find(order.begin(), order.end(), process) - order.begin());
}

PressCapacity KnowledgeBase::effective_press(const ProfileSpec& spec) const {
  return spec.press_capacity.value_or(default_press_);
}

double KnowledgeBase::container_area(PressCapacity press) const { return container_area_.at(press); }

double KnowledgeBase::part_thickness(PressCapacity press, DiePartKind part) const {
  return thickness_.at(press).at(part);
}

Facts profile_facts(const ProfileSpec& spec) {
  Facts f;
  f["profile_type"] = std::string(to_string(spec.profile_type));
  f["shape_class"] = static_cast<double>(spec.shape_class);
  f["wall_thickness"] = spec.wall_thickness;
  f["width"] = spec.width;
  f["height"] = spec.height;
  if (spec.ccd) f["ccd"] = *spec.ccd;
  f["cross_section_area"] = spec.cross_section_area;
  if (spec.press_capacity) f["press_capacity"] = std::string(to_string(*spec.press_capacity));
  if (spec.extrusion_ratio) f["extrusion_ratio"] = *spec.extrusion_ratio;
  f["perimeter"] = spec.perimeter;
  f["external_perimeter"] = spec.external_perimeter;
  f["tongue_ratio"] = spec.tongue_ratio;
  return f;
}

DieType classify_die_type(const ProfileSpec& spec, const KnowledgeBase& kb) {
  for (const auto& fired : evaluate_rules(profile_facts(spec), kb.rules())) {
    const auto* c = std::get_if<Classification>(&fired.consequent);
    if (c != nullptr && c->attribute == "die_type") return parse_die_type(c->value);
  }
  // No classification rule matched; fall back to the built-in tongue-ratio rule.
  if (spec.profile_type == ProfileType::Hollow) return DieType::Hollow;
  if (spec.profile_type == ProfileType::SemiHollow || spec.tongue_ratio > kb.tongue_ratio_cutoff())
    return DieType::SemiHollow;
  return DieType::Solid;
}

const std::vector<FeatureKind>& part_feature_set(DiePartKind part, const KnowledgeBase& kb) {
  return kb.part_feature_set(part);
}

std::vector<MachiningOperation> select_processes(FeatureKind feature, DiePartKind part, const KnowledgeBase& kb) {
  const DecisionRow* row = kb.find_row(feature, part);
  if (row == nullptr) throw NoRule(std::string(to_string(feature)), std::string(to_string(part)));
  std::vector<MachiningOperation> ops;
  for (auto op : row->operations) ops.push_back({op, std::nullopt, std::nullopt});
  return ops;
}

const std::vector<Process>& standard_route(DiePartKind part, const KnowledgeBase& kb) {
  return kb.standard_route(part);
}

int select_num_orifices(const ProfileSpec& spec, const KnowledgeBase& kb) {
  const double single = kb.container_area(kb.effective_press(spec)) / spec.cross_section_area;
  if (single <= kb.max_single_orifice_ratio()) return 1;
  const int n = static_cast<int>(std::ceil(single / kb.max_single_orifice_ratio()));
  return std::clamp(n, 1, kb.max_orifices());
}

double select_extrusion_ratio(const ProfileSpec& spec, int num_orifices, const KnowledgeBase& kb) {
  if (spec.extrusion_ratio) return *spec.extrusion_ratio;
  return kb.container_area(kb.effective_press(spec)) / (num_orifices * spec.cross_section_area);
}

DieDesign construct_design(const ProfileSpec& spec, const KnowledgeBase& kb) {
  if (auto bad = validate_profile(spec); !bad.empty()) throw InvalidInput("invalid profile: " + bad.front());
  DieDesign d;
  d.die_type = classify_die_type(spec, kb);
  d.num_orifices = select_num_orifices(spec, kb);
  d.extrusion_ratio = select_extrusion_ratio(spec, d.num_orifices, kb);
  const auto press = kb.effective_press(spec);
  for (auto part : parts_for_die_type(d.die_type)) {
    DiePart p{part, kb.part_thickness(press, part), {}};
    for (auto f : kb.design_template(part)) p.features.push_back({f, {}});
    d.parts.push_back(std::move(p));
  }
  return d;
}

ProcessPlan derive_plan(const DieDesign& design, const KnowledgeBase& kb) {
  std::vector<const DiePart*> parts;
  for (const auto& p : design.parts) parts.push_back(&p);
  std::stable_sort(parts.begin(), parts.end(), [](const DiePart* a, const DiePart* b) { return a->kind < b->kind; });

  ProcessPlan plan;
  for (const DiePart* part : parts) {
    struct Block {
      std::size_t lead;
      std::size_t tail;
      PlanStep step;
    };
    std::vector<Block> blocks;
    auto add = [&](PlanStep step) {
      const auto& ops = step.operations;
      blocks.push_back({kb.route_rank(part->kind, ops.front().process()),
                        kb.route_rank(part->kind, ops.back().process()), std::move(step)});
    };
    for (const auto& f : part->features) add({f, select_processes(f.kind, part->kind, kb)});
    for (auto op : kb.part_level_steps()) add({std::nullopt, {{op, std::nullopt, std::nullopt}}});

    std::stable_sort(blocks.begin(), blocks.end(), [](const Block& a, const Block& b) {
      return a.lead != b.lead ? a.lead < b.lead : a.tail < b.tail;
    });

    PartPlan pp{part->kind, {}};
    for (auto& b : blocks) pp.steps.push_back(std::move(b.step));
    plan.parts.push_back(std::move(pp));
  }
  return plan;
}

std::vector<std::string> check_route_consistency(const ProcessPlan& plan, const KnowledgeBase& kb) {
  std::vector<std::string> out;
  for (const auto& pp : plan.parts) {
    std::size_t prev = 0;
    bool first = true;
    for (const auto& step : pp.steps)
      for (const auto& op : step.operations) {
        const auto rank = kb.route_rank(pp.part, op.process());
        if (!first && rank < prev)
          out.push_back(std::string(to_string(pp.part)) + ": '" + std::string(to_string(op.operation)) +
                        "' runs after a later route stage");
        prev = rank;
        first = false;
      }
  }
  return out;
}

}  // namespace extruplan
