#pragma once

// Frame/rule knowledge base: die-type classification rules, the
// feature -> operation decision table, standard part feature sets and
// route orderings, plus the design heuristics used to label cases.

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "extruplan/domain.hpp"

namespace extruplan {

using FactValue = std::variant<double, std::string>;
using Facts = std::map<std::string, FactValue>;

enum class Comparison { Eq, Ne, Lt, Le, Gt, Ge };

struct Predicate {
  std::string fact;
  Comparison op = Comparison::Eq;
  FactValue value;

  // A missing fact or a string/number mix never holds; strings support only == and !=.
  bool holds(const Facts& facts) const;
};

// "Set attribute to value", e.g. die_type = SemiHollow.
struct Classification {
  std::string attribute;
  std::string value;

  bool operator==(const Classification&) const = default;
};

using Consequent = std::variant<Classification, std::vector<OperationKind>>;

struct Rule {
  std::string id;
  std::vector<Predicate> antecedent;  // conjunction
  Consequent consequent;
  int priority = 0;  // lower fires first
};

struct FiredRule {
  std::string rule_id;
  Consequent consequent;
};

// Single forward pass: every rule whose antecedent holds fires, ordered by
// (priority ascending, id ascending).
std::vector<FiredRule> evaluate_rules(const Facts& facts, std::span<const Rule> rules);

enum class RowProvenance { Table4, Extrapolated };

struct DecisionRow {
  FeatureKind feature = FeatureKind::Blind;
  DiePartKind part = DiePartKind::Feeder;
  std::vector<OperationKind> operations;
  RowProvenance provenance = RowProvenance::Extrapolated;
};

class KnowledgeBase {
 public:
  // Parses and validates; throws ConfigError listing every problem found.
  static KnowledgeBase from_json(const Json& j);
  static KnowledgeBase load(const std::filesystem::path& path);
  const Json& source() const { return source_; }

  // Stable hash of the KB document (hex), recorded in case libraries.
  std::string fingerprint() const;

  const std::vector<Rule>& rules() const { return rules_; }
  const std::vector<DecisionRow>& decision_table() const { return table_; }
  double tongue_ratio_cutoff() const { return tongue_cutoff_; }

  const std::vector<FeatureKind>& part_feature_set(DiePartKind part) const;
  // Features the KB assigns when it constructs a design part.
  const std::vector<FeatureKind>& design_template(DiePartKind part) const;
  const DecisionRow* find_row(FeatureKind feature, DiePartKind part) const;
  const std::vector<Process>& standard_route(DiePartKind part) const;
  std::size_t route_rank(DiePartKind part, Process process) const;
  const std::vector<OperationKind>& part_level_steps() const { return part_level_steps_; }

  PressCapacity effective_press(const ProfileSpec& spec) const;
  double container_area(PressCapacity press) const;  // cm^2
  double part_thickness(PressCapacity press, DiePartKind part) const;  // mm
  int max_orifices() const { return max_orifices_; }
  double max_single_orifice_ratio() const { return max_single_ratio_; }

 private:
  Json source_;
  double tongue_cutoff_ = 5.0;
  std::vector<Rule> rules_;
  std::vector<DecisionRow> table_;
  std::map<DiePartKind, std::vector<FeatureKind>> part_sets_;
  std::map<DiePartKind, std::vector<FeatureKind>> templates_;
  std::map<DiePartKind, std::vector<Process>> routes_;
  std::vector<OperationKind> part_level_steps_;
  PressCapacity default_press_ = PressCapacity::T660;
  std::map<PressCapacity, double> container_area_;
  std::map<PressCapacity, std::map<DiePartKind, double>> thickness_;
  int max_orifices_ = 15;
  double max_single_ratio_ = 100.0;
};

Facts profile_facts(const ProfileSpec& spec);

DieType classify_die_type(const ProfileSpec& spec, const KnowledgeBase& kb);
const std::vector<FeatureKind>& part_feature_set(DiePartKind part, const KnowledgeBase& kb);

// Decision-table row for (feature, part); throws NoRule when the KB has none.
std::vector<MachiningOperation> select_processes(FeatureKind feature, DiePartKind part, const KnowledgeBase& kb);
const std::vector<Process>& standard_route(DiePartKind part, const KnowledgeBase& kb);

// Orifice count heuristic: one orifice unless a single orifice would exceed
// the KB's extrusion-ratio ceiling, then as many as bring it under (capped).
int select_num_orifices(const ProfileSpec& spec, const KnowledgeBase& kb);
// Given ratio when present, else container area / (orifices * section area).
double select_extrusion_ratio(const ProfileSpec& spec, int num_orifices, const KnowledgeBase& kb);

// Full KB-only design: classification, part set, heuristics, templates.
DieDesign construct_design(const ProfileSpec& spec, const KnowledgeBase& kb);

// Expands each part's features through the decision table and orders the
// resulting blocks by the standard route (stable on each block's lead
// operation), with heat treatment and grinding as part-level steps.
ProcessPlan derive_plan(const DieDesign& design, const KnowledgeBase& kb);

// Route-order violations in a plan (empty iff consistent).
std::vector<std::string> check_route_consistency(const ProcessPlan& plan, const KnowledgeBase& kb);

}  // namespace extruplan
