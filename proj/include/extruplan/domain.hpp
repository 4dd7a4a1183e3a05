#pragma once

// Domain vocabulary shared by every module: profiles, die features, die
// designs, machining operations, process plans and library cases.
//
// Units are kept as the attribute is usually quoted on the shop floor:
// lengths in mm, cross-section area in cm^2, perimeters in cm.

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "extruplan/errors.hpp"

namespace extruplan {

using Json = nlohmann::ordered_json;

enum class ProfileType { Solid, SemiHollow, Hollow };
enum class PressCapacity { T660, T880, T1800 };
enum class DieType { Solid, SemiHollow, Hollow };

// Canonical order; indexes the per-part segments of the output vector.
enum class DiePartKind { Feeder, DiePlate, Backer, Mandrel, DieCap };

enum class FeatureCategory { Hole, Edge, Groove, Pocket };

enum class FeatureKind {
  // Hole
  Blind,
  Through,
  Tap,
  CounterSink,
  CounterBore,
  DeepHole,
  // Edge
  EdgeChamfer,
  EdgeFillet,
  // Groove
  VGroove,
  RoundGroove,
  RectangularGroove,
  // Pocket
  OpenPocketPlane,
  OpenPocketCircular,
  OpenPocketSculptured,
  ClosedPocketPlane,
  ClosedPocketCircular,
  ClosedPocketSculptured,
};

// Listed in standard route order.
enum class Process { Turning, Facing, Drilling, Milling, HeatTreatment, Grinding, EdmSpark, EdmWire };

enum class OperationKind {
  RoughTurning,
  SemiFinishTurning,
  FinishTurning,
  RoundChamfering,
  RoundGrooving,
  RoughFacing,
  SemiFinishFacing,
  FinishFacing,
  Centering,
  Drilling,
  Boring,
  Reaming,
  Tapping,
  CounterBoring,
  Countersinking,
  RoughMilling,
  SemiFinishMilling,
  FinishMilling,
  HeatTreatment,
  Grinding,
  EdmSparking,
  RoughWireCutting,
  FinishWireCutting,
};

enum class CaseProvenance { Industrial, Synthetic };

inline constexpr std::array kAllProfileTypes{ProfileType::Solid, ProfileType::SemiHollow, ProfileType::Hollow};
inline constexpr std::array kAllPressCapacities{PressCapacity::T660, PressCapacity::T880, PressCapacity::T1800};
inline constexpr std::array kAllDieTypes{DieType::Solid, DieType::SemiHollow, DieType::Hollow};
inline constexpr std::array kAllDieParts{DiePartKind::Feeder, DiePartKind::DiePlate, DiePartKind::Backer,
                                         DiePartKind::Mandrel, DiePartKind::DieCap};
inline constexpr std::array kAllFeatureCategories{FeatureCategory::Hole, FeatureCategory::Edge,
                                                  FeatureCategory::Groove, FeatureCategory::Pocket};
inline constexpr std::array kAllFeatureKinds{
    FeatureKind::Blind,           FeatureKind::Through,           FeatureKind::Tap,
    FeatureKind::CounterSink,     FeatureKind::CounterBore,       FeatureKind::DeepHole,
    FeatureKind::EdgeChamfer,     FeatureKind::EdgeFillet,        FeatureKind::VGroove,
    FeatureKind::RoundGroove,     FeatureKind::RectangularGroove, FeatureKind::OpenPocketPlane,
    FeatureKind::OpenPocketCircular, FeatureKind::OpenPocketSculptured, FeatureKind::ClosedPocketPlane,
    FeatureKind::ClosedPocketCircular, FeatureKind::ClosedPocketSculptured};
inline constexpr std::array kAllProcesses{Process::Turning,       Process::Facing,   Process::Drilling,
                                          Process::Milling,       Process::HeatTreatment,
                                          Process::Grinding,      Process::EdmSpark, Process::EdmWire};
inline constexpr std::array kAllOperations{
    OperationKind::RoughTurning,     OperationKind::SemiFinishTurning, OperationKind::FinishTurning,
    OperationKind::RoundChamfering,  OperationKind::RoundGrooving,     OperationKind::RoughFacing,
    OperationKind::SemiFinishFacing, OperationKind::FinishFacing,      OperationKind::Centering,
    OperationKind::Drilling,         OperationKind::Boring,            OperationKind::Reaming,
    OperationKind::Tapping,          OperationKind::CounterBoring,     OperationKind::Countersinking,
    OperationKind::RoughMilling,     OperationKind::SemiFinishMilling, OperationKind::FinishMilling,
    OperationKind::HeatTreatment,    OperationKind::Grinding,          OperationKind::EdmSparking,
    OperationKind::RoughWireCutting, OperationKind::FinishWireCutting};
inline constexpr std::array kAllCaseProvenances{CaseProvenance::Industrial, CaseProvenance::Synthetic};

// Canonical string names. `parse_*` throws InvalidInput on unknown names.
std::string_view to_string(ProfileType v);
std::string_view to_string(PressCapacity v);
std::string_view to_string(DieType v);
std::string_view to_string(DiePartKind v);
std::string_view to_string(FeatureCategory v);
std::string_view to_string(FeatureKind v);
std::string_view to_string(Process v);
std::string_view to_string(OperationKind v);
std::string_view to_string(CaseProvenance v);

ProfileType parse_profile_type(std::string_view s);
PressCapacity parse_press_capacity(std::string_view s);
DieType parse_die_type(std::string_view s);
DiePartKind parse_die_part(std::string_view s);
FeatureCategory parse_feature_category(std::string_view s);
FeatureKind parse_feature_kind(std::string_view s);
Process parse_process(std::string_view s);
OperationKind parse_operation(std::string_view s);
CaseProvenance parse_case_provenance(std::string_view s);

FeatureCategory category_of(FeatureKind kind);
// Human-readable label, e.g. "Open pocket circular".
std::string_view display_name(FeatureKind kind);
Process process_of(OperationKind op);
int press_tonnes(PressCapacity p);

template <class E>
constexpr std::size_t index_of(E e) {
  return static_cast<std::size_t>(e);
}

struct ProfileSpec {
  ProfileType profile_type = ProfileType::Solid;
  int shape_class = 0;                 // index into the shape catalog
  double wall_thickness = 0.0;         // mm
  double width = 0.0;                  // mm
  double height = 0.0;                 // mm
  std::optional<double> ccd;           // mm
  double cross_section_area = 0.0;     // cm^2
  std::optional<PressCapacity> press_capacity;
  std::optional<double> extrusion_ratio;
  double perimeter = 0.0;              // cm
  double external_perimeter = 0.0;     // cm, 0 = absent
  double tongue_ratio = 0.0;

  bool operator==(const ProfileSpec&) const = default;
};

// Empty iff every ProfileSpec invariant holds; otherwise one entry per violated invariant.
std::vector<std::string> validate_profile(const ProfileSpec& spec);

struct FeatureAttributes {
  std::optional<double> diameter;        // mm
  std::optional<double> depth;           // mm
  std::optional<double> removal_volume;  // mm^3

  bool operator==(const FeatureAttributes&) const = default;
};

struct DieFeature {
  FeatureKind kind = FeatureKind::Blind;
  FeatureAttributes attributes;

  FeatureCategory category() const { return category_of(kind); }
  bool operator==(const DieFeature&) const = default;
};

struct DiePart {
  DiePartKind kind = DiePartKind::Feeder;
  double thickness = 0.0;  // mm
  std::vector<DieFeature> features;

  bool operator==(const DiePart&) const = default;
};

struct DieDesign {
  DieType die_type = DieType::Solid;
  int num_orifices = 1;
  double extrusion_ratio = 0.0;
  std::vector<DiePart> parts;

  const DiePart* find_part(DiePartKind kind) const;
  bool operator==(const DieDesign&) const = default;
};

// The part kinds a die of the given type is built from, in canonical order.
std::vector<DiePartKind> parts_for_die_type(DieType t);

// Part-set predicate: exactly the parts of parts_for_die_type, no duplicates.
bool has_valid_part_set(const DieDesign& design);

// Empty iff every DieDesign invariant holds.
std::vector<std::string> validate_design(const DieDesign& design);

struct MachiningOperation {
  OperationKind operation = OperationKind::RoughTurning;
  std::optional<double> estimated_time;  // minutes
  std::optional<double> estimated_cost;  // currency units

  Process process() const { return process_of(operation); }
  bool operator==(const MachiningOperation&) const = default;
};

// One block of a part's plan. Feature-derived blocks carry the feature;
// part-level steps (heat treatment, grinding) have none.
struct PlanStep {
  std::optional<DieFeature> feature;
  std::vector<MachiningOperation> operations;

  bool operator==(const PlanStep&) const = default;
};

struct PartPlan {
  DiePartKind part = DiePartKind::Feeder;
  std::vector<PlanStep> steps;

  bool operator==(const PartPlan&) const = default;
};

struct ProcessPlan {
  std::vector<PartPlan> parts;
  double total_time = 0.0;  // minutes
  double total_cost = 0.0;

  const PartPlan* find_part(DiePartKind kind) const;
  bool operator==(const ProcessPlan&) const = default;
};

// Every feature in the plan appears in the design (per part, with multiplicity).
bool plan_features_match_design(const ProcessPlan& plan, const DieDesign& design);

struct CaseRecord {
  std::string case_id;
  ProfileSpec profile;
  DieDesign design;
  ProcessPlan plan;
  CaseProvenance provenance = CaseProvenance::Synthetic;
  std::string created;  // ISO-8601

  bool operator==(const CaseRecord&) const = default;
};

// JSON schema: field names follow the struct members, enums as canonical strings,
// absent optionals omitted.
void to_json(Json& j, const ProfileSpec& v);
void from_json(const Json& j, ProfileSpec& v);
void to_json(Json& j, const DieFeature& v);
void from_json(const Json& j, DieFeature& v);
void to_json(Json& j, const DiePart& v);
void from_json(const Json& j, DiePart& v);
void to_json(Json& j, const DieDesign& v);
void from_json(const Json& j, DieDesign& v);
void to_json(Json& j, const MachiningOperation& v);
void from_json(const Json& j, MachiningOperation& v);
void to_json(Json& j, const PlanStep& v);
void from_json(const Json& j, PlanStep& v);
void to_json(Json& j, const PartPlan& v);
void from_json(const Json& j, PartPlan& v);
void to_json(Json& j, const ProcessPlan& v);
void from_json(const Json& j, ProcessPlan& v);
void to_json(Json& j, const CaseRecord& v);
void from_json(const Json& j, CaseRecord& v);

// Perimeter unit used when ingesting a profile document.
enum class PerimeterUnit { Centimetre, Millimetre };

// Reads a ProfileSpec document, converting "perimeter"/"external_perimeter"
// from `unit` to cm. A document may override with "perimeter_unit": "mm"|"cm".
ProfileSpec ingest_profile(const Json& j, PerimeterUnit unit = PerimeterUnit::Centimetre);

}  // namespace extruplan
