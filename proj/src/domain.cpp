#include "extruplan/domain.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

namespace extruplan {

namespace {

template <class E, std::size_t N>
using NameTable = std::array<std::pair<E, std::string_view>, N>;

constexpr NameTable<ProfileType, 3> kProfileTypeNames{{
    {ProfileType::Solid, "Solid"},
    {ProfileType::SemiHollow, "SemiHollow"},
    {ProfileType::Hollow, "Hollow"},
}};

constexpr NameTable<PressCapacity, 3> kPressNames{{
    {PressCapacity::T660, "T660"},
    {PressCapacity::T880, "T880"},
    {PressCapacity::T1800, "T1800"},
}};

constexpr NameTable<DieType, 3> kDieTypeNames{{
    {DieType::Solid, "Solid"},
    {DieType::SemiHollow, "SemiHollow"},
    {DieType::Hollow, "Hollow"},
}};

constexpr NameTable<DiePartKind, 5> kPartNames{{
    {DiePartKind::Feeder, "Feeder"},
    {DiePartKind::DiePlate, "DiePlate"},
    {DiePartKind::Backer, "Backer"},
    {DiePartKind::Mandrel, "Mandrel"},
    {DiePartKind::DieCap, "DieCap"},
}};

constexpr NameTable<FeatureCategory, 4> kCategoryNames{{
    {FeatureCategory::Hole, "Hole"},
    {FeatureCategory::Edge, "Edge"},
    {FeatureCategory::Groove, "Groove"},
    {FeatureCategory::Pocket, "Pocket"},
}};

struct FeatureInfo {
  FeatureKind kind;
  std::string_view name;
  std::string_view label;
  FeatureCategory category;
};

constexpr std::array<FeatureInfo, 17> kFeatureInfo{{
    {FeatureKind::Blind, "Blind", "Blind hole", FeatureCategory::Hole},
    {FeatureKind::Through, "Through", "Through hole", FeatureCategory::Hole},
    {FeatureKind::Tap, "Tap", "Tap", FeatureCategory::Hole},
    {FeatureKind::CounterSink, "CounterSink", "Counter sink", FeatureCategory::Hole},
    {FeatureKind::CounterBore, "CounterBore", "Counter bore", FeatureCategory::Hole},
    {FeatureKind::DeepHole, "DeepHole", "Deep hole", FeatureCategory::Hole},
    {FeatureKind::EdgeChamfer, "EdgeChamfer", "Edge chamfer", FeatureCategory::Edge},
    {FeatureKind::EdgeFillet, "EdgeFillet", "Edge fillet", FeatureCategory::Edge},
    {FeatureKind::VGroove, "VGroove", "V groove", FeatureCategory::Groove},
    {FeatureKind::RoundGroove, "RoundGroove", "Round groove", FeatureCategory::Groove},
    {FeatureKind::RectangularGroove, "RectangularGroove", "Rectangular groove", FeatureCategory::Groove},
    {FeatureKind::OpenPocketPlane, "OpenPocketPlane", "Open pocket plane", FeatureCategory::Pocket},
    {FeatureKind::OpenPocketCircular, "OpenPocketCircular", "Open pocket circular", FeatureCategory::Pocket},
    {FeatureKind::OpenPocketSculptured, "OpenPocketSculptured", "Open pocket sculptured", FeatureCategory::Pocket},
    {FeatureKind::ClosedPocketPlane, "ClosedPocketPlane", "Closed pocket plane", FeatureCategory::Pocket},
    {FeatureKind::ClosedPocketCircular, "ClosedPocketCircular", "Closed pocket circular", FeatureCategory::Pocket},
    {FeatureKind::ClosedPocketSculptured, "ClosedPocketSculptured", "Closed pocket sculptured",
     FeatureCategory::Pocket},
}};

constexpr NameTable<Process, 8> kProcessNames{{
    {Process::Turning, "Turning"},
    {Process::Facing, "Facing"},
    {Process::Drilling, "Drilling"},
    {Process::Milling, "Milling"},
    {Process::HeatTreatment, "HeatTreatment"},
    {Process::Grinding, "Grinding"},
    {Process::EdmSpark, "EdmSpark"},
    {Process::EdmWire, "EdmWire"},
}};

struct OperationInfo {
  OperationKind kind;
  std::string_view name;
  Process process;
};

constexpr std::array<OperationInfo, 23> kOperationInfo{{
    {OperationKind::RoughTurning, "rough turning", Process::Turning},
    {OperationKind::SemiFinishTurning, "semi-finish turning", Process::Turning},
    {OperationKind::FinishTurning, "finish turning", Process::Turning},
    {OperationKind::RoundChamfering, "round chamfering", Process::Turning},
    {OperationKind::RoundGrooving, "round grooving", Process::Turning},
    {OperationKind::RoughFacing, "rough facing", Process::Facing},
    {OperationKind::SemiFinishFacing, "semi-finish facing", Process::Facing},
    {OperationKind::FinishFacing, "finish facing", Process::Facing},
    {OperationKind::Centering, "centering", Process::Drilling},
    {OperationKind::Drilling, "drilling", Process::Drilling},
    {OperationKind::Boring, "boring", Process::Drilling},
    {OperationKind::Reaming, "reaming", Process::Drilling},
    {OperationKind::Tapping, "tapping", Process::Drilling},
    {OperationKind::CounterBoring, "counter boring", Process::Drilling},
    {OperationKind::Countersinking, "countersinking", Process::Drilling},
    {OperationKind::RoughMilling, "rough milling", Process::Milling},
    {OperationKind::SemiFinishMilling, "semi-finish milling", Process::Milling},
    {OperationKind::FinishMilling, "finish milling", Process::Milling},
    {OperationKind::HeatTreatment, "heat treatment", Process::HeatTreatment},
    {OperationKind::Grinding, "grinding", Process::Grinding},
    {OperationKind::EdmSparking, "EDM sparking", Process::EdmSpark},
    {OperationKind::RoughWireCutting, "rough wire cutting", Process::EdmWire},
    {OperationKind::FinishWireCutting, "finish wire cutting", Process::EdmWire},
}};

constexpr NameTable<CaseProvenance, 2> kCaseProvenanceNames{{
    {CaseProvenance::Industrial, "Industrial"},
    {CaseProvenance::Synthetic, "Synthetic"},
}};

template <class E, std::size_t N>
std::string_view lookup_name(const NameTable<E, N>& table, E v) {
  for (const auto& [e, name] : table)
    if (e == v) return name;
  throw InvalidInput("enum value out of range");
}

template <class E, std::size_t N>
E lookup_value(const NameTable<E, N>& table, std::string_view s, const char* what) {
  for (const auto& [e, name] : table)
    if (name == s) return e;
  throw InvalidInput("unknown " + std::string(what) + " '" + std::string(s) + "'");
}

const FeatureInfo& feature_info(FeatureKind kind) {
  return kFeatureInfo.at(index_of(kind));
}

const OperationInfo& operation_info(OperationKind op) {
  return kOperationInfo.at(index_of(op));
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

std::string_view to_string(ProfileType v) { return lookup_name(kProfileTypeNames, v); }
std::string_view to_string(PressCapacity v) { return lookup_name(kPressNames, v); }
std::string_view to_string(DieType v) { return lookup_name(kDieTypeNames, v); }
std::string_view to_string(DiePartKind v) { return lookup_name(kPartNames, v); }
std::string_view to_string(FeatureCategory v) { return lookup_name(kCategoryNames, v); }
std::string_view to_string(FeatureKind v) { return feature_info(v).name; }
std::string_view to_string(Process v) { return lookup_name(kProcessNames, v); }
std::string_view to_string(OperationKind v) { return operation_info(v).name; }
std::string_view to_string(CaseProvenance v) { return lookup_name(kCaseProvenanceNames, v); }

ProfileType parse_profile_type(std::string_view s) { return lookup_value(kProfileTypeNames, s, "profile type"); }
PressCapacity parse_press_capacity(std::string_view s) { return lookup_value(kPressNames, s, "press capacity"); }
DieType parse_die_type(std::string_view s) { return lookup_value(kDieTypeNames, s, "die type"); }
DiePartKind parse_die_part(std::string_view s) { return lookup_value(kPartNames, s, "die part"); }
FeatureCategory parse_feature_category(std::string_view s) {
  return lookup_value(kCategoryNames, s, "feature category");
}
Process parse_process(std::string_view s) { return lookup_value(kProcessNames, s, "process"); }
CaseProvenance parse_case_provenance(std::string_view s) {
  return lookup_value(kCaseProvenanceNames, s, "case provenance");
}

FeatureKind parse_feature_kind(std::string_view s) {
  for (const auto& info : kFeatureInfo)
    if (info.name == s) return info.kind;
  throw InvalidInput("unknown feature kind '" + std::string(s) + "'");
}

OperationKind parse_operation(std::string_view s) {
  for (const auto& info : kOperationInfo)
    if (info.name == s) return info.kind;
  throw InvalidInput("operation '" + std::string(s) + "' is not in the machining vocabulary");
}

FeatureCategory category_of(FeatureKind kind) { return feature_info(kind).category; }
std::string_view display_name(FeatureKind kind) { return feature_info(kind).label; }
Process process_of(OperationKind op) { return operation_info(op).process; }

int press_tonnes(PressCapacity p) {
  switch (p) {
    case PressCapacity::T660: return 660;
    case PressCapacity::T880: return 880;
    case PressCapacity::T1800: return 1800;
  }
  return 0;
}

std::vector<std::string> validate_profile(const ProfileSpec& spec) {
  std::vector<std::string> out;
  if (spec.shape_class < 0) out.emplace_back("shape_class >= 0");
  if (!finite_positive(spec.width)) out.emplace_back("width > 0");
  if (!finite_positive(spec.height)) out.emplace_back("height > 0");
  if (!finite_positive(spec.wall_thickness)) out.emplace_back("wall_thickness > 0");
  if (!finite_positive(spec.cross_section_area)) out.emplace_back("cross_section_area > 0");
  if (!finite_positive(spec.perimeter)) out.emplace_back("perimeter > 0");
  if (!(std::isfinite(spec.external_perimeter) && spec.external_perimeter >= 0.0))
    out.emplace_back("external_perimeter >= 0");
  if (!(std::isfinite(spec.tongue_ratio) && spec.tongue_ratio >= 0.0)) out.emplace_back("tongue_ratio >= 0");
  if (spec.ccd && !(std::isfinite(*spec.ccd) && *spec.ccd >= std::max(spec.width, spec.height)))
    out.emplace_back("ccd >= max(width, height)");
  if (spec.extrusion_ratio && !(std::isfinite(*spec.extrusion_ratio) && *spec.extrusion_ratio > 1.0))
    out.emplace_back("extrusion_ratio > 1");
  return out;
}

const DiePart* DieDesign::find_part(DiePartKind kind) const {
  auto it = std::find_if(parts.begin(), parts.end(), [&](const DiePart& p) { return p.kind == kind; });
  return it == parts.end() ? nullptr : &*it;
}

std::vector<DiePartKind> parts_for_die_type(DieType t) {
  if (t == DieType::Hollow) return {DiePartKind::Mandrel, DiePartKind::DieCap};
  return {DiePartKind::Feeder, DiePartKind::DiePlate, DiePartKind::Backer};
}

bool has_valid_part_set(const DieDesign& design) {
  std::vector<DiePartKind> kinds;
  for (const auto& p : design.parts) kinds.push_back(p.kind);
  std::sort(kinds.begin(), kinds.end());
  return kinds == parts_for_die_type(design.die_type);
}

std::vector<std::string> validate_design(const DieDesign& design) {
  std::vector<std::string> out;
  if (design.num_orifices < 1) out.emplace_back("num_orifices >= 1");
  if (!(std::isfinite(design.extrusion_ratio) && design.extrusion_ratio > 1.0)) out.emplace_back("extrusion_ratio > 1");
  if (!has_valid_part_set(design))
    out.emplace_back("parts must be exactly the part set of a " + std::string(to_string(design.die_type)) + " die");
  for (const auto& p : design.parts) {
    if (!finite_positive(p.thickness)) out.emplace_back(std::string(to_string(p.kind)) + ".thickness > 0");
    for (const auto& f : p.features)
      if (f.attributes.removal_volume && !finite_positive(*f.attributes.removal_volume))
        out.emplace_back(std::string(to_string(p.kind)) + "." + std::string(to_string(f.kind)) +
                         ".removal_volume > 0");
  }
  return out;
}

const PartPlan* ProcessPlan::find_part(DiePartKind kind) const {
  auto it = std::find_if(parts.begin(), parts.end(), [&](const PartPlan& p) { return p.part == kind; });
  return it == parts.end() ? nullptr : &*it;
}

bool plan_features_match_design(const ProcessPlan& plan, const DieDesign& design) {
  for (const auto& pp : plan.parts) {
    const DiePart* part = design.find_part(pp.part);
    if (part == nullptr) return false;
    std::map<FeatureKind, int> available;
    for (const auto& f : part->features) ++available[f.kind];
    for (const auto& step : pp.steps)
      if (step.feature && --available[step.feature->kind] < 0) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

template <class T>
void put_optional(Json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

template <class T>
std::optional<T> get_optional(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->template get<T>();
}

}  // namespace

void to_json(Json& j, const ProfileSpec& v) {
  j = Json::object();
  j["profile_type"] = to_string(v.profile_type);
  j["shape_class"] = v.shape_class;
  j["wall_thickness"] = v.wall_thickness;
  j["width"] = v.width;
  j["height"] = v.height;
  put_optional(j, "ccd", v.ccd);
  j["cross_section_area"] = v.cross_section_area;
  if (v.press_capacity) j["press_capacity"] = to_string(*v.press_capacity);
  put_optional(j, "extrusion_ratio", v.extrusion_ratio);
  j["perimeter"] = v.perimeter;
  j["external_perimeter"] = v.external_perimeter;
  j["tongue_ratio"] = v.tongue_ratio;
}

void from_json(const Json& j, ProfileSpec& v) {
  v.profile_type = parse_profile_type(j.at("profile_type").get<std::string>());
  v.shape_class = j.at("shape_class").get<int>();
  v.wall_thickness = j.at("wall_thickness").get<double>();
  v.width = j.at("width").get<double>();
  v.height = j.at("height").get<double>();
  v.ccd = get_optional<double>(j, "ccd");
  v.cross_section_area = j.at("cross_section_area").get<double>();
  if (auto p = get_optional<std::string>(j, "press_capacity"))
    v.press_capacity = parse_press_capacity(*p);
  else
    v.press_capacity.reset();
  v.extrusion_ratio = get_optional<double>(j, "extrusion_ratio");
  v.perimeter = j.at("perimeter").get<double>();
  v.external_perimeter = j.value("external_perimeter", 0.0);
  v.tongue_ratio = j.at("tongue_ratio").get<double>();
}

void to_json(Json& j, const DieFeature& v) {
  j = Json::object();
  j["kind"] = to_string(v.kind);
  j["category"] = to_string(v.category());
  Json attrs = Json::object();
  put_optional(attrs, "diameter", v.attributes.diameter);
  put_optional(attrs, "depth", v.attributes.depth);
  put_optional(attrs, "removal_volume", v.attributes.removal_volume);
  if (!attrs.empty()) j["attributes"] = attrs;
}

void from_json(const Json& j, DieFeature& v) {
  v.kind = parse_feature_kind(j.at("kind").get<std::string>());
  if (auto it = j.find("category"); it != j.end() && parse_feature_category(it->get<std::string>()) != v.category())
    throw InvalidInput("feature " + std::string(to_string(v.kind)) + " does not belong to category " +
                       it->get<std::string>());
  v.attributes = {};
  if (auto it = j.find("attributes"); it != j.end()) {
    v.attributes.diameter = get_optional<double>(*it, "diameter");
    v.attributes.depth = get_optional<double>(*it, "depth");
    v.attributes.removal_volume = get_optional<double>(*it, "removal_volume");
  }
}

void to_json(Json& j, const DiePart& v) {
  j = Json{{"kind", to_string(v.kind)}, {"thickness", v.thickness}, {"features", v.features}};
}

void from_json(const Json& j, DiePart& v) {
  v.kind = parse_die_part(j.at("kind").get<std::string>());
  v.thickness = j.at("thickness").get<double>();
  v.features = j.value("features", std::vector<DieFeature>{});
}

void to_json(Json& j, const DieDesign& v) {
  j = Json{{"die_type", to_string(v.die_type)},
           {"num_orifices", v.num_orifices},
           {"extrusion_ratio", v.extrusion_ratio},
           {"parts", v.parts}};
}

void from_json(const Json& j, DieDesign& v) {
  v.die_type = parse_die_type(j.at("die_type").get<std::string>());
  v.num_orifices = j.at("num_orifices").get<int>();
  v.extrusion_ratio = j.at("extrusion_ratio").get<double>();
  v.parts = j.at("parts").get<std::vector<DiePart>>();
}

void to_json(Json& j, const MachiningOperation& v) {
  j = Json{{"process", to_string(v.process())}, {"operation", to_string(v.operation)}};
  put_optional(j, "estimated_time", v.estimated_time);
  put_optional(j, "estimated_cost", v.estimated_cost);
}

void from_json(const Json& j, MachiningOperation& v) {
  v.operation = parse_operation(j.at("operation").get<std::string>());
  if (auto it = j.find("process"); it != j.end() && parse_process(it->get<std::string>()) != v.process())
    throw InvalidInput("operation '" + std::string(to_string(v.operation)) + "' does not belong to process " +
                       it->get<std::string>());
  v.estimated_time = get_optional<double>(j, "estimated_time");
  v.estimated_cost = get_optional<double>(j, "estimated_cost");
}

void to_json(Json& j, const PlanStep& v) {
  j = Json::object();
  if (v.feature)
    j["feature"] = *v.feature;
  else
    j["feature"] = nullptr;
  j["operations"] = v.operations;
}

void from_json(const Json& j, PlanStep& v) {
  v.feature = get_optional<DieFeature>(j, "feature");
  v.operations = j.at("operations").get<std::vector<MachiningOperation>>();
}

void to_json(Json& j, const PartPlan& v) { j = Json{{"part", to_string(v.part)}, {"steps", v.steps}}; }

void from_json(const Json& j, PartPlan& v) {
  v.part = parse_die_part(j.at("part").get<std::string>());
  v.steps = j.at("steps").get<std::vector<PlanStep>>();
}

void to_json(Json& j, const ProcessPlan& v) {
  j = Json{{"parts", v.parts}, {"total_time", v.total_time}, {"total_cost", v.total_cost}};
}

void from_json(const Json& j, ProcessPlan& v) {
  v.parts = j.at("parts").get<std::vector<PartPlan>>();
  v.total_time = j.value("total_time", 0.0);
  v.total_cost = j.value("total_cost", 0.0);
}

void to_json(Json& j, const CaseRecord& v) {
  j = Json{{"case_id", v.case_id},  {"profile", v.profile},
           {"design", v.design},    {"plan", v.plan},
           {"provenance", to_string(v.provenance)}, {"created", v.created}};
}

void from_json(const Json& j, CaseRecord& v) {
  v.case_id = j.at("case_id").get<std::string>();
  v.profile = j.at("profile").get<ProfileSpec>();
  v.design = j.at("design").get<DieDesign>();
  v.plan = j.at("plan").get<ProcessPlan>();
  v.provenance = parse_case_provenance(j.at("provenance").get<std::string>());
  v.created = j.at("created").get<std::string>();
}

ProfileSpec ingest_profile(const Json& j, PerimeterUnit unit) {
  ProfileSpec spec = j.get<ProfileSpec>();
  if (auto it = j.find("perimeter_unit"); it != j.end()) {
    const auto u = it->get<std::string>();
    if (u == "mm")
      unit = PerimeterUnit::Millimetre;
    else if (u == "cm")
      unit = PerimeterUnit::Centimetre;
    else
      throw InvalidInput("perimeter_unit must be \"mm\" or \"cm\", got \"" + u + "\"");
  }
  if (unit == PerimeterUnit::Millimetre) {
    spec.perimeter /= 10.0;
    spec.external_perimeter /= 10.0;
  }
  return spec;
}

}  // namespace extruplan
