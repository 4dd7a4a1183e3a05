#include "extruplan/codec.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace extruplan {

namespace {

struct SegmentSpec {
  const char* name;
  bool numeric;
  std::size_t fixed_length;  // 0 = set by the bin table
};

constexpr std::array<SegmentSpec, 12> kInputLayout{{
    {segment::kType, false, 3},
    {segment::kShape, false, 0},  // = shape catalog size
    {segment::kThickness, true, 0},
    {segment::kWidth, true, 0},
    {segment::kHeight, true, 0},
    {segment::kCcd, true, 0},
    {segment::kArea, true, 0},
    {segment::kPress, false, 3},
    {segment::kExtrusionRatio, true, 0},
    {segment::kPerimeter, true, 0},
    {segment::kExternalPerimeter, true, 0},
    {segment::kTongueRatio, true, 0},
}};

constexpr std::array<SegmentSpec, 10> kOutputLayout{{
    {segment::kDieType, false, 3},
    {segment::kNumOrifices, true, 0},
    {segment::kExtrusionRatio, true, 0},
    {"thickness_feeder", true, 0},
    {"thickness_die", true, 0},
    {"thickness_back", true, 0},
    {"thickness_mandrel", true, 0},
    {"thickness_diecap", true, 0},
    {segment::kFeatureGroups, false, 5},
    {segment::kProcessRoutes, false, 5},
}};

constexpr std::size_t kShapeCatalogSize = 20;

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::string fmt_interval(const Interval& iv) { return "[" + fmt(iv.lo) + ", " + fmt(iv.hi) + ")"; }

BinTable parse_bins(const Json& seg, std::size_t length, const std::string& where,
                    std::vector<std::string>& problems) {
  BinTable table;
  if (auto rep = seg.find("representative"); rep != seg.end()) {
    const auto r = rep->get<std::string>();
    if (r == "midpoint")
      table.representative = Representative::Midpoint;
    else if (r == "lower")
      table.representative = Representative::Lower;
    else
      problems.push_back(where + ": representative must be \"midpoint\" or \"lower\", got \"" + r + "\"");
  }
  auto bins = seg.find("bins");
  if (bins == seg.end()) return table;
  if (auto uni = bins->find("uniform"); uni != bins->end()) {
    const double lo = uni->at("lo").get<double>();
    const double width = uni->at("width").get<double>();
    if (!(width > 0.0)) {
      problems.push_back(where + ": uniform bin width must be positive, got " + fmt(width));
      return table;
    }
    for (std::size_t i = 0; i < length; ++i)
      table.intervals.push_back({lo + width * static_cast<double>(i), lo + width * static_cast<double>(i + 1)});
  } else if (auto list = bins->find("intervals"); list != bins->end()) {
    for (const auto& iv : *list) {
      if (!iv.is_array() || iv.size() != 2) {
        problems.push_back(where + ": each interval must be a [lo, hi] pair");
        continue;
      }
      table.intervals.push_back({iv[0].get<double>(), iv[1].get<double>()});
    }
  } else {
    problems.push_back(where + ": bins must hold either \"uniform\" or \"intervals\"");
  }
  return table;
}

std::vector<Segment> parse_segments(const Json& j, const char* key, std::vector<std::string>& problems) {
  std::vector<Segment> out;
  auto it = j.find(key);
  if (it == j.end() || !it->is_array()) {
    problems.push_back(std::string("missing array '") + key + "'");
    return out;
  }
  for (std::size_t i = 0; i < it->size(); ++i) {
    const Json& s = (*it)[i];
    const std::string where = std::string(key) + "[" + std::to_string(i) + "]";
    try {
      Segment seg;
      seg.name = s.at("name").get<std::string>();
      const int start = s.at("start").get<int>();
      const int length = s.at("length").get<int>();
      if (start < 1 || length < 1) {
        problems.push_back(where + " ('" + seg.name + "'): start and length must be >= 1");
        continue;
      }
      seg.start = static_cast<std::size_t>(start);
      seg.length = static_cast<std::size_t>(length);
      seg.bins = parse_bins(s, seg.length, where + " ('" + seg.name + "')", problems);
      out.push_back(std::move(seg));
    } catch (const nlohmann::json::exception& e) {
      problems.push_back(where + ": " + e.what());
    }
  }
  return out;
}

template <std::size_t N>
void check_layout(const std::vector<Segment>& segs, const std::array<SegmentSpec, N>& layout,
                  std::size_t total, const char* side, std::size_t shape_len, std::vector<std::string>& problems) {
  const std::string tag = side;
  if (segs.size() != layout.size())
    problems.push_back(tag + " segments: expected " + std::to_string(layout.size()) + " segments, found " +
                       std::to_string(segs.size()));
  for (std::size_t i = 0; i < std::min(segs.size(), layout.size()); ++i)
    if (segs[i].name != layout[i].name)
      problems.push_back(tag + " segment " + std::to_string(i + 1) + ": expected '" + layout[i].name +
                         "', found '" + segs[i].name + "'");

  std::size_t expected_start = 1;
  std::size_t sum = 0;
  for (const auto& s : segs) {
    if (s.start != expected_start)
      problems.push_back(tag + " segment '" + s.name + "' starts at column " + std::to_string(s.start) +
                         ", expected " + std::to_string(expected_start) +
                         (s.start < expected_start ? " (overlap)" : " (gap)"));
    expected_start = s.start + s.length;
    sum += s.length;
  }
  if (sum != total)
    problems.push_back(tag + " segment lengths sum to " + std::to_string(sum) + ", expected " + std::to_string(total));
  if (!segs.empty() && segs.back().end() != total)
    problems.push_back(tag + " segments end at column " + std::to_string(segs.back().end()) + ", expected " +
                       std::to_string(total));

  for (const auto& s : segs) {
    auto spec = std::find_if(layout.begin(), layout.end(), [&](const SegmentSpec& l) { return s.name == l.name; });
    if (spec == layout.end()) continue;
    const std::string where = tag + " segment '" + s.name + "'";
    if (!spec->numeric) {
      const std::size_t want = std::string(spec->name) == segment::kShape ? shape_len : spec->fixed_length;
      if (s.length != want)
        problems.push_back(where + " must have " + std::to_string(want) + " nodes, has " + std::to_string(s.length));
      if (!s.bins.intervals.empty()) problems.push_back(where + " is categorical and must not define bins");
      continue;
    }
    const auto& iv = s.bins.intervals;
    if (iv.size() != s.length) {
      problems.push_back(where + " has " + std::to_string(iv.size()) + " bins for " + std::to_string(s.length) +
                         " nodes");
      continue;
    }
    for (std::size_t k = 0; k < iv.size(); ++k) {
      if (!(std::isfinite(iv[k].lo) && std::isfinite(iv[k].hi) && iv[k].lo < iv[k].hi))
        problems.push_back(where + " bin " + std::to_string(k + 1) + " " + fmt_interval(iv[k]) + " is empty");
      if (k > 0 && !(iv[k - 1].hi <= iv[k].lo))
        problems.push_back(where + " bins are not strictly increasing at bin " + std::to_string(k + 1) + " " +
                           fmt_interval(iv[k]));
    }
  }
}

Json segment_to_json(const Segment& s) {
  Json j = Json{{"name", s.name}, {"start", s.start}, {"length", s.length}};
  if (!s.bins.intervals.empty()) {
    Json list = Json::array();
    for (const auto& iv : s.bins.intervals) list.push_back(Json::array({iv.lo, iv.hi}));
    j["bins"] = Json{{"intervals", list}};
    if (s.bins.representative == Representative::Lower) j["representative"] = "lower";
  }
  return j;
}

const Segment& find_segment(const std::vector<Segment>& segs, const std::string& name, const char* side) {
  for (const auto& s : segs)
    if (s.name == name) return s;
  throw InvalidInput(std::string("no ") + side + " segment named '" + name + "'");
}

template <std::size_t N>
void set_one_hot(BitVector<N>& v, const Segment& seg, std::size_t index) {
  v.set(seg.column(index));
}

template <std::size_t N>
void set_binned(BitVector<N>& v, const Segment& seg, double value) {
  set_one_hot(v, seg, bin_lookup(value, seg.bins.intervals, seg.name));
}

// Index of the single active node, or nullopt with the active count.
std::optional<std::size_t> single_active(const OutputVector& v, const Segment& seg, int& active) {
  active = static_cast<int>(v.active_in(seg.start, seg.length));
  if (active != 1) return std::nullopt;
  for (std::size_t i = 0; i < seg.length; ++i)
    if (v.at(seg.column(i))) return i;
  return std::nullopt;
}

}  // namespace

double BinTable::representative_of(std::size_t index) const {
  const Interval& iv = intervals.at(index);
  return representative == Representative::Lower ? iv.lo : 0.5 * (iv.lo + iv.hi);
}

std::size_t bin_lookup(double value, std::span<const Interval> bins, const std::string& segment) {
  if (std::isfinite(value)) {
    auto it = std::upper_bound(bins.begin(), bins.end(), value,
                               [](double v, const Interval& iv) { return v < iv.lo; });
    if (it != bins.begin()) {
      --it;
      if (value >= it->lo && value < it->hi) return static_cast<std::size_t>(it - bins.begin());
    }
  }
  throw BinOutOfRange(segment, value);
}

std::string thickness_segment_name(DiePartKind part) {
  switch (part) {
    case DiePartKind::Feeder: return "thickness_feeder";
    case DiePartKind::DiePlate: return "thickness_die";
    case DiePartKind::Backer: return "thickness_back";
    case DiePartKind::Mandrel: return "thickness_mandrel";
    case DiePartKind::DieCap: return "thickness_diecap";
  }
  return {};
}

EncodingConfig EncodingConfig::from_json(const Json& j) {
  std::vector<std::string> problems;
  EncodingConfig cfg;
  if (!j.is_object()) throw ConfigError({"codec config must be a JSON object"});
  try {
    cfg.codec_version = j.value("codec_version", std::string{});
    cfg.shape_catalog = j.value("shape_catalog", std::vector<std::string>{});
  } catch (const nlohmann::json::exception& e) {
    problems.push_back(std::string("malformed header: ") + e.what());
  }
  cfg.input_segments = parse_segments(j, "input_segments", problems);
  cfg.output_segments = parse_segments(j, "output_segments", problems);
  auto more = cfg.problems();
  problems.insert(problems.end(), more.begin(), more.end());
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return cfg;
}

EncodingConfig EncodingConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open codec config " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError({path.string() + ": " + e.what()});
  }
  // The codec may be embedded as a section of a larger config file.
  if (auto it = j.find("codec"); it != j.end()) return from_json(*it);
  return from_json(j);
}

std::vector<std::string> EncodingConfig::problems() const {
  std::vector<std::string> problems;
  if (codec_version.empty()) problems.emplace_back("codec_version is missing or empty");
  if (shape_catalog.size() != kShapeCatalogSize)
    problems.push_back("shape_catalog must have " + std::to_string(kShapeCatalogSize) + " entries, has " +
                       std::to_string(shape_catalog.size()));
  std::set<std::string> seen;
  for (const auto& s : shape_catalog) {
    if (s.empty()) problems.emplace_back("shape_catalog has an empty name");
    if (!seen.insert(s).second) problems.push_back("shape_catalog lists '" + s + "' twice");
  }
  check_layout(input_segments, kInputLayout, kInputNodes, "input", kShapeCatalogSize, problems);
  check_layout(output_segments, kOutputLayout, kOutputNodes, "output", 0, problems);
  return problems;
}

Json EncodingConfig::to_json() const {
  Json in = Json::array();
  for (const auto& s : input_segments) in.push_back(segment_to_json(s));
  Json out = Json::array();
  for (const auto& s : output_segments) out.push_back(segment_to_json(s));
  return Json{{"codec_version", codec_version},
              {"shape_catalog", shape_catalog},
              {"input_segments", in},
              {"output_segments", out}};
}

const Segment& EncodingConfig::input(const std::string& name) const {
  return find_segment(input_segments, name, "input");
}

const Segment& EncodingConfig::output(const std::string& name) const {
  return find_segment(output_segments, name, "output");
}

InputVector encode_profile(const ProfileSpec& spec, const EncodingConfig& cfg) {
  if (auto bad = validate_profile(spec); !bad.empty()) throw InvalidInput("invalid profile: " + bad.front());
  InputVector v;
  set_one_hot(v, cfg.input(segment::kType), index_of(spec.profile_type));
  if (spec.shape_class < 0 || static_cast<std::size_t>(spec.shape_class) >= cfg.shape_catalog.size())
    throw UnknownShape(spec.shape_class);
  set_one_hot(v, cfg.input(segment::kShape), static_cast<std::size_t>(spec.shape_class));
  set_binned(v, cfg.input(segment::kThickness), spec.wall_thickness);
  set_binned(v, cfg.input(segment::kWidth), spec.width);
  set_binned(v, cfg.input(segment::kHeight), spec.height);
  if (spec.ccd) set_binned(v, cfg.input(segment::kCcd), *spec.ccd);
  set_binned(v, cfg.input(segment::kArea), spec.cross_section_area);
  if (spec.press_capacity) set_one_hot(v, cfg.input(segment::kPress), index_of(*spec.press_capacity));
  if (spec.extrusion_ratio) set_binned(v, cfg.input(segment::kExtrusionRatio), *spec.extrusion_ratio);
  set_binned(v, cfg.input(segment::kPerimeter), spec.perimeter);
  if (spec.external_perimeter > 0.0)
    set_binned(v, cfg.input(segment::kExternalPerimeter), spec.external_perimeter);
  set_binned(v, cfg.input(segment::kTongueRatio), spec.tongue_ratio);
  return v;
}

OutputVector encode_design(const DieDesign& design, const EncodingConfig& cfg) {
  if (auto bad = validate_design(design); !bad.empty()) throw InvalidInput("invalid design: " + bad.front());
  OutputVector v;
  set_one_hot(v, cfg.output(segment::kDieType), index_of(design.die_type));
  set_binned(v, cfg.output(segment::kNumOrifices), static_cast<double>(design.num_orifices));
  set_binned(v, cfg.output(segment::kExtrusionRatio), design.extrusion_ratio);
  const Segment& groups = cfg.output(segment::kFeatureGroups);
  const Segment& routes = cfg.output(segment::kProcessRoutes);
  for (const auto& part : design.parts) {
    set_binned(v, cfg.output(thickness_segment_name(part.kind)), part.thickness);
    set_one_hot(v, groups, index_of(part.kind));
    set_one_hot(v, routes, index_of(part.kind));
  }
  return v;
}

std::string_view to_string(DiagnosticKind k) {
  return k == DiagnosticKind::AmbiguousSegment ? "AmbiguousSegment" : "InconsistentParts";
}

Json diagnostic_to_json(const Diagnostic& d) {
  return Json{{"kind", to_string(d.kind)}, {"segment", d.segment}, {"message", d.message}};
}

std::vector<Diagnostic> validate_output(const OutputVector& vec, const EncodingConfig& cfg) {
  std::vector<Diagnostic> out;
  auto ambiguous = [&](const Segment& seg, int active) {
    out.push_back({DiagnosticKind::AmbiguousSegment, seg.name,
                   "segment '" + seg.name + "' [" + std::to_string(seg.start) + "-" + std::to_string(seg.end()) +
                       "] has " + std::to_string(active) + " active nodes, expected 1"});
  };

  int active = 0;
  const Segment& type_seg = cfg.output(segment::kDieType);
  auto type_index = single_active(vec, type_seg, active);
  if (!type_index) {
    ambiguous(type_seg, active);
    return out;
  }
  const auto die_type = kAllDieTypes[*type_index];

  for (const char* name : {segment::kNumOrifices, segment::kExtrusionRatio}) {
    const Segment& seg = cfg.output(name);
    if (!single_active(vec, seg, active)) ambiguous(seg, active);
  }

  const auto expected = parts_for_die_type(die_type);
  const Segment& groups = cfg.output(segment::kFeatureGroups);
  const Segment& routes = cfg.output(segment::kProcessRoutes);
  for (auto part : kAllDieParts) {
    const bool present = std::find(expected.begin(), expected.end(), part) != expected.end();
    const Segment& thick = cfg.output(thickness_segment_name(part));
    const auto thick_active = vec.active_in(thick.start, thick.length);
    const bool group_on = vec.at(groups.column(index_of(part))) == 1;
    const bool route_on = vec.at(routes.column(index_of(part))) == 1;
    const std::string name(to_string(part));
    if (present) {
      if (thick_active != 1) ambiguous(thick, static_cast<int>(thick_active));
      if (!group_on || !route_on)
        out.push_back({DiagnosticKind::InconsistentParts, name,
                       name + " belongs to a " + std::string(to_string(die_type)) +
                           " die but its feature-group/route node is off"});
    } else if (thick_active != 0 || group_on || route_on) {
      out.push_back({DiagnosticKind::InconsistentParts, name,
                     name + " does not belong to a " + std::string(to_string(die_type)) +
                         " die but has active nodes"});
    }
  }
  return out;
}

DieDesign DecodedDesign::skeleton() const {
  DieDesign d;
  d.die_type = die_type;
  d.num_orifices = num_orifices;
  d.extrusion_ratio = extrusion_ratio;
  for (const auto& p : parts) d.parts.push_back({p.kind, p.thickness, {}});
  return d;
}

DecodedDesign decode_output(const OutputVector& vec, const EncodingConfig& cfg) {
  auto diags = validate_output(vec, cfg);
  if (!diags.empty()) {
    const auto& first = diags.front();
    if (first.kind == DiagnosticKind::AmbiguousSegment) {
      const Segment& seg = cfg.output(first.segment);
      throw AmbiguousSegment(first.segment, static_cast<int>(vec.active_in(seg.start, seg.length)));
    }
    throw InconsistentParts(first.message);
  }

  auto index_in = [&](const Segment& seg) {
    int active = 0;
    return *single_active(vec, seg, active);
  };

  DecodedDesign d;
  d.die_type = kAllDieTypes[index_in(cfg.output(segment::kDieType))];
  const Segment& orifices = cfg.output(segment::kNumOrifices);
  d.num_orifices = static_cast<int>(std::lround(orifices.bins.representative_of(index_in(orifices))));
  const Segment& er = cfg.output(segment::kExtrusionRatio);
  d.extrusion_ratio = er.bins.representative_of(index_in(er));
  for (auto part : parts_for_die_type(d.die_type)) {
    const Segment& thick = cfg.output(thickness_segment_name(part));
    d.parts.push_back({part, thick.bins.representative_of(index_in(thick))});
    d.routes.push_back(part);
  }
  return d;
}

}  // namespace extruplan
