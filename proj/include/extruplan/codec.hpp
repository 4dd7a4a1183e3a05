#pragma once

// Binary encoding of profiles (170 input nodes) and die designs (93 output
// nodes). Columns are 1-based everywhere they are visible: accessors,
// serialized vectors and diagnostics.

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "extruplan/domain.hpp"

namespace extruplan {

inline constexpr std::size_t kInputNodes = 170;
inline constexpr std::size_t kOutputNodes = 93;

template <std::size_t N>
class BitVector {
 public:
  static constexpr std::size_t size() { return N; }

  // 1-based column access.
  std::uint8_t at(std::size_t column) const { return bits_.at(column - 1); }
  void set(std::size_t column, bool on = true) { bits_.at(column - 1) = on ? 1 : 0; }

  std::size_t popcount() const {
    std::size_t n = 0;
    for (auto b : bits_) n += b;
    return n;
  }

  std::size_t active_in(std::size_t start, std::size_t length) const {
    std::size_t n = 0;
    for (std::size_t c = start; c < start + length; ++c) n += at(c);
    return n;
  }

  std::span<const std::uint8_t> bits() const { return bits_; }
  std::vector<double> as_reals() const { return {bits_.begin(), bits_.end()}; }

  bool operator==(const BitVector&) const = default;

 private:
  std::array<std::uint8_t, N> bits_{};
};

using InputVector = BitVector<kInputNodes>;
using OutputVector = BitVector<kOutputNodes>;

// Serialized as a JSON array of 0/1 of exactly N entries.
template <std::size_t N>
Json vector_to_json(const BitVector<N>& v) {
  Json arr = Json::array();
  for (auto b : v.bits()) arr.push_back(static_cast<int>(b));
  return arr;
}

template <std::size_t N>
BitVector<N> vector_from_json(const Json& j) {
  if (!j.is_array() || j.size() != N)
    throw SchemaMismatch("expected a JSON array of exactly " + std::to_string(N) + " bits");
  BitVector<N> v;
  for (std::size_t i = 0; i < N; ++i) {
    const int b = j[i].get<int>();
    if (b != 0 && b != 1) throw SchemaMismatch("vector entries must be 0 or 1");
    v.set(i + 1, b == 1);
  }
  return v;
}

// Half-open interval [lo, hi).
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  bool operator==(const Interval&) const = default;
};

enum class Representative { Midpoint, Lower };

struct BinTable {
  std::vector<Interval> intervals;
  Representative representative = Representative::Midpoint;

  double representative_of(std::size_t index) const;
};

// Index of the unique interval containing value; throws BinOutOfRange(segment, value).
std::size_t bin_lookup(double value, std::span<const Interval> bins, const std::string& segment = "value");

struct Segment {
  std::string name;
  std::size_t start = 0;  // first column, 1-based
  std::size_t length = 0;
  BinTable bins;          // empty for categorical segments

  std::size_t end() const { return start + length - 1; }
  std::size_t column(std::size_t index) const { return start + index; }
};

namespace segment {
// Input segment names.
inline constexpr const char* kType = "type";
inline constexpr const char* kShape = "shape";
inline constexpr const char* kThickness = "thickness";
inline constexpr const char* kWidth = "width";
inline constexpr const char* kHeight = "height";
inline constexpr const char* kCcd = "ccd";
inline constexpr const char* kArea = "area";
inline constexpr const char* kPress = "press";
inline constexpr const char* kExtrusionRatio = "extrusion_ratio";
inline constexpr const char* kPerimeter = "perimeter";
inline constexpr const char* kExternalPerimeter = "external_perimeter";
inline constexpr const char* kTongueRatio = "tongue_ratio";
// Output segment names.
inline constexpr const char* kDieType = "die_type";
inline constexpr const char* kNumOrifices = "num_orifices";
inline constexpr const char* kFeatureGroups = "feature_groups";
inline constexpr const char* kProcessRoutes = "process_routes";
}  // namespace segment

// Name of the output thickness segment for a part ("thickness_feeder", ...).
std::string thickness_segment_name(DiePartKind part);

class EncodingConfig {
 public:
  std::string codec_version;
  std::vector<Segment> input_segments;
  std::vector<Segment> output_segments;
  std::vector<std::string> shape_catalog;

  // Parses and validates; throws ConfigError listing every problem found.
  static EncodingConfig from_json(const Json& j);
  static EncodingConfig load(const std::filesystem::path& path);
  Json to_json() const;

  // Every layout problem; empty iff the config is usable.
  std::vector<std::string> problems() const;

  const Segment& input(const std::string& name) const;
  const Segment& output(const std::string& name) const;
};

InputVector encode_profile(const ProfileSpec& spec, const EncodingConfig& cfg);
OutputVector encode_design(const DieDesign& design, const EncodingConfig& cfg);

enum class DiagnosticKind { AmbiguousSegment, InconsistentParts };

struct Diagnostic {
  DiagnosticKind kind = DiagnosticKind::AmbiguousSegment;
  std::string segment;  // segment or part name
  std::string message;

  bool operator==(const Diagnostic&) const = default;
};

std::string_view to_string(DiagnosticKind k);
Json diagnostic_to_json(const Diagnostic& d);

// Every violated OutputVector invariant; empty iff the vector decodes.
// A die-type segment without exactly one active node is reported alone,
// since nothing else can be checked without a die type.
std::vector<Diagnostic> validate_output(const OutputVector& vec, const EncodingConfig& cfg);

struct DecodedPart {
  DiePartKind kind = DiePartKind::Feeder;
  double thickness = 0.0;  // bin representative, mm
};

struct DecodedDesign {
  DieType die_type = DieType::Solid;
  int num_orifices = 1;
  double extrusion_ratio = 0.0;    // bin representative
  std::vector<DecodedPart> parts;  // parts whose feature-group node is active
  std::vector<DiePartKind> routes; // parts whose process-route node is active

  // Design skeleton with empty feature sets.
  DieDesign skeleton() const;
};

// Throws AmbiguousSegment or InconsistentParts for the first diagnostic.
DecodedDesign decode_output(const OutputVector& vec, const EncodingConfig& cfg);

}  // namespace extruplan
