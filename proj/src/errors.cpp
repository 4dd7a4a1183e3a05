#include "extruplan/errors.hpp"

#include <sstream>

namespace extruplan {

namespace {

std::string format_value(double value) {
  std::ostringstream os;
  os << value;
  return os.str();
}

std::string join_problems(const std::vector<std::string>& problems) {
  std::string out = "invalid configuration (" + std::to_string(problems.size()) + " problem" +
                    (problems.size() == 1 ? "" : "s") + ")";
  for (const auto& p : problems) out += "\n  - " + p;
  return out;
}

}  // namespace

BinOutOfRange::BinOutOfRange(std::string segment, double value)
    : Error("BinOutOfRange", "value " + format_value(value) + " is outside every bin of segment '" + segment + "'"),
      segment_(std::move(segment)),
      value_(value) {}

BinOutOfRange::BinOutOfRange(const BinOutOfRange& cause, const std::string& context)
    : Error("BinOutOfRange", context + ": " + cause.what()), segment_(cause.segment_), value_(cause.value_) {}

UnknownShape::UnknownShape(int shape_class)
    : Error("UnknownShape", "shape_class " + std::to_string(shape_class) + " is not in the shape catalog") {}

AmbiguousSegment::AmbiguousSegment(std::string segment, int active_nodes)
    : Error("AmbiguousSegment", "segment '" + segment + "' has " + std::to_string(active_nodes) +
                                    " active nodes where exactly one is required"),
      segment_(std::move(segment)) {}

NonPositiveInput::NonPositiveInput(const std::string& name, double value)
    : Error("NonPositiveInput", "input '" + name + "' must be positive, got " + format_value(value)) {}

ConfigError::ConfigError(std::vector<std::string> problems)
    : Error("ConfigError", join_problems(problems)), problems_(std::move(problems)) {}

}  // namespace extruplan
