#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace extruplan {

// Base for every error raised by the planner. `kind()` is a stable tag used in
// diagnostics and CLI output.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

class InvalidInput : public Error {
 public:
  explicit InvalidInput(const std::string& message) : Error("InvalidInput", message) {}
};

class BinOutOfRange : public Error {
 public:
  BinOutOfRange(std::string segment, double value);
  // Same error with a context prefix, e.g. the offending case id.
  BinOutOfRange(const BinOutOfRange& cause, const std::string& context);

  const std::string& segment() const noexcept { return segment_; }
  double value() const noexcept { return value_; }

 private:
  std::string segment_;
  double value_;
};

class UnknownShape : public Error {
 public:
  explicit UnknownShape(int shape_class);
};

class AmbiguousSegment : public Error {
 public:
  AmbiguousSegment(std::string segment, int active_nodes);

  const std::string& segment() const noexcept { return segment_; }

 private:
  std::string segment_;
};

class InconsistentParts : public Error {
 public:
  explicit InconsistentParts(const std::string& detail)
      : Error("InconsistentParts", "inconsistent parts: " + detail) {}
};

class NoRule : public Error {
 public:
  NoRule(const std::string& feature, const std::string& part)
      : Error("NoRule", "no rule for feature " + feature + " on part " + part) {}
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::size_t expected, std::size_t actual)
      : Error("DimensionMismatch", "dimension mismatch: expected " + std::to_string(expected) +
                                       ", got " + std::to_string(actual)) {}
};

class EmptyDataset : public Error {
 public:
  EmptyDataset() : Error("EmptyDataset", "training dataset is empty") {}
};

class NonFiniteLoss : public Error {
 public:
  explicit NonFiniteLoss(int epoch)
      : Error("NonFiniteLoss", "loss became non-finite at epoch " + std::to_string(epoch)) {}
};

class NonPositiveInput : public Error {
 public:
  NonPositiveInput(const std::string& name, double value);
};

class UnitMismatch : public Error {
 public:
  explicit UnitMismatch(const std::string& detail) : Error("UnitMismatch", "unit mismatch: " + detail) {}
};

class MissingParams : public Error {
 public:
  explicit MissingParams(const std::string& operation)
      : Error("MissingParams", "missing parameters for operation '" + operation + "'") {}
};

class EmptyLibrary : public Error {
 public:
  EmptyLibrary() : Error("EmptyLibrary", "case library is empty") {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message) : Error("IoError", message) {}
};

class SchemaMismatch : public Error {
 public:
  explicit SchemaMismatch(const std::string& message) : Error("SchemaMismatch", message) {}
};

class VersionMismatch : public Error {
 public:
  VersionMismatch(const std::string& expected, const std::string& actual)
      : Error("VersionMismatch",
              "codec_version mismatch: expected '" + expected + "', found '" + actual + "'") {}
};

// Raised by config loaders; carries every problem found, not just the first.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> problems);

  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  std::vector<std::string> problems_;
};

// Wraps an error from one pipeline stage with the stage name.
class StageError : public Error {
 public:
  StageError(std::string stage, const Error& cause)
      : Error(cause.kind(), stage + ": " + cause.what()), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace extruplan
