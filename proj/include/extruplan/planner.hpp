#pragma once

// End-to-end planning: profile -> encode -> network -> decode -> plan,
// with nearest-case and knowledge-base fallbacks, plus evaluation of a
// trained model against a case library.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "extruplan/case_library.hpp"
#include "extruplan/codec.hpp"
#include "extruplan/estimator.hpp"
#include "extruplan/knowledge_base.hpp"
#include "extruplan/neural_net.hpp"

namespace extruplan {

enum class PlanProvenance { NnPrediction, KnnFallback, KbDirect };

std::string_view to_string(PlanProvenance p);

struct StageNote {
  std::string stage;
  std::string kind;
  std::string message;
};

struct PlanDocument {
  ProfileSpec profile;
  DieDesign design;
  ProcessPlan plan;
  std::vector<PlanProvenance> provenance;     // path that produced the design
  std::map<std::string, double> confidence;   // output segment -> max activation
  std::optional<std::string> matched_case;    // set on the nearest-case path
  std::vector<StageNote> diagnostics;

  PlanProvenance source() const { return provenance.back(); }
};

Json plan_document_to_json(const PlanDocument& doc);

struct PlannerContext {
  const EncodingConfig& codec;
  const KnowledgeBase& kb;
  const EstimatorConfig& estimator;
  double threshold = 0.5;
};

// Design for a network output: decoded skeleton with KB template features.
DieDesign design_from_prediction(const DecodedDesign& decoded, const KnowledgeBase& kb);

// Null model or empty library skip their stage. Errors are StageError-wrapped.
PlanDocument plan(const ProfileSpec& spec, const MLPModel* model, const Library& lib, const PlannerContext& ctx);

struct SegmentDiff {
  std::string segment;
  std::vector<std::size_t> predicted;  // active columns
  std::vector<std::size_t> expected;
};

struct CaseDisagreement {
  std::string case_id;
  std::vector<SegmentDiff> diffs;
  bool decodable = false;
};

struct EvalReport {
  std::size_t cases = 0;
  std::map<std::string, double> segment_bit_accuracy;
  double bit_accuracy = 0.0;
  double exact_match_rate = 0.0;
  double die_type_accuracy = 0.0;
  double plan_agreement_rate = 0.0;
  std::vector<CaseDisagreement> disagreements;  // plan disagreements, by case_id
};

Json eval_report_to_json(const EvalReport& r);

// Throws EmptyLibrary on an empty library.
EvalReport evaluate(const MLPModel& model, const Library& lib, const EncodingConfig& cfg, const KnowledgeBase& kb,
                    double threshold = 0.5);

// Everything the CLI needs, loaded from one config file.
struct AppConfig {
  std::filesystem::path path;
  EncodingConfig codec;
  KnowledgeBase kb;
  EstimatorConfig estimator;
  Json defaults;  // flag defaults ("epochs", "hidden", ...)
};

// kb_override replaces the config's "kb" entry. Relative paths resolve
// against the config file's directory.
AppConfig load_app_config(const std::filesystem::path& path, const std::optional<std::filesystem::path>& kb_override = {});

// --config flag, else $EXTRUPLAN_CONFIG, else the built-in default.
std::filesystem::path resolve_config_path(const std::optional<std::filesystem::path>& flag);

}  // namespace extruplan
