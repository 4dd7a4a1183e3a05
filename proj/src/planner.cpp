#include "extruplan/planner.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>

#ifndef EXTRUPLAN_DEFAULT_CONFIG
#define EXTRUPLAN_DEFAULT_CONFIG "config/extruplan.json"
#endif

namespace extruplan {

namespace {

template <class Fn>
auto in_stage(const char* stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(stage, e);
  }
}

std::vector<std::size_t> active_columns(const OutputVector& v, const Segment& seg) {
  std::vector<std::size_t> cols;
  for (std::size_t i = 0; i < seg.length; ++i)
    if (v.at(seg.column(i))) cols.push_back(seg.column(i));
  return cols;
}

Json notes_to_json(const std::vector<StageNote>& notes) {
  Json arr = Json::array();
  for (const auto& n : notes) arr.push_back({{"stage", n.stage}, {"kind", n.kind}, {"message", n.message}});
  return arr;
}

}  // namespace

std::string_view to_string(PlanProvenance p) {
  switch (p) {
    case PlanProvenance::NnPrediction: return "NnPrediction";
    case PlanProvenance::KnnFallback: return "KnnFallback";
    case PlanProvenance::KbDirect: return "KbDirect";
  }
  return {};
}

Json plan_document_to_json(const PlanDocument& doc) {
  Json trail = Json::array();
  for (auto p : doc.provenance) trail.push_back(to_string(p));
  Json j = Json{{"profile", doc.profile}, {"design", doc.design}, {"plan", doc.plan}, {"provenance", trail}};
  Json conf = Json::object();
  for (const auto& [seg, value] : doc.confidence) conf[seg] = value;
  j["confidence"] = conf;
  if (doc.matched_case) j["matched_case"] = *doc.matched_case;
  j["diagnostics"] = notes_to_json(doc.diagnostics);
  return j;
}

DieDesign design_from_prediction(const DecodedDesign& decoded, const KnowledgeBase& kb) {
  DieDesign d = decoded.skeleton();
  for (auto& part : d.parts)
    for (auto f : kb.design_template(part.kind)) part.features.push_back({f, {}});
  return d;
}

PlanDocument plan(const ProfileSpec& spec, const MLPModel* model, const Library& lib, const PlannerContext& ctx) {
  PlanDocument doc;
  doc.profile = spec;
  if (auto bad = validate_profile(spec); !bad.empty())
    throw StageError("validate", InvalidInput("invalid profile: " + bad.front()));
  const InputVector x = in_stage("encode", [&] { return encode_profile(spec, ctx.codec); });

  std::optional<DieDesign> design;
  if (model != nullptr) {
    const auto activations = in_stage("predict", [&] {
      if (model->inputs != kInputNodes || model->outputs != kOutputNodes)
        throw DimensionMismatch(kInputNodes, model->inputs);
      return forward(*model, x);
    });
    OutputVector bits;
    for (std::size_t i = 0; i < activations.size(); ++i) bits.set(i + 1, activations[i] >= ctx.threshold);
    for (const auto& seg : ctx.codec.output_segments) {
      double best = 0.0;
      for (std::size_t i = 0; i < seg.length; ++i) best = std::max(best, activations[seg.column(i) - 1]);
      doc.confidence[seg.name] = best;
    }
    const auto diags = validate_output(bits, ctx.codec);
    if (diags.empty()) {
      design = design_from_prediction(in_stage("decode", [&] { return decode_output(bits, ctx.codec); }), ctx.kb);
      doc.provenance.push_back(PlanProvenance::NnPrediction);
    } else {
      for (const auto& d : diags) doc.diagnostics.push_back({"decode", std::string(to_string(d.kind)), d.message});
    }
  } else {
    doc.diagnostics.push_back({"predict", "Skipped", "no model supplied"});
  }

  if (!design) {
    if (!lib.empty()) {
      const auto nearest = in_stage("retrieve", [&] { return nearest_neighbors(x, lib, ctx.codec, 1); });
      design = lib.find(nearest.front().case_id)->design;
      doc.matched_case = nearest.front().case_id;
      doc.provenance.push_back(PlanProvenance::KnnFallback);
    } else {
      doc.diagnostics.push_back({"retrieve", "EmptyLibrary", "case library is empty"});
      design = in_stage("construct", [&] { return construct_design(spec, ctx.kb); });
      doc.provenance.push_back(PlanProvenance::KbDirect);
    }
  }

  doc.design = *design;
  const ProcessPlan raw = in_stage("derive", [&] { return derive_plan(doc.design, ctx.kb); });
  doc.plan = in_stage("estimate",
                      [&] { return estimate_plan(raw, ctx.estimator.setup, ctx.estimator.cost); });
  return doc;
}

Json eval_report_to_json(const EvalReport& r) {
  Json seg = Json::object();
  for (const auto& [name, acc] : r.segment_bit_accuracy) seg[name] = acc;
  Json dis = Json::array();
  for (const auto& d : r.disagreements) {
    Json diffs = Json::array();
    for (const auto& s : d.diffs)
      diffs.push_back({{"segment", s.segment}, {"predicted", s.predicted}, {"expected", s.expected}});
    dis.push_back({{"case_id", d.case_id}, {"decodable", d.decodable}, {"diffs", diffs}});
  }
  return Json{{"cases", r.cases},
              {"bit_accuracy", r.bit_accuracy},
              {"exact_match_rate", r.exact_match_rate},
              {"die_type_accuracy", r.die_type_accuracy},
              {"plan_agreement_rate", r.plan_agreement_rate},
              {"segment_bit_accuracy", seg},
              {"disagreements", dis}};
}

EvalReport evaluate(const MLPModel& model, const Library& lib, const EncodingConfig& cfg, const KnowledgeBase& kb,
                    double threshold) {
  if (lib.empty()) throw EmptyLibrary();
  EvalReport r;
  r.cases = lib.size();
  std::map<std::string, std::size_t> seg_correct;
  std::size_t bits_correct = 0, exact = 0, die_ok = 0, agree = 0;

  std::vector<const CaseRecord*> order;
  for (const auto& rec : lib.records()) order.push_back(&rec);
  std::sort(order.begin(), order.end(), [](const CaseRecord* a, const CaseRecord* b) { return a->case_id < b->case_id; });

  for (const CaseRecord* rec : order) {
    const InputVector x = encode_profile(rec->profile, cfg);
    const OutputVector target = encode_design(rec->design, cfg);
    const OutputVector predicted = predict_binary(model, x, threshold);

    std::vector<SegmentDiff> diffs;
    for (const auto& seg : cfg.output_segments) {
      std::size_t ok = 0;
      for (std::size_t i = 0; i < seg.length; ++i) ok += predicted.at(seg.column(i)) == target.at(seg.column(i));
      seg_correct[seg.name] += ok;
      bits_correct += ok;
      if (ok != seg.length) diffs.push_back({seg.name, active_columns(predicted, seg), active_columns(target, seg)});
    }
    if (predicted == target) ++exact;
    const Segment& dt = cfg.output(segment::kDieType);
    if (active_columns(predicted, dt) == active_columns(target, dt)) ++die_ok;

    const ProcessPlan kb_plan = derive_plan(construct_design(rec->profile, kb), kb);
    const bool decodable = validate_output(predicted, cfg).empty();
    bool same = false;
    if (decodable) same = derive_plan(design_from_prediction(decode_output(predicted, cfg), kb), kb) == kb_plan;
    if (same)
      ++agree;
    else
      r.disagreements.push_back({rec->case_id, std::move(diffs), decodable});
  }

  const double n = static_cast<double>(r.cases);
  for (const auto& seg : cfg.output_segments)
    r.segment_bit_accuracy[seg.name] = static_cast<double>(seg_correct[seg.name]) / (n * static_cast<double>(seg.length));
  r.bit_accuracy = static_cast<double>(bits_correct) / (n * static_cast<double>(kOutputNodes));
  r.exact_match_rate = static_cast<double>(exact) / n;
  r.die_type_accuracy = static_cast<double>(die_ok) / n;
  r.plan_agreement_rate = static_cast<double>(agree) / n;
  return r;
}

AppConfig load_app_config(const std::filesystem::path& path, const std::optional<std::filesystem::path>& kb_override) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError({path.string() + ": " + e.what()});
  }
  const auto base = path.parent_path();
  auto resolve = [&](const std::filesystem::path& p) { return p.is_absolute() ? p : base / p; };

  AppConfig app{path, EncodingConfig::from_json(j.at("codec")), {}, {}, j.value("defaults", Json::object())};
  if (kb_override)
    app.kb = KnowledgeBase::load(*kb_override);
  else
    app.kb = KnowledgeBase::load(resolve(j.at("kb").get<std::string>()));
  app.estimator = EstimatorConfig::from_json(j.at("estimator"));
  return app;
}

std::filesystem::path resolve_config_path(const std::optional<std::filesystem::path>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("EXTRUPLAN_CONFIG"); env != nullptr && *env != '\0') return env;
  return EXTRUPLAN_DEFAULT_CONFIG;
}

}  // namespace extruplan
