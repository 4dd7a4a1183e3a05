// extruplan: command-line front end for the planner.
//
// Exit codes: 0 success, 1 validation failure, 2 I/O or schema error,
// 3 internal error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "extruplan/planner.hpp"

namespace fs = std::filesystem;
using namespace extruplan;

namespace {

enum Exit { kOk = 0, kValidation = 1, kIo = 2, kInternal = 3 };

int exit_code_for(const std::string& kind) {
  static const std::map<std::string, int> codes = {
      {"InvalidInput", kValidation},     {"BinOutOfRange", kValidation},    {"UnknownShape", kValidation},
      {"AmbiguousSegment", kValidation}, {"InconsistentParts", kValidation}, {"NoRule", kValidation},
      {"DimensionMismatch", kValidation}, {"EmptyDataset", kValidation},    {"NonPositiveInput", kValidation},
      {"UnitMismatch", kValidation},     {"MissingParams", kValidation},    {"EmptyLibrary", kValidation},
      {"ConfigError", kValidation},      {"IoError", kIo},                  {"SchemaMismatch", kIo},
      {"VersionMismatch", kIo},
  };
  auto it = codes.find(kind);
  return it == codes.end() ? kInternal : it->second;
}

Json read_json(const std::string& path) {
  std::ostringstream buf;
  if (path == "-") {
    buf << std::cin.rdbuf();
  } else {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    buf << in.rdbuf();
  }
  try {
    return Json::parse(buf.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaMismatch(path + ": " + e.what());
  }
}

void write_json(const Json& j, const std::optional<std::string>& out) {
  if (!out || *out == "-") {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream f(*out, std::ios::binary);
  if (!f) throw IoError("cannot write " + *out);
  f << j.dump(2) << "\n";
}

template <class T>
void fill_default(CLI::Option* opt, T& value, const Json& defaults, const char* key) {
  if (opt->count() == 0 && defaults.contains(key)) value = defaults.at(key).get<T>();
}

ProfileSpec read_profile(const std::string& path, const std::string& unit) {
  try {
    return ingest_profile(read_json(path),
                          unit == "mm" ? PerimeterUnit::Millimetre : PerimeterUnit::Centimetre);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaMismatch(path + ": " + e.what());
  }
}

Json vector_report(const std::vector<double>& raw, const OutputVector& bits) {
  Json active = Json::array();
  for (std::size_t c = 1; c <= kOutputNodes; ++c)
    if (bits.at(c)) active.push_back(c);
  return Json{{"raw", raw}, {"bits", vector_to_json(bits)}, {"active_columns", active}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Process planning for aluminium extrusion dies"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::string> config_flag;
  std::optional<std::string> kb_flag;
  app.add_option("--config", config_flag, "Config file (default: $EXTRUPLAN_CONFIG or the built-in path)");
  app.add_option("--kb", kb_flag, "Knowledge base file, overriding the config's");

  std::string profile_path, model_path, cases_dir, out_path, plan_path, perimeter_unit = "cm";
  std::optional<std::string> cost_model, model_opt, cases_opt, out_opt, mse_csv;
  std::size_t n = 150, hidden = 32;
  std::uint64_t seed = 42;
  int epochs = 2000;
  double lr = 0.1, momentum = 0.7, threshold = 0.5;
  bool jitter = false, shuffle = false;

  auto* encode = app.add_subcommand("encode", "Encode a profile as the 170-node input vector");
  encode->add_option("--profile", profile_path, "Profile JSON ('-' for stdin)")->required();
  encode->add_option("--perimeter-unit", perimeter_unit)->check(CLI::IsMember({"cm", "mm"}));

  auto* gen = app.add_subcommand("gen-cases", "Generate a seeded synthetic case library");
  auto* gen_n = gen->add_option("--n", n, "Number of cases, the case study included");
  auto* gen_seed = gen->add_option("--seed", seed);
  gen->add_option("--out", cases_dir, "Output directory")->required();
  gen->add_flag("--jitter", jitter, "Draw numeric attributes anywhere inside their bin");

  auto* trn = app.add_subcommand("train", "Train the network on a case library");
  trn->add_option("--cases", cases_dir, "Case library directory")->required();
  auto* trn_epochs = trn->add_option("--epochs", epochs);
  auto* trn_hidden = trn->add_option("--hidden", hidden);
  auto* trn_lr = trn->add_option("--lr", lr);
  auto* trn_momentum = trn->add_option("--momentum", momentum);
  auto* trn_seed = trn->add_option("--seed", seed);
  trn->add_flag("--shuffle", shuffle, "Permute the pattern order each epoch");
  trn->add_option("--model-out", model_path)->required();
  trn->add_option("--mse-csv", mse_csv, "Per-epoch MSE curve (default: <model-out>.mse.csv)");

  auto* pred = app.add_subcommand("predict", "Raw and thresholded network output for a profile");
  pred->add_option("--profile", profile_path)->required();
  pred->add_option("--model", model_path)->required();
  auto* pred_threshold = pred->add_option("--threshold", threshold);
  pred->add_option("--perimeter-unit", perimeter_unit)->check(CLI::IsMember({"cm", "mm"}));

  auto* pln = app.add_subcommand("plan", "Produce a process plan document for a profile");
  pln->add_option("--profile", profile_path)->required();
  pln->add_option("--model", model_opt, "Trained model; omit to skip the network");
  pln->add_option("--cases", cases_opt, "Case library directory; omit for an empty library");
  auto* pln_threshold = pln->add_option("--threshold", threshold);
  pln->add_option("--perimeter-unit", perimeter_unit)->check(CLI::IsMember({"cm", "mm"}));
  pln->add_option("--out", out_opt);

  auto* est = app.add_subcommand("estimate", "Annotate a plan with machining time and cost");
  est->add_option("--plan", plan_path, "ProcessPlan or plan document JSON")->required();
  est->add_option("--cost-model", cost_model, "Estimator config, overriding the config's");

  auto* evl = app.add_subcommand("eval", "Evaluate a model against a case library");
  evl->add_option("--model", model_path)->required();
  evl->add_option("--cases", cases_dir)->required();
  auto* evl_threshold = evl->add_option("--threshold", threshold);

  auto* insp = app.add_subcommand("inspect-model", "Show model dimensions, seed and final MSE");
  insp->add_option("model", model_path)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (insp->parsed()) {
      const MLPModel m = load_model(model_path);
      std::cout << Json{{"inputs", m.inputs},
                        {"hidden", m.hidden},
                        {"outputs", m.outputs},
                        {"seed", m.metadata.seed},
                        {"epochs", m.metadata.epochs},
                        {"learning_rate", m.metadata.learning_rate},
                        {"momentum", m.metadata.momentum},
                        {"final_mse", m.metadata.final_mse}}
                       .dump(2)
                << "\n";
      return kOk;
    }

    std::optional<fs::path> kb_path;
    if (kb_flag) kb_path = *kb_flag;
    const fs::path config_path = resolve_config_path(config_flag ? std::optional<fs::path>(*config_flag) : std::nullopt);
    const AppConfig cfg = load_app_config(config_path, kb_path);
    const Json& d = cfg.defaults;

    if (encode->parsed()) {
      const InputVector x = encode_profile(read_profile(profile_path, perimeter_unit), cfg.codec);
      Json active = Json::array();
      for (std::size_t c = 1; c <= kInputNodes; ++c)
        if (x.at(c)) active.push_back(c);
      std::cout << Json{{"vector", vector_to_json(x)}, {"active_columns", active}}.dump(2) << "\n";
    } else if (gen->parsed()) {
      fill_default(gen_n, n, d, "n");
      fill_default(gen_seed, seed, d, "seed");
      GeneratorOptions opts;
      opts.jitter = jitter;
      Library lib = make_library(generate_synthetic_cases(n, seed, cfg.codec, cfg.kb, opts), cfg.codec, cfg.kb);
      save_library(lib, library_file(cases_dir));
      std::cerr << "wrote " << lib.size() << " cases to " << library_file(cases_dir).string() << "\n";
    } else if (trn->parsed()) {
      fill_default(trn_epochs, epochs, d, "epochs");
      fill_default(trn_hidden, hidden, d, "hidden");
      fill_default(trn_lr, lr, d, "lr");
      fill_default(trn_momentum, momentum, d, "momentum");
      fill_default(trn_seed, seed, d, "seed");
      const Library lib = load_library(library_file(cases_dir), cfg.codec);
      std::vector<Sample> samples;
      for (const auto& pair : build_dataset(lib, cfg.codec)) samples.push_back(make_sample(pair.input, pair.output));
      TrainConfig tc;
      tc.learning_rate = lr;
      tc.momentum = momentum;
      tc.hidden_size = hidden;
      tc.epochs = epochs;
      tc.seed = seed;
      tc.shuffle = shuffle;
      if (auto bad = tc.problems(); !bad.empty()) throw InvalidInput("train: " + bad.front());
      const TrainResult r = train(samples, tc, kInputNodes, kOutputNodes);
      save_model(r.model, model_path);
      const std::string csv_path = mse_csv.value_or(model_path + ".mse.csv");
      std::ofstream csv(csv_path, std::ios::binary);
      if (!csv) throw IoError("cannot write " + csv_path);
      csv << "epoch,mse\n0," << r.initial_mse << "\n";
      csv.precision(17);
      for (std::size_t e = 0; e < r.mse_history.size(); ++e) csv << e + 1 << "," << r.mse_history[e] << "\n";
      std::cerr << "initial mse " << r.initial_mse << ", final mse " << r.model.metadata.final_mse << "\n";
    } else if (pred->parsed()) {
      fill_default(pred_threshold, threshold, d, "threshold");
      const MLPModel m = load_model(model_path);
      const InputVector x = encode_profile(read_profile(profile_path, perimeter_unit), cfg.codec);
      std::cout << vector_report(forward(m, x), predict_binary(m, x, threshold)).dump(2) << "\n";
    } else if (pln->parsed()) {
      fill_default(pln_threshold, threshold, d, "threshold");
      std::optional<MLPModel> m;
      if (model_opt) m = load_model(*model_opt);
      Library lib;
      if (cases_opt) lib = load_library(library_file(*cases_opt), cfg.codec);
      const PlannerContext ctx{cfg.codec, cfg.kb, cfg.estimator, threshold};
      const PlanDocument doc = plan(read_profile(profile_path, perimeter_unit), m ? &*m : nullptr, lib, ctx);
      write_json(plan_document_to_json(doc), out_opt);
    } else if (est->parsed()) {
      const EstimatorConfig ec = cost_model ? EstimatorConfig::load(*cost_model) : cfg.estimator;
      Json doc = read_json(plan_path);
      const bool wrapped = doc.contains("plan");
      ProcessPlan p;
      try {
        p = (wrapped ? doc.at("plan") : doc).get<ProcessPlan>();
      } catch (const nlohmann::json::exception& e) {
        throw SchemaMismatch(plan_path + ": " + e.what());
      }
      const ProcessPlan annotated = estimate_plan(p, ec.setup, ec.cost);
      if (wrapped)
        doc["plan"] = annotated;
      else
        doc = annotated;
      std::cout << doc.dump(2) << "\n";
    } else if (evl->parsed()) {
      fill_default(evl_threshold, threshold, d, "threshold");
      const MLPModel m = load_model(model_path);
      const Library lib = load_library(library_file(cases_dir), cfg.codec);
      std::cout << eval_report_to_json(evaluate(m, lib, cfg.codec, cfg.kb, threshold)).dump(2) << "\n";
    }
    return kOk;
  } catch (const ConfigError& e) {
    std::cerr << "error [ConfigError]: " << e.what() << "\n";
    return kValidation;
  } catch (const Error& e) {
    std::cerr << "error [" << e.kind() << "]: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error [SchemaMismatch]: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
}
