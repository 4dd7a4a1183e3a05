#include "extruplan/neural_net.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace extruplan {

namespace {

constexpr const char* kModelFormat = "extruplan-mlp";
constexpr int kModelFormatVersion = 1;

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

std::string encode_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw InvalidInput("cannot format double");
  return {buf, ptr};
}

double decode_double(const Json& j) {
  if (!j.is_string()) throw SchemaMismatch("model numbers must be decimal strings");
  const auto s = j.get<std::string>();
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw SchemaMismatch("bad number '" + s + "' in model");
  return v;
}

Json encode_array(const std::vector<double>& v) {
  Json arr = Json::array();
  for (double x : v) arr.push_back(encode_double(x));
  return arr;
}

std::vector<double> decode_array(const Json& j, std::size_t expected, const char* name) {
  if (!j.is_array() || j.size() != expected)
    throw SchemaMismatch(std::string("model array '") + name + "' must have " + std::to_string(expected) +
                         " entries");
  std::vector<double> out;
  out.reserve(expected);
  for (const auto& x : j) out.push_back(decode_double(x));
  return out;
}

Json activation_to_json(const Activation& a) {
  Json j = Json{{"kind", a.kind == ActivationKind::Sigmoid ? "Sigmoid" : "Threshold"}};
  if (a.kind == ActivationKind::Threshold) j["theta"] = encode_double(a.theta);
  return j;
}

Activation activation_from_json(const Json& j) {
  Activation a;
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "Sigmoid") {
    a.kind = ActivationKind::Sigmoid;
  } else if (kind == "Threshold") {
    a.kind = ActivationKind::Threshold;
    a.theta = decode_double(j.at("theta"));
  } else {
    throw SchemaMismatch("unknown activation kind '" + kind + "'");
  }
  return a;
}

// Hidden and output activations for one input.
struct Pass {
  std::vector<double> hidden;
  std::vector<double> output;
};

void check_input(const MLPModel& m, std::span<const double> x) {
  if (x.size() != m.inputs) throw DimensionMismatch(m.inputs, x.size());
}

Pass run(const MLPModel& m, std::span<const double> x) {
  check_input(m, x);
  Pass p;
  p.hidden.assign(m.b1.begin(), m.b1.end());
  for (std::size_t h = 0; h < m.hidden; ++h) {
    const double* row = &m.w1[h * m.inputs];
    double v = p.hidden[h];
    for (std::size_t j = 0; j < m.inputs; ++j)
      if (x[j] != 0.0) v += row[j] * x[j];
    p.hidden[h] = activate(v, m.hidden_activation.kind, m.hidden_activation.theta);
  }
  p.output.assign(m.b2.begin(), m.b2.end());
  for (std::size_t k = 0; k < m.outputs; ++k) {
    const double* row = &m.w2[k * m.hidden];
    double v = p.output[k];
    for (std::size_t h = 0; h < m.hidden; ++h) v += row[h] * p.hidden[h];
    p.output[k] = activate(v, m.output_activation.kind, m.output_activation.theta);
  }
  return p;
}

void require_sigmoid(const MLPModel& m) {
  if (m.hidden_activation.kind != ActivationKind::Sigmoid || m.output_activation.kind != ActivationKind::Sigmoid)
    throw InvalidInput("backpropagation requires sigmoid activations");
}

// Writes dE/dparam into grad (parameter order) and returns the pass.
Pass gradients_into(const MLPModel& m, const Sample& s, std::vector<double>& grad) {
  if (s.target.size() != m.outputs) throw DimensionMismatch(m.outputs, s.target.size());
  Pass p = run(m, s.input);
  grad.assign(m.parameter_count(), 0.0);
  double* gw1 = grad.data();
  double* gb1 = gw1 + m.w1.size();
  double* gw2 = gb1 + m.b1.size();
  double* gb2 = gw2 + m.w2.size();

  std::vector<double> delta_out(m.outputs);
  for (std::size_t k = 0; k < m.outputs; ++k) {
    const double y = p.output[k];
    delta_out[k] = (y - s.target[k]) * y * (1.0 - y);
    gb2[k] = delta_out[k];
    for (std::size_t h = 0; h < m.hidden; ++h) gw2[k * m.hidden + h] = delta_out[k] * p.hidden[h];
  }
  for (std::size_t h = 0; h < m.hidden; ++h) {
    double back = 0.0;
    for (std::size_t k = 0; k < m.outputs; ++k) back += m.w2[k * m.hidden + h] * delta_out[k];
    const double delta = back * p.hidden[h] * (1.0 - p.hidden[h]);
    gb1[h] = delta;
    for (std::size_t j = 0; j < m.inputs; ++j) gw1[h * m.inputs + j] = delta * s.input[j];
  }
  return p;
}

double half_sse(const MLPModel& m, const Sample& s) {
  const auto y = run(m, s.input).output;
  double e = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) e += (y[k] - s.target[k]) * (y[k] - s.target[k]);
  return 0.5 * e;
}

void check_dataset(const MLPModel& m, std::span<const Sample> dataset) {
  if (dataset.empty()) throw EmptyDataset();
  for (const auto& s : dataset) {
    if (s.input.size() != m.inputs) throw DimensionMismatch(m.inputs, s.input.size());
    if (s.target.size() != m.outputs) throw DimensionMismatch(m.outputs, s.target.size());
  }
}

}  // namespace

double activate(double v, ActivationKind kind, double theta) {
  if (kind == ActivationKind::Threshold) return v >= theta ? 1.0 : 0.0;
  return sigmoid(v);
}

MLPModel MLPModel::zeros(std::size_t inputs, std::size_t hidden, std::size_t outputs) {
  MLPModel m;
  m.inputs = inputs;
  m.hidden = hidden;
  m.outputs = outputs;
  m.w1.assign(hidden * inputs, 0.0);
  m.b1.assign(hidden, 0.0);
  m.w2.assign(outputs * hidden, 0.0);
  m.b2.assign(outputs, 0.0);
  return m;
}

MLPModel MLPModel::random(std::size_t inputs, std::size_t hidden, std::size_t outputs, std::uint64_t seed,
                          double range) {
  MLPModel m = zeros(inputs, hidden, outputs);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-range, range);
  for (double* p : m.parameters()) *p = dist(rng);
  m.metadata.seed = seed;
  return m;
}

std::vector<double*> MLPModel::parameters() {
  std::vector<double*> out;
  out.reserve(parameter_count());
  for (auto* vec : {&w1, &b1, &w2, &b2})
    for (double& x : *vec) out.push_back(&x);
  return out;
}

bool MLPModel::all_finite() const {
  for (const auto* vec : {&w1, &b1, &w2, &b2})
    for (double x : *vec)
      if (!std::isfinite(x)) return false;
  return true;
}

Json model_to_json(const MLPModel& m) {
  return Json{{"format", kModelFormat},
              {"format_version", kModelFormatVersion},
              {"layer_sizes", {m.inputs, m.hidden, m.outputs}},
              {"hidden_activation", activation_to_json(m.hidden_activation)},
              {"output_activation", activation_to_json(m.output_activation)},
              {"training",
               {{"seed", m.metadata.seed},
                {"epochs", m.metadata.epochs},
                {"learning_rate", encode_double(m.metadata.learning_rate)},
                {"momentum", encode_double(m.metadata.momentum)},
                {"final_mse", encode_double(m.metadata.final_mse)}}},
              {"w1", encode_array(m.w1)},
              {"b1", encode_array(m.b1)},
              {"w2", encode_array(m.w2)},
              {"b2", encode_array(m.b2)}};
}

MLPModel model_from_json(const Json& j) {
  try {
    if (j.at("format").get<std::string>() != kModelFormat) throw SchemaMismatch("not an extruplan model file");
    if (j.at("format_version").get<int>() != kModelFormatVersion)
      throw SchemaMismatch("unsupported model format_version");
    const auto sizes = j.at("layer_sizes").get<std::vector<std::size_t>>();
    if (sizes.size() != 3 || sizes[0] == 0 || sizes[1] == 0 || sizes[2] == 0)
      throw SchemaMismatch("layer_sizes must list three positive sizes");
    MLPModel m;
    m.inputs = sizes[0];
    m.hidden = sizes[1];
    m.outputs = sizes[2];
    m.hidden_activation = activation_from_json(j.at("hidden_activation"));
    m.output_activation = activation_from_json(j.at("output_activation"));
    const Json& t = j.at("training");
    m.metadata.seed = t.at("seed").get<std::uint64_t>();
    m.metadata.epochs = t.at("epochs").get<int>();
    m.metadata.learning_rate = decode_double(t.at("learning_rate"));
    m.metadata.momentum = decode_double(t.at("momentum"));
    m.metadata.final_mse = decode_double(t.at("final_mse"));
    m.w1 = decode_array(j.at("w1"), m.hidden * m.inputs, "w1");
    m.b1 = decode_array(j.at("b1"), m.hidden, "b1");
    m.w2 = decode_array(j.at("w2"), m.outputs * m.hidden, "w2");
    m.b2 = decode_array(j.at("b2"), m.outputs, "b2");
    if (!m.all_finite()) throw SchemaMismatch("model holds non-finite weights");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaMismatch(std::string("malformed model: ") + e.what());
  }
}

std::string serialize_model(const MLPModel& model) { return model_to_json(model).dump() + "\n"; }

void save_model(const MLPModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write model " + path.string());
  out << serialize_model(model);
  if (!out) throw IoError("failed writing model " + path.string());
}

MLPModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model " + path.string());
  try {
    return model_from_json(Json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaMismatch(path.string() + ": " + e.what());
  }
}

std::vector<double> forward(const MLPModel& model, std::span<const double> x) { return run(model, x).output; }

std::vector<double> forward(const MLPModel& model, const InputVector& x) {
  const auto reals = x.as_reals();
  return forward(model, reals);
}

Sample make_sample(const InputVector& x, const OutputVector& t) { return {x.as_reals(), t.as_reals()}; }

std::vector<std::string> TrainConfig::problems() const {
  std::vector<std::string> out;
  if (!(learning_rate > 0.0)) out.emplace_back("learning_rate > 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) out.emplace_back("0 <= momentum < 1");
  if (hidden_size < 1) out.emplace_back("hidden_size >= 1");
  if (epochs < 0) out.emplace_back("epochs >= 0");
  if (!(init_range > 0.0)) out.emplace_back("init_range > 0");
  if (!(decode_threshold > 0.0 && decode_threshold < 1.0)) out.emplace_back("0 < decode_threshold < 1");
  return out;
}

double mean_squared_error(const MLPModel& model, std::span<const Sample> dataset) {
  if (dataset.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& s : dataset) sum += 2.0 * half_sse(model, s);
  return sum / (static_cast<double>(dataset.size()) * static_cast<double>(model.outputs));
}

TrainResult train(std::span<const Sample> dataset, const TrainConfig& cfg, std::size_t inputs, std::size_t outputs) {
  if (auto bad = cfg.problems(); !bad.empty()) throw InvalidInput("invalid training config: " + bad.front());
  return train(MLPModel::random(inputs, cfg.hidden_size, outputs, cfg.seed, cfg.init_range), dataset, cfg);
}

TrainResult train(MLPModel model, std::span<const Sample> dataset, const TrainConfig& cfg) {
  if (auto bad = cfg.problems(); !bad.empty()) throw InvalidInput("invalid training config: " + bad.front());
  require_sigmoid(model);
  check_dataset(model, dataset);

  TrainResult result;
  result.initial_mse = mean_squared_error(model, dataset);
  result.mse_history.reserve(static_cast<std::size_t>(cfg.epochs));

  std::vector<double> velocity(model.parameter_count(), 0.0);
  std::vector<double> grad;
  std::vector<double*> params = model.parameters();
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 shuffler(cfg.seed ^ 0x9e3779b97f4a7c15ULL);

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    if (cfg.shuffle) std::shuffle(order.begin(), order.end(), shuffler);
    for (std::size_t idx : order) {
      gradients_into(model, dataset[idx], grad);
      for (std::size_t p = 0; p < params.size(); ++p) {
        velocity[p] = -cfg.learning_rate * grad[p] + cfg.momentum * velocity[p];
        *params[p] += velocity[p];
      }
    }
    const double mse = mean_squared_error(model, dataset);
    if (!std::isfinite(mse) || !model.all_finite()) throw NonFiniteLoss(epoch);
    result.mse_history.push_back(mse);
  }

  model.metadata.seed = cfg.seed;
  model.metadata.epochs = cfg.epochs;
  model.metadata.learning_rate = cfg.learning_rate;
  model.metadata.momentum = cfg.momentum;
  model.metadata.final_mse = result.mse_history.empty() ? result.initial_mse : result.mse_history.back();
  result.model = std::move(model);
  return result;
}

std::vector<std::uint8_t> predict_bits(const MLPModel& model, std::span<const double> x, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw InvalidInput("decode threshold must lie in (0, 1)");
  const auto y = forward(model, x);
  std::vector<std::uint8_t> bits(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) bits[i] = y[i] >= threshold ? 1 : 0;
  return bits;
}

OutputVector predict_binary(const MLPModel& model, const InputVector& x, double threshold) {
  if (model.outputs != kOutputNodes) throw DimensionMismatch(kOutputNodes, model.outputs);
  const auto bits = predict_bits(model, x.as_reals(), threshold);
  OutputVector out;
  for (std::size_t i = 0; i < bits.size(); ++i) out.set(i + 1, bits[i] == 1);
  return out;
}

std::vector<double> backprop_gradients(const MLPModel& model, const Sample& sample) {
  require_sigmoid(model);
  std::vector<double> grad;
  gradients_into(model, sample, grad);
  return grad;
}

double gradient_check(const MLPModel& model, const Sample& sample, double eps) {
  if (!(eps > 0.0)) throw InvalidInput("gradient_check step must be positive");
  const auto analytic = backprop_gradients(model, sample);
  MLPModel probe = model;
  auto params = probe.parameters();
  double worst = 0.0;
  for (std::size_t p = 0; p < params.size(); ++p) {
    const double saved = *params[p];
    *params[p] = saved + eps;
    const double plus = half_sse(probe, sample);
    *params[p] = saved - eps;
    const double minus = half_sse(probe, sample);
    *params[p] = saved;
    const double numeric = (plus - minus) / (2.0 * eps);
    const double rel = std::abs(analytic[p] - numeric) /
                       std::max(std::abs(analytic[p]) + std::abs(numeric), 1e-12);
    worst = std::max(worst, rel);
  }
  return worst;
}

}  // namespace extruplan
