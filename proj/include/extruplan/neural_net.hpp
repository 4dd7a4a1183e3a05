#pragma once

// One-hidden-layer feedforward network trained by pattern-mode
// backpropagation with momentum.
//
// Each neuron computes v_k = sum_j w_kj x_j + b_k, then y_k = phi(v_k).
// The firing threshold theta_k of the perceptron model is carried as the
// bias, b_k = -theta_k.

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "extruplan/codec.hpp"

namespace extruplan {

enum class ActivationKind { Sigmoid, Threshold };

struct Activation {
  ActivationKind kind = ActivationKind::Sigmoid;
  double theta = 0.0;  // Threshold only

  bool operator==(const Activation&) const = default;
};

// Threshold: 1 if v >= theta else 0. Sigmoid: 1 / (1 + e^-v).
double activate(double v, ActivationKind kind, double theta = 0.0);

struct TrainingMetadata {
  std::uint64_t seed = 0;
  int epochs = 0;
  double learning_rate = 0.0;
  double momentum = 0.0;
  double final_mse = 0.0;

  bool operator==(const TrainingMetadata&) const = default;
};

struct MLPModel {
  std::size_t inputs = 0;
  std::size_t hidden = 0;
  std::size_t outputs = 0;
  std::vector<double> w1;  // hidden x inputs, row-major
  std::vector<double> b1;  // hidden
  std::vector<double> w2;  // outputs x hidden, row-major
  std::vector<double> b2;  // outputs
  Activation hidden_activation;
  Activation output_activation;
  TrainingMetadata metadata;

  // Zero weights and biases.
  static MLPModel zeros(std::size_t inputs, std::size_t hidden, std::size_t outputs);
  // Weights and biases uniform in [-range, range] from a seeded generator.
  static MLPModel random(std::size_t inputs, std::size_t hidden, std::size_t outputs, std::uint64_t seed,
                         double range = 0.5);

  std::size_t parameter_count() const { return w1.size() + b1.size() + w2.size() + b2.size(); }
  // Parameters in serialization order (w1, b1, w2, b2).
  std::vector<double*> parameters();
  bool all_finite() const;

  bool operator==(const MLPModel&) const = default;
};

Json model_to_json(const MLPModel& model);
MLPModel model_from_json(const Json& j);
void save_model(const MLPModel& model, const std::filesystem::path& path);
MLPModel load_model(const std::filesystem::path& path);
// Canonical text form written by save_model.
std::string serialize_model(const MLPModel& model);

std::vector<double> forward(const MLPModel& model, std::span<const double> x);
std::vector<double> forward(const MLPModel& model, const InputVector& x);

struct Sample {
  std::vector<double> input;
  std::vector<double> target;
};

Sample make_sample(const InputVector& x, const OutputVector& t);

struct TrainConfig {
  double learning_rate = 0.1;
  double momentum = 0.7;
  std::size_t hidden_size = 5;
  int epochs = 1000;
  std::uint64_t seed = 42;
  double init_range = 0.5;
  bool shuffle = false;  // when set, the seeded generator permutes each epoch
  double decode_threshold = 0.5;

  std::vector<std::string> problems() const;
};

struct TrainResult {
  MLPModel model;
  double initial_mse = 0.0;         // untrained model over the dataset
  std::vector<double> mse_history;  // after each epoch
};

// Per-output mean squared error over the dataset: mean over samples and outputs of (y - t)^2.
double mean_squared_error(const MLPModel& model, std::span<const Sample> dataset);

// Initializes from cfg.seed and trains.
TrainResult train(std::span<const Sample> dataset, const TrainConfig& cfg, std::size_t inputs,
                  std::size_t outputs);
// Continues training an existing sigmoid model.
TrainResult train(MLPModel model, std::span<const Sample> dataset, const TrainConfig& cfg);

// Bit i is 1 iff output i >= threshold; threshold must lie in (0, 1).
std::vector<std::uint8_t> predict_bits(const MLPModel& model, std::span<const double> x, double threshold);
OutputVector predict_binary(const MLPModel& model, const InputVector& x, double threshold = 0.5);

// Gradients of E = 1/2 sum (y - t)^2 in parameter order.
std::vector<double> backprop_gradients(const MLPModel& model, const Sample& sample);

// Max over parameters of |analytic - numeric| / max(|analytic| + |numeric|, 1e-12)
// using central differences of step eps (> 0).
double gradient_check(const MLPModel& model, const Sample& sample, double eps = 1e-5);

}  // namespace extruplan
