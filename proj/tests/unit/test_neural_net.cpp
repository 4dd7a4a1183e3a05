#include <doctest.h>

#include <cmath>
#include <random>

#include "../support.hpp"

using namespace extruplan;

namespace {

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

std::vector<Sample> xor_data() {
  return {{{0, 0}, {0}}, {{0, 1}, {1}}, {{1, 0}, {1}}, {{1, 1}, {0}}};
}

Sample random_sample(std::mt19937_64& rng, std::size_t in, std::size_t out) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Sample s;
  for (std::size_t i = 0; i < in; ++i) s.input.push_back(u(rng) < 0.5 ? 0.0 : 1.0);
  for (std::size_t i = 0; i < out; ++i) s.target.push_back(u(rng) < 0.5 ? 0.0 : 1.0);
  return s;
}

}  // namespace

TEST_SUITE("neural_net") {

TEST_CASE("activation functions") {
  CHECK(activate(0.3, ActivationKind::Threshold, 0.3) == 1.0);
  CHECK(activate(0.3 - 1e-12, ActivationKind::Threshold, 0.3) == 0.0);
  CHECK(activate(0.0, ActivationKind::Sigmoid) == 0.5);
  for (double v = -30.0; v <= 30.0; v += 0.25) {
    const double s = activate(v, ActivationKind::Sigmoid);
    CHECK(s > 0.0);
    CHECK(s < 1.0);
    const double t = activate(v, ActivationKind::Threshold, 0.1);
    CHECK((t == 0.0 || t == 1.0));
  }
}

TEST_CASE("zero network outputs one half everywhere") {
  const MLPModel m = MLPModel::zeros(kInputNodes, 5, kOutputNodes);
  const auto y = forward(m, encode_profile(case_study_profile(), testing_support::codec()));
  REQUIRE(y.size() == kOutputNodes);
  for (double v : y) CHECK(v == 0.5);
}

TEST_CASE("single path network") {
  MLPModel m = MLPModel::zeros(1, 1, 1);
  m.w1[0] = 1.0;
  m.w2[0] = 1.0;
  const double x[] = {1.0};
  const auto y = forward(m, std::span<const double>(x));
  CHECK(y[0] == doctest::Approx(0.67504).epsilon(1e-5));
  CHECK(y[0] == sigmoid(sigmoid(1.0)));
}

TEST_CASE("input of the wrong length") {
  const MLPModel m = MLPModel::zeros(kInputNodes, 3, kOutputNodes);
  const std::vector<double> x(169, 0.0);
  CHECK_THROWS_AS(forward(m, x), DimensionMismatch);
}

TEST_CASE("XOR is learned") {
  TrainConfig cfg;
  cfg.hidden_size = 2;
  cfg.learning_rate = 0.5;
  cfg.momentum = 0.7;
  cfg.epochs = 20000;
  cfg.seed = 4;
  cfg.init_range = 1.0;
  const auto data = xor_data();
  const TrainResult r = train(data, cfg, 2, 1);
  for (const auto& s : data) {
    const auto bits = predict_bits(r.model, s.input, 0.5);
    CHECK(bits[0] == s.target[0]);
  }
}

TEST_CASE("a repeated pair lowers the error") {
  std::mt19937_64 rng(11);
  const Sample s = random_sample(rng, 6, 4);
  const std::vector<Sample> data(3, s);
  TrainConfig cfg;
  cfg.epochs = 20;
  const TrainResult r = train(data, cfg, 6, 4);
  REQUIRE(r.mse_history.size() == 20);
  CHECK(r.mse_history.back() < r.initial_mse);
  CHECK(r.model.metadata.final_mse == r.mse_history.back());
}

TEST_CASE("training is reproducible and order dependent") {
  std::mt19937_64 rng(5);
  std::vector<Sample> data;
  for (int i = 0; i < 8; ++i) data.push_back(random_sample(rng, 10, 4));
  TrainConfig cfg;
  cfg.epochs = 30;
  const auto a = train(data, cfg, 10, 4).model;
  const auto b = train(data, cfg, 10, 4).model;
  CHECK(serialize_model(a) == serialize_model(b));

  std::vector<Sample> reversed(data.rbegin(), data.rend());
  CHECK(serialize_model(train(reversed, cfg, 10, 4).model) != serialize_model(a));

  cfg.shuffle = true;
  const auto s1 = train(data, cfg, 10, 4).model;
  const auto s2 = train(data, cfg, 10, 4).model;
  CHECK(serialize_model(s1) == serialize_model(s2));
  CHECK(serialize_model(s1) != serialize_model(a));
}

TEST_CASE("training preconditions") {
  TrainConfig cfg;
  CHECK_THROWS_AS(train(std::vector<Sample>{}, cfg, 2, 1), EmptyDataset);
  cfg.learning_rate = 0.0;
  CHECK_FALSE(cfg.problems().empty());
  cfg = TrainConfig{};
  cfg.epochs = 5;
  std::vector<Sample> data{{{std::nan(""), 1.0}, {1.0}}};
  CHECK_THROWS_AS(train(data, cfg, 2, 1), NonFiniteLoss);
}

TEST_CASE("thresholding is inclusive") {
  const MLPModel m = MLPModel::zeros(kInputNodes, 4, kOutputNodes);
  const InputVector x;
  CHECK(predict_binary(m, x, 0.5).popcount() == kOutputNodes);
  CHECK(predict_binary(m, x, 0.51).popcount() == 0);
  CHECK_THROWS_AS(predict_binary(m, x, 1.0), InvalidInput);
  CHECK_THROWS_AS(predict_binary(m, x, 0.0), InvalidInput);
}

TEST_CASE("gradient check on a 4-3-2 net") {
  const MLPModel m = MLPModel::random(4, 3, 2, 17, 1.0);
  std::mt19937_64 rng(17);
  CHECK(gradient_check(m, random_sample(rng, 4, 2)) < 1e-4);
}

TEST_CASE("gradient check across 100 seeds") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(seed);
    const std::size_t in = 1 + rng() % 6, hidden = 1 + rng() % 5, out = 1 + rng() % 4;
    const MLPModel m = MLPModel::random(in, hidden, out, seed, 1.0);
    CAPTURE(seed);
    CHECK(gradient_check(m, random_sample(rng, in, out)) < 1e-4);
  }
}

TEST_CASE("zero input blocks first-layer gradients") {
  const MLPModel m = MLPModel::zeros(2, 2, 1);
  const Sample s{{0.0, 0.0}, {1.0}};
  const auto g = backprop_gradients(m, s);
  REQUIRE(g.size() == m.parameter_count());
  for (std::size_t i = 0; i < m.w1.size(); ++i) CHECK(g[i] == 0.0);
  CHECK_THROWS_AS(gradient_check(m, s, 0.0), InvalidInput);
}

TEST_CASE("model files round trip exactly") {
  MLPModel m = MLPModel::random(7, 5, 3, 99);
  m.metadata.seed = 99;
  m.metadata.epochs = 12;
  m.metadata.learning_rate = 0.1;
  m.metadata.momentum = 0.7;
  m.metadata.final_mse = 0.123456789012345678;
  m.w1[0] = 0.1 + 0.2;
  m.b2[0] = -1e-300;
  const auto path = testing_support::scratch("model") / "m.json";
  save_model(m, path);
  const MLPModel back = load_model(path);
  CHECK(back == m);
  CHECK(serialize_model(back) == serialize_model(m));
  CHECK(model_from_json(model_to_json(m)) == m);
}

TEST_CASE("malformed model files") {
  Json j = model_to_json(MLPModel::zeros(2, 2, 2));
  j["w1"].erase(0);
  CHECK_THROWS_AS(model_from_json(j), SchemaMismatch);
  CHECK_THROWS_AS(load_model("/nonexistent/model.json"), IoError);
}

}  // TEST_SUITE
