#include "cogload/snn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include "cogload/error.hpp"
#include "cogload/rng.hpp"

namespace cogload {

std::string to_string(Arch arch) { return arch == Arch::kSingle ? "single" : "hidden"; }

Arch arch_from_string(const std::string& name) {
  if (name == "single") return Arch::kSingle;
  if (name == "hidden") return Arch::kHidden;
  throw ConfigError("unknown architecture '" + name + "' (expected single|hidden)");
}

void OutputLifParams::validate() const {
  if (!(beta > 0 && beta < 1)) throw ConfigError("snn: beta must lie in (0, 1)");
  if (!(theta_out > 0)) throw ConfigError("snn: theta_out must be > 0");
  if (!(gamma >= 0 && gamma <= 1)) throw ConfigError("snn: gamma must lie in [0, 1]");
}

namespace {

MatrixD normal_matrix(std::size_t rows, std::size_t cols, double mean, double sd,
                      std::mt19937_64& rng) {
  MatrixD m(rows, cols);
  std::normal_distribution<double> normal(mean, sd);
  for (auto& v : m.values()) v = normal(rng);
  return m;
}

void check_width(const MatrixD& w, const SpikeRaster& raster, const char* layer) {
  if (raster.units() != w.cols()) {
    throw DataError(std::string(layer) + ": raster has " + std::to_string(raster.units()) +
                    " units, layer expects " + std::to_string(w.cols()));
  }
}

std::array<double, kNumClasses> one_hot(int label) {
  std::array<double, kNumClasses> y{};
  y.at(static_cast<std::size_t>(label)) = 1.0;
  return y;
}

void check_training_inputs(std::span<const SpikeRaster> rasters, std::span<const int> labels,
                           const TrainConfig& cfg) {
  if (rasters.empty()) throw DataError("train: empty dataset");
  if (rasters.size() != labels.size()) throw DataError("train: raster/label count mismatch");
  if (cfg.batch_size != 1) throw ConfigError("train: only batch_size = 1 is supported");
  if (cfg.epochs < 0) throw ConfigError("train: epochs must be >= 0");
  if (!(cfg.eta > 0)) throw ConfigError("train: eta must be > 0");
  for (int y : labels) {
    if (y != 0 && y != 1) throw DataError("train: label outside {0,1}");
  }
}

// Shared online loop over precomputed presynaptic rasters.
void train_readout(MatrixD& w, const OutputLifParams& out,
                   std::span<const SpikeRaster> presyn, std::span<const int> labels,
                   const TrainConfig& cfg) {
  std::vector<std::vector<double>> rates;
  rates.reserve(presyn.size());
  for (const auto& r : presyn) rates.push_back(presynaptic_rates(r));

  auto rng = make_rng(cfg.seed, RngStream::kShuffle);
  std::vector<std::size_t> order(presyn.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (auto i : order) {
      const auto pred = make_prediction(simulate_output_layer(w, out, presyn[i]));
      const auto target = one_hot(labels[i]);
      delta_update(w, rates[i], target, pred.probs, cfg.eta);
    }
  }
}

}  // namespace

SingleLayerNet make_single_layer(const OutputLifParams& out, std::uint64_t seed,
                                 std::size_t inputs, double init_std) {
  out.validate();
  auto rng = make_rng(seed, RngStream::kWeightInit);
  return {normal_matrix(kNumClasses, inputs, 0.0, init_std, rng), out};
}

HiddenInit init_hidden_weights(int hidden_scale, double fc1_mean, double p_conn,
                               std::uint64_t seed, std::size_t inputs) {
  if (hidden_scale < 1) throw ConfigError("snn: hidden_scale must be >= 1");
  if (!(fc1_mean > 0)) throw ConfigError("snn: fc1_mean must be > 0");
  if (!(p_conn > 0 && p_conn <= 1)) throw ConfigError("snn: p_conn must lie in (0, 1]");
  const auto rows = static_cast<std::size_t>(hidden_scale) * inputs;
  auto rng = make_rng(seed, RngStream::kHiddenInit);
  HiddenInit init{normal_matrix(rows, inputs, fc1_mean, 0.2 * fc1_mean, rng),
                  MatrixI(rows, inputs, 0)};
  std::bernoulli_distribution keep(p_conn);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < inputs; ++c) {
      if (keep(rng)) {
        init.mask(r, c) = 1;
      } else {
        init.w_fixed(r, c) = 0.0;
      }
    }
  }
  return init;
}

HiddenNet make_hidden(int hidden_scale, double fc1_mean, double p_conn,
                      const OutputLifParams& out, std::uint64_t seed, std::size_t inputs,
                      double init_std) {
  out.validate();
  auto init = init_hidden_weights(hidden_scale, fc1_mean, p_conn, seed, inputs);
  auto rng = make_rng(seed, RngStream::kWeightInit);
  HiddenNet net;
  net.w_out = normal_matrix(kNumClasses, init.w_fixed.rows(), 0.0, init_std, rng);
  net.w_fixed = std::move(init.w_fixed);
  net.mask = std::move(init.mask);
  net.hidden_scale = hidden_scale;
  net.fc1_mean = fc1_mean;
  net.p_conn = p_conn;
  net.out = out;
  return net;
}

std::array<int, kNumClasses> simulate_output_layer(const MatrixD& w,
                                                   const OutputLifParams& params,
                                                   const SpikeRaster& presyn) {
  check_width(w, presyn, "output layer");
  std::array<double, kNumClasses> v{};
  std::array<int, kNumClasses> prev{};
  std::array<int, kNumClasses> counts{};
  for (std::size_t t = 0; t < presyn.steps(); ++t) {
    std::array<int, kNumClasses> now{};
    for (std::size_t i = 0; i < kNumClasses; ++i) {
      double current = -params.gamma * prev[1 - i];
      for (std::size_t j = 0; j < presyn.units(); ++j) {
        if (presyn.at(j, t)) current += w(i, j);
      }
      v[i] = params.beta * v[i] + current;
      if (v[i] >= params.theta_out) {
        now[i] = 1;
        ++counts[i];
        v[i] = 0.0;
      }
    }
    prev = now;
  }
  return counts;
}

SpikeRaster simulate_hidden_layer(const MatrixD& w_fixed, const OutputLifParams& params,
                                  const SpikeRaster& input) {
  check_width(w_fixed, input, "hidden layer");
  const std::size_t hidden = w_fixed.rows();
  SpikeRaster out(hidden, input.steps());
  std::vector<double> v(hidden, 0.0);
  for (std::size_t t = 0; t < input.steps(); ++t) {
    for (std::size_t h = 0; h < hidden; ++h) {
      double current = 0.0;
      for (std::size_t j = 0; j < input.units(); ++j) {
        if (input.at(j, t)) current += w_fixed(h, j);
      }
      v[h] = params.beta * v[h] + current;
      if (v[h] >= params.theta_out) {
        out.set(h, t);
        v[h] = 0.0;
      }
    }
  }
  return out;
}

Prediction make_prediction(const std::array<int, kNumClasses>& counts) {
  Prediction p;
  p.out_counts = counts;
  const int top = std::max(counts[0], counts[1]);
  const double e0 = std::exp(static_cast<double>(counts[0] - top));
  const double e1 = std::exp(static_cast<double>(counts[1] - top));
  p.probs = {e0 / (e0 + e1), e1 / (e0 + e1)};
  p.cls = counts[1] > counts[0] ? 1 : 0;
  return p;
}

Prediction forward(const SingleLayerNet& net, const SpikeRaster& raster) {
  return make_prediction(simulate_output_layer(net.w, net.out, raster));
}

Prediction forward(const HiddenNet& net, const SpikeRaster& raster) {
  const auto hidden = simulate_hidden_layer(net.w_fixed, net.out, raster);
  return make_prediction(simulate_output_layer(net.w_out, net.out, hidden));
}

std::vector<double> presynaptic_rates(const SpikeRaster& presyn) {
  std::vector<double> x(presyn.units(), 0.0);
  if (presyn.steps() == 0) return x;
  for (std::size_t j = 0; j < presyn.units(); ++j) {
    x[j] = static_cast<double>(presyn.count(j)) / static_cast<double>(presyn.steps());
  }
  return x;
}

void delta_update(MatrixD& w, std::span<const double> x, std::span<const double> y_true,
                  std::span<const double> y_pred, double eta) {
  if (x.size() != w.cols() || y_true.size() != w.rows() || y_pred.size() != w.rows()) {
    throw DataError("delta_update: dimension mismatch");
  }
  for (std::size_t i = 0; i < w.rows(); ++i) {
    const double err = eta * (y_true[i] - y_pred[i]);
    if (err == 0.0) continue;
    for (std::size_t j = 0; j < w.cols(); ++j) w(i, j) += err * x[j];
  }
}

void train(SingleLayerNet& net, std::span<const SpikeRaster> rasters,
           std::span<const int> labels, const TrainConfig& cfg) {
  check_training_inputs(rasters, labels, cfg);
  net.out.validate();
  for (const auto& r : rasters) check_width(net.w, r, "single layer");
  train_readout(net.w, net.out, rasters, labels, cfg);
}

void train(HiddenNet& net, std::span<const SpikeRaster> rasters, std::span<const int> labels,
           const TrainConfig& cfg) {
  check_training_inputs(rasters, labels, cfg);
  net.out.validate();
  // fc1 is frozen, so hidden activity per trial is fixed for the whole run.
  std::vector<SpikeRaster> hidden;
  hidden.reserve(rasters.size());
  for (const auto& r : rasters) hidden.push_back(simulate_hidden_layer(net.w_fixed, net.out, r));
  train_readout(net.w_out, net.out, hidden, labels, cfg);
}

// ---------------------------------------------------------------------------

Arch SnnModel::arch() const {
  return std::holds_alternative<SingleLayerNet>(net) ? Arch::kSingle : Arch::kHidden;
}

const OutputLifParams& SnnModel::out() const {
  return std::visit([](const auto& n) -> const OutputLifParams& { return n.out; }, net);
}

const MatrixD& SnnModel::readout() const {
  if (const auto* single = std::get_if<SingleLayerNet>(&net)) return single->w;
  return std::get<HiddenNet>(net).w_out;
}

MatrixD& SnnModel::readout() {
  if (auto* single = std::get_if<SingleLayerNet>(&net)) return single->w;
  return std::get<HiddenNet>(net).w_out;
}

Prediction forward(const SnnModel& model, const SpikeRaster& raster) {
  return std::visit([&](const auto& n) { return forward(n, raster); }, model.net);
}

std::vector<int> predict(const SnnModel& model, const Dataset& normalized) {
  std::vector<int> out;
  out.reserve(normalized.size());
  for (const auto& rec : normalized.records) {
    out.push_back(forward(model, encode(rec.features, model.encoder)).cls);
  }
  return out;
}

nlohmann::json matrix_to_json(const MatrixD& m) {
  auto j = nlohmann::json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    j.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return j;
}

nlohmann::json matrix_to_json(const MatrixI& m) {
  auto j = nlohmann::json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    j.push_back(std::vector<int>(row.begin(), row.end()));
  }
  return j;
}

namespace {

template <typename T>
Matrix<T> matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) throw DataError("matrix must be a non-empty array of rows");
  const auto rows = j.size();
  const auto cols = j.front().size();
  Matrix<T> m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto row = j[r].get<std::vector<T>>();
    if (row.size() != cols) throw DataError("matrix rows differ in length");
    std::copy(row.begin(), row.end(), m.row(r).begin());
  }
  return m;
}

}  // namespace

MatrixD matrix_d_from_json(const nlohmann::json& j) { return matrix_from_json<double>(j); }
MatrixI matrix_i_from_json(const nlohmann::json& j) { return matrix_from_json<int>(j); }

nlohmann::json model_to_json(const SnnModel& model) {
  nlohmann::json j;
  j["arch"] = to_string(model.arch());
  const auto& out = model.out();
  if (const auto* single = std::get_if<SingleLayerNet>(&model.net)) {
    j["w"] = matrix_to_json(single->w);
  } else {
    const auto& hidden = std::get<HiddenNet>(model.net);
    j["w"] = matrix_to_json(hidden.w_out);
    j["w_fixed"] = matrix_to_json(hidden.w_fixed);
    j["mask"] = matrix_to_json(hidden.mask);
    j["hidden_scale"] = hidden.hidden_scale;
    j["fc1_mean"] = hidden.fc1_mean;
    j["p_conn"] = hidden.p_conn;
  }
  j["beta"] = out.beta;
  j["gamma"] = out.gamma;
  j["theta_out"] = out.theta_out;
  j["tau_encoder"] = model.encoder.tau;
  j["encoder_gain"] = model.encoder.gain;
  j["seed"] = model.seed;
  if (model.normalization) {
    j["normalization"] = {{"mean", model.normalization->mean},
                          {"std", model.normalization->std}};
  }
  return j;
}

SnnModel model_from_json(const nlohmann::json& j) {
  try {
    SnnModel model;
    OutputLifParams out;
    out.beta = j.at("beta").get<double>();
    out.gamma = j.at("gamma").get<double>();
    out.theta_out = j.at("theta_out").get<double>();
    out.validate();
    model.encoder.tau = j.at("tau_encoder").get<double>();
    model.encoder.gain = j.value("encoder_gain", kDefaultEncoderGain);
    model.encoder.validate();
    model.seed = j.at("seed").get<std::uint64_t>();
    auto w = matrix_d_from_json(j.at("w"));
    if (w.rows() != kNumClasses) throw DataError("model: w must have 2 rows");

    if (arch_from_string(j.at("arch").get<std::string>()) == Arch::kSingle) {
      if (w.cols() != kNumFeatures) throw DataError("model: single-layer w must be 2x5");
      model.net = SingleLayerNet{std::move(w), out};
    } else {
      HiddenNet hidden;
      hidden.w_fixed = matrix_d_from_json(j.at("w_fixed"));
      hidden.mask = matrix_i_from_json(j.at("mask"));
      hidden.w_out = std::move(w);
      hidden.hidden_scale = j.at("hidden_scale").get<int>();
      hidden.fc1_mean = j.at("fc1_mean").get<double>();
      hidden.p_conn = j.at("p_conn").get<double>();
      hidden.out = out;
      if (hidden.mask.rows() != hidden.w_fixed.rows() ||
          hidden.mask.cols() != hidden.w_fixed.cols() ||
          hidden.w_out.cols() != hidden.w_fixed.rows() ||
          hidden.w_fixed.cols() != kNumFeatures) {
        throw DataError("model: hidden layer shapes disagree");
      }
      for (std::size_t r = 0; r < hidden.mask.rows(); ++r) {
        for (std::size_t c = 0; c < hidden.mask.cols(); ++c) {
          const int bit = hidden.mask(r, c);
          if ((bit != 0 && bit != 1) || (bit == 0 && hidden.w_fixed(r, c) != 0.0)) {
            throw DataError("model: mask must be binary and zero out w_fixed");
          }
        }
      }
      model.net = std::move(hidden);
    }
    if (j.contains("normalization")) {
      NormalizationParams p;
      p.mean = j["normalization"].at("mean").get<FeatureVector>();
      p.std = j["normalization"].at("std").get<FeatureVector>();
      model.normalization = p;
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("model file: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const SnnModel& model) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << model_to_json(model).dump(2) << '\n';
}

SnnModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return model_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace cogload
