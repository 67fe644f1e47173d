#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "cogload/data.hpp"
#include "cogload/encoder.hpp"
#include "cogload/matrix.hpp"

namespace cogload {

enum class Arch { kSingle, kHidden };

std::string to_string(Arch arch);
Arch arch_from_string(const std::string& name);  // "single" | "hidden"

inline constexpr std::size_t kNumClasses = 2;

// Decay-form LIF used by the output (and hidden) layers:
//   V <- beta * V + I,  spike when V >= theta_out,  then V <- 0.
struct OutputLifParams {
  double beta = 0.9;
  double theta_out = 1.0;
  double gamma = 0.01;  // mutual inhibition between the two outputs

  void validate() const;
};

struct SingleLayerNet {
  MatrixD w;  // 2 x inputs
  OutputLifParams out;
};

struct HiddenNet {
  MatrixD w_fixed;  // H x inputs, frozen, zero where mask == 0
  MatrixI mask;     // H x inputs, {0,1}
  MatrixD w_out;    // 2 x H, trained
  int hidden_scale = 10;
  double fc1_mean = 0.4;
  double p_conn = 0.5;
  OutputLifParams out;

  std::size_t hidden_size() const { return w_fixed.rows(); }
};

struct TrainConfig {
  double eta = 0.01;
  int epochs = 25;
  int batch_size = 1;
  std::uint64_t seed = 0;
  double tau_encoder = 31.0;
};

struct Prediction {
  std::array<int, kNumClasses> out_counts{};
  std::array<double, kNumClasses> probs{};
  int cls = 0;
};

// Trainable weights ~ N(0, init_std^2).
SingleLayerNet make_single_layer(const OutputLifParams& out, std::uint64_t seed,
                                 std::size_t inputs = kNumFeatures, double init_std = 0.1);

struct HiddenInit {
  MatrixD w_fixed;
  MatrixI mask;
};

// fc1 entries ~ N(fc1_mean, (0.2 fc1_mean)^2) times an independent
// Bernoulli(p_conn) mask, H = hidden_scale * inputs rows. Throws ConfigError
// for fc1_mean <= 0, p_conn outside (0, 1] or hidden_scale < 1.
HiddenInit init_hidden_weights(int hidden_scale, double fc1_mean, double p_conn,
                               std::uint64_t seed, std::size_t inputs = kNumFeatures);

HiddenNet make_hidden(int hidden_scale, double fc1_mean, double p_conn,
                      const OutputLifParams& out, std::uint64_t seed,
                      std::size_t inputs = kNumFeatures, double init_std = 0.1);

// Two-neuron WTA output layer driven by a presynaptic raster. At each step
//   I_i(t) = sum_j w_ij s_j(t) - gamma * s_other(t-1)
// Returns spike counts over all steps.
std::array<int, kNumClasses> simulate_output_layer(const MatrixD& w,
                                                   const OutputLifParams& params,
                                                   const SpikeRaster& presyn);

// Hidden LIF layer (no lateral inhibition); spikes propagate within a step.
SpikeRaster simulate_hidden_layer(const MatrixD& w_fixed, const OutputLifParams& params,
                                  const SpikeRaster& input);

// probs = softmax(counts); class = argmax with ties going to class 0.
Prediction make_prediction(const std::array<int, kNumClasses>& counts);

// Throw DataError when the raster width does not match the input layer.
Prediction forward(const SingleLayerNet& net, const SpikeRaster& raster);
Prediction forward(const HiddenNet& net, const SpikeRaster& raster);

// Spike count / steps per presynaptic unit.
std::vector<double> presynaptic_rates(const SpikeRaster& presyn);

// w_ij += eta * (y_true_i - y_pred_i) * x_j
void delta_update(MatrixD& w, std::span<const double> x, std::span<const double> y_true,
                  std::span<const double> y_pred, double eta);

// Online delta-rule training, batch size 1. Each epoch visits the trials in a
// fresh permutation drawn from cfg.seed. Only the readout (the single layer,
// or fc2 of the hidden model) changes. Throws DataError on empty input or
// mismatched label count, ConfigError if batch_size != 1 or epochs < 0.
void train(SingleLayerNet& net, std::span<const SpikeRaster> rasters,
           std::span<const int> labels, const TrainConfig& cfg);
void train(HiddenNet& net, std::span<const SpikeRaster> rasters,
           std::span<const int> labels, const TrainConfig& cfg);

// ---------------------------------------------------------------------------
// Model file.

struct SnnModel {
  std::variant<SingleLayerNet, HiddenNet> net;
  LifEncoderParams encoder;
  std::uint64_t seed = 0;
  // Train-split statistics used to standardize inputs for this model.
  std::optional<NormalizationParams> normalization;

  Arch arch() const;
  const OutputLifParams& out() const;
  // The trainable readout (w of the single layer, w_out of the hidden model).
  const MatrixD& readout() const;
  MatrixD& readout();
};

Prediction forward(const SnnModel& model, const SpikeRaster& raster);

// Encodes every record of an already normalized dataset with the model's
// encoder and returns argmax predictions.
std::vector<int> predict(const SnnModel& model, const Dataset& normalized);

nlohmann::json model_to_json(const SnnModel& model);
SnnModel model_from_json(const nlohmann::json& j);
void save_model(const std::filesystem::path& path, const SnnModel& model);
SnnModel load_model(const std::filesystem::path& path);

nlohmann::json matrix_to_json(const MatrixD& m);
nlohmann::json matrix_to_json(const MatrixI& m);
MatrixD matrix_d_from_json(const nlohmann::json& j);
MatrixI matrix_i_from_json(const nlohmann::json& j);

}  // namespace cogload
