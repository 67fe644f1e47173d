#include "cogload/quant.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "cogload/error.hpp"
#include "cogload/rng.hpp"

namespace cogload {

QuantizedWeights quantize_int3(const MatrixD& w) {
  double max_abs = 0.0;
  for (double v : w.values()) {
    if (!std::isfinite(v)) throw NumericError("quantize: non-finite weight");
    max_abs = std::max(max_abs, std::abs(v));
  }
  if (max_abs == 0.0) throw NumericError("quantize: all-zero matrix has no scale");

  QuantizedWeights qw;
  qw.scale = kInt3Max / max_abs;
  qw.w_int = MatrixI(w.rows(), w.cols());
  for (std::size_t r = 0; r < w.rows(); ++r) {
    for (std::size_t c = 0; c < w.cols(); ++c) {
      // std::round rounds halfway cases away from zero.
      const double q = std::round(w(r, c) * qw.scale);
      qw.w_int(r, c) = static_cast<int>(std::clamp(q, -3.0, 3.0));
    }
  }
  return qw;
}

MatrixD as_real(const MatrixI& w_int) {
  MatrixD out(w_int.rows(), w_int.cols());
  for (std::size_t i = 0; i < w_int.size(); ++i) {
    out.values()[i] = static_cast<double>(w_int.values()[i]);
  }
  return out;
}

SnnModel with_quantized_readout(const SnnModel& templ, const QuantizedWeights& qw) {
  const auto& readout = templ.readout();
  if (readout.rows() != qw.w_int.rows() || readout.cols() != qw.w_int.cols()) {
    throw DataError("quantized weights are " + std::to_string(qw.w_int.rows()) + "x" +
                    std::to_string(qw.w_int.cols()) + ", template readout is " +
                    std::to_string(readout.rows()) + "x" + std::to_string(readout.cols()));
  }
  SnnModel model = templ;
  model.readout() = as_real(qw.w_int);
  return model;
}

Metrics evaluate_quantized(const QuantizedWeights& qw, const SnnModel& templ,
                           const Dataset& normalized) {
  if (normalized.empty()) throw DataError("evaluate_quantized: empty dataset");
  const auto model = with_quantized_readout(templ, qw);
  return compute_metrics(normalized.labels(), predict(model, normalized));
}

QuantizedWeights finetune_quantized(const SnnModel& templ, const Dataset& normalized_train,
                                    const TrainConfig& cfg) {
  if (normalized_train.empty()) throw DataError("finetune: empty dataset");
  if (cfg.epochs < 0) throw ConfigError("finetune: epochs must be >= 0");
  const auto& out = templ.out();
  const auto* hidden = std::get_if<HiddenNet>(&templ.net);

  // Presynaptic activity of the readout; fc1 is frozen so it is fixed.
  std::vector<SpikeRaster> presyn;
  presyn.reserve(normalized_train.size());
  for (const auto& rec : normalized_train.records) {
    auto raster = encode(rec.features, templ.encoder);
    presyn.push_back(hidden ? simulate_hidden_layer(hidden->w_fixed, out, raster)
                            : std::move(raster));
  }
  const auto labels = normalized_train.labels();

  MatrixD shadow = templ.readout();
  auto qw = quantize_int3(shadow);
  auto rng = make_rng(cfg.seed, RngStream::kShuffle);
  std::vector<std::size_t> order(presyn.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const MatrixD frozen = as_real(qw.w_int);
    std::shuffle(order.begin(), order.end(), rng);
    for (auto i : order) {
      const auto pred = make_prediction(simulate_output_layer(frozen, out, presyn[i]));
      std::array<double, kNumClasses> target{};
      target[static_cast<std::size_t>(labels[i])] = 1.0;
      delta_update(shadow, presynaptic_rates(presyn[i]), target, pred.probs, cfg.eta);
    }
    qw = quantize_int3(shadow);
  }
  return qw;
}

nlohmann::json quantized_to_json(const QuantizedWeights& qw) {
  return {{"w_int", matrix_to_json(qw.w_int)}, {"scale", qw.scale}};
}

QuantizedWeights quantized_from_json(const nlohmann::json& j) {
  try {
    QuantizedWeights qw;
    qw.w_int = matrix_i_from_json(j.at("w_int"));
    qw.scale = j.at("scale").get<double>();
    for (int v : qw.w_int.values()) {
      if (v < -kInt3Max || v > kInt3Max) throw DataError("w_int entry outside [-3, 3]");
    }
    if (!(qw.scale > 0)) throw DataError("scale must be > 0");
    return qw;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("quantized model: ") + e.what());
  }
}

void save_quantized(const std::filesystem::path& path, const QuantizedWeights& qw,
                    const nlohmann::json& extra) {
  auto j = quantized_to_json(qw);
  for (const auto& [key, value] : extra.items()) j[key] = value;
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

QuantizedWeights load_quantized(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return quantized_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace cogload
