#pragma once

#include <filesystem>

#include <json.hpp>

#include "cogload/data.hpp"
#include "cogload/eval.hpp"
#include "cogload/matrix.hpp"
#include "cogload/snn.hpp"

namespace cogload {

inline constexpr int kInt3Max = 3;

struct QuantizedWeights {
  MatrixI w_int;       // entries in [-3, 3]
  double scale = 1.0;  // float -> int factor, 3 / max|w|
};

// scale = 3 / max|w|; w_int = clip(round(w * scale), -3, 3) with
// half-away-from-zero rounding and one scale for the whole matrix. Throws
// NumericError for an all-zero or non-finite matrix.
QuantizedWeights quantize_int3(const MatrixD& w);

MatrixD as_real(const MatrixI& w_int);

// Copy of `templ` whose readout is replaced by w_int (as reals). Throws
// DataError if the shapes differ.
SnnModel with_quantized_readout(const SnnModel& templ, const QuantizedWeights& qw);

// Frozen evaluation of the quantized model on a normalized dataset. Throws
// DataError on an empty dataset or shape mismatch.
Metrics evaluate_quantized(const QuantizedWeights& qw, const SnnModel& templ,
                           const Dataset& normalized);

// Optional quantization-aware fine-tune: each trial is run through the
// current int3 weights, the delta rule updates a float shadow (initialized
// from the template's float readout), and the shadow is re-quantized after
// every epoch.
QuantizedWeights finetune_quantized(const SnnModel& templ, const Dataset& normalized_train,
                                    const TrainConfig& cfg);

nlohmann::json quantized_to_json(const QuantizedWeights& qw);
QuantizedWeights quantized_from_json(const nlohmann::json& j);
void save_quantized(const std::filesystem::path& path, const QuantizedWeights& qw,
                    const nlohmann::json& extra = nlohmann::json::object());
QuantizedWeights load_quantized(const std::filesystem::path& path);

}  // namespace cogload
