#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "cogload/decode.hpp"
#include "cogload/encoder.hpp"
#include "cogload/eval.hpp"
#include "cogload/hwemu.hpp"
#include "cogload/quant.hpp"

namespace cogload {

struct HwEvalConfig {
  int n_trials = 5;
  MismatchConfig mismatch;  // repeat r uses seed mismatch.seed + r
  EmuModelParams model;
  EmuRunParams run;
  DecoderThresholds thresholds;
  double window_s = kDefaultWindowSeconds;
  int jobs = 1;
};

struct HwEvalResult {
  std::vector<Metrics> per_trial;
  Aggregate summary;
  std::vector<std::vector<int>> predictions;  // [repeat][trial]
  std::vector<std::vector<TrialOutput>> outputs;  // filled when requested
  double base_efficacy = 0.0;
};

// Emulate + decode every labelled trial n_trials times with freshly sampled
// mismatch. Throws DataError if a trial has no label or `trials` is empty.
HwEvalResult hw_eval(const QuantizedWeights& qw, const std::vector<TrialEvents>& trials,
                     const HwEvalConfig& cfg, bool keep_outputs = false);

// Decoded class of one emulator output.
int decode_output(const TrialOutput& out, const HwEvalConfig& cfg);

nlohmann::json to_json(const HwEvalResult& result);

}  // namespace cogload
