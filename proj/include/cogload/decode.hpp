#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include <json.hpp>

namespace cogload {

inline constexpr double kDefaultWindowSeconds = 0.0025;

// One output spike, time relative to stimulus onset.
struct PopSpike {
  int neuron = 0;
  double t_s = 0.0;
  bool operator==(const PopSpike&) const = default;
};

using PopSpikes = std::array<std::vector<PopSpike>, 2>;

// Population firing rate per window, in Hz per neuron.
struct RateWindows {
  double window_s = kDefaultWindowSeconds;
  std::array<std::vector<double>, 2> rates;
  std::array<int, 2> total_spikes{};

  std::size_t n_windows() const { return rates[0].size(); }
};

struct DecoderThresholds {
  double zero_hz = 1.0;
  double diff_hz = 20.0;
  double offset_hz = 10.0;
  double offset_step_hz = 10.0;
  double limit_hz = 100.0;

  // Throws ConfigError unless zero, diff >= 0, offset and step > 0 and
  // offset < limit.
  void validate() const;
};

// rate = count / (window_s * n_neurons). Windows are half-open [start, end)
// except the last, which is closed, so a spike at exactly trial_duration
// lands in the final window. n_windows = ceil(trial_duration / window_s).
// Throws DataError for a spike outside [0, trial_duration].
RateWindows bin_rates(const PopSpikes& spikes, double window_s, int n_neurons,
                      double trial_duration);

std::size_t window_count(double trial_duration, double window_s);

enum class DecodeBranch { kMaxDiff, kBurstCount, kSingleActive, kTotalSpikes };

struct Decision {
  int cls = 0;
  DecodeBranch branch = DecodeBranch::kTotalSpikes;
  double final_offset_hz = 0.0;
};

// Burst-based classification:
//   both max rates > zero, |max0 - max1| >= diff -> higher max
//   both max rates > zero, otherwise -> more windows with rate >= max - offset,
//     widening offset by offset_step while the counts tie and offset < limit
//   one max rate > zero -> that population
//   neither -> more total spikes
// Residual ties go to class 0.
Decision classify_burst_detailed(const RateWindows& rates, const DecoderThresholds& th);
int classify_burst(const RateWindows& rates, const DecoderThresholds& th);

nlohmann::json to_json(const DecoderThresholds& th);

}  // namespace cogload
