#include "cogload/decode.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cogload/error.hpp"

namespace cogload {

void DecoderThresholds::validate() const {
  if (!(zero_hz >= 0)) throw ConfigError("decoder.zero_hz must be >= 0");
  if (!(diff_hz >= 0)) throw ConfigError("decoder.diff_hz must be >= 0");
  if (!(offset_hz > 0)) throw ConfigError("decoder.offset_hz must be > 0");
  if (!(offset_step_hz > 0)) throw ConfigError("decoder.offset_step_hz must be > 0");
  if (!(limit_hz > offset_hz)) throw ConfigError("decoder.limit_hz must exceed offset_hz");
}

std::size_t window_count(double trial_duration, double window_s) {
  if (!(window_s > 0) || !(trial_duration > 0)) {
    throw ConfigError("window and trial duration must be > 0");
  }
  // 0.16 / 0.0025 is 64.00000000000001 in binary floating point.
  return static_cast<std::size_t>(std::ceil(trial_duration / window_s - 1e-9));
}

RateWindows bin_rates(const PopSpikes& spikes, double window_s, int n_neurons,
                      double trial_duration) {
  if (n_neurons < 1) throw ConfigError("n_neurons must be >= 1");
  const auto n = window_count(trial_duration, window_s);
  RateWindows out;
  out.window_s = window_s;
  std::array<std::vector<int>, 2> counts{std::vector<int>(n, 0), std::vector<int>(n, 0)};
  for (std::size_t p = 0; p < 2; ++p) {
    for (const auto& s : spikes[p]) {
      if (!(s.t_s >= 0.0 && s.t_s <= trial_duration)) {
        throw DataError("spike at " + std::to_string(s.t_s) + " s outside the trial window");
      }
      auto w = static_cast<std::size_t>(std::floor(s.t_s / window_s + 1e-9));
      w = std::min(w, n - 1);
      ++counts[p][w];
      ++out.total_spikes[p];
    }
  }
  const double denom = window_s * n_neurons;
  for (std::size_t p = 0; p < 2; ++p) {
    out.rates[p].resize(n);
    for (std::size_t w = 0; w < n; ++w) out.rates[p][w] = counts[p][w] / denom;
  }
  return out;
}

namespace {

int count_near_peak(const std::vector<double>& rates, double peak, double offset) {
  const double floor_rate = peak - offset;
  return static_cast<int>(
      std::count_if(rates.begin(), rates.end(), [&](double r) { return r >= floor_rate; }));
}

double max_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
}

}  // namespace

Decision classify_burst_detailed(const RateWindows& rates, const DecoderThresholds& th) {
  const double m0 = max_of(rates.rates[0]);
  const double m1 = max_of(rates.rates[1]);
  const bool a0 = m0 > th.zero_hz;
  const bool a1 = m1 > th.zero_hz;
  Decision d;
  if (a0 && a1) {
    if (std::abs(m0 - m1) >= th.diff_hz) {
      d.branch = DecodeBranch::kMaxDiff;
      d.cls = m1 > m0 ? 1 : 0;
      return d;
    }
    d.branch = DecodeBranch::kBurstCount;
    double offset = th.offset_hz;
    int c0 = count_near_peak(rates.rates[0], m0, offset);
    int c1 = count_near_peak(rates.rates[1], m1, offset);
    while (c0 == c1 && offset < th.limit_hz) {
      offset += th.offset_step_hz;
      c0 = count_near_peak(rates.rates[0], m0, offset);
      c1 = count_near_peak(rates.rates[1], m1, offset);
    }
    d.final_offset_hz = offset;
    d.cls = c1 > c0 ? 1 : 0;
    return d;
  }
  if (a0 != a1) {
    d.branch = DecodeBranch::kSingleActive;
    d.cls = a1 ? 1 : 0;
    return d;
  }
  d.branch = DecodeBranch::kTotalSpikes;
  d.cls = rates.total_spikes[1] > rates.total_spikes[0] ? 1 : 0;
  return d;
}

int classify_burst(const RateWindows& rates, const DecoderThresholds& th) {
  return classify_burst_detailed(rates, th).cls;
}

nlohmann::json to_json(const DecoderThresholds& th) {
  return {{"zero_hz", th.zero_hz},
          {"diff_hz", th.diff_hz},
          {"offset_hz", th.offset_hz},
          {"offset_step_hz", th.offset_step_hz},
          {"limit_hz", th.limit_hz}};
}

}  // namespace cogload
