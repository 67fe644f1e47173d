#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cogload {

// Input gain applied to the z-scored feature before it drives the membrane:
// X = gain * z. The default places the silence boundary (fixed point equal to
// the threshold) one standard deviation below the mean, i.e. gain equals
// v_rest - v_th. A gain of 1 feeds the raw z-score.
inline constexpr double kDefaultEncoderGain = 50.0;

struct LifEncoderParams {
  double tau = 31.0;  // membrane time constant, in simulation steps
  double v_rest = 0.0;
  double v_th = -50.0;
  double v_reset = -65.0;
  int steps = 16;
  double dt = 1.0;
  double gain = kDefaultEncoderGain;

  // Throws ConfigError unless tau > 0, v_reset < v_th < v_rest, steps >= 1,
  // dt > 0 and gain > 0.
  void validate() const;
};

// Binary (unit x step) spike matrix.
class SpikeRaster {
 public:
  SpikeRaster() = default;
  SpikeRaster(std::size_t units, std::size_t steps)
      : units_(units), steps_(steps), bits_(units * steps, 0) {}

  std::size_t units() const { return units_; }
  std::size_t steps() const { return steps_; }

  bool at(std::size_t unit, std::size_t step) const {
    return bits_[unit * steps_ + step] != 0;
  }
  void set(std::size_t unit, std::size_t step, bool spike = true) {
    bits_[unit * steps_ + step] = spike ? 1 : 0;
  }

  int count(std::size_t unit) const;
  int total() const;
  // Number of spiking units at `step`.
  int column_count(std::size_t step) const;

  bool operator==(const SpikeRaster&) const = default;

 private:
  std::size_t units_ = 0;
  std::size_t steps_ = 0;
  std::vector<std::uint8_t> bits_;
};

// Rate-codes each feature with a leaky integrate-and-fire neuron driven by a
// constant input X = gain * x for `steps` forward-Euler steps:
//
//   V(0) = v_reset
//   step t spikes iff V(t) > v_th, after which V(t) = v_reset
//   V(t+1) = V(t) + (dt / tau) * (-(V(t) - v_rest) + X)
//
// so V(t) is the potential after t updates. Throws DataError on non-finite
// input and ConfigError on invalid params.
SpikeRaster encode(std::span<const double> features, const LifEncoderParams& params);

// Seconds between successive encoder steps on the event timeline.
inline constexpr double kEventStepSeconds = 0.01;

struct SpikeEvent {
  int unit = 0;
  double time_s = 0.0;
  bool operator==(const SpikeEvent&) const = default;
};

// Events ordered by time, then unit. Step t maps to (t + 1) * 0.01 s.
using SpikeEventList = std::vector<SpikeEvent>;

SpikeEventList raster_to_events(const SpikeRaster& raster);

// Inverse of raster_to_events. Throws DataError if an event does not fall on
// the (t + 1) * 0.01 s grid or lies outside the raster.
SpikeRaster events_to_raster(const SpikeEventList& events, std::size_t units,
                             std::size_t steps);

// Every step has at least one spike summed over units.
bool is_complete_trial(const SpikeRaster& raster);
// Stricter reading kept for diagnostics: every unit spikes at least once.
bool is_complete_per_unit(const SpikeRaster& raster);

// Trial filter applied before emulation. kPerStep is is_complete_trial,
// kPerUnit is is_complete_per_unit, kNonEmpty keeps any trial with a spike.
enum class CompletenessMode { kPerStep, kPerUnit, kNonEmpty, kNone };

std::string to_string(CompletenessMode mode);
CompletenessMode completeness_from_string(const std::string& name);
bool passes(const SpikeRaster& raster, CompletenessMode mode);

// One line of the spike-event file (JSON Lines). `label` is an optional
// extension used by the emulator evaluation.
struct TrialEvents {
  std::string trial_id;
  std::optional<int> label;
  SpikeEventList events;
};

void write_events_jsonl(const std::filesystem::path& path,
                        std::span<const TrialEvents> trials);
std::vector<TrialEvents> read_events_jsonl(const std::filesystem::path& path);

// Single line (no trailing newline); times are written with 6 decimals.
std::string format_trial_events(const TrialEvents& trial);

}  // namespace cogload
