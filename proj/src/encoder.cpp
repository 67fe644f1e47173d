#include "cogload/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "cogload/error.hpp"

namespace cogload {

void LifEncoderParams::validate() const {
  if (!(tau > 0)) throw ConfigError("encoder: tau must be > 0");
  if (!(v_reset < v_th && v_th < v_rest)) {
    throw ConfigError("encoder: need v_reset < v_th < v_rest");
  }
  if (steps < 1) throw ConfigError("encoder: steps must be >= 1");
  if (!(dt > 0)) throw ConfigError("encoder: dt must be > 0");
  if (!(gain > 0) || !std::isfinite(gain)) throw ConfigError("encoder: gain must be > 0");
}

int SpikeRaster::count(std::size_t unit) const {
  int n = 0;
  for (std::size_t t = 0; t < steps_; ++t) n += at(unit, t) ? 1 : 0;
  return n;
}

int SpikeRaster::total() const {
  return static_cast<int>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

int SpikeRaster::column_count(std::size_t step) const {
  int n = 0;
  for (std::size_t u = 0; u < units_; ++u) n += at(u, step) ? 1 : 0;
  return n;
}

SpikeRaster encode(std::span<const double> features, const LifEncoderParams& params) {
  params.validate();
  const auto steps = static_cast<std::size_t>(params.steps);
  SpikeRaster raster(features.size(), steps);
  const double k = params.dt / params.tau;
  for (std::size_t j = 0; j < features.size(); ++j) {
    if (!std::isfinite(features[j])) throw DataError("encode: non-finite feature");
    const double drive = params.gain * features[j];
    double v = params.v_reset;
    for (std::size_t t = 0; t < steps; ++t) {
      if (v > params.v_th) {
        raster.set(j, t);
        v = params.v_reset;
      }
      v += k * (-(v - params.v_rest) + drive);
    }
  }
  return raster;
}

SpikeEventList raster_to_events(const SpikeRaster& raster) {
  SpikeEventList events;
  for (std::size_t t = 0; t < raster.steps(); ++t) {
    for (std::size_t u = 0; u < raster.units(); ++u) {
      if (raster.at(u, t)) {
        events.push_back({static_cast<int>(u),
                          static_cast<double>(t + 1) * kEventStepSeconds});
      }
    }
  }
  return events;
}

SpikeRaster events_to_raster(const SpikeEventList& events, std::size_t units,
                             std::size_t steps) {
  SpikeRaster raster(units, steps);
  for (const auto& e : events) {
    const double slot = e.time_s / kEventStepSeconds;
    const double rounded = std::round(slot);
    if (std::abs(slot - rounded) > 1e-6 || rounded < 1 ||
        rounded > static_cast<double>(steps)) {
      throw DataError("event time " + std::to_string(e.time_s) + " is not on the step grid");
    }
    if (e.unit < 0 || static_cast<std::size_t>(e.unit) >= units) {
      throw DataError("event unit " + std::to_string(e.unit) + " out of range");
    }
    raster.set(static_cast<std::size_t>(e.unit), static_cast<std::size_t>(rounded) - 1);
  }
  return raster;
}

bool is_complete_trial(const SpikeRaster& raster) {
  if (raster.steps() == 0) return false;
  for (std::size_t t = 0; t < raster.steps(); ++t) {
    if (raster.column_count(t) == 0) return false;
  }
  return true;
}

bool is_complete_per_unit(const SpikeRaster& raster) {
  if (raster.units() == 0) return false;
  for (std::size_t u = 0; u < raster.units(); ++u) {
    if (raster.count(u) == 0) return false;
  }
  return true;
}

std::string to_string(CompletenessMode mode) {
  switch (mode) {
    case CompletenessMode::kPerStep: return "per_step";
    case CompletenessMode::kPerUnit: return "per_unit";
    case CompletenessMode::kNonEmpty: return "nonempty";
    case CompletenessMode::kNone: return "none";
  }
  return "?";
}

CompletenessMode completeness_from_string(const std::string& name) {
  if (name == "per_step") return CompletenessMode::kPerStep;
  if (name == "per_unit") return CompletenessMode::kPerUnit;
  if (name == "nonempty") return CompletenessMode::kNonEmpty;
  if (name == "none") return CompletenessMode::kNone;
  throw ConfigError("unknown completeness mode '" + name + "'");
}

bool passes(const SpikeRaster& raster, CompletenessMode mode) {
  switch (mode) {
    case CompletenessMode::kPerStep: return is_complete_trial(raster);
    case CompletenessMode::kPerUnit: return is_complete_per_unit(raster);
    case CompletenessMode::kNonEmpty: return raster.total() > 0;
    case CompletenessMode::kNone: return true;
  }
  return false;
}

std::string format_trial_events(const TrialEvents& trial) {
  std::string line = "{\"trial_id\": " + nlohmann::json(trial.trial_id).dump();
  if (trial.label) line += ", \"label\": " + std::to_string(*trial.label);
  line += ", \"units\": [";
  for (std::size_t i = 0; i < trial.events.size(); ++i) {
    if (i) line += ", ";
    line += std::to_string(trial.events[i].unit);
  }
  line += "], \"times_s\": [";
  char buf[32];
  for (std::size_t i = 0; i < trial.events.size(); ++i) {
    if (i) line += ", ";
    std::snprintf(buf, sizeof(buf), "%.6f", trial.events[i].time_s);
    line += buf;
  }
  line += "]}";
  return line;
}

void write_events_jsonl(const std::filesystem::path& path,
                        std::span<const TrialEvents> trials) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& trial : trials) out << format_trial_events(trial) << '\n';
}

std::vector<TrialEvents> read_events_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<TrialEvents> trials;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      TrialEvents trial;
      trial.trial_id = j.at("trial_id").get<std::string>();
      if (j.contains("label")) trial.label = j.at("label").get<int>();
      const auto units = j.at("units").get<std::vector<int>>();
      const auto times = j.at("times_s").get<std::vector<double>>();
      if (units.size() != times.size()) {
        throw DataError("units and times_s differ in length");
      }
      for (std::size_t i = 0; i < units.size(); ++i) {
        trial.events.push_back({units[i], times[i]});
      }
      trials.push_back(std::move(trial));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const DataError& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return trials;
}

}  // namespace cogload
