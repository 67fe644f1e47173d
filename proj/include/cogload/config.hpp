#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "cogload/baseline.hpp"
#include "cogload/decode.hpp"
#include "cogload/encoder.hpp"
#include "cogload/grid.hpp"
#include "cogload/hw_eval.hpp"

namespace cogload {

// Flat key -> value configuration ("decoder.zero_hz": 1.0, ...). Every key
// has a typed default; setting an unknown key or a value of the wrong type
// throws ConfigError.
class RunConfig {
 public:
  RunConfig();

  void set(const std::string& key, const nlohmann::json& value);
  // "key=value"; the value is parsed as JSON, falling back to a plain string.
  void set_from_string(const std::string& assignment);
  // Merges a flat JSON object. A results file is accepted too: its "config"
  // member is used.
  void merge(const nlohmann::json& j);
  void merge_file(const std::filesystem::path& path);

  double get_double(const std::string& key) const;
  int get_int(const std::string& key) const;
  std::uint64_t get_seed(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  std::vector<double> get_doubles(const std::string& key) const;
  std::vector<std::uint64_t> get_seeds(const std::string& key) const;

  const nlohmann::json& resolved() const { return values_; }
  static const nlohmann::json& defaults();

 private:
  const nlohmann::json& at(const std::string& key) const;
  nlohmann::json values_;
};

SnnHyper snn_hyper(const RunConfig& cfg);
DecoderThresholds decoder_thresholds(const RunConfig& cfg);
HwEvalConfig hw_eval_config(const RunConfig& cfg);
LogRegOptions logreg_options(const RunConfig& cfg);

}  // namespace cogload
