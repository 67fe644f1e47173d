#include "cogload/config.hpp"

#include <fstream>

#include "cogload/error.hpp"

namespace cogload {

const nlohmann::json& RunConfig::defaults() {
  static const nlohmann::json d = {
      {"seed", 31},
      {"data.n", 200},
      {"data.separation", 3.0},
      {"data.seed", 0},
      {"encoder.tau", 31.0},
      {"encoder.gain", kDefaultEncoderGain},
      {"snn.arch", "single"},
      {"snn.eta", 0.01},
      {"snn.epochs", 25},
      {"snn.beta", 0.9},
      {"snn.gamma", 0.01},
      {"snn.theta_out", 1.0},
      {"snn.init_std", 0.1},
      {"snn.hidden_scale", 10},
      {"snn.fc1_mean", 0.4},
      {"snn.p_conn", 0.5},
      {"eval.k", 5},
      {"grid.space", "reference"},
      {"grid.seeds", nlohmann::json::array()},
      {"quant.finetune", false},
      {"quant.finetune_epochs", 5},
      {"quant.finetune_eta", 0.01},
      {"hwemu.pop_size", 20},
      {"hwemu.tau_mem", 0.020},
      {"hwemu.tau_ampa", 0.005},
      {"hwemu.tau_gaba_a", 0.005},
      {"hwemu.tau_gaba_b", 0.100},
      {"hwemu.refractory", 0.001},
      {"hwemu.base_efficacy", 0.0},
      {"hwemu.gaba_b_ratio", 1.0},
      {"hwemu.cross_inhibition", true},
      {"hwemu.trial_duration", 0.16},
      {"hwemu.pre_buffer", 0.5},
      {"hwemu.post_buffer", 0.5},
      {"hwemu.sim_dt", 1e-4},
      {"hwemu.mismatch_cv", 0.2},
      {"hwemu.mismatch_cv_tau", 0.2},
      {"hwemu.mismatch_seed", 0},
      {"hwemu.trials", 5},
      {"hwemu.completeness", "nonempty"},
      {"decoder.zero_hz", 1.0},
      {"decoder.diff_hz", 20.0},
      {"decoder.offset_hz", 10.0},
      {"decoder.offset_step_hz", 10.0},
      {"decoder.limit_hz", 100.0},
      {"decoder.window_s", kDefaultWindowSeconds},
      {"baseline.c_grid", kDefaultCGrid},
      {"baseline.max_iter", 5000},
      {"baseline.tol", 1e-8},
  };
  return d;
}

RunConfig::RunConfig() : values_(defaults()) {}

namespace {

bool same_kind(const nlohmann::json& def, const nlohmann::json& v) {
  if (def.is_boolean()) return v.is_boolean();
  if (def.is_number_integer()) return v.is_number_integer();
  if (def.is_number()) return v.is_number();
  if (def.is_string()) return v.is_string();
  if (def.is_array()) {
    if (!v.is_array()) return false;
    for (const auto& e : v) {
      if (!e.is_number()) return false;
    }
    return true;
  }
  return false;
}

}  // namespace

void RunConfig::set(const std::string& key, const nlohmann::json& value) {
  const auto& d = defaults();
  const auto it = d.find(key);
  if (it == d.end()) throw ConfigError("unknown config key '" + key + "'");
  if (!same_kind(*it, value)) {
    throw ConfigError("config key '" + key + "' expects a value like " + it->dump() +
                      ", got " + value.dump());
  }
  // Keep doubles as doubles so the emitted config is type-stable.
  if (it->is_number_float() && value.is_number_integer()) {
    values_[key] = value.get<double>();
  } else {
    values_[key] = value;
  }
}

void RunConfig::set_from_string(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("expected key=value, got '" + assignment + "'");
  }
  const auto key = assignment.substr(0, eq);
  const auto text = assignment.substr(eq + 1);
  auto value = nlohmann::json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  set(key, value);
}

void RunConfig::merge(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  const auto& src = j.contains("config") && j["config"].is_object() ? j["config"] : j;
  for (const auto& [key, value] : src.items()) set(key, value);
}

void RunConfig::merge_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  const auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError("config " + path.string() + " is not valid JSON");
  merge(j);
}

const nlohmann::json& RunConfig::at(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
  return *it;
}

double RunConfig::get_double(const std::string& key) const { return at(key).get<double>(); }
int RunConfig::get_int(const std::string& key) const { return at(key).get<int>(); }
bool RunConfig::get_bool(const std::string& key) const { return at(key).get<bool>(); }
std::string RunConfig::get_string(const std::string& key) const {
  return at(key).get<std::string>();
}

std::uint64_t RunConfig::get_seed(const std::string& key) const {
  const auto v = at(key).get<std::int64_t>();
  if (v < 0) throw ConfigError("config key '" + key + "' must be a non-negative seed");
  return static_cast<std::uint64_t>(v);
}

std::vector<double> RunConfig::get_doubles(const std::string& key) const {
  return at(key).get<std::vector<double>>();
}

std::vector<std::uint64_t> RunConfig::get_seeds(const std::string& key) const {
  std::vector<std::uint64_t> out;
  for (const auto& v : at(key)) {
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
      throw ConfigError("config key '" + key + "' must list non-negative integers");
    }
    out.push_back(v.get<std::uint64_t>());
  }
  return out;
}

SnnHyper snn_hyper(const RunConfig& cfg) {
  SnnHyper h;
  h.arch = arch_from_string(cfg.get_string("snn.arch"));
  h.tau = cfg.get_double("encoder.tau");
  h.encoder_gain = cfg.get_double("encoder.gain");
  h.eta = cfg.get_double("snn.eta");
  h.epochs = cfg.get_int("snn.epochs");
  h.beta = cfg.get_double("snn.beta");
  h.gamma = cfg.get_double("snn.gamma");
  h.theta_out = cfg.get_double("snn.theta_out");
  h.init_std = cfg.get_double("snn.init_std");
  h.hidden_scale = cfg.get_int("snn.hidden_scale");
  h.fc1_mean = cfg.get_double("snn.fc1_mean");
  h.p_conn = cfg.get_double("snn.p_conn");
  return h;
}

DecoderThresholds decoder_thresholds(const RunConfig& cfg) {
  DecoderThresholds th;
  th.zero_hz = cfg.get_double("decoder.zero_hz");
  th.diff_hz = cfg.get_double("decoder.diff_hz");
  th.offset_hz = cfg.get_double("decoder.offset_hz");
  th.offset_step_hz = cfg.get_double("decoder.offset_step_hz");
  th.limit_hz = cfg.get_double("decoder.limit_hz");
  th.validate();
  return th;
}

HwEvalConfig hw_eval_config(const RunConfig& cfg) {
  HwEvalConfig hw;
  hw.n_trials = cfg.get_int("hwemu.trials");
  hw.mismatch.cv_weight = cfg.get_double("hwemu.mismatch_cv");
  hw.mismatch.cv_tau = cfg.get_double("hwemu.mismatch_cv_tau");
  hw.mismatch.seed = cfg.get_seed("hwemu.mismatch_seed");
  hw.mismatch.validate();
  hw.model.pop_size = cfg.get_int("hwemu.pop_size");
  hw.model.tau_mem = cfg.get_double("hwemu.tau_mem");
  hw.model.tau_ampa = cfg.get_double("hwemu.tau_ampa");
  hw.model.tau_gaba_a = cfg.get_double("hwemu.tau_gaba_a");
  hw.model.tau_gaba_b = cfg.get_double("hwemu.tau_gaba_b");
  hw.model.refractory = cfg.get_double("hwemu.refractory");
  hw.model.base_efficacy = cfg.get_double("hwemu.base_efficacy");
  hw.model.gaba_b_ratio = cfg.get_double("hwemu.gaba_b_ratio");
  hw.model.cross_inhibition = cfg.get_bool("hwemu.cross_inhibition");
  hw.model.validate();
  hw.run.trial_duration = cfg.get_double("hwemu.trial_duration");
  hw.run.pre_buffer = cfg.get_double("hwemu.pre_buffer");
  hw.run.post_buffer = cfg.get_double("hwemu.post_buffer");
  hw.run.sim_dt = cfg.get_double("hwemu.sim_dt");
  hw.run.validate();
  hw.thresholds = decoder_thresholds(cfg);
  hw.window_s = cfg.get_double("decoder.window_s");
  return hw;
}

LogRegOptions logreg_options(const RunConfig& cfg) {
  LogRegOptions opt;
  opt.max_iter = cfg.get_int("baseline.max_iter");
  opt.tol = cfg.get_double("baseline.tol");
  return opt;
}

}  // namespace cogload
