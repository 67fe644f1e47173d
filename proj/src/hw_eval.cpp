#include "cogload/hw_eval.hpp"

#include "cogload/error.hpp"
#include "cogload/parallel.hpp"

namespace cogload {

int decode_output(const TrialOutput& out, const HwEvalConfig& cfg) {
  const auto window = stimulus_window(out.spikes, cfg.run.trial_duration);
  const auto rates = bin_rates(window, cfg.window_s, cfg.model.pop_size, cfg.run.trial_duration);
  return classify_burst(rates, cfg.thresholds);
}

HwEvalResult hw_eval(const QuantizedWeights& qw, const std::vector<TrialEvents>& trials,
                     const HwEvalConfig& cfg, bool keep_outputs) {
  if (cfg.n_trials < 1) throw ConfigError("hw_eval needs n_trials >= 1");
  if (trials.empty()) throw DataError("hw_eval: no trials");
  cfg.thresholds.validate();
  cfg.run.validate();
  std::vector<int> labels;
  for (const auto& t : trials) {
    if (!t.label) throw DataError("hw_eval: trial " + t.trial_id + " has no label");
    labels.push_back(*t.label);
  }

  HwEvalResult result;
  auto model = cfg.model;
  if (!(model.base_efficacy > 0)) model.base_efficacy = calibrate_base_efficacy(model);
  result.base_efficacy = model.base_efficacy;

  const auto repeats = static_cast<std::size_t>(cfg.n_trials);
  std::vector<ChipNetwork> nets(repeats);
  parallel_for(repeats, cfg.jobs, [&](std::size_t r) {
    auto mm = cfg.mismatch;
    mm.seed += r;
    nets[r] = build_network(qw, mm, model);
  });

  result.predictions.assign(repeats, std::vector<int>(trials.size(), 0));
  if (keep_outputs) result.outputs.assign(repeats, std::vector<TrialOutput>(trials.size()));
  parallel_for(repeats * trials.size(), cfg.jobs, [&](std::size_t idx) {
    const auto r = idx / trials.size();
    const auto i = idx % trials.size();
    auto out = run_trial(nets[r], trials[i].events, cfg.run);
    result.predictions[r][i] = decode_output(out, cfg);
    if (keep_outputs) result.outputs[r][i] = std::move(out);
  });

  for (const auto& preds : result.predictions) {
    result.per_trial.push_back(compute_metrics(labels, preds));
  }
  result.summary = aggregate(result.per_trial);
  return result;
}

nlohmann::json to_json(const HwEvalResult& result) {
  auto per_trial = nlohmann::json::array();
  for (const auto& m : result.per_trial) per_trial.push_back(to_json(m));
  return {{"per_trial", per_trial},
          {"summary", to_json(result.summary)},
          {"base_efficacy", result.base_efficacy}};
}

}  // namespace cogload
