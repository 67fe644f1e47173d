#include "cogload/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

#include "cogload/baseline.hpp"
#include "cogload/config.hpp"
#include "cogload/data.hpp"
#include "cogload/encoder.hpp"
#include "cogload/error.hpp"
#include "cogload/grid.hpp"
#include "cogload/hw_eval.hpp"
#include "cogload/quant.hpp"
#include "cogload/snn.hpp"

namespace cogload {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  auto j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw DataError(path.string() + " is not valid JSON");
  return j;
}

fs::path sidecar(const fs::path& out, const std::string& suffix) {
  return fs::path(out.string() + suffix);
}

Dataset load_data(const fs::path& path, std::ostream& out) {
  auto loaded = load_feature_csv(path);
  if (loaded.dropped > 0) {
    out << "dropped " << loaded.dropped << " of " << loaded.rows_read
        << " rows with missing or non-finite values\n";
  }
  return std::move(loaded.dataset);
}

// Options shared by every subcommand.
struct Common {
  std::string config_path;
  std::vector<std::string> sets;
  int jobs = 1;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config_path, "Flat JSON config (or a results file)");
  sub->add_option("--set", c.sets, "Override a config key: key=value");
  sub->add_option("--jobs", c.jobs, "Worker threads")->check(CLI::PositiveNumber);
}

// File values first, then --set, then dedicated flags.
RunConfig resolve(const Common& c) {
  RunConfig cfg;
  if (!c.config_path.empty()) cfg.merge_file(c.config_path);
  for (const auto& s : c.sets) cfg.set_from_string(s);
  return cfg;
}

template <typename T>
void flag_into(RunConfig& cfg, const std::optional<T>& v, const std::string& key) {
  if (v) cfg.set(key, *v);
}

json envelope(const std::string& kind, const RunConfig& cfg) {
  return {{"kind", kind}, {"config", cfg.resolved()}};
}

SnnModel model_from_file(const json& j) {
  return model_from_json(j.contains("template") ? j.at("template") : j);
}

// ---------------------------------------------------------------------------

struct SynthArgs {
  Common common;
  std::optional<int> n;
  std::optional<double> separation;
  std::optional<int> seed;
  std::string out;
};

void cmd_synth(const SynthArgs& a, std::ostream& log) {
  auto cfg = resolve(a.common);
  flag_into(cfg, a.n, "data.n");
  flag_into(cfg, a.separation, "data.separation");
  flag_into(cfg, a.seed, "data.seed");
  const int n = cfg.get_int("data.n");
  if (n < 2) throw DataError("data.n must be >= 2");
  const auto ds = generate_synthetic(static_cast<std::size_t>(n), cfg.get_double("data.separation"),
                                     cfg.get_seed("data.seed"));
  write_feature_csv(a.out, ds);
  auto meta = envelope("synth-data", cfg);
  meta["records"] = ds.size();
  write_json(sidecar(a.out, ".meta.json"), meta);
  log << "wrote " << ds.size() << " records to " << a.out << "\n";
}

struct EncodeArgs {
  Common common;
  std::string in;
  std::optional<double> tau;
  std::optional<double> gain;
  std::string normalization_from;
  std::string out;
};

json normalization_json(const NormalizationParams& p) {
  return {{"mean", p.mean}, {"std", p.std}};
}

void cmd_encode(const EncodeArgs& a, std::ostream& log) {
  auto cfg = resolve(a.common);
  flag_into(cfg, a.tau, "encoder.tau");
  flag_into(cfg, a.gain, "encoder.gain");
  const auto raw = load_data(a.in, log);
  if (raw.empty()) throw DataError("encode: no records in " + a.in);
  NormalizationParams params;
  if (!a.normalization_from.empty()) {
    const auto model = model_from_file(read_json(a.normalization_from));
    if (!model.normalization) throw DataError("model has no normalization parameters");
    params = *model.normalization;
  } else {
    params = zscore_fit(raw);
  }
  const auto ds = zscore_apply(raw, params);
  LifEncoderParams enc;
  enc.tau = cfg.get_double("encoder.tau");
  enc.gain = cfg.get_double("encoder.gain");
  enc.validate();

  std::vector<TrialEvents> trials;
  int per_step = 0;
  int per_unit = 0;
  int nonempty = 0;
  auto excluded_per_unit = json::array();
  for (const auto& r : ds.records) {
    const auto raster = encode(r.features, enc);
    per_step += is_complete_trial(raster) ? 1 : 0;
    nonempty += raster.total() > 0 ? 1 : 0;
    if (is_complete_per_unit(raster)) {
      ++per_unit;
    } else {
      excluded_per_unit.push_back(r.trial_id);
    }
    trials.push_back({r.trial_id, r.label, raster_to_events(raster)});
  }
  write_events_jsonl(a.out, trials);
  auto meta = envelope("encode", cfg);
  meta["normalization"] = normalization_json(params);
  meta["completeness"] = {{"trials", trials.size()},
                          {"complete_per_step", per_step},
                          {"complete_per_unit", per_unit},
                          {"nonempty", nonempty},
                          {"excluded_per_unit", excluded_per_unit}};
  write_json(sidecar(a.out, ".meta.json"), meta);
  log << "encoded " << trials.size() << " trials; complete per step " << per_step
      << ", per unit " << per_unit << ", non-empty " << nonempty << "\n";
}

struct TrainArgs {
  Common common;
  std::optional<std::string> arch;
  std::optional<int> seed;
  std::string data;
  std::string out_model;
  std::string metrics;
};

void cmd_train(const TrainArgs& a, std::ostream& log) {
  auto cfg = resolve(a.common);
  flag_into(cfg, a.arch, "snn.arch");
  flag_into(cfg, a.seed, "seed");
  const auto ds = load_data(a.data, log);
  const auto h = snn_hyper(cfg);
  const auto result =
      cross_validate_snn(ds, h, cfg.get_int("eval.k"), cfg.get_seed("seed"), a.common.jobs);
  auto model_json = model_to_json(result.fold_models[result.best_fold]);
  model_json["config"] = cfg.resolved();
  model_json["best_fold"] = result.best_fold;
  write_json(a.out_model, model_json);

  auto metrics = envelope("train", cfg);
  metrics["hyper"] = to_json(h);
  metrics["cv"] = to_json(result.cv);
  metrics["summary"] = to_json(result.cv.summary);
  metrics["best_fold"] = result.best_fold;
  const fs::path metrics_path =
      a.metrics.empty() ? sidecar(a.out_model, ".metrics.json") : fs::path(a.metrics);
  write_json(metrics_path, metrics);
  const auto& m = result.cv.summary;
  log << "cv accuracy " << m.mean.accuracy << " +/- " << m.std.accuracy << " (best fold "
      << result.best_fold << ")\n";
}

struct GridArgs {
  Common common;
  std::optional<std::string> arch;
  std::optional<std::string> space;
  std::vector<int> seeds;
  std::string data;
  std::string out;
};

void cmd_grid(const GridArgs& a, std::ostream& log) {
  auto cfg = resolve(a.common);
  flag_into(cfg, a.arch, "snn.arch");
  flag_into(cfg, a.space, "grid.space");
  if (!a.seeds.empty()) cfg.set("grid.seeds", a.seeds);
  const auto arch = arch_from_string(cfg.get_string("snn.arch"));
  auto seeds = cfg.get_seeds("grid.seeds");
  if (seeds.empty()) {
    seeds = arch == Arch::kSingle ? kSingleLayerSeeds : kHiddenSeeds;
    cfg.set("grid.seeds", seeds);
  }
  const auto space_name = cfg.get_string("grid.space");
  GridSpace space;
  if (space_name == "reference") {
    space = arch == Arch::kSingle ? reference_single_space() : reference_hidden_space();
  } else {
    space = grid_space_from_json(read_json(space_name), arch);
  }
  // Fields outside the searched axes follow the config.
  auto base = snn_hyper(cfg);
  base.arch = arch;
  if (space_name == "reference" && arch == Arch::kHidden) {
    base.eta = space.base.eta;
    base.epochs = space.base.epochs;
  }
  space.base = base;
  const auto ds = load_data(a.data, log);
  const auto results = grid_search(space, ds, cfg.get_int("eval.k"), seeds, a.common.jobs);
  auto out = envelope("grid-search", cfg);
  out["space"] = to_json(space);
  out["n_configs"] = results.size();
  auto table = json::array();
  for (const auto& r : results) table.push_back(to_json(r));
  out["results"] = table;
  if (!results.empty()) out["summary"] = {{"mean", to_json(results.front().mean)}};
  write_json(a.out, out);
  write_text(sidecar(a.out, ".csv"), grid_results_csv(results));
  log << "evaluated " << results.size() << " configs x " << seeds.size() << " seeds; best "
      << (results.empty() ? 0.0 : results.front().score) << "\n";
}

struct QuantizeArgs {
  Common common;
  std::string model;
  std::string data;
  std::string out;
  bool finetune = false;
};

void cmd_quantize(const QuantizeArgs& a, std::ostream& log) {
  auto cfg = resolve(a.common);
  if (a.finetune) cfg.set("quant.finetune", true);
  const auto model = model_from_file(read_json(a.model));
  auto qw = quantize_int3(model.readout());
  auto out = envelope("quantize", cfg);
  std::optional<Dataset> data;
  if (!a.data.empty()) {
    auto raw = load_data(a.data, log);
    if (!model.normalization) throw DataError("model has no normalization parameters");
    data = zscore_apply(raw, *model.normalization);
  }
  if (cfg.get_bool("quant.finetune")) {
    if (!data) throw ConfigError("quant.finetune needs --data");
    TrainConfig tc;
    tc.eta = cfg.get_double("quant.finetune_eta");
    tc.epochs = cfg.get_int("quant.finetune_epochs");
    tc.seed = model.seed;
    tc.tau_encoder = model.encoder.tau;
    qw = finetune_quantized(model, *data, tc);
  }
  if (data) {
    const auto fl = compute_metrics(data->labels(), predict(model, *data));
    const auto q = evaluate_quantized(qw, model, *data);
    out["comparison"] = {{"float", to_json(fl)},
                         {"int3", to_json(q)},
                         {"accuracy_drop", fl.accuracy - q.accuracy}};
    out["summary"] = {{"mean", to_json(MetricValues{q.accuracy, q.precision, q.recall, q.f1})}};
    log << "float accuracy " << fl.accuracy << ", int3 accuracy " << q.accuracy << "\n";
  }
  const auto qj = quantized_to_json(qw);
  out["w_int"] = qj["w_int"];
  out["scale"] = qj["scale"];
  out["template"] = model_to_json(model);
  write_json(a.out, out);
  log << "w_int " << qj["w_int"].dump() << "\n";
}

struct EmulateArgs {
  Common common;
  std::string qmodel;
  std::string events;
  std::optional<double> mismatch_cv;
  std::optional<int> trials;
  std::optional<int> mismatch_seed;
  std::string out;
  std::string spikes_out;
  std::string network_out;
};

void cmd_emulate(const EmulateArgs& a, std::ostream& log) {
  auto cfg = resolve(a.common);
  if (a.mismatch_cv) {
    cfg.set("hwemu.mismatch_cv", *a.mismatch_cv);
    cfg.set("hwemu.mismatch_cv_tau", *a.mismatch_cv);
  }
  flag_into(cfg, a.trials, "hwemu.trials");
  flag_into(cfg, a.mismatch_seed, "hwemu.mismatch_seed");
  auto hw = hw_eval_config(cfg);
  hw.jobs = a.common.jobs;
  const auto mode = completeness_from_string(cfg.get_string("hwemu.completeness"));

  const auto qj = read_json(a.qmodel);
  const auto qw = quantized_from_json(qj);
  std::optional<SnnModel> software;
  if (qj.contains("template")) software = with_quantized_readout(model_from_json(qj["template"]), qw);

  const auto all = read_events_jsonl(a.events);
  std::vector<TrialEvents> kept;
  auto excluded = json::array();
  std::vector<int> sw_pred;
  const auto steps = software ? static_cast<std::size_t>(software->encoder.steps) : 16;
  for (const auto& t : all) {
    const auto raster = events_to_raster(t.events, qw.w_int.cols(), steps);
    if (!passes(raster, mode)) {
      excluded.push_back(t.trial_id);
      continue;
    }
    if (software) sw_pred.push_back(forward(*software, raster).cls);
    kept.push_back(t);
  }
  if (kept.empty()) throw DataError("no trials left after the completeness filter");

  const bool keep = !a.spikes_out.empty();
  const auto result = hw_eval(qw, kept, hw, keep);
  auto out = envelope("emulate", cfg);
  out["trials_in"] = all.size();
  out["trials_used"] = kept.size();
  out["excluded"] = excluded;
  out["hw_eval"] = to_json(result);
  out["summary"] = to_json(result.summary);
  if (software) {
    auto agreement = json::array();
    for (const auto& preds : result.predictions) {
      std::size_t same = 0;
      for (std::size_t i = 0; i < preds.size(); ++i) same += preds[i] == sw_pred[i] ? 1 : 0;
      agreement.push_back(static_cast<double>(same) / static_cast<double>(preds.size()));
    }
    out["software_agreement"] = agreement;
  }
  write_json(a.out, out);
  if (keep) {
    std::string lines;
    for (std::size_t r = 0; r < result.outputs.size(); ++r) {
      for (std::size_t i = 0; i < kept.size(); ++i) {
        auto j = trial_output_to_json(result.outputs[r][i]);
        j["repeat"] = r;
        j["trial_id"] = kept[i].trial_id;
        lines += j.dump() + "\n";
      }
    }
    write_text(a.spikes_out, lines);
  }
  if (!a.network_out.empty()) {
    auto model = hw.model;
    model.base_efficacy = result.base_efficacy;
    write_json(a.network_out, network_to_json(build_network(qw, hw.mismatch, model)));
  }
  for (std::size_t r = 0; r < result.per_trial.size(); ++r) {
    log << "trial " << r << ": accuracy " << result.per_trial[r].accuracy << "\n";
  }
  log << "mean accuracy " << result.summary.mean.accuracy << " +/- "
      << result.summary.std.accuracy << "\n";
}

struct BaselineArgs {
  Common common;
  std::optional<int> seed;
  std::string data;
  std::string out;
};

void cmd_baseline(const BaselineArgs& a, std::ostream& log) {
  auto cfg = resolve(a.common);
  flag_into(cfg, a.seed, "seed");
  const auto ds = load_data(a.data, log);
  const auto grid = logreg_grid(ds, cfg.get_doubles("baseline.c_grid"), cfg.get_int("eval.k"),
                                cfg.get_seed("seed"), logreg_options(cfg), a.common.jobs);
  auto out = envelope("baseline", cfg);
  auto entries = json::array();
  std::size_t best = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    entries.push_back({{"c", grid[i].c}, {"cv", to_json(grid[i].cv)}});
    if (grid[i].cv.summary.mean.accuracy > grid[best].cv.summary.mean.accuracy) best = i;
  }
  out["grid"] = entries;
  if (!grid.empty()) {
    out["best_c"] = grid[best].c;
    out["summary"] = to_json(grid[best].cv.summary);
    log << "best C " << grid[best].c << ": accuracy " << grid[best].cv.summary.mean.accuracy
        << "\n";
  }
  write_json(a.out, out);
}

struct ReportArgs {
  std::vector<std::string> results;
  std::string out;
};

void cmd_report(const ReportArgs& a, std::ostream& log) {
  auto rows = json::array();
  std::string csv =
      "source,kind,accuracy_mean,accuracy_std,precision_mean,precision_std,recall_mean,"
      "recall_std,f1_mean,f1_std\n";
  for (const auto& path : a.results) {
    const auto j = read_json(path);
    const auto kind = j.value("kind", std::string("unknown"));
    if (!j.contains("summary")) throw DataError(path + " has no summary");
    const auto& s = j["summary"];
    const auto mean = s.value("mean", json::object());
    const auto sd = s.value("std", json::object());
    json row = {{"source", path}, {"kind", kind}, {"mean", mean}, {"std", sd}};
    rows.push_back(row);
    csv += path + "," + kind;
    for (const char* key : {"accuracy", "precision", "recall", "f1"}) {
      csv += "," + (mean.contains(key) ? mean[key].dump() : std::string());
      csv += "," + (sd.contains(key) ? sd[key].dump() : std::string());
    }
    csv += "\n";
  }
  write_json(a.out, {{"kind", "report"},
                     {"config", json::object()},
                     {"summary", {{"files", rows.size()}}},
                     {"rows", rows}});
  write_text(sidecar(a.out, ".csv"), csv);
  log << "merged " << rows.size() << " result files\n";
}

struct FeaturesArgs {
  std::string in;
  std::string out;
};

void cmd_features(const FeaturesArgs& a, std::ostream& log) {
  const auto bands = load_band_power_csv(a.in);
  std::string csv = "engagement,faa\n";
  for (const auto& bp : bands) {
    csv += json(compute_engagement_index(bp)).dump() + "," + json(compute_faa(bp)).dump() + "\n";
  }
  write_text(a.out, csv);
  log << "computed features for " << bands.size() << " rows\n";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spiking cognitive-load classification toolkit"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* s_synth = app.add_subcommand("synth-data", "Generate a synthetic feature CSV");
  add_common(s_synth, synth.common);
  s_synth->add_option("--n", synth.n);
  s_synth->add_option("--separation", synth.separation);
  s_synth->add_option("--seed", synth.seed);
  s_synth->add_option("--out", synth.out)->required();

  EncodeArgs enc;
  auto* s_enc = app.add_subcommand("encode", "Spike-encode a feature CSV into events");
  add_common(s_enc, enc.common);
  s_enc->add_option("--in", enc.in)->required();
  s_enc->add_option("--tau", enc.tau);
  s_enc->add_option("--gain", enc.gain);
  s_enc->add_option("--normalization-from", enc.normalization_from,
                    "Use a model's train-split z-score statistics");
  s_enc->add_option("--out", enc.out)->required();

  TrainArgs tr;
  auto* s_train = app.add_subcommand("train", "Cross-validate and train a spiking classifier");
  add_common(s_train, tr.common);
  s_train->add_option("--arch", tr.arch)->check(CLI::IsMember({"single", "hidden"}));
  s_train->add_option("--seed", tr.seed);
  s_train->add_option("--data", tr.data)->required();
  s_train->add_option("--out-model", tr.out_model)->required();
  s_train->add_option("--metrics", tr.metrics);

  GridArgs gr;
  auto* s_grid = app.add_subcommand("grid-search", "Exhaustive hyperparameter search");
  add_common(s_grid, gr.common);
  s_grid->add_option("--arch", gr.arch)->check(CLI::IsMember({"single", "hidden"}));
  s_grid->add_option("--space", gr.space, "'reference' or a JSON space file");
  s_grid->add_option("--seeds", gr.seeds);
  s_grid->add_option("--data", gr.data)->required();
  s_grid->add_option("--out", gr.out)->required();

  QuantizeArgs qa;
  auto* s_quant = app.add_subcommand("quantize", "Int3-quantize a trained model");
  add_common(s_quant, qa.common);
  s_quant->add_option("--model", qa.model)->required();
  s_quant->add_option("--data", qa.data, "Feature CSV for the float vs int3 comparison");
  s_quant->add_flag("--finetune", qa.finetune);
  s_quant->add_option("--out", qa.out)->required();

  EmulateArgs em;
  auto* s_emu = app.add_subcommand("emulate", "Run events through the hardware emulator");
  add_common(s_emu, em.common);
  s_emu->add_option("--qmodel", em.qmodel)->required();
  s_emu->add_option("--events", em.events)->required();
  s_emu->add_option("--mismatch-cv", em.mismatch_cv);
  s_emu->add_option("--mismatch-seed", em.mismatch_seed);
  s_emu->add_option("--trials", em.trials);
  s_emu->add_option("--out", em.out)->required();
  s_emu->add_option("--spikes-out", em.spikes_out, "Per-trial output spikes (JSON Lines)");
  s_emu->add_option("--network-out", em.network_out, "Dump of the first mismatched network");

  BaselineArgs bl;
  auto* s_base = app.add_subcommand("baseline", "Logistic-regression baseline");
  add_common(s_base, bl.common);
  s_base->add_option("--seed", bl.seed);
  s_base->add_option("--data", bl.data)->required();
  s_base->add_option("--out", bl.out)->required();

  ReportArgs rp;
  auto* s_report = app.add_subcommand("report", "Merge result summaries");
  s_report->add_option("--results", rp.results)->required();
  s_report->add_option("--out", rp.out)->required();

  FeaturesArgs ft;
  auto* s_feat = app.add_subcommand("features", "Engagement index and FAA from band powers");
  s_feat->add_option("--band-powers", ft.in)->required();
  s_feat->add_option("--out", ft.out)->required();

  std::vector<std::string> argv_store{"cogload"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*s_synth) cmd_synth(synth, out);
    else if (*s_enc) cmd_encode(enc, out);
    else if (*s_train) cmd_train(tr, out);
    else if (*s_grid) cmd_grid(gr, out);
    else if (*s_quant) cmd_quantize(qa, out);
    else if (*s_emu) cmd_emulate(em, out);
    else if (*s_base) cmd_baseline(bl, out);
    else if (*s_report) cmd_report(rp, out);
    else if (*s_feat) cmd_features(ft, out);
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const nlohmann::json::exception& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  }
}

}  // namespace cogload
