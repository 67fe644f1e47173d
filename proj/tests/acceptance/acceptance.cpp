// Acceptance suite: one PASS/FAIL/SKIP line per criterion. Exit status is
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "../oracle/burst_oracle.hpp"
#include "../oracle/encoder_oracle.hpp"
#include "cogload/baseline.hpp"
#include "cogload/cli.hpp"
#include "cogload/data.hpp"
#include "cogload/decode.hpp"
#include "cogload/grid.hpp"
#include "cogload/hw_eval.hpp"
#include "cogload/quant.hpp"

using namespace cogload;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  enum Status { kPass, kFail, kSkip } status = kFail;
  std::string detail;
};

Outcome verdict(bool ok, std::string detail) {
  return {ok ? Outcome::kPass : Outcome::kFail, std::move(detail)};
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

int jobs() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

struct Split {
  Dataset train, test;
};

Split normalized_split(const Dataset& ds, const std::vector<std::size_t>& train,
                       const std::vector<std::size_t>& test) {
  const auto raw = ds.subset(train);
  const auto params = zscore_fit(raw);
  return {zscore_apply(raw, params), zscore_apply(ds.subset(test), params)};
}

std::vector<TrialEvents> to_events(const Dataset& normalized, const SnnModel& model,
                                   CompletenessMode mode) {
  std::vector<TrialEvents> out;
  for (const auto& r : normalized.records) {
    const auto raster = encode(r.features, model.encoder);
    if (!passes(raster, mode)) continue;
    out.push_back({r.trial_id, r.label, raster_to_events(raster)});
  }
  return out;
}

double mean_of(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

std::string list(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + fmt("%.3f", v[i]);
  return s + "]";
}

// ---------------------------------------------------------------------------

Outcome original_dataset_reproduction() {
  const char* path = std::getenv("COGLOAD_ORIGINAL_CSV");
  if (path == nullptr || !fs::exists(path)) {
    return {Outcome::kSkip, "unverifiable at desk scale (set COGLOAD_ORIGINAL_CSV to the 217-trial CSV)"};
  }
  const auto ds = load_feature_csv(path).dataset;
  SnnHyper h;  // tau 31, inhibition 0.01, eta 0.01, 25 epochs
  const std::uint64_t seed = 31;
  const auto folds = stratified_kfold(ds, 5, seed);
  std::vector<double> fl, q, hw;
  for (const auto& f : folds) {
    const auto s = normalized_split(ds, f.train, f.test);
    const auto model = fit_snn(h, s.train, seed);
    fl.push_back(compute_metrics(s.test.labels(), predict(model, s.test)).accuracy);
    const auto qw = quantize_int3(model.readout());
    q.push_back(evaluate_quantized(qw, model, s.test).accuracy);
    HwEvalConfig cfg;
    cfg.jobs = jobs();
    hw.push_back(hw_eval(qw, to_events(s.test, model, CompletenessMode::kNonEmpty), cfg)
                     .summary.mean.accuracy);
  }
  const double a = mean_of(fl), b = mean_of(q), c = mean_of(hw);
  const bool ok = std::abs(a - 0.806) <= 0.05 && std::abs(b - 0.769) <= 0.05 &&
                  std::abs(c - 0.735) <= 0.07;
  return verdict(ok, "float " + fmt("%.3f", a) + " (target 0.806 +/- 0.05), int3 " + fmt("%.3f", b) +
                         " (0.769 +/- 0.05), emulator " + fmt("%.3f", c) + " (0.735 +/- 0.07)");
}

Outcome quantization_fidelity() {
  std::vector<double> drops;
  std::string per;
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto ds = generate_synthetic(200, 3.0, s);
    const auto cv = cross_validate_snn(ds, SnnHyper{}, 5, s, jobs());
    const auto folds = stratified_kfold(ds, 5, s);
    std::vector<double> q;
    for (std::size_t f = 0; f < folds.size(); ++f) {
      const auto split = normalized_split(ds, folds[f].train, folds[f].test);
      const auto& model = cv.fold_models[f];
      q.push_back(evaluate_quantized(quantize_int3(model.readout()), model, split.test).accuracy);
    }
    const double fl = cv.cv.summary.mean.accuracy;
    drops.push_back(fl - mean_of(q));
    per += " " + fmt("%.3f", fl) + "->" + fmt("%.3f", mean_of(q));
  }
  const double d = mean_of(drops);
  return verdict(d <= 0.10, "mean drop " + fmt("%.1f", 100 * d) + " points (limit 10); float->int3" + per);
}

// Dataset for the emulator criteria: 200 trials at separation 3, model
// trained on the first 100, evaluated on the other 100.
struct EmuFixture {
  SnnModel model;
  QuantizedWeights qw;
  Dataset test;
  std::vector<TrialEvents> trials;
  std::vector<int> software;
};

const EmuFixture& emu_fixture() {
  static const EmuFixture fx = [] {
    EmuFixture f;
    const auto ds = generate_synthetic(200, 3.0, 0);
    std::vector<std::size_t> tr, te;
    for (std::size_t i = 0; i < ds.size(); ++i) (i < 100 ? tr : te).push_back(i);
    const auto s = normalized_split(ds, tr, te);
    f.model = fit_snn(SnnHyper{}, s.train, 31);
    f.qw = quantize_int3(f.model.readout());
    f.test = s.test;
    f.trials = to_events(s.test, f.model, CompletenessMode::kNone);
    f.software = predict(with_quantized_readout(f.model, f.qw), s.test);
    return f;
  }();
  return fx;
}

Outcome emulator_agreement() {
  const auto& fx = emu_fixture();
  HwEvalConfig cfg;
  cfg.n_trials = 1;
  cfg.mismatch = {0.0, 0.0, 0};
  cfg.jobs = jobs();
  const auto r = hw_eval(fx.qw, fx.trials, cfg);
  std::size_t same = 0;
  for (std::size_t i = 0; i < fx.software.size(); ++i) same += r.predictions[0][i] == fx.software[i];
  const double frac = static_cast<double>(same) / static_cast<double>(fx.software.size());
  return verdict(frac >= 0.90, std::to_string(same) + "/" + std::to_string(fx.software.size()) +
                                   " trials agree (need >= 90%), base efficacy " +
                                   fmt("%.4f", r.base_efficacy));
}

Outcome variability_envelope() {
  const auto& fx = emu_fixture();
  HwEvalConfig cfg;
  cfg.n_trials = 5;
  cfg.mismatch = {0.2, 0.2, 0};
  cfg.jobs = jobs();
  const auto r = hw_eval(fx.qw, fx.trials, cfg);
  std::vector<double> acc;
  for (const auto& m : r.per_trial) acc.push_back(m.accuracy);
  const double sd = r.summary.std.accuracy;
  return verdict(sd <= 0.03, "accuracy " + fmt("%.3f", r.summary.mean.accuracy) + " +/- " +
                                 fmt("%.4f", sd) + " (std limit 0.03), per repeat " + list(acc));
}

Outcome decoder_oracle() {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> mode_pick(0, 3);
  std::uniform_int_distribution<int> count(0, 20);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const DecoderThresholds th;
  const double unit = 1.0 / (20 * kDefaultWindowSeconds);  // one spike in one window
  int agree = 0, branch[4] = {0, 0, 0, 0};
  const int n = 10000;
  for (int k = 0; k < n; ++k) {
    const int mode = mode_pick(rng);
    const double density = mode == 3 ? 0.0 : 0.05 + 0.3 * u(rng);
    RateWindows t;
    t.window_s = kDefaultWindowSeconds;
    for (int p = 0; p < 2; ++p) {
      auto& rates = t.rates[static_cast<std::size_t>(p)];
      rates.assign(64, 0.0);
      const bool silent = mode == 2 && p == static_cast<int>(k % 2);
      for (auto& r : rates) {
        if (!silent && u(rng) < density) r = unit * std::min(20, 1 + count(rng) / (mode == 1 ? 4 : 1));
      }
      t.total_spikes[static_cast<std::size_t>(p)] = count(rng);
    }
    const auto d = classify_burst_detailed(t, th);
    ++branch[static_cast<int>(d.branch)];
    int want = oracle::burst_classify(t.rates[0], t.rates[1], t.total_spikes[0], t.total_spikes[1],
                                      {th.zero_hz, th.diff_hz, th.offset_hz, th.offset_step_hz,
                                       th.limit_hz});
    if (want < 0) want = 0;
    agree += d.cls == want;
  }
  const bool covered = branch[0] > 0 && branch[1] > 0 && branch[2] > 0 && branch[3] > 0;
  return verdict(agree == n && covered,
                 std::to_string(agree) + "/" + std::to_string(n) + " agree; branch counts " +
                     std::to_string(branch[0]) + "/" + std::to_string(branch[1]) + "/" +
                     std::to_string(branch[2]) + "/" + std::to_string(branch[3]));
}

Outcome encoder_properties() {
  bool monotone = true, closed = true;
  for (double tau : {15.0, 31.0, 40.0}) {
    LifEncoderParams p;
    p.tau = tau;
    int prev = -1;
    for (int i = -300; i <= 300; ++i) {
      const double x = i / 100.0;
      const std::vector<double> in{x};
      const auto r = encode(in, p);
      monotone = monotone && r.total() >= prev;
      prev = r.total();
      std::vector<int> got;
      for (std::size_t s = 0; s < r.steps(); ++s) {
        if (r.at(0, s)) got.push_back(static_cast<int>(s));
      }
      closed = closed && got == oracle::closed_form_steps(x, p);
    }
  }
  LifEncoderParams p;
  const std::vector<double> zero{0.0};
  const auto r = encode(zero, p);
  const bool single = r.total() == 1 && r.at(0, 9) && oracle::closed_form_steps(0.0, p) == std::vector<int>{9};
  return verdict(monotone && closed && single,
                 std::string("monotone ") + (monotone ? "yes" : "no") + ", closed form " +
                     (closed ? "matches" : "differs") + ", x=0 tau=31 -> " +
                     std::to_string(r.total()) + " spike" + (r.at(0, 9) ? " at step 9" : ""));
}

Outcome quantization_properties() {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> dim(1, 6);
  int bad = 0;
  for (int k = 0; k < 1000; ++k) {
    MatrixD w(static_cast<std::size_t>(dim(rng)), static_cast<std::size_t>(dim(rng)));
    const double s = std::exp(2 * g(rng));
    for (auto& v : w.values()) v = s * g(rng);
    const auto q = quantize_int3(w);
    const auto& wi = q.w_int.values();
    const auto& wf = w.values();
    bool ok = quantize_int3(as_real(q.w_int)).w_int == q.w_int;
    for (std::size_t i = 0; i < wf.size(); ++i) {
      ok = ok && wi[i] >= -3 && wi[i] <= 3;
      ok = ok && (wi[i] == 0 || (wi[i] > 0) == (wf[i] > 0));
      for (std::size_t j = 0; j < wf.size(); ++j) ok = ok && (wf[i] < wf[j] || wi[i] >= wi[j]);
    }
    bad += ok ? 0 : 1;
  }
  MatrixD w(2, 5);
  const double row[5] = {0.1, -0.4, -0.35, 1.2, -0.8};
  for (std::size_t j = 0; j < 5; ++j) {
    w(0, j) = row[j];
    w(1, j) = -row[j];
  }
  MatrixI expect(2, 5);
  const int e[5] = {0, -1, -1, 3, -2};
  for (std::size_t j = 0; j < 5; ++j) {
    expect(0, j) = e[j];
    expect(1, j) = -e[j];
  }
  const bool matrix = quantize_int3(w).w_int == expect;
  return verdict(bad == 0 && matrix, std::to_string(1000 - bad) + "/1000 matrices satisfy all invariants; " +
                                         "reported matrix " + (matrix ? "reproduced" : "NOT reproduced"));
}

Outcome learning_sanity() {
  std::vector<double> snn;
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto ds = generate_synthetic(200, 6.0, s);
    snn.push_back(cross_validate_snn(ds, SnnHyper{}, 5, 31, jobs()).cv.summary.mean.accuracy);
  }
  const double snn_mean = mean_of(snn);

  const auto ds = generate_synthetic(200, 6.0, 0);
  double lr = 0;
  for (const auto& e : logreg_grid(ds, kDefaultCGrid, 5, 0, {}, jobs())) {
    lr = std::max(lr, e.cv.summary.mean.accuracy);
  }

  const auto data = to_logreg_data(zscore_apply(ds, zscore_fit(ds)));
  std::vector<double> w{0.4, -0.3, 0.2, 0.7, -0.1};
  double b = 0.05, worst = 0;
  std::vector<double> grad, scratch;
  loss_and_gradient(data, w, b, 1.0, grad);
  const double h = 1e-5;
  for (std::size_t k = 0; k <= w.size(); ++k) {
    auto wp = w, wm = w;
    double bp = b, bm = b;
    if (k < w.size()) {
      wp[k] += h;
      wm[k] -= h;
    } else {
      bp += h;
      bm -= h;
    }
    const double fd =
        (loss_and_gradient(data, wp, bp, 1.0, scratch) - loss_and_gradient(data, wm, bm, 1.0, scratch)) /
        (2 * h);
    worst = std::max(worst, std::abs(fd - grad[k]) / std::max(std::abs(grad[k]), 1e-12));
  }
  const bool ok = snn_mean >= 0.90 && lr >= 0.98 && worst <= 1e-6;
  return verdict(ok, "SNN mean over dataset seeds 0-4 " + fmt("%.3f", snn_mean) + " " + list(snn) +
                         " (need 0.90), LR " + fmt("%.3f", lr) + " (need 0.98), gradient rel err " +
                         fmt("%.1e", worst));
}

// ---------------------------------------------------------------------------

std::uint64_t fnv1a(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::uint64_t h = 1469598103934665603ull;
  char c;
  while (in.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

Outcome determinism() {
  const auto dir = fs::temp_directory_path() / "cogload_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto p = [&](const std::string& name) { return (dir / name).string(); };
  {
    std::ofstream(dir / "space.json") << R"({"tau": [20, 31], "gamma": [0.01, 0.1]})";
    std::ofstream(dir / "bands.csv")
        << "theta,alpha,beta,alpha_left_frontal,alpha_right_frontal\n4,10,6,2,3\n3,8,5,1.5,1.2\n";
  }

  struct Stage {
    std::string name;
    std::vector<std::string> first;
    std::vector<std::string> rerun;  // I/O flags plus --config <emitted file>
    std::vector<std::string> outputs;
  };
  const std::vector<Stage> stages = {
      {"synth-data",
       {"synth-data", "--n", "120", "--separation", "3", "--seed", "5", "--out", p("d.csv")},
       {"synth-data", "--config", p("d.csv.meta.json"), "--out", p("d.csv")},
       {p("d.csv"), p("d.csv.meta.json")}},
      {"train",
       {"train", "--data", p("d.csv"), "--out-model", p("m.json"), "--seed", "4"},
       {"train", "--config", p("m.json.metrics.json"), "--data", p("d.csv"), "--out-model", p("m.json")},
       {p("m.json"), p("m.json.metrics.json")}},
      {"grid-search",
       {"grid-search", "--space", p("space.json"), "--seeds", "1", "2", "--data", p("d.csv"), "--out",
        p("g.json"), "--set", "snn.epochs=5", "--set", "eval.k=3", "--jobs", "4"},
       {"grid-search", "--config", p("g.json"), "--data", p("d.csv"), "--out", p("g.json")},
       {p("g.json"), p("g.json.csv")}},
      {"quantize",
       {"quantize", "--model", p("m.json"), "--data", p("d.csv"), "--out", p("q.json")},
       {"quantize", "--config", p("q.json"), "--model", p("m.json"), "--data", p("d.csv"), "--out",
        p("q.json")},
       {p("q.json")}},
      {"encode",
       {"encode", "--in", p("d.csv"), "--normalization-from", p("m.json"), "--tau", "31", "--out",
        p("e.jsonl")},
       {"encode", "--config", p("e.jsonl.meta.json"), "--in", p("d.csv"), "--normalization-from",
        p("m.json"), "--out", p("e.jsonl")},
       {p("e.jsonl"), p("e.jsonl.meta.json")}},
      {"emulate",
       {"emulate", "--qmodel", p("q.json"), "--events", p("e.jsonl"), "--mismatch-cv", "0.2",
        "--mismatch-seed", "11", "--trials", "3", "--out", p("hw.json"), "--spikes-out", p("hw.spikes.jsonl"),
        "--network-out", p("hw.net.json")},
       {"emulate", "--config", p("hw.json"), "--qmodel", p("q.json"), "--events", p("e.jsonl"), "--out",
        p("hw.json"), "--spikes-out", p("hw.spikes.jsonl"), "--network-out", p("hw.net.json"), "--jobs",
        "4"},
       {p("hw.json"), p("hw.spikes.jsonl"), p("hw.net.json")}},
      {"baseline",
       {"baseline", "--data", p("d.csv"), "--out", p("b.json"), "--seed", "3"},
       {"baseline", "--config", p("b.json"), "--data", p("d.csv"), "--out", p("b.json")},
       {p("b.json")}},
      {"report",
       {"report", "--results", p("m.json.metrics.json"), p("b.json"), p("hw.json"), "--out", p("r.json")},
       {"report", "--results", p("m.json.metrics.json"), p("b.json"), p("hw.json"), "--out", p("r.json")},
       {p("r.json"), p("r.json.csv")}},
      {"features",
       {"features", "--band-powers", p("bands.csv"), "--out", p("f.csv")},
       {"features", "--band-powers", p("bands.csv"), "--out", p("f.csv")},
       {p("f.csv")}},
  };

  std::string failed;
  int files = 0;
  for (const auto& st : stages) {
    std::ostringstream out, err;
    if (run_cli(st.first, out, err) != 0) return verdict(false, st.name + " failed: " + err.str());
    std::vector<std::uint64_t> before;
    for (const auto& f : st.outputs) before.push_back(fnv1a(f));
    if (run_cli(st.rerun, out, err) != 0) return verdict(false, st.name + " rerun failed: " + err.str());
    for (std::size_t i = 0; i < st.outputs.size(); ++i) {
      ++files;
      if (fnv1a(st.outputs[i]) != before[i]) failed += " " + fs::path(st.outputs[i]).filename().string();
    }
  }
  return verdict(failed.empty(), failed.empty()
                                     ? std::to_string(files) + " output files identical across " +
                                           std::to_string(stages.size()) + " stages"
                                     : "differing outputs:" + failed);
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;  // 0 = no runtime limit
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "original-dataset reproduction", 600, original_dataset_reproduction},
      {2, "quantization fidelity", 60, quantization_fidelity},
      {3, "emulator/software agreement", 120, emulator_agreement},
      {4, "hardware-variability envelope", 300, variability_envelope},
      {5, "burst decoder oracle equivalence", 0, decoder_oracle},
      {6, "encoder properties", 0, encoder_properties},
      {7, "quantization properties", 0, quantization_properties},
      {8, "delta-rule and logistic-regression sanity", 0, learning_sanity},
      {9, "determinism", 0, determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = verdict(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_s > 0 && secs > c.budget_s && o.status == Outcome::kPass) {
      o = verdict(false, o.detail + "; over the " + fmt("%.0f", c.budget_s) + " s budget");
    }
    const char* tag = o.status == Outcome::kPass ? "PASS" : o.status == Outcome::kSkip ? "SKIP" : "FAIL";
    std::printf("criterion %d %s [%s] %s (%.1f s)\n", c.id, tag, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += o.status == Outcome::kFail ? 1 : 0;
  }
  return failures == 0 ? 0 : 1;
}
