#include <doctest.h>

#include <map>

#include "cogload/error.hpp"
#include "cogload/hw_eval.hpp"
#include "cogload/hwemu.hpp"

using namespace cogload;

namespace {

QuantizedWeights reference_weights() {
  QuantizedWeights q{MatrixI(2, 5), 2.5};
  const int w[2][5] = {{0, -1, -1, 3, -2}, {0, 1, 1, -3, 2}};
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 5; ++j) q.w_int(i, j) = w[i][j];
  }
  return q;
}

MismatchConfig no_mismatch() { return {0.0, 0.0, 0}; }

EmuModelParams fixed_model() {
  EmuModelParams m;
  m.base_efficacy = 6.5;
  return m;
}

int count_in_window(const TrialOutput& out, int pop, double duration = 0.16) {
  return static_cast<int>(stimulus_window(out.spikes, duration)[static_cast<std::size_t>(pop)].size());
}

SpikeEventList regular_events(std::initializer_list<int> units) {
  SpikeEventList ev;
  for (int step = 0; step < 16; ++step) {
    for (int u : units) ev.push_back({u, (step + 1) * 0.01});
  }
  return ev;
}

}  // namespace

TEST_CASE("synapse expansion follows the integer weights") {
  const auto q = reference_weights();
  const auto net = build_network(q, no_mismatch(), fixed_model());
  CHECK(net.neurons.size() == 40);
  std::map<std::pair<int, int>, int> signed_count;
  int gaba_b = 0;
  for (const auto& s : net.synapses) {
    if (s.kind == SynapseKind::kGabaB) {
      ++gaba_b;
      CHECK(net.population_of(-s.pre - 1) != net.population_of(s.post));
      continue;
    }
    REQUIRE(s.pre >= 0);
    CHECK(s.efficacy == 6.5);
    const int sgn = default_synapse_type(s.kind).sign;
    signed_count[{net.population_of(s.post), s.pre}] += sgn;
  }
  CHECK(gaba_b == 2 * 20 * 20);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 5; ++j) {
      // Every neuron of the population gets |w| copies.
      CHECK(signed_count[{i, j}] == 20 * q.w_int(static_cast<std::size_t>(i), static_cast<std::size_t>(j)));
    }
  }
  int ampa_from_3 = 0;
  for (const auto& s : net.synapses) {
    if (s.pre == 3 && s.kind == SynapseKind::kAmpa) ++ampa_from_3;
  }
  CHECK(ampa_from_3 == 60);
}

TEST_CASE("mismatch perturbs parameters deterministically") {
  const auto q = reference_weights();
  MismatchConfig mm{0.2, 0.2, 5};
  const auto a = build_network(q, mm, fixed_model());
  const auto b = build_network(q, mm, fixed_model());
  REQUIRE(a.synapses.size() == b.synapses.size());
  bool varied = false;
  for (std::size_t i = 0; i < a.synapses.size(); ++i) {
    CHECK(a.synapses[i].efficacy == b.synapses[i].efficacy);
    CHECK(a.synapses[i].efficacy > 0);
    varied = varied || a.synapses[i].efficacy != 6.5;
  }
  CHECK(varied);
  CHECK(a.neurons[3].tau_mem != doctest::Approx(0.020));
  mm.cv_weight = 1.2;
  CHECK_THROWS_AS(build_network(q, mm, fixed_model()), ConfigError);
}

TEST_CASE("trial simulation") {
  const auto q = reference_weights();
  const auto net = build_network(q, no_mismatch(), fixed_model());
  EmuRunParams run;

  const auto quiet = run_trial(net, {}, run);
  CHECK(quiet.spikes[0].empty());
  CHECK(quiet.spikes[1].empty());

  // Features 1, 2, 4 excite population 1 and inhibit population 0.
  const auto out = run_trial(net, regular_events({1, 2, 4}), run);
  CHECK(count_in_window(out, 1) > count_in_window(out, 0));
  const auto again = run_trial(net, regular_events({1, 2, 4}), run);
  CHECK(again.spikes == out.spikes);

  // Nothing fires before the stimulus, and activity dies out after it.
  for (const auto& pop : out.spikes) {
    for (const auto& s : pop) {
      CHECK(s.t_s >= 0.0);
      CHECK(s.t_s <= run.trial_duration + 0.05);
    }
  }

  CHECK_THROWS_AS(run_trial(net, {{0, 0.2}}, run), DataError);
  CHECK_THROWS_AS(run_trial(net, {{9, 0.05}}, run), DataError);
}

TEST_CASE("cross inhibition never adds spikes") {
  const auto q = reference_weights();
  auto with = fixed_model();
  auto without = fixed_model();
  without.cross_inhibition = false;
  const auto a = build_network(q, no_mismatch(), with);
  const auto b = build_network(q, no_mismatch(), without);
  EmuRunParams run;
  for (const auto& units : {std::initializer_list<int>{3}, {1, 2, 4}, {0, 1, 2, 3, 4}, {2, 3}}) {
    const auto ev = regular_events(units);
    const auto oa = run_trial(a, ev, run);
    const auto ob = run_trial(b, ev, run);
    for (int pop = 0; pop < 2; ++pop) {
      CHECK(oa.spikes[static_cast<std::size_t>(pop)].size() <=
            ob.spikes[static_cast<std::size_t>(pop)].size());
    }
  }
}

TEST_CASE("repeat trials") {
  const auto q = reference_weights();
  const auto ev = regular_events({3});
  EmuRunParams run;
  auto builder = [&](double cv) {
    return [&q, cv](std::uint64_t seed) {
      return build_network(q, {cv, cv, seed}, fixed_model());
    };
  };
  const auto one = repeat_trials(builder(0.2), ev, {7}, run);
  REQUIRE(one.size() == 1);
  CHECK(one[0].spikes == run_trial(build_network(q, {0.2, 0.2, 7}, fixed_model()), ev, run).spikes);

  const auto flat = repeat_trials(builder(0.0), ev, {1, 2, 3, 4, 5}, run);
  for (const auto& o : flat) CHECK(o.spikes == flat[0].spikes);

  const auto noisy = repeat_trials(builder(0.2), ev, {1, 2, 3, 4, 5}, run);
  bool differ = false;
  for (const auto& o : noisy) differ = differ || o.spikes != noisy[0].spikes;
  CHECK(differ);
}

TEST_CASE("base efficacy calibration") {
  EmuModelParams m;
  const double e = calibrate_base_efficacy(m);
  CHECK(single_synapse_ratio(m, e, 100.0, 2.0) >= 1.0);
  CHECK(single_synapse_ratio(m, e * 0.99, 100.0, 2.0) < 1.0);
  const double tenth = calibrate_base_efficacy(m, 100.0, 0.1);
  CHECK(single_synapse_ratio(m, tenth, 100.0, 2.0) == doctest::Approx(0.1).epsilon(0.05));
  CHECK(tenth < e);
}

TEST_CASE("hardware evaluation under zero mismatch is repeatable") {
  const auto q = reference_weights();
  std::vector<TrialEvents> trials = {{"a", 1, regular_events({1, 2, 4})},
                                     {"b", 0, regular_events({3})},
                                     {"c", 0, {}}};
  HwEvalConfig cfg;
  cfg.mismatch = no_mismatch();
  cfg.model = fixed_model();
  const auto r = hw_eval(q, trials, cfg);
  REQUIRE(r.per_trial.size() == 5);
  for (const auto& m : r.per_trial) CHECK(m.accuracy == r.per_trial[0].accuracy);
  CHECK(r.summary.std.accuracy == 0.0);
  CHECK(r.predictions[0] == std::vector<int>{1, 0, 0});

  cfg.n_trials = 1;
  const auto single = hw_eval(q, trials, cfg);
  CHECK(single.summary.mean.accuracy == single.per_trial[0].accuracy);

  trials[0].label.reset();
  CHECK_THROWS_AS(hw_eval(q, trials, cfg), DataError);
}
