#include "cogload/hwemu.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "cogload/error.hpp"
#include "cogload/rng.hpp"

namespace cogload {

std::string to_string(SynapseKind kind) {
  switch (kind) {
    case SynapseKind::kAmpa: return "AMPA";
    case SynapseKind::kGabaA: return "GABA_A";
    case SynapseKind::kGabaB: return "GABA_B";
  }
  return "?";
}

SynapseType default_synapse_type(SynapseKind kind) {
  switch (kind) {
    case SynapseKind::kAmpa: return {kind, 0.005, +1};
    case SynapseKind::kGabaA: return {kind, 0.005, -1};
    case SynapseKind::kGabaB: return {kind, 0.100, -1};
  }
  throw ConfigError("unknown synapse kind");
}

void MismatchConfig::validate() const {
  if (!(cv_weight >= 0 && cv_weight < 1)) throw ConfigError("mismatch cv_weight must be in [0, 1)");
  if (!(cv_tau >= 0 && cv_tau < 1)) throw ConfigError("mismatch cv_tau must be in [0, 1)");
}

void EmuModelParams::validate() const {
  if (pop_size < 1) throw ConfigError("hwemu.pop_size must be >= 1");
  for (double tau : {tau_mem, tau_ampa, tau_gaba_a, tau_gaba_b}) {
    if (!(tau > 0)) throw ConfigError("hwemu time constants must be > 0");
  }
  if (!(refractory >= 0)) throw ConfigError("hwemu.refractory must be >= 0");
  if (!std::isfinite(base_efficacy)) throw ConfigError("hwemu.base_efficacy must be finite");
  if (!(gaba_b_ratio >= 0)) throw ConfigError("hwemu.gaba_b_ratio must be >= 0");
}

void EmuRunParams::validate() const {
  if (!(trial_duration > 0 && pre_buffer > 0 && post_buffer > 0 && sim_dt > 0)) {
    throw ConfigError("emulator durations must be > 0");
  }
  if (sim_dt > 1e-3) throw ConfigError("emulator sim_dt must be <= 1 ms");
}

namespace {

double jitter(double nominal, double cv, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double v = nominal * (1.0 + cv * gauss(rng));
  return std::max(v, 0.01 * nominal);
}

struct Target {
  int post;
  int kind;
  double efficacy;
};

// Shared fixed-step core used by run_trial and the calibration routine.
struct Simulator {
  std::vector<NeuronParams> neurons;
  std::vector<std::vector<Target>> from_generator;
  std::vector<std::vector<Target>> from_neuron;
  double dt = 1e-4;

  // input[s] lists the generators firing at step s. Returns (neuron, step).
  std::vector<std::pair<int, long>> run(const std::vector<std::vector<int>>& input,
                                        long n_steps) const {
    const auto n = neurons.size();
    std::vector<double> v(n, 0.0);
    std::vector<std::array<double, kNumSynapseKinds>> current(n, {0.0, 0.0, 0.0});
    std::vector<std::array<double, kNumSynapseKinds>> decay(n);
    std::vector<double> k_mem(n);
    std::vector<long> ref_steps(n);
    std::vector<long> ref_until(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < kNumSynapseKinds; ++k) {
        decay[i][k] = std::exp(-dt / neurons[i].tau_syn[k]);
      }
      k_mem[i] = dt / neurons[i].tau_mem;
      ref_steps[i] = std::lround(neurons[i].refractory / dt);
    }
    std::vector<std::pair<int, long>> spikes;
    std::vector<int> fired;
    std::vector<int> fired_prev;
    for (long s = 0; s < n_steps; ++s) {
      if (static_cast<std::size_t>(s) < input.size()) {
        for (int g : input[static_cast<std::size_t>(s)]) {
          for (const auto& t : from_generator[static_cast<std::size_t>(g)]) {
            current[static_cast<std::size_t>(t.post)][static_cast<std::size_t>(t.kind)] +=
                t.efficacy;
          }
        }
      }
      for (int pre : fired_prev) {
        for (const auto& t : from_neuron[static_cast<std::size_t>(pre)]) {
          current[static_cast<std::size_t>(t.post)][static_cast<std::size_t>(t.kind)] +=
              t.efficacy;
        }
      }
      fired.clear();
      for (std::size_t i = 0; i < n; ++i) {
        auto& c = current[i];
        if (s > ref_until[i]) {
          const double drive = c[0] - c[1] - c[2];
          v[i] += k_mem[i] * (drive - v[i]);
          if (v[i] >= 1.0) {
            spikes.emplace_back(static_cast<int>(i), s);
            fired.push_back(static_cast<int>(i));
            v[i] = 0.0;
            ref_until[i] = s + ref_steps[i];
          }
        }
        for (std::size_t k = 0; k < kNumSynapseKinds; ++k) c[k] *= decay[i][k];
      }
      std::swap(fired, fired_prev);
    }
    return spikes;
  }
};

Simulator make_simulator(const ChipNetwork& net, double dt) {
  Simulator sim;
  sim.neurons = net.neurons;
  sim.dt = dt;
  sim.from_generator.resize(static_cast<std::size_t>(net.n_generators));
  sim.from_neuron.resize(net.neurons.size());
  for (const auto& syn : net.synapses) {
    const Target t{syn.post, static_cast<int>(syn.kind), syn.efficacy};
    if (syn.pre >= 0) {
      sim.from_generator[static_cast<std::size_t>(syn.pre)].push_back(t);
    } else {
      sim.from_neuron[static_cast<std::size_t>(-syn.pre - 1)].push_back(t);
    }
  }
  return sim;
}

NeuronParams nominal_neuron(const EmuModelParams& model) {
  NeuronParams p;
  p.tau_mem = model.tau_mem;
  p.tau_syn = {model.tau_ampa, model.tau_gaba_a, model.tau_gaba_b};
  p.refractory = model.refractory;
  return p;
}

}  // namespace

ChipNetwork build_network(const QuantizedWeights& qw, const MismatchConfig& mm,
                          const EmuModelParams& model) {
  mm.validate();
  model.validate();
  if (qw.w_int.rows() != 2) throw DataError("emulator needs a 2-row weight matrix");
  for (int w : qw.w_int.values()) {
    if (w < -kInt3Max || w > kInt3Max) throw DataError("weight outside [-3, 3]");
  }
  const double base =
      model.base_efficacy > 0 ? model.base_efficacy : calibrate_base_efficacy(model);

  ChipNetwork net;
  net.n_generators = static_cast<int>(qw.w_int.cols());
  net.pop_size = model.pop_size;
  net.w_int = qw.w_int;
  auto rng = make_rng(mm.seed, RngStream::kMismatch);

  const auto nominal = nominal_neuron(model);
  const int n_neurons = 2 * model.pop_size;
  net.neurons.resize(static_cast<std::size_t>(n_neurons));
  for (auto& p : net.neurons) {
    p.tau_mem = jitter(nominal.tau_mem, mm.cv_tau, rng);
    for (std::size_t k = 0; k < kNumSynapseKinds; ++k) {
      p.tau_syn[k] = jitter(nominal.tau_syn[k], mm.cv_tau, rng);
    }
    p.refractory = nominal.refractory;
  }

  for (int pop = 0; pop < 2; ++pop) {
    for (int j = 0; j < net.n_generators; ++j) {
      const int w = qw.w_int(static_cast<std::size_t>(pop), static_cast<std::size_t>(j));
      const auto kind = w > 0 ? SynapseKind::kAmpa : SynapseKind::kGabaA;
      for (int k = 0; k < model.pop_size; ++k) {
        const int post = pop * model.pop_size + k;
        for (int copy = 0; copy < std::abs(w); ++copy) {
          net.synapses.push_back({j, post, kind, jitter(base, mm.cv_weight, rng)});
        }
      }
    }
  }
  if (model.cross_inhibition && model.gaba_b_ratio > 0) {
    const double gaba_b = base * model.gaba_b_ratio;
    for (int pre = 0; pre < n_neurons; ++pre) {
      const int other = 1 - pre / model.pop_size;
      for (int k = 0; k < model.pop_size; ++k) {
        const int post = other * model.pop_size + k;
        net.synapses.push_back(
            {-pre - 1, post, SynapseKind::kGabaB, jitter(gaba_b, mm.cv_weight, rng)});
      }
    }
  }
  return net;
}

TrialOutput run_trial(const ChipNetwork& net, const SpikeEventList& events,
                      const EmuRunParams& params) {
  params.validate();
  const double total = params.pre_buffer + params.trial_duration + params.post_buffer;
  const long n_steps = std::lround(total / params.sim_dt);
  std::vector<std::vector<int>> input(static_cast<std::size_t>(n_steps));
  for (const auto& e : events) {
    if (!(e.time_s > 0.0 && e.time_s <= params.trial_duration + 1e-12)) {
      throw DataError("input event at " + std::to_string(e.time_s) +
                      " s outside the stimulus window");
    }
    if (e.unit < 0 || e.unit >= net.n_generators) {
      throw DataError("input event for unknown generator " + std::to_string(e.unit));
    }
    const long s = std::lround((params.pre_buffer + e.time_s) / params.sim_dt);
    input[static_cast<std::size_t>(s)].push_back(e.unit);
  }
  const auto sim = make_simulator(net, params.sim_dt);
  TrialOutput out;
  for (const auto& [neuron, step] : sim.run(input, n_steps)) {
    const double t = static_cast<double>(step) * params.sim_dt - params.pre_buffer;
    out.spikes[static_cast<std::size_t>(net.population_of(neuron))].push_back(
        {neuron % net.pop_size, t});
  }
  return out;
}

PopSpikes stimulus_window(const PopSpikes& spikes, double trial_duration) {
  PopSpikes out;
  for (std::size_t p = 0; p < 2; ++p) {
    for (const auto& s : spikes[p]) {
      if (s.t_s >= 0.0 && s.t_s <= trial_duration) out[p].push_back(s);
    }
  }
  return out;
}

std::vector<TrialOutput> repeat_trials(const NetworkBuilder& builder,
                                       const SpikeEventList& events,
                                       const std::vector<std::uint64_t>& seeds,
                                       const EmuRunParams& params) {
  if (seeds.empty()) throw ConfigError("repeat_trials needs at least one seed");
  std::vector<TrialOutput> outputs;
  outputs.reserve(seeds.size());
  for (auto seed : seeds) outputs.push_back(run_trial(builder(seed), events, params));
  return outputs;
}

double single_synapse_ratio(const EmuModelParams& model, double efficacy,
                            double input_rate_hz, double duration_s) {
  const double dt = 1e-4;
  Simulator sim;
  sim.dt = dt;
  sim.neurons = {nominal_neuron(model)};
  sim.from_generator = {{Target{0, static_cast<int>(SynapseKind::kAmpa), efficacy}}};
  sim.from_neuron.resize(1);
  const long n_steps = std::lround(duration_s / dt);
  std::vector<std::vector<int>> input(static_cast<std::size_t>(n_steps));
  int n_in = 0;
  for (int i = 1;; ++i) {
    const long s = std::lround(i / input_rate_hz / dt);
    if (s >= n_steps) break;
    input[static_cast<std::size_t>(s)].push_back(0);
    ++n_in;
  }
  if (n_in == 0) throw ConfigError("calibration window holds no input spikes");
  return static_cast<double>(sim.run(input, n_steps).size()) / n_in;
}

double calibrate_base_efficacy(const EmuModelParams& model, double input_rate_hz,
                               double target_ratio, double duration_s) {
  if (!(input_rate_hz > 0 && target_ratio > 0 && target_ratio <= 1 && duration_s > 0)) {
    throw ConfigError("invalid calibration target");
  }
  double lo = 0.0;
  double hi = 1.0;
  while (single_synapse_ratio(model, hi, input_rate_hz, duration_s) < target_ratio) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw NumericError("calibration did not reach the target ratio");
  }
  for (int it = 0; it < 50; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (single_synapse_ratio(model, mid, input_rate_hz, duration_s) >= target_ratio) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

nlohmann::json network_to_json(const ChipNetwork& net) {
  auto neurons = nlohmann::json::array();
  for (std::size_t i = 0; i < net.neurons.size(); ++i) {
    const auto& p = net.neurons[i];
    const int pop = net.population_of(static_cast<int>(i));
    neurons.push_back({{"id", i},
                       {"pop", pop},
                       {"core", net.core_ids[static_cast<std::size_t>(pop)]},
                       {"tau_mem", p.tau_mem},
                       {"tau_ampa", p.tau_syn[0]},
                       {"tau_gaba_a", p.tau_syn[1]},
                       {"tau_gaba_b", p.tau_syn[2]},
                       {"refractory", p.refractory}});
  }
  auto synapses = nlohmann::json::array();
  for (const auto& s : net.synapses) {
    const std::string pre =
        s.pre >= 0 ? "gen" + std::to_string(s.pre) : "n" + std::to_string(-s.pre - 1);
    synapses.push_back({pre, s.post, to_string(s.kind), s.efficacy});
  }
  return {{"generators", net.n_generators},
          {"pop_size", net.pop_size},
          {"cores", net.core_ids},
          {"w_int", matrix_to_json(net.w_int)},
          {"neurons", neurons},
          {"synapse_columns", {"pre", "post", "type", "efficacy"}},
          {"synapses", synapses}};
}

nlohmann::json trial_output_to_json(const TrialOutput& out) {
  std::vector<int> pop;
  std::vector<int> neuron;
  std::vector<double> t;
  for (int p = 0; p < 2; ++p) {
    for (const auto& s : out.spikes[static_cast<std::size_t>(p)]) {
      pop.push_back(p);
      neuron.push_back(s.neuron);
      t.push_back(s.t_s);
    }
  }
  return {{"pop", pop}, {"neuron", neuron}, {"t_s", t}};
}

}  // namespace cogload
