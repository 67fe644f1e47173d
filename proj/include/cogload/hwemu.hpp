#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cogload/decode.hpp"
#include "cogload/encoder.hpp"
#include "cogload/matrix.hpp"
#include "cogload/quant.hpp"

namespace cogload {

enum class SynapseKind { kAmpa = 0, kGabaA = 1, kGabaB = 2 };
inline constexpr std::size_t kNumSynapseKinds = 3;

std::string to_string(SynapseKind kind);

struct SynapseType {
  SynapseKind kind = SynapseKind::kAmpa;
  double tau_syn = 0.005;  // seconds
  int sign = +1;
};

SynapseType default_synapse_type(SynapseKind kind);

// Neuron parameters after mismatch. Membrane potential is normalized:
// rest and reset 0, threshold 1.
struct NeuronParams {
  double tau_mem = 0.020;
  std::array<double, kNumSynapseKinds> tau_syn{0.005, 0.005, 0.100};
  double refractory = 0.001;
};

// pre >= 0 is an input generator index; pre < 0 encodes neuron (-pre - 1),
// using the global neuron index pop * pop_size + k.
struct Synapse {
  int pre = 0;
  int post = 0;
  SynapseKind kind = SynapseKind::kAmpa;
  double efficacy = 0.0;
};

struct MismatchConfig {
  double cv_weight = 0.2;
  double cv_tau = 0.2;
  std::uint64_t seed = 0;

  // Throws ConfigError unless both CVs lie in [0, 1).
  void validate() const;
};

// Nominal substrate parameters; mismatch perturbs these per neuron/synapse.
struct EmuModelParams {
  int pop_size = 20;
  double tau_mem = 0.020;
  double tau_ampa = 0.005;
  double tau_gaba_a = 0.005;
  double tau_gaba_b = 0.100;
  double refractory = 0.001;
  double base_efficacy = 0.0;  // <= 0 means "run calibrate_base_efficacy"
  // Efficacy of each cross-population GABA_B synapse as a multiple of base.
  double gaba_b_ratio = 1.0;
  bool cross_inhibition = true;

  void validate() const;
};

struct EmuRunParams {
  double trial_duration = 0.16;
  double pre_buffer = 0.5;
  double post_buffer = 0.5;
  double sim_dt = 1e-4;

  void validate() const;
};

struct ChipNetwork {
  int n_generators = 0;
  int pop_size = 0;
  std::array<int, 2> core_ids{1, 2};
  std::vector<NeuronParams> neurons;  // 2 * pop_size, population-major
  std::vector<Synapse> synapses;
  MatrixI w_int;

  int population_of(int neuron) const { return neuron / pop_size; }
};

// Expands int3 weights into parallel synapses: |w_ij| AMPA (w > 0) or GABA_A
// (w < 0) synapses from generator j to every neuron of population i, plus one
// GABA_B synapse for every ordered cross-population neuron pair. Efficacies
// are base * (1 + N(0, cv_weight)) and time constants tau * (1 + N(0, cv_tau)),
// both clamped positive; mismatch is drawn from mm.seed.
ChipNetwork build_network(const QuantizedWeights& qw, const MismatchConfig& mm,
                          const EmuModelParams& model);

// Output spikes per population, times relative to stimulus onset (can be
// negative in the pre-buffer or exceed trial_duration in the post-buffer).
struct TrialOutput {
  PopSpikes spikes;
};

// Fixed-step simulation over pre_buffer + trial_duration + post_buffer.
// Synaptic currents decay exponentially; the membrane follows
//   tau_mem dV/dt = -V + I_ampa - I_gaba_a - I_gaba_b
// with forward Euler, spike at V >= 1, reset to 0 and a refractory hold.
// Spikes reach their targets on the next step. Throws DataError for an event
// outside (0, trial_duration] or an unknown generator.
TrialOutput run_trial(const ChipNetwork& net, const SpikeEventList& events,
                      const EmuRunParams& params);

// Keeps spikes with 0 <= t <= trial_duration.
PopSpikes stimulus_window(const PopSpikes& spikes, double trial_duration);

using NetworkBuilder = std::function<ChipNetwork(std::uint64_t seed)>;

// One run per seed, network rebuilt (mismatch re-sampled) for each.
std::vector<TrialOutput> repeat_trials(const NetworkBuilder& builder,
                                       const SpikeEventList& events,
                                       const std::vector<std::uint64_t>& seeds,
                                       const EmuRunParams& params);

// Finds the smallest efficacy at which a single AMPA synapse driven by a
// regular `input_rate_hz` train elicits `target_ratio` output spikes per
// input spike (bisection on the nominal neuron).
double calibrate_base_efficacy(const EmuModelParams& model, double input_rate_hz = 100.0,
                               double target_ratio = 1.0, double duration_s = 2.0);

// Output spikes per input spike for one AMPA synapse of `efficacy`.
double single_synapse_ratio(const EmuModelParams& model, double efficacy,
                            double input_rate_hz, double duration_s);

nlohmann::json network_to_json(const ChipNetwork& net);
nlohmann::json trial_output_to_json(const TrialOutput& out);

}  // namespace cogload
