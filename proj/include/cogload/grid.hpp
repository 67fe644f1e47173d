#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "cogload/data.hpp"
#include "cogload/eval.hpp"
#include "cogload/snn.hpp"

namespace cogload {

// One point of the classifier hyperparameter space.
struct SnnHyper {
  Arch arch = Arch::kSingle;
  double tau = 31.0;
  double eta = 0.01;
  int epochs = 25;
  double gamma = 0.01;
  double beta = 0.9;
  double theta_out = 1.0;
  double encoder_gain = kDefaultEncoderGain;
  int hidden_scale = 10;
  double fc1_mean = 0.4;
  double p_conn = 0.5;
  double init_std = 0.1;

  bool operator==(const SnnHyper&) const = default;
};

LifEncoderParams encoder_params(const SnnHyper& h);
OutputLifParams output_params(const SnnHyper& h);

// Builds the network from `seed`, encodes the (normalized) train split and
// runs delta-rule training. The model records the train normalization.
SnnModel fit_snn(const SnnHyper& h, const Dataset& normalized_train, std::uint64_t seed);

struct SnnCV {
  CVResult cv;
  std::vector<SnnModel> fold_models;
  std::size_t best_fold = 0;  // highest test accuracy, earliest on ties
};

// Stratified k-fold CV with `seed` driving both the split and the model.
SnnCV cross_validate_snn(const Dataset& ds, const SnnHyper& h, int k, std::uint64_t seed,
                         int jobs = 1);

// Cartesian product of value lists; fields not listed keep `base`.
struct GridSpace {
  SnnHyper base;
  std::vector<double> tau;
  std::vector<double> eta;
  std::vector<int> epochs;
  std::vector<double> gamma;
  std::vector<double> beta;
  std::vector<int> hidden_scale;
  std::vector<double> fc1_mean;
  std::vector<double> p_conn;

  std::vector<SnnHyper> expand() const;
  std::size_t size() const;
};

GridSpace reference_single_space();  // 11 x 3 x 3 x 3 = 297
GridSpace reference_hidden_space();  // 6 x 4 x 3 x 3 x 3 = 648

inline const std::vector<std::uint64_t> kHiddenSeeds = {0, 21, 42};
// The twelve seeds are not listed; this set includes the reported best (31).
inline const std::vector<std::uint64_t> kSingleLayerSeeds = {0,  7,  12, 16, 21, 31,
                                                             42, 50, 64, 77, 88, 99};

GridSpace grid_space_from_json(const nlohmann::json& j, Arch arch);
nlohmann::json to_json(const GridSpace& space);
nlohmann::json to_json(const SnnHyper& h);

struct GridResult {
  SnnHyper hyper;
  double score = 0.0;  // mean over seeds of the CV mean accuracy
  std::vector<double> per_seed_accuracy;
  MetricValues mean;   // metric means averaged over seeds
  std::size_t index = 0;  // position in the expanded space
};

// Exhaustive evaluation, ranked by score (descending, stable on ties).
std::vector<GridResult> grid_search(const GridSpace& space, const Dataset& ds, int k,
                                    const std::vector<std::uint64_t>& seeds, int jobs = 1);

nlohmann::json to_json(const GridResult& r);
std::string grid_results_csv(const std::vector<GridResult>& results);

}  // namespace cogload
