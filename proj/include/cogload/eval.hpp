#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "cogload/data.hpp"

namespace cogload {

// Binary metrics with class 1 ("hard") as the positive class. Ratios whose
// denominator is zero are reported as 0 and flagged.
struct Metrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  // confusion[true][pred]
  std::array<std::array<int, 2>, 2> confusion{};
  bool precision_undefined = false;
  bool recall_undefined = false;
  bool f1_undefined = false;

  int total() const;
};

// Throws DataError on empty or unequal-length input or labels outside {0,1}.
Metrics compute_metrics(std::span<const int> y_true, std::span<const int> y_pred);

struct MetricValues {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Arithmetic mean and population standard deviation (ddof = 0) over runs.
struct Aggregate {
  MetricValues mean;
  MetricValues std;
};

Aggregate aggregate(std::span<const Metrics> runs);

struct CVResult {
  std::vector<Metrics> per_fold;
  Aggregate summary;
  std::uint64_t seed = 0;
};

// Trains on `train` and returns predictions for every record of `test`. Both
// splits arrive z-scored with statistics from `train`.
using FoldRunner =
    std::function<std::vector<int>(const Dataset& train, const Dataset& test)>;

// Stratified k-fold CV: per fold fit normalization on the train split, apply
// it to both splits, run the model and score the test split. Folds may run on
// `jobs` threads; results are identical for any job count.
CVResult run_cv(const Dataset& ds, const FoldRunner& runner, int k, std::uint64_t seed,
                int jobs = 1);

nlohmann::json to_json(const Metrics& m);
nlohmann::json to_json(const MetricValues& v);
nlohmann::json to_json(const Aggregate& a);
nlohmann::json to_json(const CVResult& cv);

}  // namespace cogload
