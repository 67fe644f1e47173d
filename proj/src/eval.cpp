#include "cogload/eval.hpp"

#include <cmath>

#include "cogload/error.hpp"
#include "cogload/parallel.hpp"

namespace cogload {

int Metrics::total() const {
  return confusion[0][0] + confusion[0][1] + confusion[1][0] + confusion[1][1];
}

Metrics compute_metrics(std::span<const int> y_true, std::span<const int> y_pred) {
  if (y_true.empty()) throw DataError("metrics: empty input");
  if (y_true.size() != y_pred.size()) throw DataError("metrics: length mismatch");
  Metrics m;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const int t = y_true[i];
    const int p = y_pred[i];
    if ((t != 0 && t != 1) || (p != 0 && p != 1)) {
      throw DataError("metrics: label outside {0,1}");
    }
    ++m.confusion[t][p];
  }
  const double tp = m.confusion[1][1];
  const double fp = m.confusion[0][1];
  const double fn = m.confusion[1][0];
  const double tn = m.confusion[0][0];
  m.accuracy = (tp + tn) / static_cast<double>(y_true.size());
  if (tp + fp > 0) {
    m.precision = tp / (tp + fp);
  } else {
    m.precision_undefined = true;
  }
  if (tp + fn > 0) {
    m.recall = tp / (tp + fn);
  } else {
    m.recall_undefined = true;
  }
  if (m.precision + m.recall > 0) {
    m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  } else {
    m.f1_undefined = true;
  }
  return m;
}

Aggregate aggregate(std::span<const Metrics> runs) {
  Aggregate a;
  if (runs.empty()) return a;
  const auto n = static_cast<double>(runs.size());
  auto stat = [&](double Metrics::*field, double& mean, double& sd) {
    double sum = 0.0;
    for (const auto& m : runs) sum += m.*field;
    mean = sum / n;
    double ss = 0.0;
    for (const auto& m : runs) ss += (m.*field - mean) * (m.*field - mean);
    sd = std::sqrt(ss / n);
  };
  stat(&Metrics::accuracy, a.mean.accuracy, a.std.accuracy);
  stat(&Metrics::precision, a.mean.precision, a.std.precision);
  stat(&Metrics::recall, a.mean.recall, a.std.recall);
  stat(&Metrics::f1, a.mean.f1, a.std.f1);
  return a;
}

CVResult run_cv(const Dataset& ds, const FoldRunner& runner, int k, std::uint64_t seed,
                int jobs) {
  const auto folds = stratified_kfold(ds, k, seed);
  CVResult result;
  result.seed = seed;
  result.per_fold.resize(folds.size());
  parallel_for(folds.size(), jobs, [&](std::size_t f) {
    const auto train_raw = ds.subset(folds[f].train);
    const auto test_raw = ds.subset(folds[f].test);
    const auto params = zscore_fit(train_raw);
    const auto train = zscore_apply(train_raw, params);
    const auto test = zscore_apply(test_raw, params);
    const auto predictions = runner(train, test);
    result.per_fold[f] = compute_metrics(test.labels(), predictions);
  });
  result.summary = aggregate(result.per_fold);
  return result;
}

nlohmann::json to_json(const Metrics& m) {
  nlohmann::json j = {{"accuracy", m.accuracy},
                      {"precision", m.precision},
                      {"recall", m.recall},
                      {"f1", m.f1},
                      {"confusion", m.confusion}};
  if (m.precision_undefined || m.recall_undefined || m.f1_undefined) {
    j["undefined"] = {{"precision", m.precision_undefined},
                      {"recall", m.recall_undefined},
                      {"f1", m.f1_undefined}};
  }
  return j;
}

nlohmann::json to_json(const MetricValues& v) {
  return {{"accuracy", v.accuracy}, {"precision", v.precision}, {"recall", v.recall},
          {"f1", v.f1}};
}

nlohmann::json to_json(const Aggregate& a) {
  return {{"mean", to_json(a.mean)}, {"std", to_json(a.std)}};
}

nlohmann::json to_json(const CVResult& cv) {
  auto folds = nlohmann::json::array();
  for (const auto& m : cv.per_fold) folds.push_back(to_json(m));
  return {{"seed", cv.seed}, {"per_fold", folds}, {"summary", to_json(cv.summary)}};
}

}  // namespace cogload
