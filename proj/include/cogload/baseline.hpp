#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "cogload/data.hpp"
#include "cogload/eval.hpp"

namespace cogload {

struct LogRegModel {
  std::vector<double> w;
  double b = 0.0;
  double c = 1.0;  // inverse regularization strength
  int iterations = 0;
  bool converged = false;
  double grad_norm = 0.0;
};

struct LogRegOptions {
  int max_iter = 5000;
  double tol = 1e-8;
};

inline const std::vector<double> kDefaultCGrid = {0.01, 0.1, 1.0, 10.0, 100.0};

// Design matrix view: n rows of d features.
struct LogRegData {
  std::vector<double> x;  // row-major n x d
  std::vector<int> y;
  std::size_t d = 0;
  std::size_t n() const { return y.size(); }
};

LogRegData to_logreg_data(const Dataset& ds);

// Mean logistic loss + ||w||^2 / (2 c n); the bias is not penalized.
// `grad` receives d entries for w followed by the bias derivative.
double loss_and_gradient(const LogRegData& data, std::span<const double> w, double b, double c,
                         std::vector<double>& grad);

// Full-batch gradient descent with Armijo backtracking, stopping when the
// gradient norm drops below tol. Non-convergence is reported in the model,
// not thrown. Throws DataError unless both classes are present.
LogRegModel train_logreg(const Dataset& normalized, double c, const LogRegOptions& opt = {});
LogRegModel train_logreg(const LogRegData& data, double c, const LogRegOptions& opt = {});

// 1 iff w.x + b > 0.
int predict(const LogRegModel& model, std::span<const double> x);
std::vector<int> predict(const LogRegModel& model, const Dataset& normalized);

struct LogRegGridEntry {
  double c = 1.0;
  CVResult cv;
};

// Stratified k-fold CV for every c; entries ordered as `c_grid`.
std::vector<LogRegGridEntry> logreg_grid(const Dataset& ds, const std::vector<double>& c_grid,
                                         int k, std::uint64_t seed, const LogRegOptions& opt,
                                         int jobs = 1);

nlohmann::json to_json(const LogRegModel& model);

}  // namespace cogload
