#include "cogload/baseline.hpp"

#include <cmath>

#include "cogload/error.hpp"
#include "cogload/parallel.hpp"

namespace cogload {

namespace {

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

LogRegData to_logreg_data(const Dataset& ds) {
  LogRegData data;
  data.d = kNumFeatures;
  data.x.reserve(ds.size() * kNumFeatures);
  for (const auto& r : ds.records) {
    data.x.insert(data.x.end(), r.features.begin(), r.features.end());
    data.y.push_back(r.label);
  }
  return data;
}

double loss_and_gradient(const LogRegData& data, std::span<const double> w, double b, double c,
                         std::vector<double>& grad) {
  const auto n = data.n();
  const auto d = data.d;
  grad.assign(d + 1, 0.0);
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* xi = data.x.data() + i * d;
    double z = b;
    for (std::size_t j = 0; j < d; ++j) z += w[j] * xi[j];
    const double y = data.y[i];
    // -[y log s(z) + (1-y) log(1 - s(z))] = softplus(z) - y z
    loss += softplus(z) - y * z;
    const double r = sigmoid(z) - y;
    for (std::size_t j = 0; j < d; ++j) grad[j] += r * xi[j];
    grad[d] += r;
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  loss *= inv_n;
  for (auto& g : grad) g *= inv_n;
  const double reg = 1.0 / (c * static_cast<double>(n));
  for (std::size_t j = 0; j < d; ++j) {
    loss += 0.5 * reg * w[j] * w[j];
    grad[j] += reg * w[j];
  }
  return loss;
}

LogRegModel train_logreg(const LogRegData& data, double c, const LogRegOptions& opt) {
  if (!(c > 0)) throw ConfigError("logreg: C must be > 0");
  if (opt.max_iter < 1 || !(opt.tol > 0)) throw ConfigError("logreg: bad solver options");
  int pos = 0;
  for (int y : data.y) pos += y;
  if (pos == 0 || pos == static_cast<int>(data.n())) {
    throw DataError("logreg: need at least one record of each class");
  }
  const auto d = data.d;
  LogRegModel model;
  model.c = c;
  model.w.assign(d, 0.0);
  std::vector<double> grad;
  std::vector<double> trial_grad;
  std::vector<double> w_new(d);
  double loss = loss_and_gradient(data, model.w, model.b, c, grad);
  double step = 1.0;
  for (int it = 0; it < opt.max_iter; ++it) {
    const double gnorm = norm(grad);
    model.grad_norm = gnorm;
    if (gnorm < opt.tol) {
      model.converged = true;
      break;
    }
    const double g2 = gnorm * gnorm;
    step *= 2.0;
    for (;;) {
      for (std::size_t j = 0; j < d; ++j) w_new[j] = model.w[j] - step * grad[j];
      const double b_new = model.b - step * grad[d];
      const double new_loss = loss_and_gradient(data, w_new, b_new, c, trial_grad);
      if (new_loss <= loss - 0.5 * step * g2) {
        model.w = w_new;
        model.b = b_new;
        loss = new_loss;
        grad.swap(trial_grad);
        break;
      }
      step *= 0.5;
      if (step < 1e-20) throw NumericError("logreg: line search failed");
    }
    model.iterations = it + 1;
  }
  if (!model.converged) model.grad_norm = norm(grad);
  if (!std::isfinite(loss)) throw NumericError("logreg: non-finite loss");
  return model;
}

LogRegModel train_logreg(const Dataset& normalized, double c, const LogRegOptions& opt) {
  if (normalized.empty()) throw DataError("logreg: empty dataset");
  return train_logreg(to_logreg_data(normalized), c, opt);
}

int predict(const LogRegModel& model, std::span<const double> x) {
  double z = model.b;
  for (std::size_t j = 0; j < model.w.size(); ++j) z += model.w[j] * x[j];
  return z > 0 ? 1 : 0;
}

std::vector<int> predict(const LogRegModel& model, const Dataset& normalized) {
  std::vector<int> out;
  out.reserve(normalized.size());
  for (const auto& r : normalized.records) out.push_back(predict(model, r.features));
  return out;
}

std::vector<LogRegGridEntry> logreg_grid(const Dataset& ds, const std::vector<double>& c_grid,
                                         int k, std::uint64_t seed, const LogRegOptions& opt,
                                         int jobs) {
  std::vector<LogRegGridEntry> entries(c_grid.size());
  parallel_for(c_grid.size(), jobs, [&](std::size_t i) {
    const double c = c_grid[i];
    entries[i].c = c;
    entries[i].cv = run_cv(
        ds, [&](const Dataset& train, const Dataset& test) {
          return predict(train_logreg(train, c, opt), test);
        },
        k, seed);
  });
  return entries;
}

nlohmann::json to_json(const LogRegModel& model) {
  return {{"w", model.w},
          {"b", model.b},
          {"c", model.c},
          {"iterations", model.iterations},
          {"converged", model.converged},
          {"grad_norm", model.grad_norm}};
}

}  // namespace cogload
