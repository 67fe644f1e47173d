#include "cogload/grid.hpp"

#include <algorithm>
#include <cstdio>

#include "cogload/error.hpp"
#include "cogload/parallel.hpp"

namespace cogload {

LifEncoderParams encoder_params(const SnnHyper& h) {
  LifEncoderParams p;
  p.tau = h.tau;
  p.gain = h.encoder_gain;
  p.validate();
  return p;
}

OutputLifParams output_params(const SnnHyper& h) {
  OutputLifParams out;
  out.beta = h.beta;
  out.gamma = h.gamma;
  out.theta_out = h.theta_out;
  out.validate();
  return out;
}

SnnModel fit_snn(const SnnHyper& h, const Dataset& normalized_train, std::uint64_t seed) {
  if (normalized_train.empty()) throw DataError("fit_snn: empty training split");
  SnnModel model;
  model.encoder = encoder_params(h);
  model.seed = seed;
  model.normalization = normalized_train.normalization;
  const auto out = output_params(h);
  if (h.arch == Arch::kSingle) {
    model.net = make_single_layer(out, seed, kNumFeatures, h.init_std);
  } else {
    model.net = make_hidden(h.hidden_scale, h.fc1_mean, h.p_conn, out, seed, kNumFeatures,
                            h.init_std);
  }
  std::vector<SpikeRaster> rasters;
  rasters.reserve(normalized_train.size());
  for (const auto& r : normalized_train.records) rasters.push_back(encode(r.features, model.encoder));
  TrainConfig cfg;
  cfg.eta = h.eta;
  cfg.epochs = h.epochs;
  cfg.seed = seed;
  cfg.tau_encoder = h.tau;
  std::visit([&](auto& net) { train(net, rasters, normalized_train.labels(), cfg); }, model.net);
  return model;
}

SnnCV cross_validate_snn(const Dataset& ds, const SnnHyper& h, int k, std::uint64_t seed,
                         int jobs) {
  const auto folds = stratified_kfold(ds, k, seed);
  SnnCV out;
  out.cv.seed = seed;
  out.cv.per_fold.resize(folds.size());
  out.fold_models.resize(folds.size());
  parallel_for(folds.size(), jobs, [&](std::size_t f) {
    const auto train_raw = ds.subset(folds[f].train);
    const auto params = zscore_fit(train_raw);
    const auto train = zscore_apply(train_raw, params);
    const auto test = zscore_apply(ds.subset(folds[f].test), params);
    out.fold_models[f] = fit_snn(h, train, seed);
    out.cv.per_fold[f] = compute_metrics(test.labels(), predict(out.fold_models[f], test));
  });
  out.cv.summary = aggregate(out.cv.per_fold);
  for (std::size_t f = 1; f < folds.size(); ++f) {
    if (out.cv.per_fold[f].accuracy > out.cv.per_fold[out.best_fold].accuracy) out.best_fold = f;
  }
  return out;
}

std::vector<SnnHyper> GridSpace::expand() const {
  std::vector<SnnHyper> points{base};
  auto axis = [&points](const auto& values, auto field) {
    if (values.empty()) return;
    std::vector<SnnHyper> next;
    next.reserve(points.size() * values.size());
    for (const auto& p : points) {
      for (const auto& v : values) {
        auto q = p;
        q.*field = v;
        next.push_back(q);
      }
    }
    points = std::move(next);
  };
  axis(tau, &SnnHyper::tau);
  axis(eta, &SnnHyper::eta);
  axis(epochs, &SnnHyper::epochs);
  axis(gamma, &SnnHyper::gamma);
  axis(beta, &SnnHyper::beta);
  axis(hidden_scale, &SnnHyper::hidden_scale);
  axis(fc1_mean, &SnnHyper::fc1_mean);
  axis(p_conn, &SnnHyper::p_conn);
  return points;
}

std::size_t GridSpace::size() const {
  std::size_t n = 1;
  for (std::size_t len : {tau.size(), eta.size(), epochs.size(), gamma.size(), beta.size(),
                          hidden_scale.size(), fc1_mean.size(), p_conn.size()}) {
    n *= std::max<std::size_t>(len, 1);
  }
  return n;
}

GridSpace reference_single_space() {
  GridSpace s;
  s.base.arch = Arch::kSingle;
  s.tau = {15, 18, 20, 23, 25, 28, 30, 31, 32, 33, 35};
  s.eta = {0.0001, 0.001, 0.01};
  s.epochs = {20, 25, 30};
  s.gamma = {0.01, 0.05, 0.1};
  return s;
}

GridSpace reference_hidden_space() {
  GridSpace s;
  s.base.arch = Arch::kHidden;
  s.base.eta = 0.001;
  s.base.epochs = 20;
  s.tau = {15, 20, 25, 30, 35, 40};
  s.fc1_mean = {0.1, 0.3, 0.5, 0.7};
  s.p_conn = {0.2, 0.5, 0.8};
  s.gamma = {0.01, 0.05, 0.1};
  s.hidden_scale = {3, 5, 10};
  return s;
}

nlohmann::json to_json(const SnnHyper& h) {
  nlohmann::json j = {{"arch", to_string(h.arch)}, {"tau", h.tau},
                      {"eta", h.eta},              {"epochs", h.epochs},
                      {"gamma", h.gamma},          {"beta", h.beta},
                      {"theta_out", h.theta_out},  {"encoder_gain", h.encoder_gain},
                      {"init_std", h.init_std}};
  if (h.arch == Arch::kHidden) {
    j["hidden_scale"] = h.hidden_scale;
    j["fc1_mean"] = h.fc1_mean;
    j["p_conn"] = h.p_conn;
  }
  return j;
}

nlohmann::json to_json(const GridSpace& space) {
  nlohmann::json j = {{"base", to_json(space.base)}};
  auto put = [&j](const char* key, const auto& values) {
    if (!values.empty()) j[key] = values;
  };
  put("tau", space.tau);
  put("eta", space.eta);
  put("epochs", space.epochs);
  put("gamma", space.gamma);
  put("beta", space.beta);
  put("hidden_scale", space.hidden_scale);
  put("fc1_mean", space.fc1_mean);
  put("p_conn", space.p_conn);
  return j;
}

// Accepts {"tau": [...], "eta": [...], ...}; unknown keys are rejected.
GridSpace grid_space_from_json(const nlohmann::json& j, Arch arch) {
  if (!j.is_object()) throw ConfigError("grid space must be a JSON object");
  GridSpace s;
  s.base.arch = arch;
  if (arch == Arch::kHidden) {
    s.base.eta = 0.001;
    s.base.epochs = 20;
  }
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "tau") s.tau = value.get<std::vector<double>>();
      else if (key == "eta") s.eta = value.get<std::vector<double>>();
      else if (key == "epochs") s.epochs = value.get<std::vector<int>>();
      else if (key == "gamma") s.gamma = value.get<std::vector<double>>();
      else if (key == "beta") s.beta = value.get<std::vector<double>>();
      else if (key == "hidden_scale") s.hidden_scale = value.get<std::vector<int>>();
      else if (key == "fc1_mean") s.fc1_mean = value.get<std::vector<double>>();
      else if (key == "p_conn") s.p_conn = value.get<std::vector<double>>();
      else throw ConfigError("unknown grid-space key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("grid space: ") + e.what());
  }
  return s;
}

std::vector<GridResult> grid_search(const GridSpace& space, const Dataset& ds, int k,
                                    const std::vector<std::uint64_t>& seeds, int jobs) {
  if (seeds.empty()) throw ConfigError("grid_search needs at least one seed");
  const auto points = space.expand();
  const auto n_seeds = seeds.size();
  std::vector<CVResult> runs(points.size() * n_seeds);
  parallel_for(runs.size(), jobs, [&](std::size_t idx) {
    runs[idx] = cross_validate_snn(ds, points[idx / n_seeds], k, seeds[idx % n_seeds]).cv;
  });
  std::vector<GridResult> results(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto& r = results[i];
    r.hyper = points[i];
    r.index = i;
    for (std::size_t s = 0; s < n_seeds; ++s) {
      const auto& m = runs[i * n_seeds + s].summary.mean;
      r.per_seed_accuracy.push_back(m.accuracy);
      r.mean.accuracy += m.accuracy / static_cast<double>(n_seeds);
      r.mean.precision += m.precision / static_cast<double>(n_seeds);
      r.mean.recall += m.recall / static_cast<double>(n_seeds);
      r.mean.f1 += m.f1 / static_cast<double>(n_seeds);
    }
    r.score = r.mean.accuracy;
  }
  std::stable_sort(results.begin(), results.end(),
                   [](const GridResult& a, const GridResult& b) { return a.score > b.score; });
  return results;
}

nlohmann::json to_json(const GridResult& r) {
  return {{"rank_index", r.index},
          {"hyper", to_json(r.hyper)},
          {"score", r.score},
          {"mean", to_json(r.mean)},
          {"per_seed_accuracy", r.per_seed_accuracy}};
}

std::string grid_results_csv(const std::vector<GridResult>& results) {
  std::string out =
      "rank,arch,tau,eta,epochs,gamma,beta,hidden_scale,fc1_mean,p_conn,accuracy,precision,"
      "recall,f1\n";
  char buf[512];
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    const auto& h = r.hyper;
    const bool hidden = h.arch == Arch::kHidden;
    std::snprintf(buf, sizeof(buf), "%zu,%s,%g,%g,%d,%g,%g,%s,%s,%s,%.6f,%.6f,%.6f,%.6f\n",
                  i + 1, to_string(h.arch).c_str(), h.tau, h.eta, h.epochs, h.gamma, h.beta,
                  hidden ? std::to_string(h.hidden_scale).c_str() : "",
                  hidden ? nlohmann::json(h.fc1_mean).dump().c_str() : "",
                  hidden ? nlohmann::json(h.p_conn).dump().c_str() : "", r.mean.accuracy,
                  r.mean.precision, r.mean.recall, r.mean.f1);
    out += buf;
  }
  return out;
}

}  // namespace cogload
