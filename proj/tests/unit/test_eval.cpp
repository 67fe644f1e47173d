#include <doctest.h>

#include <cmath>

#include "cogload/error.hpp"
#include "cogload/eval.hpp"

using namespace cogload;

namespace {

Dataset toy(std::size_t n_per_class) {
  Dataset ds;
  for (std::size_t i = 0; i < 2 * n_per_class; ++i) {
    FeatureRecord r;
    r.subject_id = "s";
    r.trial_id = std::to_string(i);
    r.label = static_cast<int>(i % 2);
    r.features = {static_cast<double>(i), r.label * 10.0 + 0.1 * static_cast<double>(i % 5),
                  static_cast<double>(i % 3), static_cast<double>(i % 7), static_cast<double>(i % 4)};
    ds.records.push_back(r);
  }
  return ds;
}

}  // namespace

TEST_CASE("metrics by hand") {
  const std::vector<int> y{1, 1, 1, 0, 0, 0, 1, 0};
  const std::vector<int> p{1, 1, 0, 0, 1, 0, 1, 0};
  const auto m = compute_metrics(y, p);
  CHECK(m.confusion[1][1] == 3);
  CHECK(m.confusion[1][0] == 1);
  CHECK(m.confusion[0][1] == 1);
  CHECK(m.confusion[0][0] == 3);
  CHECK(m.accuracy == doctest::Approx(0.75));
  CHECK(m.precision == doctest::Approx(0.75));
  CHECK(m.recall == doctest::Approx(0.75));
  CHECK(m.f1 == doctest::Approx(0.75));
  CHECK(m.total() == 8);

  const auto m2 = compute_metrics(std::vector<int>{1, 1, 0, 0}, std::vector<int>{1, 0, 0, 0});
  CHECK(m2.precision == doctest::Approx(1.0));
  CHECK(m2.recall == doctest::Approx(0.5));
  CHECK(m2.f1 == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("degenerate metrics are flagged") {
  const auto none = compute_metrics(std::vector<int>{0, 0, 1}, std::vector<int>{0, 0, 0});
  CHECK(none.precision == 0.0);
  CHECK(none.precision_undefined);
  CHECK_FALSE(none.recall_undefined);
  CHECK(none.f1 == 0.0);

  const auto neg = compute_metrics(std::vector<int>{0, 0}, std::vector<int>{0, 0});
  CHECK(neg.accuracy == 1.0);
  CHECK(neg.recall_undefined);
  CHECK(neg.precision_undefined);
  CHECK(neg.f1_undefined);

  CHECK_THROWS_AS(compute_metrics(std::vector<int>{}, std::vector<int>{}), DataError);
  CHECK_THROWS_AS(compute_metrics(std::vector<int>{0, 1}, std::vector<int>{0}), DataError);
  CHECK_THROWS_AS(compute_metrics(std::vector<int>{2}, std::vector<int>{0}), DataError);
}

TEST_CASE("aggregation uses the population deviation") {
  Metrics a, b;
  a.accuracy = 0.8;
  b.accuracy = 0.6;
  a.f1 = b.f1 = 0.5;
  const std::vector<Metrics> runs{a, b};
  const auto agg = aggregate(runs);
  CHECK(agg.mean.accuracy == doctest::Approx(0.7));
  CHECK(agg.std.accuracy == doctest::Approx(0.1));
  CHECK(agg.std.f1 == 0.0);
  const auto one = aggregate(std::span<const Metrics>(runs.data(), 1));
  CHECK(one.std.accuracy == 0.0);
}

TEST_CASE("cross-validation driver") {
  const auto ds = toy(20);
  FoldRunner constant = [](const Dataset&, const Dataset& test) {
    return std::vector<int>(test.size(), 0);
  };
  const auto c = run_cv(ds, constant, 5, 3);
  REQUIRE(c.per_fold.size() == 5);
  CHECK(c.summary.mean.accuracy == doctest::Approx(0.5));
  for (const auto& m : c.per_fold) {
    CHECK(m.precision_undefined);
    CHECK(m.f1 == 0.0);
  }

  // Splits arrive normalized with train-split statistics.
  FoldRunner perfect = [](const Dataset& train, const Dataset& test) {
    REQUIRE(train.normalization.has_value());
    double mean = 0;
    for (const auto& r : train.records) mean += r.features[1];
    CHECK(std::abs(mean / static_cast<double>(train.size())) < 1e-9);
    std::vector<int> out;
    for (const auto& r : test.records) out.push_back(r.features[1] > 0 ? 1 : 0);
    return out;
  };
  const auto p = run_cv(ds, perfect, 5, 3);
  CHECK(p.summary.mean.accuracy == 1.0);
  CHECK(p.summary.std.accuracy == 0.0);

  FoldRunner parity = [](const Dataset&, const Dataset& test) {
    std::vector<int> out;
    for (const auto& r : test.records) out.push_back(std::abs(static_cast<int>(r.features[0] * 7)) % 2);
    return out;
  };
  const auto a = run_cv(ds, parity, 4, 11, 1);
  const auto b = run_cv(ds, parity, 4, 11, 4);
  CHECK(to_json(a).dump() == to_json(b).dump());

  FoldRunner short_out = [](const Dataset&, const Dataset&) { return std::vector<int>{0}; };
  CHECK_THROWS_AS(run_cv(ds, short_out, 5, 0), DataError);
}
