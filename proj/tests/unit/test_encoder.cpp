#include <doctest.h>

#include <cmath>
#include <vector>

#include "../oracle/encoder_oracle.hpp"
#include "cogload/encoder.hpp"
#include "cogload/error.hpp"
#include "helpers.hpp"

using namespace cogload;

namespace {

LifEncoderParams unit_gain(double tau) {
  LifEncoderParams p;
  p.tau = tau;
  p.gain = 1.0;
  return p;
}

}  // namespace

TEST_CASE("x = 0, tau = 31 spikes once at step 9") {
  const std::vector<double> x(5, 0.0);
  for (double gain : {1.0, kDefaultEncoderGain}) {
    LifEncoderParams p;
    p.gain = gain;
    const auto r = encode(x, p);
    CHECK(r.units() == 5);
    CHECK(r.steps() == 16);
    for (std::size_t u = 0; u < 5; ++u) {
      CHECK(r.count(u) == 1);
      CHECK(r.at(u, 9));
    }
  }
}

TEST_CASE("x = 30 spikes at steps 6 and 12") {
  const std::vector<double> x{30.0};
  const auto r = encode(x, unit_gain(31));
  CHECK(r.count(0) == 2);
  CHECK(r.at(0, 6));
  CHECK(r.at(0, 12));
}

TEST_CASE("encoder agrees with the closed-form crossing times") {
  for (double tau : {15.0, 20.0, 31.0, 40.0}) {
    for (double gain : {1.0, 50.0}) {
      LifEncoderParams p;
      p.tau = tau;
      p.gain = gain;
      for (int i = -30; i <= 30; ++i) {
        const double x = i / 10.0 * (gain == 1.0 ? 20.0 : 1.0);
        const std::vector<double> in{x};
        const auto r = encode(in, p);
        std::vector<int> got;
        for (std::size_t t = 0; t < r.steps(); ++t) {
          if (r.at(0, t)) got.push_back(static_cast<int>(t));
        }
        CHECK_MESSAGE(got == oracle::closed_form_steps(x, p), "tau=", tau, " gain=", gain, " x=", x);
      }
    }
  }
}

TEST_CASE("spike count is monotone in the input") {
  for (double tau : {15.0, 31.0, 40.0}) {
    LifEncoderParams p;
    p.tau = tau;
    int prev = -1;
    for (int i = -30; i <= 30; ++i) {
      const std::vector<double> x{i / 10.0};
      const int c = encode(x, p).total();
      CHECK(c >= prev);
      prev = c;
    }
  }
}

TEST_CASE("refractory gap after reset at x = 0") {
  for (double tau : {5.0, 15.0, 31.0}) {
    auto p = unit_gain(tau);
    p.steps = 200;
    const std::vector<double> x{0.0};
    const auto r = encode(x, p);
    const int min_gap = static_cast<int>(std::ceil(tau * std::log(65.0 / 50.0))) - 1;
    int last = -1;
    for (std::size_t t = 0; t < r.steps(); ++t) {
      if (!r.at(0, t)) continue;
      if (last >= 0) CHECK(static_cast<int>(t) - last - 1 >= min_gap);
      last = static_cast<int>(t);
    }
    CHECK(r.count(0) > 1);
  }
}

TEST_CASE("encoder validation and purity") {
  LifEncoderParams p;
  const std::vector<double> x{0.3, -1.2, 2.0, 0.0, 1.1};
  CHECK(encode(x, p) == encode(x, p));
  const std::vector<double> bad{0.0, std::nan("")};
  CHECK_THROWS_AS(encode(bad, p), DataError);
  p.v_th = 10.0;
  CHECK_THROWS_AS(encode(x, p), ConfigError);
}

TEST_CASE("raster to events") {
  SpikeRaster r(5, 16);
  CHECK(raster_to_events(r).empty());
  r.set(2, 0);
  r.set(0, 15);
  const auto ev = raster_to_events(r);
  REQUIRE(ev.size() == 2);
  CHECK(ev[0].unit == 2);
  CHECK(ev[0].time_s == doctest::Approx(0.01));
  CHECK(ev[1].unit == 0);
  CHECK(ev[1].time_s == doctest::Approx(0.16));
}

TEST_CASE("events round trip through rasters and files") {
  const auto dir = testutil::temp_dir("events");
  std::mt19937_64 rng(1);
  std::bernoulli_distribution coin(0.3);
  std::vector<TrialEvents> trials;
  std::vector<SpikeRaster> rasters;
  for (int k = 0; k < 50; ++k) {
    SpikeRaster r(5, 16);
    for (std::size_t u = 0; u < 5; ++u) {
      for (std::size_t t = 0; t < 16; ++t) r.set(u, t, coin(rng));
    }
    rasters.push_back(r);
    const auto ev = raster_to_events(r);
    CHECK(events_to_raster(ev, 5, 16) == r);
    for (const auto& e : ev) CHECK((e.time_s > 0 && e.time_s <= 0.16 + 1e-12));
    trials.push_back({"t" + std::to_string(k), k % 2, ev});
  }
  write_events_jsonl(dir / "ev.jsonl", trials);
  const auto back = read_events_jsonl(dir / "ev.jsonl");
  REQUIRE(back.size() == trials.size());
  for (std::size_t k = 0; k < back.size(); ++k) {
    CHECK(back[k].trial_id == trials[k].trial_id);
    CHECK(back[k].label == trials[k].label);
    CHECK(events_to_raster(back[k].events, 5, 16) == rasters[k]);
  }
  CHECK_THROWS_AS(events_to_raster({{0, 0.015}}, 5, 16), DataError);
  CHECK_THROWS_AS(events_to_raster({{7, 0.02}}, 5, 16), DataError);
}

TEST_CASE("completeness readings") {
  SpikeRaster every(5, 16);
  for (std::size_t t = 0; t < 16; ++t) every.set(t % 5, t);
  CHECK(is_complete_trial(every));
  CHECK(is_complete_per_unit(every));

  auto gap = every;
  gap.set(7 % 5, 7, false);
  CHECK_FALSE(is_complete_trial(gap));

  const SpikeRaster none(5, 16);
  CHECK_FALSE(is_complete_trial(none));
  CHECK_FALSE(passes(none, CompletenessMode::kNonEmpty));
  CHECK(passes(none, CompletenessMode::kNone));
  CHECK(completeness_from_string("per_unit") == CompletenessMode::kPerUnit);
  CHECK_THROWS_AS(completeness_from_string("bogus"), ConfigError);
}
