#include "cogload/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "cogload/error.hpp"
#include "cogload/rng.hpp"

namespace cogload {

namespace {

std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(ws);
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      return fields;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

std::string strip_bom(std::string line) {
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF &&
      static_cast<unsigned char>(line[1]) == 0xBB &&
      static_cast<unsigned char>(line[2]) == 0xBF) {
    line.erase(0, 3);
  }
  return line;
}

// Empty string -> nullopt (treated as missing). Text that is not a number at
// all is a hard error; "nan"/"inf" parse and are filtered by the caller.
std::optional<double> parse_real(std::string_view s, std::size_t line_no) {
  if (s.empty()) return std::nullopt;
  double value = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  if (*begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw DataError("line " + std::to_string(line_no) + ": cannot parse number '" +
                    std::string(s) + "'");
  }
  return value;
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

std::string format_real(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

std::vector<int> Dataset::labels() const {
  std::vector<int> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.label);
  return out;
}

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
  Dataset out;
  out.normalization = normalization;
  out.records.reserve(indices.size());
  for (auto i : indices) out.records.push_back(records.at(i));
  return out;
}

LoadResult load_feature_csv(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  std::string line;
  if (!std::getline(in, line)) throw DataError(path.string() + ": missing header");
  if (trim(strip_bom(line)) != kFeatureCsvHeader) {
    throw DataError(path.string() + ": malformed header, expected '" +
                    std::string(kFeatureCsvHeader) + "'");
  }

  LoadResult result;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    ++result.rows_read;
    const auto fields = split_csv(line);
    if (fields.size() != 8) {
      throw DataError("line " + std::to_string(line_no) + ": expected 8 fields, got " +
                      std::to_string(fields.size()));
    }
    FeatureRecord rec;
    rec.subject_id = std::string(fields[0]);
    rec.trial_id = std::string(fields[1]);
    bool finite = true;
    for (std::size_t j = 0; j < kNumFeatures; ++j) {
      const auto v = parse_real(fields[2 + j], line_no);
      if (!v || !std::isfinite(*v)) {
        finite = false;
      } else {
        rec.features[j] = *v;
      }
    }
    const auto label_text = fields[7];
    if (label_text.empty()) {
      ++result.dropped;
      continue;
    }
    if (label_text == "0") {
      rec.label = 0;
    } else if (label_text == "1") {
      rec.label = 1;
    } else {
      throw DataError("line " + std::to_string(line_no) + ": label '" +
                      std::string(label_text) + "' outside {0,1}");
    }
    if (!finite) {
      ++result.dropped;
      continue;
    }
    result.dataset.records.push_back(std::move(rec));
  }
  return result;
}

void write_feature_csv(const std::filesystem::path& path, const Dataset& ds) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << kFeatureCsvHeader << '\n';
  for (const auto& r : ds.records) {
    out << r.subject_id << ',' << r.trial_id;
    for (double v : r.features) out << ',' << format_real(v);
    out << ',' << r.label << '\n';
  }
}

double compute_engagement_index(const BandPowers& bp) {
  if (bp.theta < 0 || bp.alpha < 0 || bp.beta < 0) {
    throw DomainError("engagement index: band powers must be non-negative");
  }
  const double denom = bp.alpha + bp.theta;
  if (denom == 0.0) throw DomainError("engagement index: alpha + theta == 0");
  return bp.beta / denom;
}

double compute_faa(const BandPowers& bp) {
  if (!(bp.alpha_left_frontal > 0) || !(bp.alpha_right_frontal > 0)) {
    throw DomainError("FAA: frontal alpha powers must be > 0");
  }
  return std::log(bp.alpha_right_frontal) - std::log(bp.alpha_left_frontal);
}

std::vector<BandPowers> load_band_power_csv(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  std::string line;
  if (!std::getline(in, line) || trim(strip_bom(line)) != kBandPowerCsvHeader) {
    throw DataError(path.string() + ": malformed header, expected '" +
                    std::string(kBandPowerCsvHeader) + "'");
  }
  std::vector<BandPowers> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 5) {
      throw DataError("line " + std::to_string(line_no) + ": expected 5 fields");
    }
    std::array<double, 5> v{};
    for (std::size_t j = 0; j < 5; ++j) {
      const auto parsed = parse_real(fields[j], line_no);
      if (!parsed || !std::isfinite(*parsed)) {
        throw DataError("line " + std::to_string(line_no) + ": non-finite band power");
      }
      v[j] = *parsed;
    }
    rows.push_back({v[0], v[1], v[2], v[3], v[4]});
  }
  return rows;
}

NormalizationParams zscore_fit(const Dataset& train) {
  const auto n = train.records.size();
  if (n < 2) throw DataError("z-score fit needs at least 2 records");
  NormalizationParams p;
  for (std::size_t j = 0; j < kNumFeatures; ++j) {
    double sum = 0.0;
    for (const auto& r : train.records) sum += r.features[j];
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (const auto& r : train.records) {
      const double d = r.features[j] - mean;
      ss += d * d;
    }
    const double sd = std::sqrt(ss / static_cast<double>(n));
    if (!(sd > 1e-12 * std::max(1.0, std::abs(mean)))) {
      throw DataError("feature '" + std::string(kFeatureNames[j]) + "' has zero variance");
    }
    p.mean[j] = mean;
    p.std[j] = sd;
  }
  return p;
}

Dataset zscore_apply(const Dataset& ds, const NormalizationParams& params) {
  Dataset out = ds;
  for (auto& r : out.records) {
    for (std::size_t j = 0; j < kNumFeatures; ++j) {
      r.features[j] = (r.features[j] - params.mean[j]) / params.std[j];
    }
  }
  out.normalization = params;
  return out;
}

std::vector<Fold> stratified_kfold(const Dataset& ds, int k, std::uint64_t seed) {
  if (k < 2) throw DataError("stratified k-fold needs k >= 2");
  const auto folds = static_cast<std::size_t>(k);
  std::array<std::vector<std::size_t>, 2> by_class;
  for (std::size_t i = 0; i < ds.records.size(); ++i) {
    by_class.at(static_cast<std::size_t>(ds.records[i].label)).push_back(i);
  }
  for (int c = 0; c < 2; ++c) {
    if (by_class[c].size() < folds) {
      throw DataError("class " + std::to_string(c) + " has " +
                      std::to_string(by_class[c].size()) + " records, fewer than k=" +
                      std::to_string(k));
    }
  }

  auto rng = make_rng(seed, RngStream::kFolds);
  std::vector<Fold> out(folds);
  std::size_t deal = 0;
  for (auto& members : by_class) {
    std::shuffle(members.begin(), members.end(), rng);
    for (auto idx : members) {
      out[deal % folds].test.push_back(idx);
      ++deal;
    }
  }
  for (auto& fold : out) {
    std::sort(fold.test.begin(), fold.test.end());
    std::vector<bool> in_test(ds.records.size(), false);
    for (auto i : fold.test) in_test[i] = true;
    for (std::size_t i = 0; i < ds.records.size(); ++i) {
      if (!in_test[i]) fold.train.push_back(i);
    }
  }
  return out;
}

namespace {

FeatureVector draw_direction(std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (;;) {
    FeatureVector u{};
    double norm2 = 0.0;
    for (auto& v : u) {
      v = normal(rng);
      norm2 += v * v;
    }
    if (norm2 > 1e-12) {
      const double norm = std::sqrt(norm2);
      for (auto& v : u) v /= norm;
      return u;
    }
  }
}

}  // namespace

FeatureVector synthetic_direction(std::uint64_t seed) {
  auto rng = make_rng(seed, RngStream::kSynthetic);
  return draw_direction(rng);
}

Dataset generate_synthetic(std::size_t n, double separation, std::uint64_t seed) {
  if (n < 2 || n % 2 != 0) throw DataError("synthetic n must be even and >= 2");
  auto rng = make_rng(seed, RngStream::kSynthetic);
  const FeatureVector u = draw_direction(rng);

  std::vector<int> labels(n, 0);
  std::fill(labels.begin() + static_cast<std::ptrdiff_t>(n / 2), labels.end(), 1);
  std::shuffle(labels.begin(), labels.end(), rng);

  std::normal_distribution<double> normal(0.0, 1.0);
  Dataset ds;
  ds.records.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    FeatureRecord rec;
    rec.subject_id = "synth";
    char id[32];
    std::snprintf(id, sizeof(id), "t%05zu", i);
    rec.trial_id = id;
    rec.label = labels[i];
    const double shift = (labels[i] == 1 ? 0.5 : -0.5) * separation;
    for (std::size_t j = 0; j < kNumFeatures; ++j) {
      rec.features[j] = normal(rng) + shift * u[j];
    }
    ds.records.push_back(std::move(rec));
  }
  return ds;
}

}  // namespace cogload
