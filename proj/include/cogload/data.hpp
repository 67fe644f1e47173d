#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cogload {

inline constexpr std::size_t kNumFeatures = 5;
using FeatureVector = std::array<double, kNumFeatures>;

// Column order of the feature CSV (after subject_id, trial_id).
inline constexpr std::array<std::string_view, kNumFeatures> kFeatureNames = {
    "alpha_power", "engagement", "faa", "gte", "gse"};

// One trial. Label 0 = easy (4 aircraft), 1 = hard (8 aircraft).
struct FeatureRecord {
  std::string subject_id;
  std::string trial_id;
  FeatureVector features{};
  int label = 0;

  double alpha_power() const { return features[0]; }
  double engagement() const { return features[1]; }
  double faa() const { return features[2]; }
  double gte() const { return features[3]; }
  double gse() const { return features[4]; }
};

struct NormalizationParams {
  FeatureVector mean{};
  FeatureVector std{};
};

struct Dataset {
  std::vector<FeatureRecord> records;
  std::optional<NormalizationParams> normalization;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }
  std::vector<int> labels() const;
  // Records at `indices`, in that order; normalization is carried over.
  Dataset subset(const std::vector<std::size_t>& indices) const;
};

struct LoadResult {
  Dataset dataset;
  std::size_t rows_read = 0;  // data rows, blank lines excluded
  std::size_t dropped = 0;    // non-finite feature or missing label
};

// Reads the feature CSV. Throws DataError on a missing file, a header that
// does not match kFeatureCsvHeader, a wrong field count, unparsable numbers,
// or a label other than 0/1. Rows with NaN/inf/empty features or an empty
// label are skipped and counted in `dropped`.
LoadResult load_feature_csv(const std::filesystem::path& path);
void write_feature_csv(const std::filesystem::path& path, const Dataset& ds);

inline constexpr std::string_view kFeatureCsvHeader =
    "subject_id,trial_id,alpha_power,engagement,faa,gte,gse,label";

// ---------------------------------------------------------------------------
// Closed-form EEG features.

struct BandPowers {
  double theta = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double alpha_left_frontal = 1.0;
  double alpha_right_frontal = 1.0;
};

inline constexpr std::string_view kBandPowerCsvHeader =
    "theta,alpha,beta,alpha_left_frontal,alpha_right_frontal";

// beta / (alpha + theta). Throws DomainError when alpha + theta == 0 or a
// power is negative.
double compute_engagement_index(const BandPowers& bp);

// Frontal alpha asymmetry, ln(right / left). Throws DomainError unless both
// frontal powers are strictly positive.
double compute_faa(const BandPowers& bp);

std::vector<BandPowers> load_band_power_csv(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Normalization and splitting.

// Per-feature mean and population standard deviation (ddof = 0). Throws
// DataError for fewer than two records or a zero-variance feature.
NormalizationParams zscore_fit(const Dataset& train);
Dataset zscore_apply(const Dataset& ds, const NormalizationParams& params);

struct Fold {
  std::vector<std::size_t> train;  // ascending
  std::vector<std::size_t> test;   // ascending
};

// Stratified k-fold split. Each class is shuffled (seeded) and dealt
// round-robin across folds, continuing the deal position from one class to
// the next so fold sizes differ by at most one. Throws DataError if k < 2 or
// a class has fewer than k records.
std::vector<Fold> stratified_kfold(const Dataset& ds, int k, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Synthetic desk-scale data: two unit-covariance Gaussian clusters in 5-D with
// means at -/+ separation/2 along a seeded random unit direction, n/2 records
// per class, shuffled. Throws DataError if n is odd or < 2.
Dataset generate_synthetic(std::size_t n, double separation, std::uint64_t seed);

// The unit direction generate_synthetic uses for `seed`.
FeatureVector synthetic_direction(std::uint64_t seed);

}  // namespace cogload
