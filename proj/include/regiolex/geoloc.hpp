#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "regiolex/classifier.hpp"
#include "regiolex/corpus.hpp"
#include "regiolex/locations.hpp"
#include "regiolex/metrics.hpp"

namespace regiolex {

inline constexpr double kEarthRadiusKm = 6371.0;

/// Great-circle distance on a sphere of radius 6371 km.
double haversine_km(LatLon a, LatLon b);

/// Sorted, de-duplicated word list with dense indices.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> words);
  static Vocabulary of(const CorpusStats& stats) { return Vocabulary(stats.vocabulary()); }

  std::size_t size() const { return words_.size(); }
  const std::string& word(std::uint32_t index) const { return words_[index]; }
  const std::vector<std::string>& words() const { return words_; }
  std::optional<std::uint32_t> find(std::string_view word) const;

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

struct WordCount {
  std::uint32_t word = 0;  // vocabulary index
  std::uint32_t count = 0;
  bool operator==(const WordCount&) const = default;
};

/// All posts of one user, reduced to counts over a fixed vocabulary.
struct UserDocument {
  std::string user_id;
  LocationIndex location = 0;
  std::vector<WordCount> counts;  // sorted by word index, counts > 0
  bool operator==(const UserDocument&) const = default;
};

/// One document per user, sorted by user id. Users keep the location of
/// their first accepted post (as in ingestion); posts with unknown locations
/// or conflicting attributions are skipped. Users whose posts contain no
/// vocabulary word get an empty document.
std::vector<UserDocument> build_user_documents(std::span<const RawPost> posts, const LocationTable& locations,
                                               const Vocabulary& vocabulary);
std::vector<UserDocument> build_user_documents(std::istream& lines, const LocationTable& locations,
                                               const Vocabulary& vocabulary);

struct Split {
  std::vector<UserDocument> train;
  std::vector<UserDocument> test;
  std::uint64_t seed = 0;
};

/// Uniform sample without replacement of train_n + test_n documents, the
/// first train_n of the sample going to training. Deterministic per seed.
Split split_users(std::span<const UserDocument> docs, std::size_t train_n, std::size_t test_n,
                  std::uint64_t seed);

struct FeatureSet {
  std::string source;     // metric name, or "all"
  double fraction = 0.0;  // 0 when selected by count
  std::vector<std::string> words;
  std::unordered_map<std::string, std::uint32_t> index;

  std::size_t size() const { return words.size(); }
  static FeatureSet from_words(std::string source, double fraction, std::vector<std::string> words);
};

/// Head of the ranking holding ceil(fraction * |ranking|) words.
FeatureSet select_features(const Ranking& ranking, double fraction);
/// Head of the ranking holding min(count, |ranking|) words.
FeatureSet select_top(const Ranking& ranking, std::size_t count);
/// Every vocabulary word: the bag-of-words baseline.
FeatureSet all_features(const Vocabulary& vocabulary);

enum class FeatureTransform { Log1p, Raw };
std::string_view transform_name(FeatureTransform t);
std::optional<FeatureTransform> parse_transform(std::string_view name);

struct TrainParams {
  OptimizerParams optimizer;
  double l2 = 1e-4;
  FeatureTransform transform = FeatureTransform::Log1p;
  std::uint64_t seed = 0;
};

struct GeoModel {
  FeatureSet features;
  std::vector<std::string> classes;  // location ids, index = class
  Eigen::MatrixXd weights;           // classes x (features + 1), bias last
  TrainParams params;
  TrainingTrace trace;

  /// JSON, format "regiolex-geomodel" version 1.
  void save(std::ostream& out) const;
  static GeoModel load(std::istream& in);
};

/// Feature row for one document: transformed counts of the feature words
/// followed by the constant bias feature.
Eigen::SparseVector<double> vectorize(const UserDocument& doc, const FeatureSet& features,
                                      const Vocabulary& vocabulary, FeatureTransform transform);

GeoModel train(std::span<const UserDocument> docs, const Vocabulary& vocabulary, FeatureSet features,
               const LocationTable& locations, const TrainParams& params);

Eigen::VectorXd predict_proba(const GeoModel& model, const UserDocument& doc, const Vocabulary& vocabulary);
/// Most probable class; ties go to the lowest class index.
LocationIndex predict(const GeoModel& model, const UserDocument& doc, const Vocabulary& vocabulary);

struct EvalResult {
  std::size_t n = 0;
  std::size_t correct = 0;
  double accuracy = 0.0;
  double mean_distance_km = 0.0;
  std::vector<std::vector<std::uint64_t>> confusion;  // [true][predicted]
};

EvalResult evaluate(const GeoModel& model, std::span<const UserDocument> test, const Vocabulary& vocabulary,
                    const LocationTable& locations);

/// A feature-selection method for the sweep: a ranking to take the head of,
/// or no ranking for the full bag-of-words baseline.
struct FeatureSource {
  std::string name;
  std::optional<Ranking> ranking;
};

struct SweepCell {
  std::string source;
  double fraction = 0.0;
  std::size_t n_features = 0;
  EvalResult result;
  double train_seconds = 0.0;
  GeoModel model;
};

/// Trains and evaluates one model per (source, fraction). The bag-of-words
/// source contributes a single cell at fraction 1.
std::vector<SweepCell> sweep(std::span<const FeatureSource> sources, std::span<const double> fractions,
                             const Split& split, const Vocabulary& vocabulary, const LocationTable& locations,
                             const TrainParams& params);

/// Columns: metric, fraction, n_features, accuracy, mean_distance_km, train_seconds.
void write_sweep_tsv(std::span<const SweepCell> cells, std::ostream& out, std::string_view provenance = {});

}  // namespace regiolex
