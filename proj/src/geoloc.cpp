#include "regiolex/geoloc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "parallel.hpp"
#include "regiolex/random.hpp"
#include "regiolex/text.hpp"
#include "strings.hpp"

namespace regiolex {

double haversine_km(LatLon a, LatLon b) {
  constexpr double kDegToRad = 3.14159265358979323846 / 180.0;
  const double phi1 = a.lat * kDegToRad;
  const double phi2 = b.lat * kDegToRad;
  const double dphi = (b.lat - a.lat) * kDegToRad;
  const double dlambda = (b.lon - a.lon) * kDegToRad;
  const double s1 = std::sin(dphi / 2.0);
  const double s2 = std::sin(dlambda / 2.0);
  const double h = std::clamp(s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2, 0.0, 1.0);
  if (h <= 0.5) return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
  // Past a quarter turn the haversine loses digits to the square root, so the
  // central angle comes from the vector form instead. Both give the same
  // great-circle distance.
  const double y1 = std::cos(phi2) * std::sin(dlambda);
  const double y2 = std::cos(phi1) * std::sin(phi2) - std::sin(phi1) * std::cos(phi2) * std::cos(dlambda);
  const double x = std::sin(phi1) * std::sin(phi2) + std::cos(phi1) * std::cos(phi2) * std::cos(dlambda);
  return kEarthRadiusKm * std::atan2(std::hypot(y1, y2), x);
}

// ---------------------------------------------------------------------------

Vocabulary::Vocabulary(std::vector<std::string> words) : words_(std::move(words)) {
  std::sort(words_.begin(), words_.end());
  words_.erase(std::unique(words_.begin(), words_.end()), words_.end());
  index_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) index_.emplace(words_[i], static_cast<std::uint32_t>(i));
}

std::optional<std::uint32_t> Vocabulary::find(std::string_view word) const {
  const auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

namespace {

class DocumentBuilder {
 public:
  DocumentBuilder(const LocationTable& locations, const Vocabulary& vocabulary)
      : locations_(locations), vocabulary_(vocabulary) {}

  void add(const RawPost& post) {
    const auto location = locations_.find(post.location_id);
    if (!location || detail::trim(post.text).empty()) return;
    auto [it, inserted] = users_.try_emplace(post.user_id);
    auto& user = it->second;
    if (inserted) {
      user.location = *location;
    } else if (user.location != *location) {
      return;
    }
    for (const auto& token : analyze(post.text)) {
      if (const auto idx = vocabulary_.find(token)) ++user.counts[*idx];
    }
  }

  std::vector<UserDocument> finish() && {
    std::vector<UserDocument> docs;
    docs.reserve(users_.size());
    for (auto& [id, user] : users_) {
      UserDocument doc{id, user.location, {}};
      doc.counts.reserve(user.counts.size());
      for (const auto& [word, count] : user.counts) doc.counts.push_back({word, count});
      docs.push_back(std::move(doc));
    }
    return docs;
  }

 private:
  struct Pending {
    LocationIndex location = 0;
    std::map<std::uint32_t, std::uint32_t> counts;
  };
  const LocationTable& locations_;
  const Vocabulary& vocabulary_;
  std::map<std::string, Pending> users_;
};

}  // namespace

std::vector<UserDocument> build_user_documents(std::span<const RawPost> posts, const LocationTable& locations,
                                               const Vocabulary& vocabulary) {
  DocumentBuilder builder(locations, vocabulary);
  for (const auto& post : posts) builder.add(post);
  return std::move(builder).finish();
}

std::vector<UserDocument> build_user_documents(std::istream& lines, const LocationTable& locations,
                                               const Vocabulary& vocabulary) {
  DocumentBuilder builder(locations, vocabulary);
  std::string line;
  while (std::getline(lines, line)) {
    if (const auto post = parse_post_line(line)) builder.add(*post);
  }
  return std::move(builder).finish();
}

Split split_users(std::span<const UserDocument> docs, std::size_t train_n, std::size_t test_n,
                  std::uint64_t seed) {
  if (train_n + test_n > docs.size()) {
    throw std::invalid_argument("split needs " + std::to_string(train_n + test_n) + " users but only " +
                                std::to_string(docs.size()) + " are available");
  }
  std::vector<std::size_t> order(docs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  const std::size_t take = train_n + test_n;
  for (std::size_t i = 0; i < take; ++i) {
    const auto j = i + uniform_index(rng, order.size() - i);
    std::swap(order[i], order[j]);
  }
  Split split;
  split.seed = seed;
  split.train.reserve(train_n);
  split.test.reserve(test_n);
  for (std::size_t i = 0; i < train_n; ++i) split.train.push_back(docs[order[i]]);
  for (std::size_t i = train_n; i < take; ++i) split.test.push_back(docs[order[i]]);
  return split;
}

// ---------------------------------------------------------------------------

FeatureSet FeatureSet::from_words(std::string source, double fraction, std::vector<std::string> words) {
  FeatureSet fs;
  fs.source = std::move(source);
  fs.fraction = fraction;
  fs.words = std::move(words);
  fs.index.reserve(fs.words.size());
  for (std::size_t i = 0; i < fs.words.size(); ++i) {
    if (!fs.index.emplace(fs.words[i], static_cast<std::uint32_t>(i)).second) {
      throw std::invalid_argument("duplicate feature word '" + fs.words[i] + "'");
    }
  }
  return fs;
}

namespace {

FeatureSet head_of(const Ranking& ranking, std::size_t count, double fraction) {
  std::vector<std::string> words;
  words.reserve(count);
  for (std::size_t i = 0; i < count; ++i) words.push_back(ranking.entries()[i].word);
  return FeatureSet::from_words(std::string(metric_name(ranking.metric())), fraction, std::move(words));
}

}  // namespace

FeatureSet select_features(const Ranking& ranking, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw std::invalid_argument("feature fraction must be in (0, 1]");
  }
  const auto n = static_cast<double>(ranking.size());
  // The epsilon keeps e.g. 0.05 * 2000 from rounding up to 101.
  auto count = static_cast<std::size_t>(std::ceil(fraction * n - 1e-9));
  count = std::min(count, ranking.size());
  return head_of(ranking, count, fraction);
}

FeatureSet select_top(const Ranking& ranking, std::size_t count) {
  return head_of(ranking, std::min(count, ranking.size()), 0.0);
}

FeatureSet all_features(const Vocabulary& vocabulary) {
  return FeatureSet::from_words("all", 1.0, vocabulary.words());
}

std::string_view transform_name(FeatureTransform t) { return t == FeatureTransform::Raw ? "raw" : "log1p"; }

std::optional<FeatureTransform> parse_transform(std::string_view name) {
  if (name == "raw") return FeatureTransform::Raw;
  if (name == "log1p") return FeatureTransform::Log1p;
  return std::nullopt;
}

Eigen::SparseVector<double> vectorize(const UserDocument& doc, const FeatureSet& features,
                                      const Vocabulary& vocabulary, FeatureTransform transform) {
  const auto k = static_cast<Eigen::Index>(features.size());
  Eigen::SparseVector<double> x(k + 1);
  std::vector<std::pair<std::uint32_t, double>> entries;
  entries.reserve(doc.counts.size());
  for (const auto& wc : doc.counts) {
    const auto it = features.index.find(vocabulary.word(wc.word));
    if (it == features.index.end()) continue;
    const double c = static_cast<double>(wc.count);
    entries.emplace_back(it->second, transform == FeatureTransform::Log1p ? std::log1p(c) : c);
  }
  std::sort(entries.begin(), entries.end());
  x.reserve(static_cast<Eigen::Index>(entries.size() + 1));
  for (const auto& [idx, v] : entries) x.insert(static_cast<Eigen::Index>(idx)) = v;
  x.insert(k) = 1.0;
  return x;
}

GeoModel train(std::span<const UserDocument> docs, const Vocabulary& vocabulary, FeatureSet features,
               const LocationTable& locations, const TrainParams& params) {
  if (docs.empty()) throw TrainingError("no training documents");
  const auto k = static_cast<Eigen::Index>(features.size());

  std::vector<Eigen::Triplet<double>> triplets;
  std::vector<std::uint32_t> labels;
  labels.reserve(docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const auto x = vectorize(docs[i], features, vocabulary, params.transform);
    for (Eigen::SparseVector<double>::InnerIterator it(x); it; ++it) {
      triplets.emplace_back(static_cast<Eigen::Index>(i), it.index(), it.value());
    }
    labels.push_back(docs[i].location);
  }
  SparseRowMatrix matrix(static_cast<Eigen::Index>(docs.size()), k + 1);
  matrix.setFromTriplets(triplets.begin(), triplets.end());

  const SoftmaxObjective objective(std::move(matrix), std::move(labels), locations.size(), params.l2);

  GeoModel model;
  model.params = params;
  model.features = std::move(features);
  for (const auto& loc : locations.entries()) model.classes.push_back(loc.id);
  model.weights = fit_softmax(objective, params.optimizer, &model.trace);
  return model;
}

Eigen::VectorXd predict_proba(const GeoModel& model, const UserDocument& doc, const Vocabulary& vocabulary) {
  const auto x = vectorize(doc, model.features, vocabulary, model.params.transform);
  const Eigen::VectorXd scores = model.weights * x;
  const double m = scores.maxCoeff();
  Eigen::VectorXd p = (scores.array() - m).exp().matrix();
  p /= p.sum();
  return p;
}

LocationIndex predict(const GeoModel& model, const UserDocument& doc, const Vocabulary& vocabulary) {
  const auto x = vectorize(doc, model.features, vocabulary, model.params.transform);
  const Eigen::VectorXd scores = model.weights * x;
  Eigen::Index best = 0;
  for (Eigen::Index c = 1; c < scores.size(); ++c) {
    if (scores[c] > scores[best]) best = c;
  }
  return static_cast<LocationIndex>(best);
}

EvalResult evaluate(const GeoModel& model, std::span<const UserDocument> test, const Vocabulary& vocabulary,
                    const LocationTable& locations) {
  EvalResult result;
  const auto n_loc = locations.size();
  result.confusion.assign(n_loc, std::vector<std::uint64_t>(n_loc, 0));
  double distance = 0.0;
  for (const auto& doc : test) {
    const auto predicted = predict(model, doc, vocabulary);
    ++result.confusion[doc.location][predicted];
    if (predicted == doc.location) {
      ++result.correct;
    } else {
      distance += haversine_km(locations[predicted].capital, locations[doc.location].capital);
    }
  }
  result.n = test.size();
  if (result.n > 0) {
    result.accuracy = static_cast<double>(result.correct) / static_cast<double>(result.n);
    result.mean_distance_km = distance / static_cast<double>(result.n);
  }
  return result;
}

std::vector<SweepCell> sweep(std::span<const FeatureSource> sources, std::span<const double> fractions,
                             const Split& split, const Vocabulary& vocabulary, const LocationTable& locations,
                             const TrainParams& params) {
  struct Job {
    const FeatureSource* source;
    double fraction;
  };
  std::vector<Job> jobs;
  for (const auto& source : sources) {
    if (!source.ranking) {
      jobs.push_back({&source, 1.0});
      continue;
    }
    for (double f : fractions) jobs.push_back({&source, f});
  }

  std::vector<SweepCell> cells(jobs.size());
  detail::parallel_for(
      jobs.size(),
      [&](std::size_t i) {
        const auto& job = jobs[i];
        FeatureSet features = job.source->ranking ? select_features(*job.source->ranking, job.fraction)
                                                  : all_features(vocabulary);
        features.source = job.source->name;
        auto& cell = cells[i];
        cell.source = job.source->name;
        cell.fraction = job.fraction;
        cell.n_features = features.size();
        const auto start = std::chrono::steady_clock::now();
        cell.model = train(split.train, vocabulary, std::move(features), locations, params);
        cell.train_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        cell.result = evaluate(cell.model, split.test, vocabulary, locations);
      },
      1);
  return cells;
}

void write_sweep_tsv(std::span<const SweepCell> cells, std::ostream& out, std::string_view provenance) {
  if (!provenance.empty()) {
    for (auto line : detail::split(provenance, '\n')) out << "# " << line << '\n';
  }
  out << "metric\tfraction\tn_features\taccuracy\tmean_distance_km\ttrain_seconds\n";
  for (const auto& c : cells) {
    out << c.source << '\t' << detail::format_double(c.fraction) << '\t' << c.n_features << '\t'
        << detail::format_double(c.result.accuracy) << '\t' << detail::format_double(c.result.mean_distance_km)
        << '\t' << detail::format_double(c.train_seconds) << '\n';
  }
}

// ---------------------------------------------------------------------------

void GeoModel::save(std::ostream& out) const {
  nlohmann::json weights_json = nlohmann::json::array();
  for (Eigen::Index r = 0; r < weights.rows(); ++r) {
    std::vector<double> row(static_cast<std::size_t>(weights.cols()));
    for (Eigen::Index c = 0; c < weights.cols(); ++c) row[static_cast<std::size_t>(c)] = weights(r, c);
    weights_json.push_back(std::move(row));
  }
  const nlohmann::json j = {
      {"format", "regiolex-geomodel"},
      {"version", 1},
      {"source", features.source},
      {"fraction", features.fraction},
      {"features", features.words},
      {"classes", classes},
      {"weights", std::move(weights_json)},
      {"params",
       {{"learning_rate", params.optimizer.learning_rate},
        {"max_epochs", params.optimizer.max_epochs},
        {"tolerance", params.optimizer.tolerance},
        {"max_halvings", params.optimizer.max_halvings},
        {"step_growth", params.optimizer.step_growth},
        {"l2", params.l2},
        {"transform", transform_name(params.transform)},
        {"seed", params.seed}}},
      {"trace",
       {{"epochs", trace.epochs},
        {"converged", trace.converged},
        {"final_learning_rate", trace.final_learning_rate},
        {"losses", trace.losses}}},
  };
  out << j.dump() << '\n';
}

GeoModel GeoModel::load(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
    if (j.at("format") != "regiolex-geomodel") throw std::runtime_error("not a regiolex model file");
    if (j.at("version") != 1) throw std::runtime_error("unsupported model version");
    GeoModel m;
    m.features = FeatureSet::from_words(j.at("source").get<std::string>(), j.at("fraction").get<double>(),
                                        j.at("features").get<std::vector<std::string>>());
    m.classes = j.at("classes").get<std::vector<std::string>>();
    const auto rows = j.at("weights").get<std::vector<std::vector<double>>>();
    const auto cols = static_cast<Eigen::Index>(m.features.size() + 1);
    m.weights.resize(static_cast<Eigen::Index>(rows.size()), cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (static_cast<Eigen::Index>(rows[r].size()) != cols) throw std::runtime_error("weight row has wrong width");
      for (Eigen::Index c = 0; c < cols; ++c) m.weights(static_cast<Eigen::Index>(r), c) = rows[r][static_cast<std::size_t>(c)];
    }
    if (rows.size() != m.classes.size()) throw std::runtime_error("weight rows do not match classes");
    const auto& p = j.at("params");
    m.params.optimizer.learning_rate = p.at("learning_rate").get<double>();
    m.params.optimizer.max_epochs = p.at("max_epochs").get<std::size_t>();
    m.params.optimizer.tolerance = p.at("tolerance").get<double>();
    m.params.optimizer.max_halvings = p.at("max_halvings").get<std::size_t>();
    m.params.optimizer.step_growth = p.at("step_growth").get<double>();
    m.params.l2 = p.at("l2").get<double>();
    const auto transform = parse_transform(p.at("transform").get<std::string>());
    if (!transform) throw std::runtime_error("unknown feature transform");
    m.params.transform = *transform;
    m.params.seed = p.at("seed").get<std::uint64_t>();
    if (j.contains("trace")) {
      const auto& t = j.at("trace");
      m.trace.epochs = t.at("epochs").get<std::size_t>();
      m.trace.converged = t.at("converged").get<bool>();
      m.trace.final_learning_rate = t.at("final_learning_rate").get<double>();
      m.trace.losses = t.at("losses").get<std::vector<double>>();
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("malformed model file: ") + e.what());
  }
}

}  // namespace regiolex
