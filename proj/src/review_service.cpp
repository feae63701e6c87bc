#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>

#include <openssl/sha.h>

#include "regiolex/review.hpp"

namespace regiolex {

using nlohmann::json;

ReviewService::ReviewService(CorpusStats stats, std::vector<Ranking> rankings, std::optional<SampleIndex> samples,
                             std::filesystem::path annotation_log, std::string salt)
    : stats_(std::move(stats)),
      samples_(std::move(samples)),
      store_(std::move(annotation_log)),
      salt_(std::move(salt)),
      toponyms_(stats_.locations()) {
  for (auto& r : rankings) rankings_.emplace(std::string(metric_name(r.metric())), std::move(r));
}

std::unique_ptr<ReviewService> ReviewService::open(const ReviewPaths& paths) {
  auto stats = load_stats(paths.stats);
  std::vector<Ranking> rankings;
  for (const auto metric : all_metrics()) {
    const auto file = paths.rankings_dir / ("ranking_" + std::string(metric_name(metric)) + ".tsv");
    if (!std::filesystem::exists(file)) continue;
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot read " + file.string());
    rankings.push_back(read_ranking_tsv(in, metric));
  }
  if (rankings.empty()) {
    throw std::runtime_error("no ranking_<metric>.tsv files in " + paths.rankings_dir.string());
  }
  std::optional<SampleIndex> samples;
  if (paths.samples) samples = SampleIndex::read_jsonl(*paths.samples);
  return std::make_unique<ReviewService>(std::move(stats), std::move(rankings), std::move(samples),
                                         paths.annotations, paths.salt);
}

std::vector<std::string> ReviewService::metrics() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : rankings_) out.push_back(name);
  return out;
}

const Ranking& ReviewService::ranking_for(std::string_view metric) const {
  const auto parsed = parse_metric(metric);
  if (parsed) {
    const auto it = rankings_.find(metric_name(*parsed));
    if (it != rankings_.end()) return it->second;
  }
  throw ServiceError(404, "unknown_metric", "no ranking loaded for metric '" + std::string(metric) + "'");
}

std::string ReviewService::pseudonym(std::string_view user_id) const {
  std::string input = salt_;
  input += '\0';
  input += user_id;
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char*>(input.data()), input.size(), digest);
  std::string out = "user-";
  char hex[3];
  for (int i = 0; i < 8; ++i) {
    std::snprintf(hex, sizeof hex, "%02x", digest[i]);
    out += hex;
  }
  return out;
}

json ReviewService::rankings_page(std::string_view metric, std::size_t offset, std::size_t limit) const {
  const auto& ranking = ranking_for(metric);
  if (limit > kMaxLimit) {
    throw ServiceError(400, "invalid_limit", "limit must be at most " + std::to_string(kMaxLimit));
  }
  const std::string name(metric_name(ranking.metric()));

  std::map<std::string_view, std::vector<const Annotation*>> by_word;
  const auto current = store_.current(name);
  for (const auto& a : current) by_word[a.word].push_back(&a);

  json entries = json::array();
  const auto& all = ranking.entries();
  for (std::size_t i = offset; i < all.size() && i < offset + limit; ++i) {
    const auto& e = all[i];
    const auto* counts = stats_.find(e.word);
    json labels = json::array();
    if (const auto it = by_word.find(e.word); it != by_word.end()) {
      for (const auto* a : it->second) labels.push_back({{"annotator", a->annotator}, {"label", a->label}});
    }
    entries.push_back({{"rank", e.rank},
                       {"word", e.word},
                       {"value", e.value},
                       {"toponym", e.toponym},
                       {"occurrences", counts ? counts->occurrences : 0},
                       {"users", counts ? counts->user_count() : 0},
                       {"locations", counts ? counts->locations_with_occurrences() : 0},
                       {"annotated", !labels.empty()},
                       {"annotations", std::move(labels)}});
  }
  return {{"metric", name}, {"offset", offset}, {"limit", limit}, {"total", all.size()},
          {"entries", std::move(entries)}};
}

json ReviewService::word_detail(std::string_view word) const {
  const auto* counts = stats_.find(word);
  if (counts == nullptr) throw ServiceError(404, "unknown_word", "word '" + std::string(word) + "' is not in the corpus");

  json scores = json::object();
  for (const auto& [name, ranking] : rankings_) {
    const auto* e = ranking.find(word);
    if (e == nullptr) {
      scores[name] = nullptr;  // filtered out of this ranking
    } else {
      scores[name] = {{"value", e->value}, {"rank", e->rank}};
    }
  }

  json rows = json::array();
  const auto& locations = stats_.locations();
  for (LocationIndex l = 0; l < locations.size(); ++l) {
    const auto tokens = stats_.location_tokens(l);
    const auto c = counts->by_location[l];
    rows.push_back({{"location_id", locations[l].id},
                    {"location", locations[l].name},
                    {"occurrences", c},
                    {"users", counts->users_by_location[l]},
                    {"per_million", tokens == 0 ? 0.0 : 1e6 * static_cast<double>(c) / static_cast<double>(tokens)}});
  }

  json samples = json::array();
  std::uint64_t seen = 0;
  if (samples_) {
    const std::string key(word);
    const auto items = samples_->samples(key);
    seen = samples_->seen(key);
    for (std::size_t i = 0; i < items.size() && i < kMaxSamples; ++i) {
      samples.push_back({{"user", pseudonym(items[i].user_id)}, {"text", items[i].text}});
    }
  }

  return {{"word", std::string(word)},
          {"occurrences", counts->occurrences},
          {"users", counts->user_count()},
          {"toponym", toponyms_.matches(word)},
          {"scores", std::move(scores)},
          {"locations", std::move(rows)},
          {"samples", std::move(samples)},
          {"posts_with_word", seen}};
}

json ReviewService::post_annotation(const json& body) {
  Annotation a;
  try {
    a = annotation_from_json(body);
  } catch (const AnnotationError& e) {
    throw ServiceError(400, "invalid_annotation", e.what());
  }
  const auto& ranking = ranking_for(a.ranking);
  a.ranking = std::string(metric_name(ranking.metric()));
  if (ranking.find(a.word) == nullptr) {
    throw ServiceError(404, "unknown_word", "word '" + a.word + "' is not in ranking " + a.ranking);
  }
  if (a.timestamp.empty()) a.timestamp = utc_timestamp_now();
  store_.append(a);
  return to_json(a);
}

json ReviewService::export_annotations(std::string_view metric) const {
  const auto& ranking = ranking_for(metric);
  const std::string name(metric_name(ranking.metric()));
  const auto current = store_.current(name);
  return export_document(current, name);
}

}  // namespace regiolex
