#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "regiolex/corpus.hpp"
#include "regiolex/metrics.hpp"
#include "regiolex/samples.hpp"

namespace regiolex {

/// A lexicographer's judgement of one word in one ranking.
struct Annotation {
  std::string word;
  std::string ranking;  // metric name
  int label = 0;        // 0 or 1
  std::optional<std::string> category;
  std::optional<std::string> note;
  std::string annotator;
  std::string timestamp;  // ISO 8601, UTC

  bool operator==(const Annotation&) const = default;
};

class AnnotationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

nlohmann::json to_json(const Annotation& a);
/// Strict parse: word, ranking, annotator are non-empty strings, label is the
/// integer 0 or 1, category/note are strings or null. A missing timestamp is
/// left empty.
Annotation annotation_from_json(const nlohmann::json& j);

std::string utc_timestamp_now();

/// Append-only JSONL log of annotations. Appends are serialized by a mutex
/// and flushed before returning; readers replay the log and keep the last
/// record per (word, ranking, annotator).
class AnnotationStore {
 public:
  explicit AnnotationStore(std::filesystem::path log);

  const std::filesystem::path& path() const { return log_; }

  void append(const Annotation& a);
  /// Every record in write order. A torn final line (crash mid-write) is ignored.
  std::vector<Annotation> history() const;
  /// Current annotations sorted by (ranking, word, annotator).
  std::vector<Annotation> current() const;
  std::vector<Annotation> current(std::string_view ranking) const;

 private:
  std::filesystem::path log_;
  mutable std::mutex mutex_;
};

/// Keeps the last annotation per (word, ranking, annotator), sorted.
std::vector<Annotation> supersede(std::span<const Annotation> history);

struct AnnotationSummary {
  std::string ranking;
  std::size_t annotations = 0;  // current (word, annotator) judgements
  std::size_t labeled_one = 0;
  std::size_t words = 0;  // distinct words with at least one judgement
  double fraction_labeled_one = 0.0;  // labeled_one / annotations, 0 when empty
};

AnnotationSummary summarize(std::span<const Annotation> current, std::string_view ranking);
nlohmann::json to_json(const AnnotationSummary& s);
/// {"ranking", "summary", "annotations": [...]}: the export document.
nlohmann::json export_document(std::span<const Annotation> current, std::string_view ranking);

/// Error surfaced to clients as {code, message} with an HTTP status.
class ServiceError : public std::runtime_error {
 public:
  ServiceError(int status, std::string code, const std::string& message)
      : std::runtime_error(message), status_(status), code_(std::move(code)) {}
  int status() const { return status_; }
  const std::string& code() const { return code_; }

 private:
  int status_;
  std::string code_;
};

/// On-disk inputs of the review service. Ranking files are found in
/// rankings_dir as ranking_<metric>.tsv.
struct ReviewPaths {
  std::filesystem::path stats;
  std::filesystem::path rankings_dir;
  std::optional<std::filesystem::path> samples;
  std::filesystem::path annotations;
  std::string salt;
};

/// The read side of the annotation workflow plus the annotation store. All
/// responses are JSON and derive only from the stats, rankings, sample index
/// and annotation log, so a restart loses nothing.
class ReviewService {
 public:
  static constexpr std::size_t kMaxSamples = 20;
  static constexpr std::size_t kDefaultLimit = 50;
  static constexpr std::size_t kMaxLimit = 1000;

  ReviewService(CorpusStats stats, std::vector<Ranking> rankings, std::optional<SampleIndex> samples,
                std::filesystem::path annotation_log, std::string salt);
  static std::unique_ptr<ReviewService> open(const ReviewPaths& paths);

  /// Page of a ranking with annotation status per entry.
  nlohmann::json rankings_page(std::string_view metric, std::size_t offset, std::size_t limit) const;
  nlohmann::json word_detail(std::string_view word) const;
  /// Validates and stores the annotation; returns the stored record.
  nlohmann::json post_annotation(const nlohmann::json& body);
  nlohmann::json export_annotations(std::string_view metric) const;

  /// Salted SHA-256 of a user id, as shown to clients.
  std::string pseudonym(std::string_view user_id) const;

  std::vector<std::string> metrics() const;
  const CorpusStats& stats() const { return stats_; }
  AnnotationStore& store() { return store_; }

 private:
  const Ranking& ranking_for(std::string_view metric) const;

  CorpusStats stats_;
  std::map<std::string, Ranking, std::less<>> rankings_;
  std::optional<SampleIndex> samples_;
  AnnotationStore store_;
  std::string salt_;
  ToponymMatcher toponyms_;
};

/// HTTP front end over a ReviewService:
///   GET  /api/rankings/{metric}?offset&limit
///   GET  /api/words/{word}
///   POST /api/annotations
///   GET  /api/export/{metric}
/// plus static files from `static_dir` at / when given.
class ReviewServer {
 public:
  ReviewServer(ReviewService& service, std::optional<std::filesystem::path> static_dir = std::nullopt);
  ~ReviewServer();
  ReviewServer(const ReviewServer&) = delete;
  ReviewServer& operator=(const ReviewServer&) = delete;

  /// Binds without serving yet. port 0 picks a free port; returns the bound port.
  int bind(const std::string& host, int port);
  /// Serves until stop(). Call after bind().
  bool listen();
  void stop();
  /// Blocks until the server accepts connections.
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace regiolex
