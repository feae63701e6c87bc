#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "regiolex/corpus.hpp"
#include "regiolex/stats.hpp"

namespace regiolex {

enum class Metric {
  HWords,     // word-count entropy
  HUsers,     // user-count entropy
  IWordsRaw,  // p(w) (log N - H_words)
  IUsersRaw,  // q(w) (log N - H_users)
  LtfIg,      // n_words (log N - H_words)
  LufIg,      // n_users (log N - H_users)
  IgrWords,   // information gain ratio over token counts
  IgrUsers,   // information gain ratio over user counts
  TfIlf,      // ordering only: location frequency asc, term frequency desc
};

std::string_view metric_name(Metric metric);
std::optional<Metric> parse_metric(std::string_view name);
/// Every metric, TF-ILF last.
std::span<const Metric> all_metrics();
/// Metrics that produce a real-valued score (everything except TF-ILF).
std::span<const Metric> score_metrics();

/// Evaluates the word-scoring metrics over an immutable CorpusStats.
///
/// Entropies are bounded by log N. Information gain includes the constant
/// H(L), so IG(w) = H(L) - H(L | w) >= 0 exactly; IGR = IG / IV is therefore
/// independent of the logarithm base.
class MetricEvaluator {
 public:
  explicit MetricEvaluator(const CorpusStats& stats, EstimationOptions options = {});

  const Estimator& estimator() const { return estimator_; }
  const CorpusStats& stats() const { return estimator_.stats(); }

  double h_words(std::string_view word) const;
  double h_users(std::string_view word) const;
  double i_words_raw(std::string_view word) const;
  double i_users_raw(std::string_view word) const;
  double ltf_ig(std::string_view word) const;
  double luf_ig(std::string_view word) const;

  double information_gain(std::string_view word, Basis basis) const;
  double intrinsic_value(std::string_view word, Basis basis) const;
  /// Throws StatsError when P(w) is 0 or 1 under the basis (IV = 0).
  double igr(std::string_view word, Basis basis) const;
  /// IGR, or 0 when it is undefined. A word used by every user (or making up
  /// every token) splits nothing, so its gain is 0 as well.
  double igr_or_zero(std::string_view word, Basis basis) const;

  /// Value of a score metric. Throws StatsError for TF-ILF.
  double score(Metric metric, std::string_view word) const;

  /// log N in the configured base.
  double max_entropy() const { return log_n_ * scale_; }

 private:
  double entropy_nats(std::string_view word, Basis basis) const;
  struct Split {
    double p_word;
    double p_rest;
    double conditional_entropy;  // H(L | word-indicator), nats
  };
  Split split(std::string_view word, Basis basis) const;

  Estimator estimator_;
  double log_n_;
  double scale_;
  double class_entropy_occurrences_;
  double class_entropy_users_;
};

double h_words(const CorpusStats& stats, std::string_view word);
double h_users(const CorpusStats& stats, std::string_view word);
double i_words_raw(const CorpusStats& stats, std::string_view word);
double i_users_raw(const CorpusStats& stats, std::string_view word);
double ltf_ig(const CorpusStats& stats, std::string_view word);
double luf_ig(const CorpusStats& stats, std::string_view word);
double igr(const CorpusStats& stats, std::string_view word, Basis basis);

struct RankingEntry {
  std::size_t rank = 0;  // 1-based
  std::string word;
  double value = 0.0;
  bool toponym = false;
  bool operator==(const RankingEntry&) const = default;
};

/// An ordered word list under one metric, ranks contiguous from 1.
///
/// Tie rule: score metrics order by value descending, then occurrences
/// descending, then word bytes ascending. TF-ILF orders by number of
/// locations with occurrences ascending, then occurrences descending, then
/// word bytes ascending; its `value` is the location count.
class Ranking {
 public:
  Ranking() = default;
  Ranking(Metric metric, std::vector<RankingEntry> entries);

  Metric metric() const { return metric_; }
  const std::vector<RankingEntry>& entries() const { return entries_; }
  std::vector<RankingEntry>& mutable_entries() { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const RankingEntry* find(std::string_view word) const;
  std::optional<std::size_t> rank_of(std::string_view word) const;

  bool operator==(const Ranking& other) const {
    return metric_ == other.metric_ && entries_ == other.entries_;
  }

 private:
  Metric metric_ = Metric::LufIg;
  std::vector<RankingEntry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

Ranking build_ranking(const CorpusStats& stats, Metric metric, EstimationOptions options = {});
Ranking tf_ilf_order(const CorpusStats& stats);

/// log(rank under the user ranking) - log(rank under the word ranking).
/// Large positive values mark words that rank far better by token counts
/// than by user counts. Throws StatsError when either ranking lacks the word.
double log_rank_diff(const Ranking& by_words, const Ranking& by_users, std::string_view word);

struct RankDiff {
  std::string word;
  std::size_t word_rank = 0;
  std::size_t user_rank = 0;
  double log_diff = 0.0;
};

/// Words present in both rankings sorted by log_rank_diff descending (ties by
/// word), truncated to `k` (0 keeps all).
std::vector<RankDiff> top_rank_diffs(const Ranking& by_words, const Ranking& by_users, std::size_t k);

/// Matches words against location names and aliases: a word is a suspected
/// toponym when, lowercased, it equals a name or alias or is a prefix of at
/// least three code points of one. Accent-stripped spellings of the names
/// are matched too.
class ToponymMatcher {
 public:
  explicit ToponymMatcher(const LocationTable& locations);
  bool matches(std::string_view word) const;

 private:
  std::unordered_set<std::string> prefixes_;
};

void flag_toponyms(Ranking& ranking, const LocationTable& locations);

/// Ranking export. Columns: rank, word, metric_value, occurrences, users,
/// locations, toponym (0/1). Lines starting with '#' carry provenance and are
/// ignored by the reader.
void write_ranking_tsv(const Ranking& ranking, const CorpusStats& stats, std::ostream& out,
                       std::string_view provenance = {});
Ranking read_ranking_tsv(std::istream& in, Metric metric);

/// One row per word with every score metric and the TF-ILF rank.
void write_scores_tsv(const CorpusStats& stats, std::span<const Ranking> rankings, std::ostream& out,
                      std::string_view provenance = {});

}  // namespace regiolex
