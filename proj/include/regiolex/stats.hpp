#pragma once

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "regiolex/corpus.hpp"

namespace regiolex {

class StatsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Basis { Occurrences, Users };

struct EstimationOptions {
  /// Logarithm base for entropies and the information measures built on them.
  /// Values are computed in nats and rescaled, so any base gives the same
  /// ordering. 0 selects the natural logarithm.
  double log_base = 0.0;
  /// Divide each location's counts by that location's totals (tokens or users)
  /// before normalizing, for corpora that are not balanced across locations.
  bool normalize_location_size = false;

  /// 1 / ln(base), the factor that converts nats to the configured base.
  double nats_to_base() const;
};

struct LocationDistribution {
  std::string word;
  std::vector<double> probs;
  Basis basis = Basis::Occurrences;
};

struct FrequencyProfile {
  std::string word;
  double p = 0.0;        // #w / T
  double q = 0.0;        // u(w) / U
  double n_words = 0.0;  // log #w / log #M, M the most frequent word
  double n_users = 0.0;  // log u(w) / log u(M'), M' the word with most users
};

/// Shannon entropy in nats of a discrete distribution, with 0 log 0 = 0.
/// Terms are summed in ascending order of probability so permutations of the
/// same distribution give bit-identical results.
double shannon_entropy(std::span<const double> probs);

/// Probability estimates over an immutable CorpusStats. Caches the two
/// vocabulary-wide maxima used by the normalized log-frequencies.
class Estimator {
 public:
  explicit Estimator(const CorpusStats& stats, EstimationOptions options = {});

  const CorpusStats& stats() const { return *stats_; }
  const EstimationOptions& options() const { return options_; }

  /// p(l_i | O) = c(w, l_i) / #w, or u(w, l_i) / u(w) for the user basis.
  LocationDistribution location_distribution(std::string_view word, Basis basis) const;
  FrequencyProfile frequency_profile(std::string_view word) const;

  std::uint64_t max_occurrences() const { return max_occurrences_; }
  std::uint64_t max_users() const { return max_users_; }

 private:
  const CorpusStats* stats_;
  EstimationOptions options_;
  std::uint64_t max_occurrences_ = 0;
  std::uint64_t max_users_ = 0;
};

LocationDistribution loc_dist_occurrences(const CorpusStats& stats, std::string_view word,
                                          EstimationOptions options = {});
LocationDistribution loc_dist_users(const CorpusStats& stats, std::string_view word,
                                    EstimationOptions options = {});
FrequencyProfile frequency_profile(const CorpusStats& stats, std::string_view word);

/// Tab-separated dump: word, occurrences, users, p, q, n_words, n_users.
void write_profiles_tsv(const Estimator& estimator, std::ostream& out);

}  // namespace regiolex
