#include "regiolex/stats.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "strings.hpp"

namespace regiolex {

double EstimationOptions::nats_to_base() const {
  if (log_base == 0.0) return 1.0;
  if (!(log_base > 0.0) || log_base == 1.0) {
    throw StatsError("logarithm base must be positive and different from 1");
  }
  return 1.0 / std::log(log_base);
}

double shannon_entropy(std::span<const double> probs) {
  std::vector<double> sorted;
  sorted.reserve(probs.size());
  for (double p : probs) {
    if (p > 0.0) sorted.push_back(p);
  }
  std::sort(sorted.begin(), sorted.end());
  double h = 0.0;
  for (double p : sorted) h -= p * std::log(p);
  return h;
}

Estimator::Estimator(const CorpusStats& stats, EstimationOptions options)
    : stats_(&stats), options_(options) {
  options_.nats_to_base();  // validates the base
  for (const auto& [word, counts] : stats.words()) {
    max_occurrences_ = std::max<std::uint64_t>(max_occurrences_, counts.occurrences);
    max_users_ = std::max<std::uint64_t>(max_users_, counts.user_count());
  }
}

LocationDistribution Estimator::location_distribution(std::string_view word, Basis basis) const {
  const auto* counts = stats_->find(word);
  if (counts == nullptr) throw StatsError("unknown word '" + std::string(word) + "'");

  const std::size_t n = stats_->num_locations();
  LocationDistribution dist{std::string(word), std::vector<double>(n, 0.0), basis};
  const auto& raw = basis == Basis::Occurrences ? counts->by_location : counts->users_by_location;

  double total = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    double v = static_cast<double>(raw[l]);
    if (options_.normalize_location_size && v > 0.0) {
      const auto size = basis == Basis::Occurrences ? stats_->location_tokens(static_cast<LocationIndex>(l))
                                                    : stats_->location_users(static_cast<LocationIndex>(l));
      v /= static_cast<double>(size);
    }
    dist.probs[l] = v;
    total += v;
  }
  if (!(total > 0.0)) {
    throw StatsError("word '" + std::string(word) + "' has no counts under the requested basis");
  }
  for (auto& p : dist.probs) p /= total;
  return dist;
}

FrequencyProfile Estimator::frequency_profile(std::string_view word) const {
  const auto* counts = stats_->find(word);
  if (counts == nullptr) throw StatsError("unknown word '" + std::string(word) + "'");
  if (max_occurrences_ < 2) {
    throw StatsError("degenerate corpus: the most frequent word occurs once, log-frequency undefined");
  }
  if (max_users_ < 2) {
    throw StatsError("degenerate corpus: no word has two users, log user-frequency undefined");
  }
  FrequencyProfile profile;
  profile.word = std::string(word);
  const auto tokens = stats_->total_tokens();
  const auto users = stats_->total_users();
  profile.p = tokens ? static_cast<double>(counts->occurrences) / static_cast<double>(tokens) : 0.0;
  profile.q = users ? static_cast<double>(counts->user_count()) / static_cast<double>(users) : 0.0;
  profile.n_words = std::log(static_cast<double>(counts->occurrences)) /
                    std::log(static_cast<double>(max_occurrences_));
  profile.n_users = counts->user_count() == 0
                        ? 0.0
                        : std::log(static_cast<double>(counts->user_count())) /
                              std::log(static_cast<double>(max_users_));
  return profile;
}

LocationDistribution loc_dist_occurrences(const CorpusStats& stats, std::string_view word,
                                          EstimationOptions options) {
  return Estimator(stats, options).location_distribution(word, Basis::Occurrences);
}

LocationDistribution loc_dist_users(const CorpusStats& stats, std::string_view word,
                                    EstimationOptions options) {
  return Estimator(stats, options).location_distribution(word, Basis::Users);
}

FrequencyProfile frequency_profile(const CorpusStats& stats, std::string_view word) {
  return Estimator(stats).frequency_profile(word);
}

void write_profiles_tsv(const Estimator& estimator, std::ostream& out) {
  using detail::format_double;
  out << "word\toccurrences\tusers\tp\tq\tn_words\tn_users\n";
  for (const auto& word : estimator.stats().vocabulary()) {
    const auto& counts = estimator.stats().at(word);
    const auto profile = estimator.frequency_profile(word);
    out << word << '\t' << counts.occurrences << '\t' << counts.user_count() << '\t'
        << format_double(profile.p) << '\t' << format_double(profile.q) << '\t'
        << format_double(profile.n_words) << '\t' << format_double(profile.n_users) << '\n';
  }
}

}  // namespace regiolex
