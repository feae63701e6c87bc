#include "regiolex/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "parallel.hpp"
#include "regiolex/text.hpp"

namespace regiolex {

namespace {

constexpr std::array<Metric, 9> kAllMetrics = {
    Metric::HWords, Metric::HUsers,   Metric::IWordsRaw, Metric::IUsersRaw, Metric::LtfIg,
    Metric::LufIg,  Metric::IgrWords, Metric::IgrUsers,  Metric::TfIlf,
};

double entropy_of_counts(std::span<const double> counts, double total) {
  std::vector<double> probs;
  probs.reserve(counts.size());
  for (double c : counts) probs.push_back(c / total);
  return shannon_entropy(probs);
}

double binary_entropy(double p, double q) {
  double h = 0.0;
  if (p > 0.0) h -= p * std::log(p);
  if (q > 0.0) h -= q * std::log(q);
  return h;
}

}  // namespace

std::string_view metric_name(Metric metric) {
  switch (metric) {
    case Metric::HWords: return "h_words";
    case Metric::HUsers: return "h_users";
    case Metric::IWordsRaw: return "i_words_raw";
    case Metric::IUsersRaw: return "i_users_raw";
    case Metric::LtfIg: return "ltf_ig";
    case Metric::LufIg: return "luf_ig";
    case Metric::IgrWords: return "igr_words";
    case Metric::IgrUsers: return "igr_users";
    case Metric::TfIlf: return "tf_ilf";
  }
  return "unknown";
}

std::optional<Metric> parse_metric(std::string_view name) {
  std::string key = to_lower(name);
  std::replace(key.begin(), key.end(), '-', '_');
  for (Metric m : kAllMetrics) {
    if (metric_name(m) == key) return m;
  }
  return std::nullopt;
}

std::span<const Metric> all_metrics() { return kAllMetrics; }
std::span<const Metric> score_metrics() { return std::span<const Metric>(kAllMetrics).first(8); }

// ---------------------------------------------------------------------------

MetricEvaluator::MetricEvaluator(const CorpusStats& stats, EstimationOptions options)
    : estimator_(stats, options),
      log_n_(std::log(static_cast<double>(stats.num_locations()))),
      scale_(options.nats_to_base()) {
  const auto n = stats.num_locations();
  std::vector<double> tokens(n);
  std::vector<double> users(n);
  for (std::size_t l = 0; l < n; ++l) {
    tokens[l] = static_cast<double>(stats.location_tokens(static_cast<LocationIndex>(l)));
    users[l] = static_cast<double>(stats.location_users(static_cast<LocationIndex>(l)));
  }
  class_entropy_occurrences_ =
      stats.total_tokens() ? entropy_of_counts(tokens, static_cast<double>(stats.total_tokens())) : 0.0;
  class_entropy_users_ =
      stats.total_users() ? entropy_of_counts(users, static_cast<double>(stats.total_users())) : 0.0;
}

double MetricEvaluator::entropy_nats(std::string_view word, Basis basis) const {
  return shannon_entropy(estimator_.location_distribution(word, basis).probs);
}

double MetricEvaluator::h_words(std::string_view word) const {
  return entropy_nats(word, Basis::Occurrences) * scale_;
}

double MetricEvaluator::h_users(std::string_view word) const {
  return entropy_nats(word, Basis::Users) * scale_;
}

double MetricEvaluator::i_words_raw(std::string_view word) const {
  const auto profile = estimator_.frequency_profile(word);
  return profile.p * std::max(0.0, log_n_ - entropy_nats(word, Basis::Occurrences)) * scale_;
}

double MetricEvaluator::i_users_raw(std::string_view word) const {
  const auto profile = estimator_.frequency_profile(word);
  return profile.q * std::max(0.0, log_n_ - entropy_nats(word, Basis::Users)) * scale_;
}

double MetricEvaluator::ltf_ig(std::string_view word) const {
  const auto profile = estimator_.frequency_profile(word);
  return profile.n_words * std::max(0.0, log_n_ - entropy_nats(word, Basis::Occurrences)) * scale_;
}

double MetricEvaluator::luf_ig(std::string_view word) const {
  const auto profile = estimator_.frequency_profile(word);
  return profile.n_users * std::max(0.0, log_n_ - entropy_nats(word, Basis::Users)) * scale_;
}

MetricEvaluator::Split MetricEvaluator::split(std::string_view word, Basis basis) const {
  const auto& s = stats();
  const auto& counts = s.at(word);
  const std::size_t n = s.num_locations();
  const bool by_users = basis == Basis::Users;

  const double total = static_cast<double>(by_users ? s.total_users() : s.total_tokens());
  const double in_word = static_cast<double>(by_users ? counts.user_count() : counts.occurrences);
  const double outside = total - in_word;

  std::vector<double> with(n);
  std::vector<double> without(n);
  for (std::size_t l = 0; l < n; ++l) {
    const auto li = static_cast<LocationIndex>(l);
    const double c = static_cast<double>(by_users ? counts.users_by_location[l] : counts.by_location[l]);
    const double size = static_cast<double>(by_users ? s.location_users(li) : s.location_tokens(li));
    with[l] = c;
    without[l] = size - c;
  }

  Split result{};
  result.p_word = total > 0.0 ? in_word / total : 0.0;
  result.p_rest = total > 0.0 ? outside / total : 0.0;
  double h = 0.0;
  if (in_word > 0.0) h += result.p_word * entropy_of_counts(with, in_word);
  if (outside > 0.0) h += result.p_rest * entropy_of_counts(without, outside);
  result.conditional_entropy = h;
  return result;
}

double MetricEvaluator::information_gain(std::string_view word, Basis basis) const {
  const double class_entropy = basis == Basis::Users ? class_entropy_users_ : class_entropy_occurrences_;
  return std::max(0.0, class_entropy - split(word, basis).conditional_entropy) * scale_;
}

double MetricEvaluator::intrinsic_value(std::string_view word, Basis basis) const {
  const auto sp = split(word, basis);
  return binary_entropy(sp.p_word, sp.p_rest) * scale_;
}

double MetricEvaluator::igr(std::string_view word, Basis basis) const {
  const auto sp = split(word, basis);
  if (!(sp.p_word > 0.0) || !(sp.p_rest > 0.0)) {
    throw StatsError("information gain ratio undefined for '" + std::string(word) +
                     "': P(w) is 0 or 1 under the " + (basis == Basis::Users ? "user" : "occurrence") +
                     " basis");
  }
  const double class_entropy = basis == Basis::Users ? class_entropy_users_ : class_entropy_occurrences_;
  const double gain = std::max(0.0, class_entropy - sp.conditional_entropy);
  return gain / binary_entropy(sp.p_word, sp.p_rest);
}

double MetricEvaluator::igr_or_zero(std::string_view word, Basis basis) const {
  const auto sp = split(word, basis);
  if (!(sp.p_word > 0.0) || !(sp.p_rest > 0.0)) return 0.0;
  return igr(word, basis);
}

double MetricEvaluator::score(Metric metric, std::string_view word) const {
  switch (metric) {
    case Metric::HWords: return h_words(word);
    case Metric::HUsers: return h_users(word);
    case Metric::IWordsRaw: return i_words_raw(word);
    case Metric::IUsersRaw: return i_users_raw(word);
    case Metric::LtfIg: return ltf_ig(word);
    case Metric::LufIg: return luf_ig(word);
    case Metric::IgrWords: return igr(word, Basis::Occurrences);
    case Metric::IgrUsers: return igr(word, Basis::Users);
    case Metric::TfIlf: break;
  }
  throw StatsError("tf_ilf is an ordering, not a score");
}

double h_words(const CorpusStats& stats, std::string_view word) { return MetricEvaluator(stats).h_words(word); }
double h_users(const CorpusStats& stats, std::string_view word) { return MetricEvaluator(stats).h_users(word); }
double i_words_raw(const CorpusStats& stats, std::string_view word) {
  return MetricEvaluator(stats).i_words_raw(word);
}
double i_users_raw(const CorpusStats& stats, std::string_view word) {
  return MetricEvaluator(stats).i_users_raw(word);
}
double ltf_ig(const CorpusStats& stats, std::string_view word) { return MetricEvaluator(stats).ltf_ig(word); }
double luf_ig(const CorpusStats& stats, std::string_view word) { return MetricEvaluator(stats).luf_ig(word); }
double igr(const CorpusStats& stats, std::string_view word, Basis basis) {
  return MetricEvaluator(stats).igr(word, basis);
}

// ---------------------------------------------------------------------------

Ranking::Ranking(Metric metric, std::vector<RankingEntry> entries)
    : metric_(metric), entries_(std::move(entries)) {
  index_.reserve(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].rank != i + 1) {
      throw StatsError("ranking entries must carry contiguous ranks starting at 1");
    }
    if (!index_.emplace(entries_[i].word, i).second) {
      throw StatsError("word '" + entries_[i].word + "' appears twice in a ranking");
    }
  }
}

const RankingEntry* Ranking::find(std::string_view word) const {
  const auto it = index_.find(std::string(word));
  return it == index_.end() ? nullptr : &entries_[it->second];
}

std::optional<std::size_t> Ranking::rank_of(std::string_view word) const {
  const auto* e = find(word);
  if (e == nullptr) return std::nullopt;
  return e->rank;
}

namespace {

// Orders by `keys` and reports `values`; the two differ only by a positive
// factor when a non-natural log base is configured.
Ranking sorted_ranking(Metric metric, const CorpusStats& stats, std::vector<std::string> words,
                       const std::vector<double>& keys, const std::vector<double>& values) {
  std::vector<std::size_t> order(words.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<std::uint64_t> occurrences(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) occurrences[i] = stats.at(words[i]).occurrences;

  const bool ascending = metric == Metric::TfIlf;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (keys[a] != keys[b]) return ascending ? keys[a] < keys[b] : keys[a] > keys[b];
    if (occurrences[a] != occurrences[b]) return occurrences[a] > occurrences[b];
    return words[a] < words[b];
  });

  std::vector<RankingEntry> entries;
  entries.reserve(words.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    entries.push_back({pos + 1, std::move(words[order[pos]]), values[order[pos]], false});
  }
  return Ranking(metric, std::move(entries));
}

}  // namespace

Ranking tf_ilf_order(const CorpusStats& stats) {
  auto words = stats.vocabulary();
  std::vector<double> values(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) {
    values[i] = static_cast<double>(stats.at(words[i]).locations_with_occurrences());
  }
  return sorted_ranking(Metric::TfIlf, stats, std::move(words), values, values);
}

Ranking build_ranking(const CorpusStats& stats, Metric metric, EstimationOptions options) {
  if (metric == Metric::TfIlf) return tf_ilf_order(stats);
  // Sorting on natural-log values keeps the order independent of the base:
  // rescaling can merge two nearly equal doubles into a tie.
  const double scale = options.nats_to_base();
  options.log_base = 0.0;
  const MetricEvaluator evaluator(stats, options);
  const bool unitless = metric == Metric::IgrWords || metric == Metric::IgrUsers;
  auto words = stats.vocabulary();
  std::vector<double> keys(words.size()), values(words.size());
  detail::parallel_for(words.size(), [&](std::size_t i) {
    switch (metric) {
      case Metric::IgrWords: keys[i] = evaluator.igr_or_zero(words[i], Basis::Occurrences); break;
      case Metric::IgrUsers: keys[i] = evaluator.igr_or_zero(words[i], Basis::Users); break;
      default: keys[i] = evaluator.score(metric, words[i]); break;
    }
    values[i] = unitless ? keys[i] : keys[i] * scale;
  });
  return sorted_ranking(metric, stats, std::move(words), keys, values);
}

double log_rank_diff(const Ranking& by_words, const Ranking& by_users, std::string_view word) {
  const auto word_rank = by_words.rank_of(word);
  const auto user_rank = by_users.rank_of(word);
  if (!word_rank || !user_rank) {
    throw StatsError("word '" + std::string(word) + "' is missing from one of the rankings");
  }
  return std::log(static_cast<double>(*user_rank)) - std::log(static_cast<double>(*word_rank));
}

std::vector<RankDiff> top_rank_diffs(const Ranking& by_words, const Ranking& by_users, std::size_t k) {
  std::vector<RankDiff> diffs;
  diffs.reserve(by_words.size());
  for (const auto& entry : by_words.entries()) {
    const auto user_rank = by_users.rank_of(entry.word);
    if (!user_rank) continue;
    diffs.push_back({entry.word, entry.rank, *user_rank, log_rank_diff(by_words, by_users, entry.word)});
  }
  std::sort(diffs.begin(), diffs.end(), [](const RankDiff& a, const RankDiff& b) {
    if (a.log_diff != b.log_diff) return a.log_diff > b.log_diff;
    return a.word < b.word;
  });
  if (k != 0 && diffs.size() > k) diffs.resize(k);
  return diffs;
}

// ---------------------------------------------------------------------------

namespace {

char32_t strip_acute(char32_t cp) {
  switch (cp) {
    case 0xE1: return U'a';
    case 0xE9: return U'e';
    case 0xED: return U'i';
    case 0xF3: return U'o';
    case 0xFA: return U'u';
    case 0xFC: return U'u';
    default: return cp;
  }
}

}  // namespace

ToponymMatcher::ToponymMatcher(const LocationTable& locations) {
  const auto add_all_prefixes = [&](std::u32string_view name) {
    if (name.size() < 3) {
      if (!name.empty()) prefixes_.insert(utf8::encode(name));
      return;
    }
    for (std::size_t len = 3; len <= name.size(); ++len) prefixes_.insert(utf8::encode(name.substr(0, len)));
  };
  const auto add_name = [&](const std::string& raw) {
    std::u32string name = utf8::decode(to_lower(raw));
    add_all_prefixes(name);
    std::u32string plain = name;
    std::transform(plain.begin(), plain.end(), plain.begin(), strip_acute);
    if (plain != name) add_all_prefixes(plain);
  };
  for (const auto& loc : locations.entries()) {
    add_name(loc.name);
    for (const auto& alias : loc.aliases) add_name(alias);
  }
}

bool ToponymMatcher::matches(std::string_view word) const {
  return prefixes_.contains(to_lower(word));
}

void flag_toponyms(Ranking& ranking, const LocationTable& locations) {
  const ToponymMatcher matcher(locations);
  for (auto& entry : ranking.mutable_entries()) entry.toponym = matcher.matches(entry.word);
}

}  // namespace regiolex
