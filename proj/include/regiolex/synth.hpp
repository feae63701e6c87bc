#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "regiolex/corpus.hpp"
#include "regiolex/locations.hpp"

namespace regiolex {

/// Parameters of the synthetic corpus model.
///
/// Every token slot of an ordinary user's post independently becomes a
/// planted regionalism or a background word. A regionalism r is emitted in
/// location l with probability  regional_rate * N / R * w_r(l),  where
/// w_r(l) = concentration / |homes_r| inside its home locations and
/// (1 - concentration) / (N - |homes_r|) elsewhere. With balanced locations
/// a `concentration` share of r's tokens lands in its homes. Remaining slots
/// draw from a Zipfian background vocabulary independent of location.
///
/// Each bot word belongs to 1..bot_users_max accounts of a single location
/// that post it bot_tokens_per_post times in each of their bot_posts posts.
struct SynthConfig {
  std::uint64_t seed = 1;
  std::size_t locations = 23;
  std::size_t users_per_location = 40;
  std::size_t posts_min = 10;
  std::size_t posts_max = 40;
  std::size_t tokens_min = 4;
  std::size_t tokens_max = 14;

  std::size_t background_words = 2000;
  double zipf_exponent = 1.0;

  std::size_t regionalisms = 50;
  double concentration = 0.9;
  std::size_t home_min = 1;
  std::size_t home_max = 3;
  double regional_rate = 0.03;

  std::size_t bot_words = 20;
  std::size_t bot_users_max = 3;
  std::size_t bot_posts = 60;
  std::size_t bot_tokens_per_post = 2;

  /// Throws std::invalid_argument on an inconsistent configuration.
  void validate() const;
};

enum class WordLabel { Background, Regionalism, Bot };
std::string_view label_name(WordLabel label);

struct TruthEntry {
  std::string word;
  WordLabel label = WordLabel::Background;
  std::vector<LocationIndex> homes;  // empty for background words
};

struct SynthCorpus {
  LocationTable locations;
  std::vector<RawPost> posts;
  std::vector<TruthEntry> truth;  // every word the generator can emit
};

/// Deterministic per seed.
SynthCorpus generate(const SynthConfig& config);

/// Probability that a token slot in `location` emits regionalism `r`
/// (index into the regionalism entries of the truth table, in order).
double regional_emission_probability(const SynthConfig& config, const TruthEntry& regionalism,
                                     LocationIndex location);

/// Posts in the TSV line format read by ingest.
void write_posts(const SynthCorpus& corpus, std::ostream& out);
/// Columns: word, label, home_locations (comma-separated location ids).
void write_truth_tsv(const SynthCorpus& corpus, std::ostream& out);
/// Writes posts.tsv, locations.tsv and truth.tsv into `dir`.
void write_corpus(const SynthCorpus& corpus, const std::filesystem::path& dir);

}  // namespace regiolex
