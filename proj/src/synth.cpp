#include "regiolex/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "regiolex/random.hpp"
#include "strings.hpp"

namespace regiolex {

namespace {

std::string numbered(const char* prefix, std::size_t width, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%0*zu", prefix, static_cast<int>(width), i);
  return buf;
}

std::size_t digits_for(std::size_t n) {
  std::size_t d = 1;
  while (n >= 10) {
    n /= 10;
    ++d;
  }
  return d;
}

LocationTable synthetic_locations(std::size_t n) {
  const std::size_t width = std::max<std::size_t>(2, digits_for(n));
  std::vector<Location> entries;
  entries.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Location loc;
    loc.id = numbered("P", width, i + 1);
    loc.name = numbered("Province ", width, i + 1);
    loc.aliases = {numbered("p", width, i + 1)};
    // Spread capitals over a 32 x 14 degree box so distances are non-trivial.
    const double t = n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.0;
    const double golden = std::fmod(static_cast<double>(i) * 0.6180339887498949, 1.0);
    loc.capital = {-22.0 - 32.0 * t, -72.0 + 14.0 * golden};
    entries.push_back(std::move(loc));
  }
  return LocationTable(std::move(entries));
}

std::string synthetic_timestamp(std::uint64_t sequence) {
  // 2019-01-01T00:00:00Z plus an irregular but deterministic offset.
  const std::time_t t = static_cast<std::time_t>(1546300800 + sequence * 397);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

double home_weight(const SynthConfig& c, std::size_t homes) {
  return c.concentration / static_cast<double>(homes);
}

double away_weight(const SynthConfig& c, std::size_t homes) {
  return (1.0 - c.concentration) / static_cast<double>(c.locations - homes);
}

std::size_t sample_cdf(const std::vector<double>& cdf, double u) {
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

}  // namespace

void SynthConfig::validate() const {
  const auto fail = [](const std::string& msg) { throw std::invalid_argument("synth config: " + msg); };
  if (locations < 2) fail("need at least 2 locations");
  if (users_per_location < 1) fail("users_per_location must be positive");
  if (posts_min < 1 || posts_min > posts_max) fail("need 1 <= posts_min <= posts_max");
  if (tokens_min < 1 || tokens_min > tokens_max) fail("need 1 <= tokens_min <= tokens_max");
  if (background_words < 1) fail("background_words must be positive");
  if (!(zipf_exponent >= 0.0)) fail("zipf_exponent must be non-negative");
  if (regionalisms > 0) {
    if (!(concentration > 1.0 / static_cast<double>(locations) && concentration <= 1.0)) {
      fail("concentration must be in (1/N, 1]");
    }
    if (home_min < 1 || home_min > home_max || home_max >= locations) {
      fail("need 1 <= home_min <= home_max < locations");
    }
    if (!(regional_rate > 0.0 && regional_rate < 1.0)) fail("regional_rate must be in (0, 1)");
    // Worst case: every regionalism shares the same single home.
    const double worst = regional_rate * static_cast<double>(locations) *
                         std::max(concentration / static_cast<double>(home_min),
                                  (1.0 - concentration) / static_cast<double>(locations - home_max));
    if (worst >= 1.0) fail("regional_rate too high: regional emission probability could reach 1");
  }
  if (bot_words > 0) {
    if (bot_users_max < 1) fail("bot_users_max must be positive");
    if (bot_posts < 1 || bot_tokens_per_post < 1) fail("bot_posts and bot_tokens_per_post must be positive");
  }
}

std::string_view label_name(WordLabel label) {
  switch (label) {
    case WordLabel::Background: return "background";
    case WordLabel::Regionalism: return "regionalism";
    case WordLabel::Bot: return "bot";
  }
  return "unknown";
}

double regional_emission_probability(const SynthConfig& config, const TruthEntry& regionalism,
                                     LocationIndex location) {
  const auto homes = regionalism.homes.size();
  const bool at_home = std::find(regionalism.homes.begin(), regionalism.homes.end(), location) !=
                       regionalism.homes.end();
  const double w = at_home ? home_weight(config, homes) : away_weight(config, homes);
  return config.regional_rate * static_cast<double>(config.locations) /
         static_cast<double>(config.regionalisms) * w;
}

SynthCorpus generate(const SynthConfig& config) {
  config.validate();
  Rng rng(config.seed);
  SynthCorpus corpus{synthetic_locations(config.locations), {}, {}};
  const std::size_t n_loc = config.locations;

  // Background lexicon with Zipfian weights: rank k has weight k^-s.
  std::vector<double> zipf_cdf(config.background_words);
  {
    const std::size_t width = std::max<std::size_t>(4, digits_for(config.background_words));
    double acc = 0.0;
    for (std::size_t k = 0; k < config.background_words; ++k) {
      acc += std::pow(static_cast<double>(k + 1), -config.zipf_exponent);
      zipf_cdf[k] = acc;
      corpus.truth.push_back({numbered("bg", width, k + 1), WordLabel::Background, {}});
    }
    for (auto& v : zipf_cdf) v /= acc;
  }
  const auto background_word = [&](Rng& r) -> const std::string& {
    return corpus.truth[sample_cdf(zipf_cdf, uniform_unit(r))].word;
  };

  // Planted regionalisms and their home locations.
  const std::size_t first_regionalism = corpus.truth.size();
  for (std::size_t r = 0; r < config.regionalisms; ++r) {
    const auto n_homes = uniform_between(rng, config.home_min, config.home_max);
    std::vector<LocationIndex> pool(n_loc);
    for (std::size_t l = 0; l < n_loc; ++l) pool[l] = static_cast<LocationIndex>(l);
    for (std::size_t i = 0; i < n_homes; ++i) std::swap(pool[i], pool[i + uniform_index(rng, n_loc - i)]);
    std::vector<LocationIndex> homes(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n_homes));
    std::sort(homes.begin(), homes.end());
    corpus.truth.push_back({numbered("rg", 3, r + 1), WordLabel::Regionalism, std::move(homes)});
  }

  // Per-location cumulative emission table over regionalisms.
  std::vector<std::vector<double>> regional_cdf(n_loc, std::vector<double>(config.regionalisms));
  std::vector<double> regional_total(n_loc, 0.0);
  for (std::size_t l = 0; l < n_loc; ++l) {
    double acc = 0.0;
    for (std::size_t r = 0; r < config.regionalisms; ++r) {
      acc += regional_emission_probability(config, corpus.truth[first_regionalism + r],
                                           static_cast<LocationIndex>(l));
      regional_cdf[l][r] = acc;
    }
    regional_total[l] = acc;
  }

  std::uint64_t sequence = 0;
  const auto emit = [&](const std::string& user, LocationIndex l, std::vector<std::string_view> tokens) {
    std::string text;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (i) text += ' ';
      text += tokens[i];
    }
    corpus.posts.push_back({user, corpus.locations[l].id, std::move(text), synthetic_timestamp(sequence++)});
  };

  const std::size_t user_width = std::max<std::size_t>(3, digits_for(config.users_per_location));
  for (std::size_t l = 0; l < n_loc; ++l) {
    const auto loc = static_cast<LocationIndex>(l);
    for (std::size_t k = 0; k < config.users_per_location; ++k) {
      const std::string user = "u" + corpus.locations[loc].id.substr(1) + "_" + numbered("", user_width, k + 1);
      const auto n_posts = uniform_between(rng, config.posts_min, config.posts_max);
      for (std::size_t p = 0; p < n_posts; ++p) {
        const auto len = uniform_between(rng, config.tokens_min, config.tokens_max);
        std::vector<std::string_view> tokens;
        tokens.reserve(len);
        for (std::size_t t = 0; t < len; ++t) {
          const double u = uniform_unit(rng);
          if (u < regional_total[l]) {
            tokens.push_back(corpus.truth[first_regionalism + sample_cdf(regional_cdf[l], u)].word);
          } else {
            tokens.push_back(background_word(rng));
          }
        }
        emit(user, loc, std::move(tokens));
      }
    }
  }

  // Bot vocabularies: few accounts, one location, many repetitions.
  for (std::size_t b = 0; b < config.bot_words; ++b) {
    const auto loc = static_cast<LocationIndex>(uniform_index(rng, n_loc));
    const auto n_accounts = uniform_between(rng, 1, config.bot_users_max);
    corpus.truth.push_back({numbered("bot", 2, b + 1), WordLabel::Bot, {loc}});
    const std::string& word = corpus.truth.back().word;
    for (std::size_t a = 0; a < n_accounts; ++a) {
      const std::string user = word + "_" + std::to_string(a + 1);
      for (std::size_t p = 0; p < config.bot_posts; ++p) {
        const auto len = uniform_between(rng, config.tokens_min, config.tokens_max);
        std::vector<std::string_view> tokens(config.bot_tokens_per_post, word);
        for (std::size_t t = 0; t < len; ++t) tokens.push_back(background_word(rng));
        emit(user, loc, std::move(tokens));
      }
    }
  }
  return corpus;
}

void write_posts(const SynthCorpus& corpus, std::ostream& out) {
  for (const auto& post : corpus.posts) out << format_post_line(post) << '\n';
}

void write_truth_tsv(const SynthCorpus& corpus, std::ostream& out) {
  out << "word\tlabel\thome_locations\n";
  for (const auto& e : corpus.truth) {
    out << e.word << '\t' << label_name(e.label) << '\t';
    for (std::size_t i = 0; i < e.homes.size(); ++i) {
      if (i) out << ',';
      out << corpus.locations[e.homes[i]].id;
    }
    out << '\n';
  }
}

void write_corpus(const SynthCorpus& corpus, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto open = [&](const char* name) {
    std::ofstream out(dir / name, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    return out;
  };
  auto posts = open("posts.tsv");
  write_posts(corpus, posts);
  auto locations = open("locations.tsv");
  corpus.locations.write_tsv(locations);
  auto truth = open("truth.tsv");
  write_truth_tsv(corpus, truth);
}

}  // namespace regiolex
