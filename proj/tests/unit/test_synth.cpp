#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "regiolex/corpus.hpp"
#include "regiolex/metrics.hpp"
#include "regiolex/synth.hpp"

using namespace regiolex;

namespace {

std::string posts_text(const SynthCorpus& c) {
  std::ostringstream out;
  write_posts(c, out);
  return out.str();
}

SynthConfig small_config() {
  SynthConfig c;
  c.locations = 5;
  c.users_per_location = 10;
  c.background_words = 200;
  c.regionalisms = 5;
  c.home_max = 2;
  c.bot_words = 3;
  return c;
}

}  // namespace

TEST_CASE("generation is deterministic per seed") {
  const auto a = generate(small_config());
  const auto b = generate(small_config());
  CHECK(posts_text(a) == posts_text(b));
  auto other = small_config();
  other.seed = 2;
  CHECK(posts_text(generate(other)) != posts_text(a));

  const auto dir = fixtures::temp_dir("synth_files");
  write_corpus(a, dir / "one");
  write_corpus(b, dir / "two");
  for (const char* name : {"posts.tsv", "locations.tsv", "truth.tsv"}) {
    std::ifstream x(dir / "one" / name), y(dir / "two" / name);
    std::stringstream xs, ys;
    xs << x.rdbuf();
    ys << y.rdbuf();
    CHECK(xs.str() == ys.str());
    CHECK_FALSE(xs.str().empty());
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("the truth table covers every emitted word") {
  const auto c = generate(small_config());
  std::set<std::string> truth;
  std::map<WordLabel, int> labels;
  for (const auto& e : c.truth) {
    truth.insert(e.word);
    ++labels[e.label];
    if (e.label == WordLabel::Regionalism) {
      CHECK(e.homes.size() >= 1);
      CHECK(e.homes.size() <= 2);
    }
    if (e.label == WordLabel::Bot) CHECK(e.homes.size() == 1);
  }
  CHECK(labels[WordLabel::Background] == 200);
  CHECK(labels[WordLabel::Regionalism] == 5);
  CHECK(labels[WordLabel::Bot] == 3);
  for (const auto& p : c.posts) {
    std::istringstream words(p.text);
    std::string w;
    while (words >> w) CHECK(truth.contains(w));
  }
  const auto s = ingest(c.posts, c.locations);
  CHECK(s.errors().total() == 0);
  CHECK(s.total_posts() == c.posts.size());

  std::ostringstream out;
  write_truth_tsv(c, out);
  CHECK(out.str().rfind("word\tlabel\thome_locations\nbg0001\tbackground\t\n", 0) == 0);
}

TEST_CASE("without planted signal every word is close to uniform") {
  auto cfg = small_config();
  cfg.regionalisms = 0;
  cfg.bot_words = 0;
  cfg.users_per_location = 60;
  const auto c = generate(cfg);
  const auto s = apply_thresholds(ingest(c.posts, c.locations), 200, 50);
  REQUIRE(s.vocabulary_size() > 10);
  for (const auto& w : s.vocabulary()) {
    CAPTURE(w);
    CHECK(ltf_ig(s, w) < 0.05);
  }
}

TEST_CASE("full concentration over two locations gives zero entropy") {
  SynthConfig cfg;
  cfg.locations = 2;
  cfg.users_per_location = 20;
  cfg.background_words = 50;
  cfg.regionalisms = 4;
  cfg.concentration = 1.0;
  cfg.home_max = 1;
  cfg.bot_words = 0;
  const auto c = generate(cfg);
  const auto s = ingest(c.posts, c.locations);
  for (const auto& e : c.truth) {
    if (e.label != WordLabel::Regionalism || !s.contains(e.word)) continue;
    CHECK(h_words(s, e.word) == 0.0);
    CHECK(s.at(e.word).by_location[e.homes[0]] == s.at(e.word).occurrences);
  }
}

TEST_CASE("planted words hit their homes at the configured rate") {
  const SynthConfig cfg;
  const auto c = generate(cfg);
  const std::size_t n = cfg.locations;
  // Token slots per location that can emit a regionalism: all non-bot tokens.
  std::vector<double> slots(n, 0.0);
  std::map<std::string, std::vector<double>> counts;
  for (const auto& p : c.posts) {
    const auto l = *c.locations.find(p.location_id);
    const bool bot = p.user_id.rfind("bot", 0) == 0;
    std::istringstream words(p.text);
    std::string w;
    while (words >> w) {
      if (!bot) slots[l] += 1;
      if (w.rfind("rg", 0) == 0) {
        auto& v = counts[w];
        if (v.empty()) v.assign(n, 0.0);
        v[l] += 1;
      }
    }
  }
  std::size_t checked = 0;
  double pooled_total = 0.0, pooled_expected = 0.0;
  for (const auto& e : c.truth) {
    if (e.label != WordLabel::Regionalism) continue;
    CAPTURE(e.word);
    double expected_home = 0.0, expected_all = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
      const double rate = regional_emission_probability(cfg, e, LocationIndex(l)) * slots[l];
      expected_all += rate;
      if (std::find(e.homes.begin(), e.homes.end(), LocationIndex(l)) != e.homes.end()) expected_home += rate;
    }
    const double p_home = expected_home / expected_all;
    const auto& v = counts.at(e.word);
    double total = 0.0, home = 0.0;
    for (std::size_t l = 0; l < n; ++l) total += v[l];
    for (auto h : e.homes) home += v[h];
    const double sigma = std::sqrt(p_home * (1.0 - p_home) / total);
    CHECK(std::abs(home / total - p_home) <= 3.0 * sigma);
    // Volume per word, with z = 4 so the family of 50 checks keeps a ~0.3%
    // false-alarm rate; the pooled volume below is held to 3 sigma.
    CHECK(std::abs(total - expected_all) <= 4.0 * std::sqrt(expected_all));
    pooled_total += total;
    pooled_expected += expected_all;
    ++checked;
  }
  CHECK(checked == cfg.regionalisms);
  CHECK(std::abs(pooled_total - pooled_expected) <= 3.0 * std::sqrt(pooled_expected));
}

TEST_CASE("bot words show a larger rank difference than planted regionalisms") {
  const SynthConfig cfg;
  const auto c = generate(cfg);
  const auto s = ingest(c.posts, c.locations);
  const auto by_words = build_ranking(s, Metric::LtfIg);
  const auto by_users = build_ranking(s, Metric::LufIg);
  double min_bot = INFINITY, max_regional = -INFINITY;
  for (const auto& e : c.truth) {
    if (e.label == WordLabel::Background || !s.contains(e.word)) continue;
    const double d = log_rank_diff(by_words, by_users, e.word);
    if (e.label == WordLabel::Bot) {
      min_bot = std::min(min_bot, d);
    } else if (s.at(e.word).user_count() > 1) {
      max_regional = std::max(max_regional, d);
    }
  }
  CHECK(min_bot > max_regional);
}

TEST_CASE("invalid configurations are rejected") {
  const auto bad = [](auto mutate) {
    SynthConfig c;
    mutate(c);
    return c;
  };
  CHECK_THROWS_AS(bad([](SynthConfig& c) { c.locations = 1; }).validate(), std::invalid_argument);
  CHECK_THROWS_AS(bad([](SynthConfig& c) { c.concentration = 0.01; }).validate(), std::invalid_argument);
  CHECK_THROWS_AS(bad([](SynthConfig& c) { c.concentration = 1.5; }).validate(), std::invalid_argument);
  CHECK_THROWS_AS(bad([](SynthConfig& c) { c.home_max = 23; }).validate(), std::invalid_argument);
  CHECK_THROWS_AS(bad([](SynthConfig& c) { c.posts_min = 50; }).validate(), std::invalid_argument);
  CHECK_THROWS_AS(bad([](SynthConfig& c) { c.regional_rate = 0.5; }).validate(), std::invalid_argument);
  CHECK_THROWS_AS(bad([](SynthConfig& c) { c.zipf_exponent = -1; }).validate(), std::invalid_argument);
  CHECK_NOTHROW(SynthConfig{}.validate());
  CHECK_THROWS_AS(generate(bad([](SynthConfig& c) { c.users_per_location = 0; })), std::invalid_argument);
}
