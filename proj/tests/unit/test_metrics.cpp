#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "brute_force.hpp"
#include "fixtures.hpp"
#include "regiolex/metrics.hpp"
#include "regiolex/stats.hpp"

using namespace regiolex;

namespace {

// Builds stats where word w has per-location occurrence counts counts[w] and
// each occurrence comes from a distinct user.
CorpusStats from_counts(const LocationTable& locs, const std::vector<std::pair<std::string, std::vector<int>>>& counts) {
  CorpusBuilder b(locs);
  int user = 0;
  for (const auto& [word, per_loc] : counts) {
    for (std::size_t l = 0; l < per_loc.size(); ++l) {
      for (int k = 0; k < per_loc[l]; ++k) {
        std::vector<std::string> tokens{word};
        b.add_tokens("u" + std::to_string(user++), LocationIndex(l), tokens);
      }
    }
  }
  return std::move(b).finish();
}

std::vector<brute::Post> to_brute(const std::vector<RawPost>& posts, const LocationTable& locs) {
  std::vector<brute::Post> out;
  for (const auto& p : posts) out.push_back({p.user_id, *locs.find(p.location_id), p.text});
  return out;
}

}  // namespace

TEST_CASE("entropy examples") {
  const auto locs = fixtures::numbered(2);
  const auto s = from_counts(locs, {{"che", {3, 1}}, {"solo", {5, 0}}});
  // -0.75 ln 0.75 - 0.25 ln 0.25
  CHECK(h_words(s, "che") == doctest::Approx(0.5623351446188083).epsilon(1e-12));
  CHECK(h_users(s, "che") == doctest::Approx(0.5623351446188083).epsilon(1e-12));
  CHECK(h_words(s, "solo") == 0.0);
  CHECK_THROWS_AS(h_words(s, "nada"), StatsError);

  const auto locs23 = fixtures::numbered(23);
  const auto u = from_counts(locs23, {{"todos", std::vector<int>(23, 2)}});
  CHECK(h_words(u, "todos") == doctest::Approx(3.1354942159291497).epsilon(1e-13));
  CHECK(ltf_ig(u, "todos") == doctest::Approx(0.0).epsilon(1e-12));

  const auto locs4 = fixtures::numbered(4);
  const auto users4 = from_counts(locs4, {{"x", {3, 3, 3, 3}}});
  CHECK(h_users(users4, "x") == doctest::Approx(std::log(4.0)).epsilon(1e-13));
}

TEST_CASE("entropy is bounded, permutation-stable and ignores empty locations") {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> p(1 + rng() % 10);
    for (auto& x : p) x = double(rng() % 5);
    if (std::accumulate(p.begin(), p.end(), 0.0) == 0.0) p[0] = 1.0;
    const double total = std::accumulate(p.begin(), p.end(), 0.0);
    for (auto& x : p) x /= total;
    const double h = shannon_entropy(p);
    CHECK(h >= 0.0);
    CHECK(h <= std::log(double(p.size())) + 1e-12);
    auto q = p;
    std::shuffle(q.begin(), q.end(), rng);
    CHECK(shannon_entropy(q) == h);
    q.push_back(0.0);
    CHECK(shannon_entropy(q) == h);
  }
}

TEST_CASE("normalized log-frequencies") {
  const auto locs = fixtures::numbered(4);
  // "big" is the most frequent word (1000) and "mid" has 100 occurrences.
  const auto s = from_counts(locs, {{"big", {250, 250, 250, 250}}, {"mid", {50, 50, 0, 0}}});
  const auto prof = frequency_profile(s, "mid");
  CHECK(prof.n_words == doctest::Approx(0.6666666666666667).epsilon(1e-14));
  CHECK(prof.p == doctest::Approx(100.0 / 1100.0));
  CHECK(ltf_ig(s, "big") == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(ltf_ig(s, "mid") == doctest::Approx(0.6666666666666667 * std::log(2.0)).epsilon(1e-12));
  CHECK(i_words_raw(s, "mid") == doctest::Approx(100.0 / 1100.0 * std::log(2.0)).epsilon(1e-12));

  // The most frequent word concentrated in one location scores log N.
  const auto t = from_counts(locs, {{"top", {30, 0, 0, 0}}, {"low", {1, 1, 1, 1}}});
  CHECK(ltf_ig(t, "top") == doctest::Approx(std::log(4.0)).epsilon(1e-12));
  CHECK(i_words_raw(t, "top") == doctest::Approx(30.0 / 34.0 * std::log(4.0)).epsilon(1e-12));
}

TEST_CASE("n_words of one half over half the locations") {
  // N = 4, word uniform over 2 locations with n_words = 0.5 gives 0.5 log 2.
  const auto locs = fixtures::numbered(4);
  const auto s = from_counts(locs, {{"max", {25, 25, 25, 25}}, {"half", {5, 5, 0, 0}}});
  CHECK(frequency_profile(s, "half").n_words == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(ltf_ig(s, "half") == doctest::Approx(0.34657359027997264).epsilon(1e-12));
}

TEST_CASE("single-location and uniform degenerate cases") {
  const auto locs = fixtures::numbered(5);
  const auto s = from_counts(locs, {{"one", {0, 0, 7, 0, 0}}, {"flat", {3, 3, 3, 3, 3}}});
  const MetricEvaluator e(s);
  const double n_one = e.estimator().frequency_profile("one").n_words;
  CHECK(e.h_words("one") == 0.0);
  CHECK(e.ltf_ig("one") == doctest::Approx(n_one * std::log(5.0)).epsilon(1e-14));
  CHECK(std::abs(e.h_words("flat") - std::log(5.0)) < 1e-12);
  CHECK(std::abs(e.ltf_ig("flat")) < 1e-12);
  CHECK(e.i_words_raw("flat") == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("the frequency normalizers need at least two occurrences and users") {
  const auto s = from_counts(fixtures::numbered(2), {{"a", {1, 0}}});
  CHECK_THROWS_AS(ltf_ig(s, "a"), StatsError);
  CHECK_THROWS_AS(luf_ig(s, "a"), StatsError);
}

TEST_CASE("every metric matches the brute-force oracle on random corpora") {
  const auto locs = fixtures::numbered(3);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto posts = fixtures::random_posts(seed, 150, 25, locs, 15);
    const auto s = ingest(posts, locs);
    const brute::Oracle oracle(to_brute(posts, locs), 3);
    const MetricEvaluator e(s);
    for (const auto& w : oracle.words()) {
      CAPTURE(w);
      CHECK(std::abs(e.h_words(w) - oracle.h_words(w)) < 1e-12);
      CHECK(std::abs(e.h_users(w) - oracle.h_users(w)) < 1e-12);
      CHECK(std::abs(e.ltf_ig(w) - oracle.ltf_ig(w)) < 1e-12);
      CHECK(std::abs(e.luf_ig(w) - oracle.luf_ig(w)) < 1e-12);
      CHECK(std::abs(e.igr(w, Basis::Occurrences) - oracle.igr(w, false)) < 1e-12);
      if (oracle.users_of(w) < oracle.total_users()) {
        CHECK(std::abs(e.igr(w, Basis::Users) - oracle.igr(w, true)) < 1e-12);
      } else {
        CHECK_THROWS_AS(e.igr(w, Basis::Users), StatsError);
      }
    }
  }
}

TEST_CASE("information gain ratio") {
  SUBCASE("word perfectly predicting one class in a balanced two-class corpus") {
    // Tokens: L0 = {w x}, L1 = {y z}; w occurs only in L0.
    CorpusBuilder b(fixtures::numbered(2));
    const std::vector<std::string> t0{"w", "x"}, t1{"y", "z"};
    b.add_tokens("a", 0, t0);
    b.add_tokens("b", 1, t1);
    const auto s = std::move(b).finish();
    // Contingency (tokens): w&L0 = 1, w&L1 = 0, rest&L0 = 1, rest&L1 = 2.
    // H(L) = ln 2; H(L|w) = 3/4 * H(1/3, 2/3); IV = H(1/4, 3/4).
    const double h_rest = -(1.0 / 3) * std::log(1.0 / 3) - (2.0 / 3) * std::log(2.0 / 3);
    const double ig = std::log(2.0) - 0.75 * h_rest;
    const double iv = 0.5623351446188083;
    const MetricEvaluator e(s);
    CHECK(e.information_gain("w", Basis::Occurrences) == doctest::Approx(ig).epsilon(1e-13));
    CHECK(e.intrinsic_value("w", Basis::Occurrences) == doctest::Approx(iv).epsilon(1e-13));
    CHECK(e.igr("w", Basis::Occurrences) == doctest::Approx(ig / iv).epsilon(1e-13));
  }
  SUBCASE("word with background class proportions gains nothing") {
    CorpusBuilder b(fixtures::numbered(2));
    const std::vector<std::string> t0{"w", "x", "x"}, t1{"w", "w", "y", "y", "y", "y"};
    b.add_tokens("a", 0, t0);
    b.add_tokens("b", 1, t1);
    const auto s = std::move(b).finish();
    // w: 1/3 of L0's and 1/3 of L1's tokens.
    CHECK(MetricEvaluator(s).igr("w", Basis::Occurrences) == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("undefined when every user has the word") {
    const auto s = from_counts(fixtures::numbered(2), {{"w", {2, 1}}});
    const MetricEvaluator e(s);
    CHECK_THROWS_AS(e.igr("w", Basis::Users), StatsError);
    CHECK(e.igr_or_zero("w", Basis::Users) == 0.0);
  }
  SUBCASE("IGR lies in [0, 1] and is base invariant") {
    const auto locs = fixtures::numbered(3);
    const auto posts = fixtures::random_posts(8, 400, 50, locs, 30);
    const auto s = ingest(posts, locs);
    EstimationOptions base2;
    base2.log_base = 2.0;
    const MetricEvaluator e(s), f(s, base2);
    for (const auto& w : s.vocabulary()) {
      const double v = e.igr_or_zero(w, Basis::Occurrences);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0 + 1e-12);
      CHECK(f.igr_or_zero(w, Basis::Occurrences) == doctest::Approx(v).epsilon(1e-12));
    }
  }
}

TEST_CASE("log base rescales entropies and scores") {
  const auto locs = fixtures::numbered(3);
  const auto s = ingest(fixtures::random_posts(4, 300, 30, locs, 20), locs);
  EstimationOptions base2;
  base2.log_base = 2.0;
  const MetricEvaluator e(s), f(s, base2);
  for (const auto& w : s.vocabulary()) {
    CHECK(f.h_words(w) == doctest::Approx(e.h_words(w) / std::log(2.0)).epsilon(1e-12));
    CHECK(f.luf_ig(w) == doctest::Approx(e.luf_ig(w) / std::log(2.0)).epsilon(1e-12));
  }
  CHECK(f.max_entropy() == doctest::Approx(std::log2(3.0)));
  for (auto metric : score_metrics()) {
    const auto a = build_ranking(s, metric);
    const auto b = build_ranking(s, metric, base2);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a.entries()[i].word == b.entries()[i].word);
      const auto& w = a.entries()[i].word;
      // Rankings report 0 where the gain ratio is undefined.
      const double expected = metric == Metric::IgrWords   ? f.igr_or_zero(w, Basis::Occurrences)
                              : metric == Metric::IgrUsers ? f.igr_or_zero(w, Basis::Users)
                                                           : f.score(metric, w);
      CHECK(b.entries()[i].value == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("I-metrics are non-negative and zero only for uniform words") {
  const auto locs = fixtures::numbered(3);
  const auto s = ingest(fixtures::random_posts(21, 300, 30, locs, 20), locs);
  const MetricEvaluator e(s);
  for (const auto& w : s.vocabulary()) {
    for (auto m : {Metric::IWordsRaw, Metric::IUsersRaw, Metric::LtfIg, Metric::LufIg}) {
      CHECK(e.score(m, w) >= 0.0);
    }
  }
}

TEST_CASE("more users with the same distribution never lowers LUF-IG") {
  const auto locs = fixtures::numbered(3);
  const auto s = from_counts(locs, {{"small", {2, 1, 0}}, {"large", {6, 3, 0}}, {"max", {10, 10, 10}}});
  CHECK(luf_ig(s, "large") >= luf_ig(s, "small"));
}

TEST_CASE("ranking tie rules") {
  const auto locs = fixtures::numbered(2);
  // All three words sit in a single location, so H_words is 0 for each.
  const auto s = from_counts(locs, {{"b", {4, 0}}, {"a", {4, 0}}, {"c", {9, 0}}, {"d", {2, 2}}});
  const auto r = build_ranking(s, Metric::HWords);
  REQUIRE(r.size() == 4);
  CHECK(r.entries()[0].word == "d");
  CHECK(r.entries()[1].word == "c");
  CHECK(r.entries()[2].word == "a");
  CHECK(r.entries()[3].word == "b");
  for (std::size_t i = 0; i < r.size(); ++i) CHECK(r.entries()[i].rank == i + 1);

  const auto single = from_counts(locs, {{"solo", {2, 1}}});
  CHECK(build_ranking(single, Metric::HWords).entries().at(0).rank == 1);
}

TEST_CASE("rankings equal a naive sort") {
  const auto locs = fixtures::numbered(3);
  const auto s = ingest(fixtures::random_posts(17, 400, 40, locs, 40), locs);
  const MetricEvaluator e(s);
  for (auto metric : {Metric::LtfIg, Metric::LufIg, Metric::HUsers, Metric::IgrWords}) {
    const auto r = build_ranking(s, metric);
    auto words = s.vocabulary();
    std::vector<std::tuple<double, std::int64_t, std::string>> keyed;
    for (const auto& w : words) {
      const double v = metric == Metric::IgrWords ? e.igr_or_zero(w, Basis::Occurrences) : e.score(metric, w);
      keyed.emplace_back(-v, -std::int64_t(s.at(w).occurrences), w);
    }
    std::sort(keyed.begin(), keyed.end());
    REQUIRE(keyed.size() == r.size());
    for (std::size_t i = 0; i < keyed.size(); ++i) CHECK(r.entries()[i].word == std::get<2>(keyed[i]));
  }
}

TEST_CASE("tf-ilf ordering") {
  const auto locs = fixtures::numbered(3);
  const auto s = from_counts(locs, {{"two", {50, 50, 0}}, {"one_small", {0, 3, 0}}, {"one_big", {9, 0, 0}},
                                    {"three", {1, 1, 1}}});
  const auto r = tf_ilf_order(s);
  std::vector<std::string> got;
  for (const auto& e : r.entries()) got.push_back(e.word);
  CHECK(got == std::vector<std::string>{"one_big", "one_small", "two", "three"});
  CHECK(r.entries()[0].value == 1.0);

  const auto t = ingest(fixtures::random_posts(2, 300, 30, locs, 40), locs);
  const auto rt = tf_ilf_order(t);
  auto words = t.vocabulary();
  std::vector<std::tuple<std::size_t, std::int64_t, std::string>> keyed;
  for (const auto& w : words) {
    keyed.emplace_back(t.at(w).locations_with_occurrences(), -std::int64_t(t.at(w).occurrences), w);
  }
  std::sort(keyed.begin(), keyed.end());
  for (std::size_t i = 0; i < keyed.size(); ++i) CHECK(rt.entries()[i].word == std::get<2>(keyed[i]));
}

TEST_CASE("log rank difference") {
  std::vector<RankingEntry> words, users;
  for (std::size_t i = 1; i <= 565; ++i) {
    words.push_back({i, i == 1 ? "ushuaia" : "w" + std::to_string(i), 0.0, false});
    users.push_back({i, i == 565 ? "ushuaia" : i == 1 ? "w565" : "w" + std::to_string(i), 0.0, false});
  }
  const Ranking by_words(Metric::LtfIg, words), by_users(Metric::LufIg, users);
  CHECK(log_rank_diff(by_words, by_users, "ushuaia") == doctest::Approx(6.336825731146441).epsilon(1e-12));
  CHECK(log_rank_diff(by_words, by_users, "w10") == 0.0);
  CHECK_THROWS_AS(log_rank_diff(by_words, by_users, "nope"), StatsError);

  const auto top = top_rank_diffs(by_words, by_users, 1);
  REQUIRE(top.size() == 1);
  CHECK(top[0].word == "ushuaia");
  CHECK(top[0].word_rank == 1);
  CHECK(top[0].user_rank == 565);
}

TEST_CASE("toponym flags") {
  const LocationTable locs({{"TF", "Tierra del Fuego", {"tdf", "ushuaia"}, {-54.8, -68.3}},
                            {"CB", "Córdoba", {}, {-31.4, -64.2}}});
  const ToponymMatcher m(locs);
  CHECK(m.matches("ushuaia"));
  CHECK(m.matches("ush"));
  CHECK(m.matches("tdf"));
  CHECK(m.matches("Córdoba"));
  CHECK(m.matches("cordoba"));
  CHECK(m.matches("córd"));
  CHECK(m.matches("tierra"));
  CHECK_FALSE(m.matches("che"));
  CHECK_FALSE(m.matches("us"));
  CHECK_FALSE(m.matches("ushuaias"));

  const auto s = from_counts(locs, {{"ushuaia", {5, 0}}, {"che", {2, 2}}});
  auto r = build_ranking(s, Metric::LtfIg);
  flag_toponyms(r, locs);
  REQUIRE(r.size() == 2);
  CHECK(r.find("ushuaia")->toponym);
  CHECK_FALSE(r.find("che")->toponym);
}

TEST_CASE("ranking files round-trip") {
  const auto locs = fixtures::argentina3();
  const auto s = ingest(fixtures::random_posts(6, 300, 30, locs, 30), locs);
  auto r = build_ranking(s, Metric::LufIg);
  flag_toponyms(r, locs);
  std::ostringstream out;
  write_ranking_tsv(r, s, out, "made by a test");
  const auto text = out.str();
  CHECK(text.rfind("# metric=luf_ig\n# made by a test\nrank\tword\tmetric_value", 0) == 0);
  std::istringstream in(text);
  CHECK(read_ranking_tsv(in, Metric::LufIg) == r);

  std::ostringstream again;
  write_ranking_tsv(r, s, again, "made by a test");
  CHECK(again.str() == text);

  std::vector<Ranking> rs{r, tf_ilf_order(s)};
  std::ostringstream scores;
  write_scores_tsv(s, rs, scores);
  std::istringstream lines(scores.str());
  std::string header;
  std::getline(lines, header);
  CHECK(header == "word\toccurrences\tusers\tlocations\tluf_ig\tluf_ig_rank\ttf_ilf\ttf_ilf_rank");
}

TEST_CASE("metric names") {
  CHECK(parse_metric("LUF-IG") == Metric::LufIg);
  CHECK(parse_metric("tf_ilf") == Metric::TfIlf);
  CHECK_FALSE(parse_metric("tfidf"));
  CHECK(score_metrics().size() == 8);
  for (auto m : all_metrics()) CHECK(parse_metric(metric_name(m)) == m);
}
