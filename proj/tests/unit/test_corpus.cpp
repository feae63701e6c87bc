#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "regiolex/corpus.hpp"
#include "regiolex/text.hpp"

using namespace regiolex;

TEST_CASE("location table parsing and validation") {
  std::istringstream in(
      "location_id\tname\taliases\tcapital_lat\tcapital_lon\n"
      "# comment\n"
      "BA\tBuenos Aires\tbaires,bsas\t-34.6037\t-58.3816\n"
      "\n"
      "CB\tCórdoba\t\t-31.4201\t-64.1888\n");
  const auto t = LocationTable::parse_tsv(in);
  REQUIRE(t.size() == 2);
  CHECK(t[0].aliases == std::vector<std::string>{"baires", "bsas"});
  CHECK(t[1].aliases.empty());
  CHECK(t.find("CB") == LocationIndex{1});
  CHECK_FALSE(t.find("XX"));

  std::ostringstream out;
  t.write_tsv(out);
  std::istringstream back(out.str());
  CHECK(LocationTable::parse_tsv(back) == t);

  std::istringstream dup("A\ta\t\t0\t0\nA\tb\t\t1\t1\n");
  CHECK_THROWS_AS(LocationTable::parse_tsv(dup), LocationError);
  std::istringstream one("A\ta\t\t0\t0\n");
  CHECK_THROWS_AS(LocationTable::parse_tsv(one), LocationError);
  std::istringstream bad_lat("A\ta\t\t91\t0\nB\tb\t\t0\t0\n");
  CHECK_THROWS_AS(LocationTable::parse_tsv(bad_lat), LocationError);
}

TEST_CASE("post lines in tsv and json") {
  auto p = parse_post_line("u1\tBA\tche boludo\t2019-01-01T00:00:00Z");
  REQUIRE(p);
  CHECK(p->user_id == "u1");
  CHECK(p->location_id == "BA");
  CHECK(p->text == "che boludo");
  CHECK(p->timestamp == "2019-01-01T00:00:00Z");

  p = parse_post_line(R"({"user_id": "u2", "location_id": "CB", "text": "hola\tche"})");
  REQUIRE(p);
  CHECK(p->user_id == "u2");
  CHECK(p->text == "hola\tche");
  CHECK_FALSE(p->timestamp);

  CHECK_FALSE(parse_post_line("only\ttwo"));
  CHECK_FALSE(parse_post_line("u\tBA\t   "));
  CHECK_FALSE(parse_post_line("{not json"));
  CHECK_FALSE(parse_post_line(R"({"user_id": 3, "location_id": "BA", "text": "x"})"));

  const RawPost q{"u", "BA", "a\tb\nc", std::nullopt};
  const auto line = format_post_line(q);
  const auto r = parse_post_line(line);
  REQUIRE(r);
  CHECK(r->text == "a b c");
}

TEST_CASE("ingest counts a hand-checked fixture") {
  const auto locs = fixtures::argentina3();
  const std::vector<RawPost> posts = {
      {"ana", "BA", "Che, che boludo!", std::nullopt},
      {"beto", "BA", "che", std::nullopt},
      {"caro", "CB", "culiao che", std::nullopt},
      {"ana", "CB", "esto se rechaza", std::nullopt},  // ana lives in BA
      {"dani", "XX", "desconocido", std::nullopt},
      {"eli", "MZ", "", std::nullopt},
  };
  const auto s = ingest(posts, locs);
  CHECK(s.total_posts() == 3);
  CHECK(s.total_tokens() == 6);
  CHECK(s.total_users() == 3);
  CHECK(s.errors().conflicting_location == 1);
  CHECK(s.errors().unknown_location == 1);
  CHECK(s.errors().malformed == 1);

  const auto& che = s.at("che");
  CHECK(che.occurrences == 4);
  CHECK(che.by_location == std::vector<std::uint64_t>{3, 1, 0});
  CHECK(che.users_by_location == std::vector<std::uint64_t>{2, 1, 0});
  CHECK(che.user_count() == 3);
  CHECK(che.locations_with_occurrences() == 2);
  CHECK(s.location_tokens(0) == 4);
  CHECK(s.location_users(2) == 0);
  CHECK_FALSE(s.contains("esto"));
  CHECK_THROWS_AS(s.at("esto"), CorpusError);
  CHECK(s.vocabulary() == std::vector<std::string>{"boludo", "che", "culiao"});
}

TEST_CASE("ingest agrees with a brute-force recount") {
  const auto locs = fixtures::numbered(4);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto posts = fixtures::random_posts(seed, 500, 40, locs, 30);
    const auto s = ingest(posts, locs);

    std::map<std::string, std::vector<std::uint64_t>> occ;
    std::map<std::string, std::vector<std::set<std::string>>> users;
    std::uint64_t tokens = 0;
    for (const auto& p : posts) {
      const auto l = *locs.find(p.location_id);
      for (const auto& w : analyze(p.text)) {
        auto& o = occ[w];
        auto& u = users[w];
        if (o.empty()) {
          o.assign(4, 0);
          u.assign(4, {});
        }
        ++o[l];
        u[l].insert(p.user_id);
        ++tokens;
      }
    }
    CHECK(s.total_tokens() == tokens);
    REQUIRE(s.vocabulary_size() == occ.size());
    for (const auto& [w, o] : occ) {
      const auto& c = s.at(w);
      CHECK(c.by_location == o);
      for (std::size_t l = 0; l < 4; ++l) CHECK(c.users_by_location[l] == users[w][l].size());
    }
  }
}

TEST_CASE("merge laws") {
  const auto locs = fixtures::numbered(3);
  const auto posts = fixtures::random_posts(11, 900, 60, locs, 40);
  const std::span<const RawPost> all(posts);
  const auto a = ingest(all.subspan(0, 300), locs);
  const auto b = ingest(all.subspan(300, 300), locs);
  const auto c = ingest(all.subspan(600), locs);
  const CorpusStats empty = ingest(std::span<const RawPost>{}, locs);

  CHECK(merge(a, empty) == a);
  CHECK(merge(empty, a) == a);
  CHECK(merge(a, b) == merge(b, a));
  CHECK(merge(merge(a, b), c) == merge(a, merge(b, c)));
  CHECK(merge(merge(a, b), c) == ingest(posts, locs));
}

TEST_CASE("merge rejects mismatched inputs") {
  const auto a = ingest(std::vector<RawPost>{{"u", "L0", "x", std::nullopt}}, fixtures::numbered(2));
  const auto b = ingest(std::vector<RawPost>{{"u", "L1", "x", std::nullopt}}, fixtures::numbered(2));
  CHECK_THROWS_AS(merge(a, b), CorpusError);
  const auto c = ingest(std::vector<RawPost>{{"u", "L0", "x", std::nullopt}}, fixtures::numbered(3));
  CHECK_THROWS_AS(merge(a, c), CorpusError);
}

TEST_CASE("shard then merge equals a single pass on 10,000 posts") {
  const auto locs = fixtures::numbered(5);
  const auto posts = fixtures::random_posts(99, 10000, 400, locs, 300);
  const auto single = ingest(posts, locs);
  CorpusStats merged = ingest(std::span<const RawPost>{}, locs);
  const std::span<const RawPost> all(posts);
  for (std::size_t start = 0; start < posts.size(); start += 1250) {
    merged = merge(merged, ingest(all.subspan(start, 1250), locs));
  }
  CHECK(merged == single);
  std::ostringstream x, y;
  save_stats(merged, x);
  save_stats(single, y);
  CHECK(x.str() == y.str());
}

TEST_CASE("thresholds are strict and keep global totals") {
  const auto locs = fixtures::numbered(2);
  std::vector<RawPost> posts;
  // w40: 40 occurrences by 40 users; w41: 41 by 41 users; u25: 100 occurrences
  // by 25 users; u26: 100 by 26 users.
  for (int i = 0; i < 41; ++i) {
    const std::string user = "a" + std::to_string(i);
    posts.push_back({user, "L0", i < 40 ? "w40 w41" : "w41", std::nullopt});
  }
  for (int i = 0; i < 100; ++i) {
    posts.push_back({"b" + std::to_string(i % 25), "L1", "u25", std::nullopt});
    posts.push_back({"c" + std::to_string(i % 26), "L1", "u26", std::nullopt});
  }
  const auto s = ingest(posts, locs);
  const auto kept = apply_thresholds(s, 39, 25);
  CHECK(kept.contains("w40"));
  CHECK(kept.contains("w41"));
  CHECK_FALSE(kept.contains("u25"));
  CHECK(kept.contains("u26"));
  const auto strict = apply_thresholds(s, 40, 25);
  CHECK_FALSE(strict.contains("w40"));
  CHECK(strict.contains("w41"));
  CHECK(strict.total_tokens() == s.total_tokens());
  CHECK(strict.total_users() == s.total_users());
  CHECK(strict.location_tokens(1) == s.location_tokens(1));
}

TEST_CASE("stats persistence round-trips and rejects corruption") {
  const auto locs = fixtures::argentina3();
  const auto posts = fixtures::random_posts(5, 300, 30, locs, 25);
  const auto s = ingest(posts, locs);
  std::ostringstream out;
  save_stats(s, out);
  const std::string bytes = out.str();
  CHECK(bytes.substr(0, 8) == "RGLXSTAT");

  std::istringstream in(bytes);
  const auto back = load_stats(in);
  CHECK(back == s);
  CHECK(back.locations() == locs);

  std::istringstream truncated(bytes.substr(0, bytes.size() / 2));
  CHECK_THROWS(load_stats(truncated));
  std::string wrong = bytes;
  wrong[0] = 'X';
  std::istringstream bad_magic(wrong);
  CHECK_THROWS(load_stats(bad_magic));
  std::string version = bytes;
  version[8] = 9;
  std::istringstream bad_version(version);
  CHECK_THROWS(load_stats(bad_version));

  const auto dir = fixtures::temp_dir("persist");
  save_stats(s, dir / "s.bin");
  CHECK(load_stats(dir / "s.bin") == s);
  std::filesystem::remove_all(dir);
}

TEST_CASE("ingest_lines counts malformed records") {
  std::istringstream in("u1\tBA\thola\nbroken line\n\nu2\tCB\tchau\n");
  const auto s = ingest_lines(in, fixtures::argentina3());
  CHECK(s.total_posts() == 2);
  CHECK(s.errors().malformed == 1);
}
