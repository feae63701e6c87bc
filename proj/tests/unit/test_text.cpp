#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "regiolex/text.hpp"

using namespace regiolex;

namespace {

struct FixtureCase {
  std::string text;
  std::vector<std::string> expected;
};

std::vector<FixtureCase> load_fixture() {
  std::ifstream in(std::string(REGIOLEX_TEST_DATA) + "/tokenize_50.tsv");
  REQUIRE(in);
  std::vector<FixtureCase> cases;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    REQUIRE(tab != std::string::npos);
    FixtureCase c{line.substr(0, tab), {}};
    std::istringstream words(line.substr(tab + 1));
    std::string w;
    while (words >> w) c.expected.push_back(w);
    cases.push_back(std::move(c));
  }
  return cases;
}

}  // namespace

TEST_CASE("tokenize matches the hand-tokenized fixture") {
  const auto cases = load_fixture();
  REQUIRE(cases.size() == 50);
  for (const auto& c : cases) {
    CAPTURE(c.text);
    CHECK(tokenize(c.text) == c.expected);
  }
}

TEST_CASE("tokenize drops hashtags, mentions, urls and punctuation") {
  CHECK(tokenize("").empty());
  CHECK(tokenize("   \t ").empty());
  CHECK(tokenize("#a #b @c").empty());
  CHECK(tokenize("a#b") == std::vector<std::string>{"a"});
  CHECK(tokenize("HTTPS://X.ORG/Y") .empty());
  CHECK(tokenize("(www.x.com)").empty());
  CHECK(tokenize("¿¡...!?") .empty());
}

TEST_CASE("normalize collapses long vowel runs") {
  CHECK(normalize_token("woaaaaaa") == "woaaa");
  CHECK(normalize_token("woaaa") == "woaaa");
  CHECK(normalize_token("holaaaa") == "holaaa");
  CHECK(normalize_token("siiiiiii") == "siii");
  CHECK(normalize_token("síííííí") == "sííí");
  CHECK(normalize_token("WOOOOO") == "wooo");
  CHECK(normalize_token("mmmmmm") == "mmmmmm");  // consonants are left alone
  CHECK(normalize_token("aaaabbbbeeee") == "aaabbbbeee");
  CHECK(normalize_token("") == "");
}

TEST_CASE("normalize is idempotent") {
  for (const auto& c : load_fixture()) {
    for (const auto& t : tokenize(c.text)) {
      const auto once = normalize_token(t);
      CHECK(normalize_token(once) == once);
    }
  }
  std::mt19937 rng(7);
  const std::string alphabet[] = {"a", "e", "o", "b", "á", "A", "ú", "x"};
  for (int trial = 0; trial < 2000; ++trial) {
    std::string s;
    const int len = static_cast<int>(rng() % 20);
    for (int i = 0; i < len; ++i) s += alphabet[rng() % 8];
    const auto once = normalize_token(s);
    CAPTURE(s);
    CHECK(normalize_token(once) == once);
  }
}

TEST_CASE("analyze lowercases then normalizes") {
  CHECK(analyze("WOAAAAAA che!!") == std::vector<std::string>{"woaaa", "che"});
}

TEST_CASE("utf8 decoding never throws on invalid input") {
  const std::string bad = "a\xff\xfe" "b";
  const auto cps = utf8::decode(bad);
  REQUIRE(cps.size() == 4);
  CHECK(cps[1] == 0xFFFD);
  CHECK(tokenize(bad) == std::vector<std::string>{"a", "b"});
  CHECK(utf8::length("ñandú") == 5);
  CHECK(utf8::encode(utf8::decode("Córdoba 😂")) == "Córdoba 😂");
}

TEST_CASE("to_lower covers accented capitals") {
  CHECK(to_lower("ÁÉÍÓÚÑÜ") == "áéíóúñü");
  CHECK(to_lower("ŁÓDŹ") == "łódź");
  CHECK(to_lower("ΑΘΗΝΑ") == "αθηνα");
}
