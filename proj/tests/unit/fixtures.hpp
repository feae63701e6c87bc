#pragma once

#include <unistd.h>

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "regiolex/corpus.hpp"
#include "regiolex/locations.hpp"

namespace fixtures {

inline regiolex::LocationTable argentina3() {
  return regiolex::LocationTable({
      {"BA", "Buenos Aires", {"baires", "bsas"}, {-34.6037, -58.3816}},
      {"CB", "Córdoba", {}, {-31.4201, -64.1888}},
      {"MZ", "Mendoza", {}, {-32.8895, -68.8458}},
  });
}

inline regiolex::LocationTable numbered(std::size_t n) {
  std::vector<regiolex::Location> entries;
  for (std::size_t i = 0; i < n; ++i) {
    entries.push_back({"L" + std::to_string(i), "Zone " + std::to_string(i), {}, {-30.0 - double(i), -60.0}});
  }
  return regiolex::LocationTable(std::move(entries));
}

/// Random posts over `vocab` words "w0".."w<vocab-1>"; each user keeps one
/// location. Word frequencies are skewed so the vocabulary has structure.
inline std::vector<regiolex::RawPost> random_posts(std::uint64_t seed, std::size_t posts, std::size_t users,
                                                   const regiolex::LocationTable& locations, std::size_t vocab,
                                                   std::size_t max_len = 8) {
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> home(users);
  for (auto& h : home) h = rng() % locations.size();
  std::vector<regiolex::RawPost> out;
  out.reserve(posts);
  for (std::size_t p = 0; p < posts; ++p) {
    const std::size_t u = rng() % users;
    const std::size_t len = 1 + rng() % max_len;
    std::string text;
    for (std::size_t t = 0; t < len; ++t) {
      // Squaring a uniform draw favours low word indices.
      const double x = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      const auto w = static_cast<std::size_t>(x * x * double(vocab)) % vocab;
      if (t) text += ' ';
      text += "w" + std::to_string(w);
    }
    out.push_back({"user" + std::to_string(u), locations[regiolex::LocationIndex(home[u])].id, text, std::nullopt});
  }
  return out;
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("regiolex_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace fixtures
