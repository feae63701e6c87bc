// Binary CorpusStats format, version 1. Integers are little-endian; strings
// are a u32 byte length followed by UTF-8 bytes; doubles are stored as their
// IEEE-754 bit pattern in a u64.
//
//   char[8]  magic "RGLXSTAT"
//   u32      format version
//   u32      N, then N x { str id, str name, u32 n_aliases, str alias...,
//                          f64 capital_lat, f64 capital_lon }
//   u64      U, then U x { str user_id, u32 location }      (sorted by id)
//   u64      total tokens, u64 total posts
//   N x      { u64 location tokens, u64 location posts }
//   u64 x 3  malformed, unknown_location, conflicting_location
//   u64      V, then V x { str word, u64 occurrences,
//                          u32 nnz, nnz x { u32 location, u64 count },
//                          u64 n_users, n_users x u32 user index }
//                                                         (words sorted by bytes)
//   char[8]  end marker "RGLXEND\0"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>

#include "regiolex/corpus.hpp"

namespace regiolex {

namespace {

constexpr std::array<char, 8> kMagic = {'R', 'G', 'L', 'X', 'S', 'T', 'A', 'T'};
constexpr std::array<char, 8> kEnd = {'R', 'G', 'L', 'X', 'E', 'N', 'D', '\0'};

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void raw(const char* data, std::size_t n) { out_.write(data, static_cast<std::streamsize>(n)); }

  template <typename Int>
  void integer(Int v) {
    std::array<char, sizeof(Int)> buf;
    auto u = static_cast<std::make_unsigned_t<Int>>(v);
    for (std::size_t i = 0; i < sizeof(Int); ++i) {
      buf[i] = static_cast<char>(u & 0xFF);
      u = static_cast<std::make_unsigned_t<Int>>(u >> 8);
    }
    raw(buf.data(), buf.size());
  }
  void u32(std::uint64_t v) { integer(static_cast<std::uint32_t>(v)); }
  void u64(std::uint64_t v) { integer(v); }
  void f64(double v) { integer(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u32(s.size());
    raw(s.data(), s.size());
  }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  void raw(char* data, std::size_t n) {
    in_.read(data, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) throw CorpusError("corpus stats file is truncated");
  }
  template <typename Int>
  Int integer() {
    std::array<unsigned char, sizeof(Int)> buf;
    raw(reinterpret_cast<char*>(buf.data()), buf.size());
    std::make_unsigned_t<Int> u = 0;
    for (std::size_t i = sizeof(Int); i-- > 0;) {
      u = static_cast<std::make_unsigned_t<Int>>((u << 8) | buf[i]);
    }
    return static_cast<Int>(u);
  }
  std::uint32_t u32() { return integer<std::uint32_t>(); }
  std::uint64_t u64() { return integer<std::uint64_t>(); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const auto n = u32();
    if (n > (1u << 28)) throw CorpusError("corpus stats file has an implausible string length");
    std::string s(n, '\0');
    raw(s.data(), n);
    return s;
  }

 private:
  std::istream& in_;
};

}  // namespace

void save_stats(const CorpusStats& stats, std::ostream& out) {
  Writer w(out);
  w.raw(kMagic.data(), kMagic.size());
  w.u32(kStatsFormatVersion);

  const auto& locations = stats.locations_;
  w.u32(locations.size());
  for (const auto& loc : locations.entries()) {
    w.str(loc.id);
    w.str(loc.name);
    w.u32(loc.aliases.size());
    for (const auto& alias : loc.aliases) w.str(alias);
    w.f64(loc.capital.lat);
    w.f64(loc.capital.lon);
  }

  w.u64(stats.users_.size());
  for (const auto& user : stats.users_) {
    w.str(user.id);
    w.u32(user.location);
  }

  w.u64(stats.total_tokens_);
  w.u64(stats.total_posts_);
  for (std::size_t l = 0; l < locations.size(); ++l) {
    w.u64(stats.location_tokens_[l]);
    w.u64(stats.location_posts_[l]);
  }
  w.u64(stats.errors_.malformed);
  w.u64(stats.errors_.unknown_location);
  w.u64(stats.errors_.conflicting_location);

  const auto vocabulary = stats.vocabulary();
  w.u64(vocabulary.size());
  for (const auto& word : vocabulary) {
    const auto& counts = stats.words_.at(word);
    w.str(word);
    w.u64(counts.occurrences);
    w.u32(counts.locations_with_occurrences());
    for (std::size_t l = 0; l < counts.by_location.size(); ++l) {
      if (counts.by_location[l] == 0) continue;
      w.u32(l);
      w.u64(counts.by_location[l]);
    }
    w.u64(counts.users.size());
    for (UserIndex u : counts.users) w.u32(u);
  }
  w.raw(kEnd.data(), kEnd.size());
  if (!out) throw CorpusError("failed writing corpus stats");
}

CorpusStats load_stats(std::istream& in) {
  Reader r(in);
  std::array<char, 8> magic{};
  r.raw(magic.data(), magic.size());
  if (magic != kMagic) throw CorpusError("not a corpus stats file (bad magic)");
  const auto version = r.u32();
  if (version != kStatsFormatVersion) {
    throw CorpusError("unsupported corpus stats format version " + std::to_string(version));
  }

  const auto n_loc = r.u32();
  std::vector<Location> entries(n_loc);
  for (auto& loc : entries) {
    loc.id = r.str();
    loc.name = r.str();
    loc.aliases.resize(r.u32());
    for (auto& alias : loc.aliases) alias = r.str();
    loc.capital.lat = r.f64();
    loc.capital.lon = r.f64();
  }
  CorpusStats stats{LocationTable(std::move(entries))};

  const auto n_users = r.u64();
  stats.users_.resize(n_users);
  for (auto& user : stats.users_) {
    user.id = r.str();
    user.location = r.u32();
    if (user.location >= n_loc) throw CorpusError("corpus stats file: user location out of range");
  }
  for (std::size_t i = 1; i < stats.users_.size(); ++i) {
    if (!(stats.users_[i - 1].id < stats.users_[i].id)) {
      throw CorpusError("corpus stats file: user table is not strictly sorted");
    }
  }

  stats.total_tokens_ = r.u64();
  stats.total_posts_ = r.u64();
  for (std::size_t l = 0; l < n_loc; ++l) {
    stats.location_tokens_[l] = r.u64();
    stats.location_posts_[l] = r.u64();
  }
  stats.errors_.malformed = r.u64();
  stats.errors_.unknown_location = r.u64();
  stats.errors_.conflicting_location = r.u64();

  const auto n_words = r.u64();
  stats.words_.reserve(n_words);
  for (std::uint64_t k = 0; k < n_words; ++k) {
    auto word = r.str();
    WordCounts counts;
    counts.occurrences = r.u64();
    counts.by_location.assign(n_loc, 0);
    const auto nnz = r.u32();
    for (std::uint32_t e = 0; e < nnz; ++e) {
      const auto l = r.u32();
      if (l >= n_loc) throw CorpusError("corpus stats file: word location out of range");
      counts.by_location[l] = r.u64();
    }
    if (std::accumulate(counts.by_location.begin(), counts.by_location.end(), std::uint64_t{0}) !=
        counts.occurrences) {
      throw CorpusError("corpus stats file: per-location counts of '" + word + "' do not sum to total");
    }
    counts.users.resize(r.u64());
    for (auto& u : counts.users) {
      u = r.u32();
      if (u >= n_users) throw CorpusError("corpus stats file: user index out of range");
    }
    if (!std::is_sorted(counts.users.begin(), counts.users.end()) ||
        std::adjacent_find(counts.users.begin(), counts.users.end()) != counts.users.end()) {
      throw CorpusError("corpus stats file: user list of '" + word + "' is not strictly sorted");
    }
    if (!stats.words_.emplace(std::move(word), std::move(counts)).second) {
      throw CorpusError("corpus stats file: duplicate word");
    }
  }
  std::array<char, 8> end{};
  r.raw(end.data(), end.size());
  if (end != kEnd) throw CorpusError("corpus stats file: missing end marker");

  stats.rebuild_derived();
  return stats;
}

void save_stats(const CorpusStats& stats, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CorpusError("cannot open " + path.string() + " for writing");
  save_stats(stats, out);
}

CorpusStats load_stats(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorpusError("cannot open corpus stats file " + path.string());
  return load_stats(in);
}

}  // namespace regiolex
