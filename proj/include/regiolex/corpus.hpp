#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "regiolex/locations.hpp"

namespace regiolex {

class CorpusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RawPost {
  std::string user_id;
  std::string location_id;
  std::string text;
  std::optional<std::string> timestamp;
};

/// Parses one input record. Two encodings are accepted:
///   TSV:  user_id <TAB> location_id <TAB> text [<TAB> timestamp]
///   JSON: {"user_id": ..., "location_id": ..., "text": ..., "timestamp": ...}
/// A line whose first non-blank character is '{' is parsed as JSON.
/// Returns nullopt for malformed records, including empty (post-trim) text.
std::optional<RawPost> parse_post_line(std::string_view line);

/// Inverse of parse_post_line for the TSV encoding. Tabs and newlines in
/// the text are replaced by spaces.
std::string format_post_line(const RawPost& post);

struct IngestErrors {
  std::uint64_t malformed = 0;
  std::uint64_t unknown_location = 0;
  std::uint64_t conflicting_location = 0;

  std::uint64_t total() const { return malformed + unknown_location + conflicting_location; }
  IngestErrors& operator+=(const IngestErrors& o);
  bool operator==(const IngestErrors&) const = default;
};

using UserIndex = std::uint32_t;

/// Counts for one word. `users` holds the sorted indices of the distinct
/// users who wrote the word; `users_by_location` is derived from it.
struct WordCounts {
  std::uint64_t occurrences = 0;
  std::vector<std::uint64_t> by_location;
  std::vector<std::uint64_t> users_by_location;
  std::vector<UserIndex> users;

  std::size_t user_count() const { return users.size(); }
  std::size_t locations_with_occurrences() const;
  bool operator==(const WordCounts&) const = default;
};

struct UserRecord {
  std::string id;
  LocationIndex location = 0;
  bool operator==(const UserRecord&) const = default;
};

/// Per-word, per-location occurrence and distinct-user counts plus global
/// totals, built against one LocationTable.
///
/// Users are kept in canonical (id-sorted) order, so two CorpusStats that
/// describe the same multiset of posts compare equal and serialize to the
/// same bytes regardless of ingestion order or sharding.
class CorpusStats {
 public:
  CorpusStats() = default;
  explicit CorpusStats(LocationTable locations);

  const LocationTable& locations() const { return locations_; }
  std::size_t num_locations() const { return locations_.size(); }

  std::uint64_t total_tokens() const { return total_tokens_; }
  std::uint64_t total_users() const { return users_.size(); }
  std::uint64_t total_posts() const { return total_posts_; }
  std::uint64_t location_tokens(LocationIndex l) const { return location_tokens_[l]; }
  std::uint64_t location_posts(LocationIndex l) const { return location_posts_[l]; }
  std::uint64_t location_users(LocationIndex l) const { return location_users_[l]; }
  const IngestErrors& errors() const { return errors_; }

  std::size_t vocabulary_size() const { return words_.size(); }
  bool contains(std::string_view word) const { return find(word) != nullptr; }
  const WordCounts* find(std::string_view word) const;
  /// Throws CorpusError for an unknown word.
  const WordCounts& at(std::string_view word) const;
  /// Words in byte-lexicographic order.
  std::vector<std::string> vocabulary() const;
  const std::unordered_map<std::string, WordCounts>& words() const { return words_; }

  const std::vector<UserRecord>& users() const { return users_; }
  std::optional<UserIndex> find_user(std::string_view id) const;

  bool operator==(const CorpusStats& other) const;

 private:
  friend class CorpusBuilder;
  friend CorpusStats merge(const CorpusStats&, const CorpusStats&);
  friend CorpusStats apply_thresholds(const CorpusStats&, std::uint64_t, std::uint64_t);
  friend void save_stats(const CorpusStats&, std::ostream&);
  friend CorpusStats load_stats(std::istream&);

  void canonicalize();
  void rebuild_derived();

  LocationTable locations_;
  std::vector<UserRecord> users_;
  std::unordered_map<std::string, UserIndex> user_index_;
  std::unordered_map<std::string, WordCounts> words_;
  std::uint64_t total_tokens_ = 0;
  std::uint64_t total_posts_ = 0;
  std::vector<std::uint64_t> location_tokens_;
  std::vector<std::uint64_t> location_posts_;
  std::vector<std::uint64_t> location_users_;
  IngestErrors errors_;
};

/// Streaming accumulator behind ingest(). Each user is attributed to the
/// location of their first accepted post; later posts by the same user from
/// a different location are rejected as conflicting.
class CorpusBuilder {
 public:
  explicit CorpusBuilder(LocationTable locations);

  /// Returns false when the post was rejected (and tallied).
  bool add(const RawPost& post);
  /// Adds an already-tokenized post. Returns false when rejected.
  bool add_tokens(std::string_view user_id, LocationIndex location, std::span<const std::string> tokens);
  /// Parses and adds one input line.
  bool add_line(std::string_view line);

  CorpusStats finish() &&;

 private:
  std::optional<UserIndex> attribute(std::string_view user_id, LocationIndex location);

  CorpusStats stats_;
};

CorpusStats ingest(std::span<const RawPost> posts, const LocationTable& locations);
CorpusStats ingest_lines(std::istream& in, const LocationTable& locations);

/// Element-wise sum of counts; distinct-user counts are unions of user sets.
/// Throws CorpusError when the location tables differ or a user is
/// attributed to different locations in the two inputs.
CorpusStats merge(const CorpusStats& a, const CorpusStats& b);

/// Keeps exactly the words with occurrences > min_occurrences and distinct
/// users > min_users. Global totals are left untouched.
CorpusStats apply_thresholds(const CorpusStats& stats, std::uint64_t min_occurrences = 40,
                             std::uint64_t min_users = 25);

/// Binary persistence. Layout (all integers little-endian):
///   magic "RGLXSTAT", u32 format version (1), location table, user table,
///   totals, error tally, words sorted by bytes with sparse per-location
///   counts and user index lists. See corpus_io.cpp for the field order.
void save_stats(const CorpusStats& stats, std::ostream& out);
CorpusStats load_stats(std::istream& in);
void save_stats(const CorpusStats& stats, const std::filesystem::path& path);
CorpusStats load_stats(const std::filesystem::path& path);

inline constexpr std::uint32_t kStatsFormatVersion = 1;

}  // namespace regiolex
