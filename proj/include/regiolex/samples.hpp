#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "regiolex/corpus.hpp"
#include "regiolex/random.hpp"

namespace regiolex {

struct SamplePost {
  std::string user_id;
  std::string text;
  bool operator==(const SamplePost&) const = default;
};

/// Per-word reservoir of example posts, used to show lexicographers the
/// contexts a word appears in. Each word keeps a uniform sample of at most
/// `capacity` of the posts containing it (algorithm R, seeded).
class SampleIndex {
 public:
  explicit SampleIndex(std::size_t capacity = 50, std::uint64_t seed = 0);

  /// Offers `post` to the reservoir of every distinct token in `tokens`.
  void add(const RawPost& post, std::span<const std::string> tokens);

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return reservoirs_.size(); }
  /// Empty when the word was never seen.
  std::span<const SamplePost> samples(const std::string& word) const;
  std::uint64_t seen(const std::string& word) const;

  /// One JSON object per line: {"word", "seen", "samples": [{"user_id", "text"}]},
  /// words in byte order.
  void write_jsonl(std::ostream& out) const;
  static SampleIndex read_jsonl(std::istream& in);
  void write_jsonl(const std::filesystem::path& path) const;
  static SampleIndex read_jsonl(const std::filesystem::path& path);

 private:
  struct Reservoir {
    std::uint64_t seen = 0;
    std::vector<SamplePost> items;
  };

  std::size_t capacity_;
  Rng rng_;
  std::unordered_map<std::string, Reservoir> reservoirs_;
};

}  // namespace regiolex
