#include "regiolex/samples.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include <json.hpp>

namespace regiolex {

SampleIndex::SampleIndex(std::size_t capacity, std::uint64_t seed) : capacity_(capacity), rng_(seed) {}

void SampleIndex::add(const RawPost& post, std::span<const std::string> tokens) {
  std::unordered_set<std::string_view> distinct;
  for (const auto& token : tokens) {
    if (!distinct.insert(token).second) continue;
    auto& reservoir = reservoirs_[token];
    ++reservoir.seen;
    if (reservoir.items.size() < capacity_) {
      reservoir.items.push_back({post.user_id, post.text});
      continue;
    }
    const auto slot = uniform_index(rng_, reservoir.seen);
    if (slot < capacity_) reservoir.items[slot] = {post.user_id, post.text};
  }
}

std::span<const SamplePost> SampleIndex::samples(const std::string& word) const {
  const auto it = reservoirs_.find(word);
  if (it == reservoirs_.end()) return {};
  return it->second.items;
}

std::uint64_t SampleIndex::seen(const std::string& word) const {
  const auto it = reservoirs_.find(word);
  return it == reservoirs_.end() ? 0 : it->second.seen;
}

void SampleIndex::write_jsonl(std::ostream& out) const {
  std::vector<const std::string*> words;
  words.reserve(reservoirs_.size());
  for (const auto& [word, r] : reservoirs_) words.push_back(&word);
  std::sort(words.begin(), words.end(), [](const auto* a, const auto* b) { return *a < *b; });
  for (const auto* word : words) {
    const auto& r = reservoirs_.at(*word);
    nlohmann::json samples = nlohmann::json::array();
    for (const auto& s : r.items) samples.push_back({{"user_id", s.user_id}, {"text", s.text}});
    out << nlohmann::json{{"word", *word}, {"seen", r.seen}, {"samples", std::move(samples)}}.dump()
        << '\n';
  }
}

SampleIndex SampleIndex::read_jsonl(std::istream& in) {
  SampleIndex index;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      Reservoir r;
      r.seen = j.at("seen").get<std::uint64_t>();
      for (const auto& s : j.at("samples")) {
        r.items.push_back({s.at("user_id").get<std::string>(), s.at("text").get<std::string>()});
      }
      index.capacity_ = std::max(index.capacity_, r.items.size());
      index.reservoirs_[j.at("word").get<std::string>()] = std::move(r);
    } catch (const nlohmann::json::exception& e) {
      throw CorpusError("sample index line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return index;
}

void SampleIndex::write_jsonl(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw CorpusError("cannot open " + path.string() + " for writing");
  write_jsonl(out);
}

SampleIndex SampleIndex::read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CorpusError("cannot open sample index " + path.string());
  return read_jsonl(in);
}

}  // namespace regiolex
