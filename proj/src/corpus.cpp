#include "regiolex/corpus.hpp"

#include <algorithm>
#include <istream>
#include <iterator>

#include <json.hpp>

#include "regiolex/text.hpp"
#include "strings.hpp"

namespace regiolex {

IngestErrors& IngestErrors::operator+=(const IngestErrors& o) {
  malformed += o.malformed;
  unknown_location += o.unknown_location;
  conflicting_location += o.conflicting_location;
  return *this;
}

std::size_t WordCounts::locations_with_occurrences() const {
  return static_cast<std::size_t>(
      std::count_if(by_location.begin(), by_location.end(), [](std::uint64_t c) { return c > 0; }));
}

std::optional<RawPost> parse_post_line(std::string_view line) {
  const auto trimmed = detail::trim(line);
  if (trimmed.empty()) return std::nullopt;

  RawPost post;
  if (trimmed.front() == '{') {
    const auto json = nlohmann::json::parse(trimmed, nullptr, /*allow_exceptions=*/false);
    if (!json.is_object()) return std::nullopt;
    const auto get_string = [&](const char* key) -> std::optional<std::string> {
      const auto it = json.find(key);
      if (it == json.end() || !it->is_string()) return std::nullopt;
      return it->get<std::string>();
    };
    auto user = get_string("user_id");
    auto location = get_string("location_id");
    auto text = get_string("text");
    if (!user || !location || !text) return std::nullopt;
    post.user_id = std::move(*user);
    post.location_id = std::move(*location);
    post.text = std::move(*text);
    if (json.contains("timestamp")) {
      auto ts = get_string("timestamp");
      if (!ts) return std::nullopt;
      if (!ts->empty()) post.timestamp = std::move(*ts);
    }
  } else {
    std::string_view body = line;
    if (!body.empty() && body.back() == '\r') body.remove_suffix(1);
    const auto fields = detail::split(body, '\t');
    if (fields.size() < 3 || fields.size() > 4) return std::nullopt;
    post.user_id = std::string(detail::trim(fields[0]));
    post.location_id = std::string(detail::trim(fields[1]));
    post.text = std::string(fields[2]);
    if (fields.size() == 4 && !detail::trim(fields[3]).empty()) {
      post.timestamp = std::string(detail::trim(fields[3]));
    }
  }
  if (post.user_id.empty() || post.location_id.empty() || detail::trim(post.text).empty()) {
    return std::nullopt;
  }
  return post;
}

std::string format_post_line(const RawPost& post) {
  std::string text = post.text;
  std::replace_if(text.begin(), text.end(), [](char c) { return c == '\t' || c == '\n' || c == '\r'; }, ' ');
  std::string line = post.user_id + '\t' + post.location_id + '\t' + text;
  if (post.timestamp) {
    line += '\t';
    line += *post.timestamp;
  }
  return line;
}

// ---------------------------------------------------------------------------

CorpusStats::CorpusStats(LocationTable locations)
    : locations_(std::move(locations)),
      location_tokens_(locations_.size(), 0),
      location_posts_(locations_.size(), 0),
      location_users_(locations_.size(), 0) {}

const WordCounts* CorpusStats::find(std::string_view word) const {
  const auto it = words_.find(std::string(word));
  return it == words_.end() ? nullptr : &it->second;
}

const WordCounts& CorpusStats::at(std::string_view word) const {
  const auto* counts = find(word);
  if (counts == nullptr) throw CorpusError("unknown word '" + std::string(word) + "'");
  return *counts;
}

std::vector<std::string> CorpusStats::vocabulary() const {
  std::vector<std::string> out;
  out.reserve(words_.size());
  for (const auto& [word, counts] : words_) out.push_back(word);
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<UserIndex> CorpusStats::find_user(std::string_view id) const {
  const auto it = user_index_.find(std::string(id));
  if (it == user_index_.end()) return std::nullopt;
  return it->second;
}

bool CorpusStats::operator==(const CorpusStats& other) const {
  return locations_ == other.locations_ && users_ == other.users_ && words_ == other.words_ &&
         total_tokens_ == other.total_tokens_ && total_posts_ == other.total_posts_ &&
         location_tokens_ == other.location_tokens_ && location_posts_ == other.location_posts_ &&
         location_users_ == other.location_users_ && errors_ == other.errors_;
}

void CorpusStats::canonicalize() {
  const std::size_t n = users_.size();
  std::vector<UserIndex> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<UserIndex>(i);
  std::sort(order.begin(), order.end(),
            [&](UserIndex a, UserIndex b) { return users_[a].id < users_[b].id; });

  std::vector<UserIndex> remap(n);
  std::vector<UserRecord> sorted;
  sorted.reserve(n);
  for (std::size_t pos = 0; pos < n; ++pos) {
    remap[order[pos]] = static_cast<UserIndex>(pos);
    sorted.push_back(std::move(users_[order[pos]]));
  }
  users_ = std::move(sorted);

  for (auto& [word, counts] : words_) {
    for (auto& u : counts.users) u = remap[u];
    std::sort(counts.users.begin(), counts.users.end());
    counts.users.erase(std::unique(counts.users.begin(), counts.users.end()), counts.users.end());
  }
  rebuild_derived();
}

void CorpusStats::rebuild_derived() {
  const std::size_t n_loc = locations_.size();
  user_index_.clear();
  user_index_.reserve(users_.size());
  location_users_.assign(n_loc, 0);
  for (std::size_t i = 0; i < users_.size(); ++i) {
    user_index_.emplace(users_[i].id, static_cast<UserIndex>(i));
    ++location_users_[users_[i].location];
  }
  for (auto& [word, counts] : words_) {
    counts.users_by_location.assign(n_loc, 0);
    for (UserIndex u : counts.users) ++counts.users_by_location[users_[u].location];
  }
}

// ---------------------------------------------------------------------------

CorpusBuilder::CorpusBuilder(LocationTable locations) : stats_(std::move(locations)) {}

std::optional<UserIndex> CorpusBuilder::attribute(std::string_view user_id, LocationIndex location) {
  auto [it, inserted] =
      stats_.user_index_.try_emplace(std::string(user_id), static_cast<UserIndex>(stats_.users_.size()));
  if (inserted) {
    stats_.users_.push_back({std::string(user_id), location});
    return it->second;
  }
  if (stats_.users_[it->second].location != location) {
    ++stats_.errors_.conflicting_location;
    return std::nullopt;
  }
  return it->second;
}

bool CorpusBuilder::add_tokens(std::string_view user_id, LocationIndex location,
                               std::span<const std::string> tokens) {
  if (location >= stats_.num_locations()) {
    ++stats_.errors_.unknown_location;
    return false;
  }
  const auto user = attribute(user_id, location);
  if (!user) return false;

  const std::size_t n_loc = stats_.num_locations();
  ++stats_.total_posts_;
  ++stats_.location_posts_[location];
  stats_.total_tokens_ += tokens.size();
  stats_.location_tokens_[location] += tokens.size();
  for (const auto& token : tokens) {
    auto& counts = stats_.words_[token];
    if (counts.by_location.empty()) counts.by_location.assign(n_loc, 0);
    ++counts.occurrences;
    ++counts.by_location[location];
    if (counts.users.empty() || counts.users.back() != *user) counts.users.push_back(*user);
  }
  return true;
}

bool CorpusBuilder::add(const RawPost& post) {
  if (detail::trim(post.text).empty() || post.user_id.empty()) {
    ++stats_.errors_.malformed;
    return false;
  }
  const auto location = stats_.locations_.find(post.location_id);
  if (!location) {
    ++stats_.errors_.unknown_location;
    return false;
  }
  const auto tokens = analyze(post.text);
  return add_tokens(post.user_id, *location, tokens);
}

bool CorpusBuilder::add_line(std::string_view line) {
  if (detail::trim(line).empty()) return false;
  const auto post = parse_post_line(line);
  if (!post) {
    ++stats_.errors_.malformed;
    return false;
  }
  return add(*post);
}

CorpusStats CorpusBuilder::finish() && {
  stats_.canonicalize();
  return std::move(stats_);
}

CorpusStats ingest(std::span<const RawPost> posts, const LocationTable& locations) {
  CorpusBuilder builder(locations);
  for (const auto& post : posts) builder.add(post);
  return std::move(builder).finish();
}

CorpusStats ingest_lines(std::istream& in, const LocationTable& locations) {
  CorpusBuilder builder(locations);
  std::string line;
  while (std::getline(in, line)) builder.add_line(line);
  return std::move(builder).finish();
}

// ---------------------------------------------------------------------------

CorpusStats merge(const CorpusStats& a, const CorpusStats& b) {
  if (!(a.locations_ == b.locations_)) {
    throw CorpusError("cannot merge corpus statistics built against different location tables");
  }
  CorpusStats out(a.locations_);

  // Both user tables are id-sorted; a sorted merge keeps the result canonical
  // and makes both index remappings monotone.
  std::vector<UserIndex> remap_a(a.users_.size());
  std::vector<UserIndex> remap_b(b.users_.size());
  out.users_.reserve(a.users_.size() + b.users_.size());
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.users_.size() || j < b.users_.size()) {
    const auto next = static_cast<UserIndex>(out.users_.size());
    if (j == b.users_.size() || (i < a.users_.size() && a.users_[i].id < b.users_[j].id)) {
      remap_a[i] = next;
      out.users_.push_back(a.users_[i++]);
    } else if (i == a.users_.size() || b.users_[j].id < a.users_[i].id) {
      remap_b[j] = next;
      out.users_.push_back(b.users_[j++]);
    } else {
      if (a.users_[i].location != b.users_[j].location) {
        throw CorpusError("user '" + a.users_[i].id + "' is attributed to two different locations");
      }
      remap_a[i] = next;
      remap_b[j] = next;
      out.users_.push_back(a.users_[i]);
      ++i;
      ++j;
    }
  }

  out.total_tokens_ = a.total_tokens_ + b.total_tokens_;
  out.total_posts_ = a.total_posts_ + b.total_posts_;
  for (std::size_t l = 0; l < out.num_locations(); ++l) {
    out.location_tokens_[l] = a.location_tokens_[l] + b.location_tokens_[l];
    out.location_posts_[l] = a.location_posts_[l] + b.location_posts_[l];
  }
  out.errors_ = a.errors_;
  out.errors_ += b.errors_;

  const auto remapped = [](const std::vector<UserIndex>& users, const std::vector<UserIndex>& remap) {
    std::vector<UserIndex> r;
    r.reserve(users.size());
    for (UserIndex u : users) r.push_back(remap[u]);
    return r;
  };

  out.words_.reserve(a.words_.size() + b.words_.size());
  for (const auto& [word, counts] : a.words_) {
    WordCounts merged = counts;
    merged.users = remapped(counts.users, remap_a);
    out.words_.emplace(word, std::move(merged));
  }
  for (const auto& [word, counts] : b.words_) {
    auto users_b = remapped(counts.users, remap_b);
    auto it = out.words_.find(word);
    if (it == out.words_.end()) {
      WordCounts merged = counts;
      merged.users = std::move(users_b);
      out.words_.emplace(word, std::move(merged));
      continue;
    }
    auto& merged = it->second;
    merged.occurrences += counts.occurrences;
    for (std::size_t l = 0; l < merged.by_location.size(); ++l) {
      merged.by_location[l] += counts.by_location[l];
    }
    std::vector<UserIndex> united;
    united.reserve(merged.users.size() + users_b.size());
    std::set_union(merged.users.begin(), merged.users.end(), users_b.begin(), users_b.end(),
                   std::back_inserter(united));
    merged.users = std::move(united);
  }
  out.rebuild_derived();
  return out;
}

CorpusStats apply_thresholds(const CorpusStats& stats, std::uint64_t min_occurrences,
                             std::uint64_t min_users) {
  CorpusStats out = stats;
  std::erase_if(out.words_, [&](const auto& entry) {
    const auto& counts = entry.second;
    return !(counts.occurrences > min_occurrences && counts.user_count() > min_users);
  });
  return out;
}

}  // namespace regiolex
