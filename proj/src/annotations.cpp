#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <set>
#include <tuple>

#include "regiolex/review.hpp"

namespace regiolex {

using nlohmann::json;

json to_json(const Annotation& a) {
  json j = {{"word", a.word}, {"ranking", a.ranking}, {"label", a.label}, {"annotator", a.annotator},
            {"timestamp", a.timestamp}};
  j["category"] = a.category ? json(*a.category) : json(nullptr);
  j["note"] = a.note ? json(*a.note) : json(nullptr);
  return j;
}

namespace {

std::string required_string(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_string()) throw AnnotationError(std::string("field '") + key + "' must be a string");
  auto s = it->get<std::string>();
  if (s.empty()) throw AnnotationError(std::string("field '") + key + "' must not be empty");
  return s;
}

std::optional<std::string> optional_string(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw AnnotationError(std::string("field '") + key + "' must be a string or null");
  return it->get<std::string>();
}

auto key_of(const Annotation& a) { return std::tie(a.ranking, a.word, a.annotator); }

}  // namespace

Annotation annotation_from_json(const json& j) {
  if (!j.is_object()) throw AnnotationError("annotation must be a JSON object");
  Annotation a;
  a.word = required_string(j, "word");
  a.ranking = required_string(j, "ranking");
  a.annotator = required_string(j, "annotator");
  const auto label = j.find("label");
  if (label == j.end() || !label->is_number_integer() ||
      (label->get<std::int64_t>() != 0 && label->get<std::int64_t>() != 1)) {
    throw AnnotationError("field 'label' must be 0 or 1");
  }
  a.label = label->get<int>();
  a.category = optional_string(j, "category");
  a.note = optional_string(j, "note");
  a.timestamp = optional_string(j, "timestamp").value_or("");
  return a;
}

std::string utc_timestamp_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

AnnotationStore::AnnotationStore(std::filesystem::path log) : log_(std::move(log)) {
  if (log_.has_parent_path()) std::filesystem::create_directories(log_.parent_path());
}

void AnnotationStore::append(const Annotation& a) {
  const std::string line = to_json(a).dump() + '\n';
  std::lock_guard lock(mutex_);
  std::ofstream out(log_, std::ios::app | std::ios::binary);
  if (!out) throw std::runtime_error("cannot open annotation log " + log_.string());
  out.write(line.data(), static_cast<std::streamsize>(line.size()));
  out.flush();
  if (!out) throw std::runtime_error("write to annotation log " + log_.string() + " failed");
}

std::vector<Annotation> AnnotationStore::history() const {
  std::string data;
  {
    std::lock_guard lock(mutex_);
    std::ifstream in(log_, std::ios::binary);
    if (!in) return {};
    data.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  std::vector<Annotation> out;
  std::size_t start = 0;
  while (start < data.size()) {
    const auto end = data.find('\n', start);
    if (end == std::string::npos) break;  // torn tail
    const std::string_view line(data.data() + start, end - start);
    start = end + 1;
    if (line.empty()) continue;
    const auto j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw std::runtime_error("corrupt record in annotation log " + log_.string());
    out.push_back(annotation_from_json(j));
  }
  return out;
}

std::vector<Annotation> supersede(std::span<const Annotation> history) {
  std::vector<Annotation> out;
  out.reserve(history.size());
  // Walk backwards so the first record seen for each key is the latest.
  std::set<std::tuple<std::string, std::string, std::string>> seen;
  for (auto it = history.rbegin(); it != history.rend(); ++it) {
    if (seen.emplace(it->ranking, it->word, it->annotator).second) out.push_back(*it);
  }
  std::sort(out.begin(), out.end(), [](const Annotation& a, const Annotation& b) { return key_of(a) < key_of(b); });
  return out;
}

std::vector<Annotation> AnnotationStore::current() const {
  const auto all = history();
  return supersede(all);
}

std::vector<Annotation> AnnotationStore::current(std::string_view ranking) const {
  auto all = current();
  std::erase_if(all, [&](const Annotation& a) { return a.ranking != ranking; });
  return all;
}

AnnotationSummary summarize(std::span<const Annotation> current, std::string_view ranking) {
  AnnotationSummary s;
  s.ranking = std::string(ranking);
  std::set<std::string_view> words;
  for (const auto& a : current) {
    if (a.ranking != ranking) continue;
    ++s.annotations;
    if (a.label == 1) ++s.labeled_one;
    words.insert(a.word);
  }
  s.words = words.size();
  s.fraction_labeled_one =
      s.annotations == 0 ? 0.0 : static_cast<double>(s.labeled_one) / static_cast<double>(s.annotations);
  return s;
}

json to_json(const AnnotationSummary& s) {
  return {{"ranking", s.ranking},
          {"annotations", s.annotations},
          {"labeled_one", s.labeled_one},
          {"words", s.words},
          {"fraction_labeled_one", s.fraction_labeled_one}};
}

json export_document(std::span<const Annotation> current, std::string_view ranking) {
  json rows = json::array();
  for (const auto& a : current) {
    if (a.ranking == ranking) rows.push_back(to_json(a));
  }
  return {{"ranking", std::string(ranking)}, {"summary", to_json(summarize(current, ranking))},
          {"annotations", std::move(rows)}};
}

}  // namespace regiolex
