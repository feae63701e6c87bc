#include <istream>
#include <ostream>
#include <string>

#include "regiolex/metrics.hpp"
#include "strings.hpp"

namespace regiolex {

namespace {

void write_provenance(std::ostream& out, std::string_view provenance) {
  if (provenance.empty()) return;
  for (auto line : detail::split(provenance, '\n')) out << "# " << line << '\n';
}

}  // namespace

void write_ranking_tsv(const Ranking& ranking, const CorpusStats& stats, std::ostream& out,
                       std::string_view provenance) {
  out << "# metric=" << metric_name(ranking.metric()) << '\n';
  write_provenance(out, provenance);
  out << "rank\tword\tmetric_value\toccurrences\tusers\tlocations\ttoponym\n";
  for (const auto& e : ranking.entries()) {
    const auto& counts = stats.at(e.word);
    out << e.rank << '\t' << e.word << '\t' << detail::format_double(e.value) << '\t' << counts.occurrences
        << '\t' << counts.user_count() << '\t' << counts.locations_with_occurrences() << '\t'
        << (e.toponym ? 1 : 0) << '\n';
  }
}

Ranking read_ranking_tsv(std::istream& in, Metric metric) {
  std::vector<RankingEntry> entries;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      header_seen = true;
      if (line.rfind("rank\t", 0) == 0) continue;
    }
    const auto fields = detail::split(line, '\t');
    if (fields.size() != 7) {
      throw StatsError("ranking line " + std::to_string(line_no) + ": expected 7 columns");
    }
    const auto rank = detail::parse_int<std::size_t>(fields[0]);
    const auto value = detail::parse_double(fields[2]);
    const auto toponym = detail::parse_int<int>(fields[6]);
    if (!rank || !value || !toponym) {
      throw StatsError("ranking line " + std::to_string(line_no) + ": malformed field");
    }
    entries.push_back({*rank, std::string(fields[1]), *value, *toponym != 0});
  }
  return Ranking(metric, std::move(entries));
}

void write_scores_tsv(const CorpusStats& stats, std::span<const Ranking> rankings, std::ostream& out,
                      std::string_view provenance) {
  write_provenance(out, provenance);
  out << "word\toccurrences\tusers\tlocations";
  for (const auto& r : rankings) out << '\t' << metric_name(r.metric()) << '\t' << metric_name(r.metric()) << "_rank";
  out << '\n';
  for (const auto& word : stats.vocabulary()) {
    const auto& counts = stats.at(word);
    out << word << '\t' << counts.occurrences << '\t' << counts.user_count() << '\t'
        << counts.locations_with_occurrences();
    for (const auto& r : rankings) {
      const auto* e = r.find(word);
      if (e == nullptr) {
        out << "\t\t";
      } else {
        out << '\t' << detail::format_double(e->value) << '\t' << e->rank;
      }
    }
    out << '\n';
  }
}

}  // namespace regiolex
