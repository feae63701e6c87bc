#include "regiolex/locations.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "strings.hpp"

namespace regiolex {

LocationTable::LocationTable(std::vector<Location> entries) : entries_(std::move(entries)) {
  if (entries_.size() < 2) {
    throw LocationError("location table needs at least 2 locations, got " +
                        std::to_string(entries_.size()));
  }
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (e.id.empty()) {
      throw LocationError("location " + std::to_string(i) + " has an empty id");
    }
    if (!(e.capital.lat >= -90.0 && e.capital.lat <= 90.0) ||
        !(e.capital.lon >= -180.0 && e.capital.lon <= 180.0)) {
      throw LocationError("location '" + e.id + "' has capital coordinates out of range");
    }
    if (!index_.emplace(e.id, static_cast<LocationIndex>(i)).second) {
      throw LocationError("duplicate location id '" + e.id + "'");
    }
  }
}

std::optional<LocationIndex> LocationTable::find(std::string_view id) const {
  const auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

LocationTable LocationTable::parse_tsv(std::istream& in) {
  std::vector<Location> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty() || line.front() == '#') continue;
    const auto fields = detail::split(line, '\t');
    if (fields.size() != 5) {
      throw LocationError("locations line " + std::to_string(line_no) + ": expected 5 columns, got " +
                          std::to_string(fields.size()));
    }
    if (entries.empty() && detail::trim(fields[3]) == "capital_lat") continue;
    Location loc;
    loc.id = std::string(detail::trim(fields[0]));
    loc.name = std::string(detail::trim(fields[1]));
    for (auto alias : detail::split(fields[2], ',')) {
      alias = detail::trim(alias);
      if (!alias.empty()) loc.aliases.emplace_back(alias);
    }
    const auto lat = detail::parse_double(detail::trim(fields[3]));
    const auto lon = detail::parse_double(detail::trim(fields[4]));
    if (!lat || !lon) {
      throw LocationError("locations line " + std::to_string(line_no) + ": bad coordinates");
    }
    loc.capital = {*lat, *lon};
    entries.push_back(std::move(loc));
  }
  return LocationTable(std::move(entries));
}

LocationTable LocationTable::read_tsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LocationError("cannot open locations file " + path.string());
  return parse_tsv(in);
}

void LocationTable::write_tsv(std::ostream& out) const {
  out << "location_id\tname\taliases\tcapital_lat\tcapital_lon\n";
  for (const auto& e : entries_) {
    out << e.id << '\t' << e.name << '\t';
    for (std::size_t i = 0; i < e.aliases.size(); ++i) {
      if (i) out << ',';
      out << e.aliases[i];
    }
    out << '\t' << detail::format_double(e.capital.lat) << '\t'
        << detail::format_double(e.capital.lon) << '\n';
  }
}

}  // namespace regiolex
