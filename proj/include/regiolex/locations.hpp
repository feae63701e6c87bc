#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace regiolex {

using LocationIndex = std::uint32_t;

struct LatLon {
  double lat = 0.0;
  double lon = 0.0;
  bool operator==(const LatLon&) const = default;
};

struct Location {
  std::string id;
  std::string name;
  std::vector<std::string> aliases;
  LatLon capital;
  bool operator==(const Location&) const = default;
};

class LocationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The gazetteer: N >= 2 locations with unique ids and valid capital
/// coordinates. Location indices are positions in file order.
class LocationTable {
 public:
  LocationTable() = default;
  explicit LocationTable(std::vector<Location> entries);

  /// Tab-separated: location_id, name, aliases (comma-separated), capital_lat,
  /// capital_lon. Blank lines and lines starting with '#' are skipped; a
  /// first line whose fourth column is "capital_lat" is treated as a header.
  static LocationTable parse_tsv(std::istream& in);
  static LocationTable read_tsv(const std::filesystem::path& path);
  void write_tsv(std::ostream& out) const;

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const Location& operator[](LocationIndex i) const { return entries_[i]; }
  const std::vector<Location>& entries() const { return entries_; }
  std::optional<LocationIndex> find(std::string_view id) const;

  bool operator==(const LocationTable& other) const { return entries_ == other.entries_; }

 private:
  std::vector<Location> entries_;
  std::unordered_map<std::string, LocationIndex> index_;
};

}  // namespace regiolex
