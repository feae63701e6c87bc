#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "regiolex/geoloc.hpp"
#include "regiolex/metrics.hpp"

namespace regiolex {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything a pipeline run depends on. Loaded from one JSON file, then
/// overridden by command-line flags; the resolved value is embedded in every
/// report it produces.
struct RunConfig {
  std::filesystem::path posts;
  std::filesystem::path locations;
  std::filesystem::path output_dir = "out";

  std::uint64_t min_occurrences = 40;
  std::uint64_t min_users = 25;
  std::vector<Metric> metrics = {Metric::HWords, Metric::HUsers, Metric::LtfIg, Metric::LufIg,
                                 Metric::IgrWords, Metric::IgrUsers, Metric::TfIlf};
  double log_base = 0.0;  // 0: natural
  bool normalize_location_size = false;

  std::size_t diff_top_k = 10;

  std::vector<double> fractions = {0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0};
  std::size_t train_users = 7500;
  std::size_t test_users = 2500;
  std::uint64_t seed = 0;
  double l2 = 1e-4;
  double learning_rate = 1.0;
  std::size_t max_epochs = 300;
  double tolerance = 1e-6;
  FeatureTransform transform = FeatureTransform::Log1p;

  std::size_t threads = 1;
  bool samples = false;
  std::size_t sample_capacity = 50;

  std::string bind = "127.0.0.1:8080";
  std::optional<std::filesystem::path> static_dir;

  /// Throws ConfigError.
  void validate() const;

  std::filesystem::path stats_path() const { return output_dir / "stats.bin"; }
  std::filesystem::path samples_path() const { return output_dir / "samples.jsonl"; }
  std::filesystem::path salt_path() const { return output_dir / "pseudonym_salt"; }
  std::filesystem::path annotations_path() const { return output_dir / "annotations.jsonl"; }
  std::filesystem::path ranking_path(Metric m) const {
    return output_dir / ("ranking_" + std::string(metric_name(m)) + ".tsv");
  }

  TrainParams train_params() const;
  EstimationOptions estimation() const;
};

nlohmann::json to_json(const RunConfig& c);
/// Unknown keys are rejected so typos do not silently fall back to defaults.
RunConfig run_config_from_json(const nlohmann::json& j, RunConfig base = {});
RunConfig load_run_config(const std::filesystem::path& path);

/// "config: {...}", the provenance line embedded in reports.
std::string provenance(const RunConfig& c, std::string_view command);

}  // namespace regiolex
