#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "regiolex/config.hpp"
#include "regiolex/corpus.hpp"
#include "regiolex/synth.hpp"

namespace regiolex {

/// Totals, per-location mean and population standard deviation for words
/// (tokens), posts, users and vocabulary, plus the rejected-record tally.
nlohmann::json ingest_summary(const CorpusStats& stats);

/// Reads config.posts against config.locations and writes stats.bin and
/// ingest_summary.json (and samples.jsonl plus a pseudonym salt when
/// config.samples is set) into config.output_dir. With several threads the
/// posts are sharded by user, so the result equals a single-pass ingest.
/// Throws when the input holds no accepted post.
CorpusStats cmd_ingest(const RunConfig& config);

/// Ingests `lines` with posts sharded by user over `threads` workers.
CorpusStats ingest_sharded(const std::vector<std::string>& lines, const LocationTable& locations,
                           std::size_t threads);

/// Writes ranking_<metric>.tsv per configured metric and scores.tsv from the
/// thresholded stats file.
std::vector<Ranking> cmd_rank(const RunConfig& config);

/// Writes rank_diff.tsv: word, word_rank, user_rank, log_rank_diff for the
/// top diff_top_k words, from the LTF-IG and LUF-IG ranking files.
std::vector<RankDiff> cmd_diff(const RunConfig& config);

/// Writes sweep.tsv and one model file per cell under models/.
std::vector<SweepCell> cmd_geo(const RunConfig& config);

/// Writes posts.tsv, locations.tsv and truth.tsv into `dir`.
SynthCorpus cmd_synth(const SynthConfig& config, const std::filesystem::path& dir);

/// Writes annotations_<metric>.json and returns the export document.
nlohmann::json cmd_export_annotations(const RunConfig& config, const std::string& metric);

/// Reads the pseudonym salt written at ingest, creating one when absent.
std::string load_or_create_salt(const std::filesystem::path& path);

}  // namespace regiolex
