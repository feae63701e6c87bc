#include "regiolex/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <thread>
#include <unordered_map>

#include "regiolex/geoloc.hpp"
#include "regiolex/metrics.hpp"
#include "regiolex/review.hpp"
#include "regiolex/samples.hpp"
#include "regiolex/text.hpp"
#include "strings.hpp"

namespace regiolex {

using nlohmann::json;

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read posts file " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(std::move(line));
  return lines;
}

LocationTable require_locations(const RunConfig& config) {
  if (config.locations.empty()) throw ConfigError("no locations file given");
  return LocationTable::read_tsv(config.locations);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

json row_summary(const std::vector<double>& per_location, double total) {
  const double n = static_cast<double>(per_location.size());
  double mean = 0.0;
  for (double v : per_location) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : per_location) var += (v - mean) * (v - mean);
  return {{"total", total}, {"mean", mean}, {"sd", std::sqrt(var / n)}};
}

CorpusStats thresholded_stats(const RunConfig& config) {
  return apply_thresholds(load_stats(config.stats_path()), config.min_occurrences, config.min_users);
}

Ranking ranking_for(const CorpusStats& stats, Metric metric, const RunConfig& config) {
  Ranking r = metric == Metric::TfIlf ? tf_ilf_order(stats) : build_ranking(stats, metric, config.estimation());
  flag_toponyms(r, stats.locations());
  return r;
}

}  // namespace

json ingest_summary(const CorpusStats& stats) {
  const auto n = stats.num_locations();
  std::vector<double> tokens(n), posts(n), users(n), vocab(n, 0.0);
  for (LocationIndex l = 0; l < n; ++l) {
    tokens[l] = static_cast<double>(stats.location_tokens(l));
    posts[l] = static_cast<double>(stats.location_posts(l));
    users[l] = static_cast<double>(stats.location_users(l));
  }
  for (const auto& [word, counts] : stats.words()) {
    for (LocationIndex l = 0; l < n; ++l) {
      if (counts.by_location[l] > 0) vocab[l] += 1.0;
    }
  }
  const auto& e = stats.errors();
  return {{"locations", n},
          {"words", row_summary(tokens, static_cast<double>(stats.total_tokens()))},
          {"posts", row_summary(posts, static_cast<double>(stats.total_posts()))},
          {"users", row_summary(users, static_cast<double>(stats.total_users()))},
          {"vocabulary", row_summary(vocab, static_cast<double>(stats.vocabulary_size()))},
          {"rejected",
           {{"malformed", e.malformed},
            {"unknown_location", e.unknown_location},
            {"conflicting_location", e.conflicting_location}}}};
}

CorpusStats ingest_sharded(const std::vector<std::string>& lines, const LocationTable& locations,
                           std::size_t threads) {
  threads = std::max<std::size_t>(1, threads);
  // All posts of a user go to the same shard in input order, so first-post
  // attribution is the same as in a single pass.
  std::vector<std::vector<RawPost>> shards(threads);
  std::vector<std::string_view> malformed;
  for (const auto& line : lines) {
    if (detail::trim(line).empty()) continue;
    auto post = parse_post_line(line);
    if (!post) {
      malformed.push_back(line);
      continue;
    }
    shards[fnv1a(post->user_id) % threads].push_back(std::move(*post));
  }

  std::vector<CorpusStats> partial(threads);
  const auto run = [&](std::size_t s) {
    CorpusBuilder builder(locations);
    if (s == 0) {
      for (auto line : malformed) builder.add_line(line);
    }
    for (const auto& post : shards[s]) builder.add(post);
    partial[s] = std::move(builder).finish();
  };
  if (threads == 1) {
    run(0);
  } else {
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(threads);
    for (std::size_t s = 0; s < threads; ++s) {
      workers.emplace_back([&, s] {
        try {
          run(s);
        } catch (...) {
          errors[s] = std::current_exception();
        }
      });
    }
    for (auto& w : workers) w.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  CorpusStats out = std::move(partial[0]);
  for (std::size_t s = 1; s < threads; ++s) out = merge(out, partial[s]);
  return out;
}

std::string load_or_create_salt(const std::filesystem::path& path) {
  if (std::filesystem::exists(path)) {
    std::ifstream in(path);
    std::string salt;
    std::getline(in, salt);
    if (!salt.empty()) return salt;
  }
  std::random_device rd;
  std::string salt;
  char buf[9];
  for (int i = 0; i < 4; ++i) {
    std::snprintf(buf, sizeof buf, "%08x", static_cast<unsigned>(rd()));
    salt += buf;
  }
  auto out = open_output(path);
  out << salt << '\n';
  return salt;
}

CorpusStats cmd_ingest(const RunConfig& config) {
  config.validate();
  const auto locations = require_locations(config);
  if (config.posts.empty()) throw ConfigError("no posts file given");
  const auto lines = read_lines(config.posts);

  auto stats = ingest_sharded(lines, locations, config.threads);
  std::filesystem::create_directories(config.output_dir);
  if (stats.total_posts() == 0) {
    throw CorpusError("no post in " + config.posts.string() + " was accepted (" +
                      std::to_string(stats.errors().total()) + " rejected)");
  }
  save_stats(stats, config.stats_path());

  auto summary = ingest_summary(stats);
  summary["config"] = to_json(config);
  open_output(config.output_dir / "ingest_summary.json") << summary.dump(2) << '\n';

  if (config.samples) {
    SampleIndex index(config.sample_capacity, config.seed);
    std::unordered_map<std::string, LocationIndex> attributed;
    for (const auto& line : lines) {
      const auto post = parse_post_line(line);
      if (!post) continue;
      const auto loc = locations.find(post->location_id);
      if (!loc) continue;
      const auto [it, inserted] = attributed.try_emplace(post->user_id, *loc);
      if (!inserted && it->second != *loc) continue;
      index.add(*post, analyze(post->text));
    }
    index.write_jsonl(config.samples_path());
    load_or_create_salt(config.salt_path());
  }
  return stats;
}

std::vector<Ranking> cmd_rank(const RunConfig& config) {
  config.validate();
  const auto stats = thresholded_stats(config);
  const auto prov = provenance(config, "rank");
  std::vector<Ranking> rankings;
  for (const auto metric : config.metrics) {
    rankings.push_back(ranking_for(stats, metric, config));
    auto out = open_output(config.ranking_path(metric));
    write_ranking_tsv(rankings.back(), stats, out, prov);
  }
  auto scores = open_output(config.output_dir / "scores.tsv");
  write_scores_tsv(stats, rankings, scores, prov);
  return rankings;
}

std::vector<RankDiff> cmd_diff(const RunConfig& config) {
  config.validate();
  const auto read = [&](Metric m) {
    std::ifstream in(config.ranking_path(m));
    if (!in) throw std::runtime_error("missing " + config.ranking_path(m).string() + "; run rank first");
    return read_ranking_tsv(in, m);
  };
  const auto by_words = read(Metric::LtfIg);
  const auto by_users = read(Metric::LufIg);
  auto diffs = top_rank_diffs(by_words, by_users, config.diff_top_k);

  auto out = open_output(config.output_dir / "rank_diff.tsv");
  const auto prov = provenance(config, "diff");
  for (auto line : detail::split(prov, '\n')) out << "# " << line << '\n';
  out << "word\tword_rank\tuser_rank\tlog_rank_diff\n";
  for (const auto& d : diffs) {
    out << d.word << '\t' << d.word_rank << '\t' << d.user_rank << '\t' << detail::format_double(d.log_diff)
        << '\n';
  }
  return diffs;
}

std::vector<SweepCell> cmd_geo(const RunConfig& config) {
  config.validate();
  const auto stats = thresholded_stats(config);
  if (config.posts.empty()) throw ConfigError("no posts file given");
  const auto vocabulary = Vocabulary::of(stats);

  std::ifstream posts(config.posts, std::ios::binary);
  if (!posts) throw std::runtime_error("cannot read posts file " + config.posts.string());
  const auto docs = build_user_documents(posts, stats.locations(), vocabulary);
  const auto split = split_users(docs, config.train_users, config.test_users, config.seed);

  std::vector<FeatureSource> sources;
  for (const auto metric : config.metrics) {
    sources.push_back({std::string(metric_name(metric)), ranking_for(stats, metric, config)});
  }
  sources.push_back({"all", std::nullopt});

  const auto cells = sweep(sources, config.fractions, split, vocabulary, stats.locations(), config.train_params());

  auto out = open_output(config.output_dir / "sweep.tsv");
  write_sweep_tsv(cells, out, provenance(config, "geo"));
  for (const auto& cell : cells) {
    const auto name = cell.source + "_" + detail::format_double(cell.fraction) + ".json";
    auto model = open_output(config.output_dir / "models" / name);
    cell.model.save(model);
  }
  return cells;
}

SynthCorpus cmd_synth(const SynthConfig& config, const std::filesystem::path& dir) {
  auto corpus = generate(config);
  write_corpus(corpus, dir);
  return corpus;
}

json cmd_export_annotations(const RunConfig& config, const std::string& metric) {
  const auto m = parse_metric(metric);
  if (!m) throw ConfigError("unknown metric '" + metric + "'");
  const std::string name(metric_name(*m));
  AnnotationStore store(config.annotations_path());
  const auto doc = export_document(store.current(name), name);
  open_output(config.output_dir / ("annotations_" + name + ".json")) << doc.dump(2) << '\n';
  return doc;
}

}  // namespace regiolex
