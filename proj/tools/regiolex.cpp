// regiolex command-line driver.

#include <atomic>
#include <chrono>
#include <csignal>
#include <iostream>
#include <optional>
#include <thread>

#include <CLI11.hpp>

#include "regiolex/commands.hpp"
#include "regiolex/review.hpp"

using namespace regiolex;

namespace {

std::atomic<bool> g_interrupted{false};

void on_signal(int) { g_interrupted = true; }

// Flags that override fields of the config file. Only flags given on the
// command line are applied.
struct Overrides {
  std::optional<std::string> posts, locations, output_dir;
  std::optional<std::uint64_t> min_occurrences, min_users;
  std::optional<std::vector<std::string>> metrics;
  std::optional<double> log_base;
  bool normalize = false;
  std::optional<std::size_t> top_k;
  std::optional<std::vector<double>> fractions;
  std::optional<std::size_t> train_users, test_users;
  std::optional<std::uint64_t> seed;
  std::optional<double> l2, learning_rate, tolerance;
  std::optional<std::size_t> max_epochs;
  std::optional<std::string> transform;
  std::optional<std::size_t> threads;
  bool samples = false;
  std::optional<std::size_t> sample_capacity;
  std::optional<std::string> bind, static_dir;

  RunConfig apply(RunConfig c) const {
    if (posts) c.posts = *posts;
    if (locations) c.locations = *locations;
    if (output_dir) c.output_dir = *output_dir;
    if (min_occurrences) c.min_occurrences = *min_occurrences;
    if (min_users) c.min_users = *min_users;
    if (metrics) {
      c.metrics.clear();
      for (const auto& name : *metrics) {
        const auto m = parse_metric(name);
        if (!m) throw ConfigError("unknown metric '" + name + "'");
        c.metrics.push_back(*m);
      }
    }
    if (log_base) c.log_base = *log_base;
    if (normalize) c.normalize_location_size = true;
    if (top_k) c.diff_top_k = *top_k;
    if (fractions) c.fractions = *fractions;
    if (train_users) c.train_users = *train_users;
    if (test_users) c.test_users = *test_users;
    if (seed) c.seed = *seed;
    if (l2) c.l2 = *l2;
    if (learning_rate) c.learning_rate = *learning_rate;
    if (tolerance) c.tolerance = *tolerance;
    if (max_epochs) c.max_epochs = *max_epochs;
    if (transform) {
      const auto t = parse_transform(*transform);
      if (!t) throw ConfigError("unknown transform '" + *transform + "'");
      c.transform = *t;
    }
    if (threads) c.threads = *threads;
    if (samples) c.samples = true;
    if (sample_capacity) c.sample_capacity = *sample_capacity;
    if (bind) c.bind = *bind;
    if (static_dir) c.static_dir = *static_dir;
    c.validate();
    return c;
  }
};

void add_out(CLI::App* sub, Overrides& o) {
  sub->add_option("-o,--out", o.output_dir, "Output (artifact) directory");
}
void add_thresholds(CLI::App* sub, Overrides& o) {
  sub->add_option("--min-occurrences", o.min_occurrences, "Keep words occurring more than this many times");
  sub->add_option("--min-users", o.min_users, "Keep words used by more than this many users");
}
void add_metrics(CLI::App* sub, Overrides& o) {
  sub->add_option("--metrics", o.metrics, "Metrics to rank by (h_words, h_users, i_words_raw, i_users_raw, "
                                          "ltf_ig, luf_ig, igr_words, igr_users, tf_ilf)");
  sub->add_option("--log-base", o.log_base, "Logarithm base (0 = natural)");
  sub->add_flag("--normalize-location-size", o.normalize, "Normalize counts by location totals");
}

std::pair<std::string, int> parse_bind(const std::string& bind) {
  const auto colon = bind.rfind(':');
  if (colon == std::string::npos) throw ConfigError("bind address must be host:port");
  return {bind.substr(0, colon), std::stoi(bind.substr(colon + 1))};
}

int serve(const RunConfig& config) {
  ReviewPaths paths;
  paths.stats = config.stats_path();
  paths.rankings_dir = config.output_dir;
  if (std::filesystem::exists(config.samples_path())) paths.samples = config.samples_path();
  paths.annotations = config.annotations_path();
  paths.salt = load_or_create_salt(config.salt_path());
  auto service = ReviewService::open(paths);

  ReviewServer server(*service, config.static_dir);
  const auto [host, port] = parse_bind(config.bind);
  const int bound = server.bind(host, port);
  if (bound < 0) {
    std::cerr << "error: cannot bind " << config.bind << "\n";
    return 1;
  }
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::thread watcher([&] {
    while (!g_interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    server.stop();
  });
  std::cout << "serving on http://" << host << ":" << bound << std::endl;
  const bool ok = server.listen();
  g_interrupted = true;
  watcher.join();
  return ok || g_interrupted ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regionalism detection over geotagged posts"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_file;
  app.add_option("-c,--config", config_file, "JSON run configuration")->check(CLI::ExistingFile);

  Overrides o;

  auto* ingest = app.add_subcommand("ingest", "Count words per location and user; write stats.bin");
  ingest->add_option("--posts", o.posts, "Posts file (TSV or JSON lines)");
  ingest->add_option("--locations", o.locations, "Locations TSV");
  add_out(ingest, o);
  ingest->add_option("--threads", o.threads, "Worker threads (posts are sharded by user)");
  ingest->add_flag("--samples", o.samples, "Build the per-word sample index for the review service");
  ingest->add_option("--sample-capacity", o.sample_capacity, "Posts kept per word in the sample index");
  ingest->add_option("--seed", o.seed, "Seed for reservoir sampling");

  auto* rank = app.add_subcommand("rank", "Write one ranking per metric plus scores.tsv");
  add_out(rank, o);
  add_thresholds(rank, o);
  add_metrics(rank, o);

  auto* diff = app.add_subcommand("diff", "Words whose token and user ranks differ most");
  add_out(diff, o);
  diff->add_option("-k,--top-k", o.top_k, "Number of words to report (0 = all)");

  auto* geo = app.add_subcommand("geo", "Feature-selection sweep for user geolocation");
  geo->add_option("--posts", o.posts, "Posts file used at ingest");
  add_out(geo, o);
  add_thresholds(geo, o);
  add_metrics(geo, o);
  geo->add_option("--fractions", o.fractions, "Vocabulary fractions in (0, 1]");
  geo->add_option("--train-users", o.train_users, "Training users");
  geo->add_option("--test-users", o.test_users, "Test users");
  geo->add_option("--seed", o.seed, "Split seed");
  geo->add_option("--l2", o.l2, "L2 penalty");
  geo->add_option("--learning-rate", o.learning_rate, "Initial gradient step");
  geo->add_option("--max-epochs", o.max_epochs, "Gradient descent epochs");
  geo->add_option("--tolerance", o.tolerance, "Stop when the loss improves by less than this");
  geo->add_option("--transform", o.transform, "Feature transform (log1p or raw)");

  SynthConfig synth_config;
  std::string synth_out = "synth";
  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus with ground truth");
  synth->add_option("-o,--out", synth_out, "Output directory");
  synth->add_option("--seed", synth_config.seed, "Generator seed");
  synth->add_option("--n-locations", synth_config.locations, "Number of locations");
  synth->add_option("--users-per-location", synth_config.users_per_location, "Ordinary users per location");
  synth->add_option("--posts-min", synth_config.posts_min, "Minimum posts per user");
  synth->add_option("--posts-max", synth_config.posts_max, "Maximum posts per user");
  synth->add_option("--background-words", synth_config.background_words, "Background vocabulary size");
  synth->add_option("--zipf", synth_config.zipf_exponent, "Zipf exponent of the background vocabulary");
  synth->add_option("--regionalisms", synth_config.regionalisms, "Planted regionalisms");
  synth->add_option("--concentration", synth_config.concentration, "Share of a regionalism in its homes");
  synth->add_option("--regional-rate", synth_config.regional_rate, "Share of token slots that are regional");
  synth->add_option("--bot-words", synth_config.bot_words, "Bot words");
  synth->add_option("--bot-users-max", synth_config.bot_users_max, "Maximum accounts per bot word");

  auto* serve_cmd = app.add_subcommand("serve", "Run the review service");
  add_out(serve_cmd, o);
  serve_cmd->add_option("--bind", o.bind, "host:port (port 0 picks a free port)");
  serve_cmd->add_option("--static-dir", o.static_dir, "Annotation UI assets to serve at /");

  std::string export_metric;
  auto* exp = app.add_subcommand("export-annotations", "Dump current annotations with the labeled fraction");
  add_out(exp, o);
  exp->add_option("-m,--metric", export_metric, "Ranking to export")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig base = config_file.empty() ? RunConfig{} : load_run_config(config_file);
    const RunConfig config = o.apply(base);

    if (ingest->parsed()) {
      const auto stats = cmd_ingest(config);
      std::cout << "ingested " << stats.total_posts() << " posts, " << stats.total_tokens() << " tokens, "
                << stats.total_users() << " users, " << stats.vocabulary_size() << " words\n";
      const auto& e = stats.errors();
      if (e.total() > 0) {
        std::cerr << "rejected: " << e.malformed << " malformed, " << e.unknown_location << " unknown location, "
                  << e.conflicting_location << " conflicting location\n";
      }
    } else if (rank->parsed()) {
      const auto rankings = cmd_rank(config);
      for (const auto& r : rankings) {
        std::cout << metric_name(r.metric()) << ": " << r.size() << " words -> "
                  << config.ranking_path(r.metric()).string() << "\n";
      }
    } else if (diff->parsed()) {
      std::cout << "word\tword_rank\tuser_rank\tlog_rank_diff\n";
      for (const auto& d : cmd_diff(config)) {
        std::cout << d.word << '\t' << d.word_rank << '\t' << d.user_rank << '\t' << d.log_diff << '\n';
      }
    } else if (geo->parsed()) {
      for (const auto& cell : cmd_geo(config)) {
        std::cout << cell.source << "\t" << cell.fraction << "\t" << cell.n_features << "\t"
                  << cell.result.accuracy << "\t" << cell.result.mean_distance_km << "\n";
      }
    } else if (synth->parsed()) {
      const auto corpus = cmd_synth(synth_config, synth_out);
      std::cout << "wrote " << corpus.posts.size() << " posts to " << synth_out << "\n";
    } else if (serve_cmd->parsed()) {
      return serve(config);
    } else if (exp->parsed()) {
      const auto doc = cmd_export_annotations(config, export_metric);
      std::cout << doc["summary"].dump(2) << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
