#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <fstream>

#include "regiolex/commands.hpp"
#include "regiolex/corpus.hpp"
#include "regiolex/geoloc.hpp"
#include "regiolex/metrics.hpp"
#include "regiolex/synth.hpp"
#include "regiolex/text.hpp"

namespace py = pybind11;
using namespace regiolex;

namespace {

Metric metric_of(const std::string& name) {
  const auto m = parse_metric(name);
  if (!m) throw py::value_error("unknown metric '" + name + "'");
  return *m;
}

Basis basis_of(const std::string& name) {
  if (name == "words" || name == "occurrences") return Basis::Occurrences;
  if (name == "users") return Basis::Users;
  throw py::value_error("basis must be 'words' or 'users'");
}

std::vector<RawPost> to_posts(const std::vector<std::tuple<std::string, std::string, std::string>>& rows) {
  std::vector<RawPost> posts;
  posts.reserve(rows.size());
  for (const auto& [user, location, text] : rows) posts.push_back({user, location, text, std::nullopt});
  return posts;
}

py::list ranking_rows(const Ranking& r) {
  py::list out;
  for (const auto& e : r.entries()) out.append(py::make_tuple(e.rank, e.word, e.value, e.toponym));
  return out;
}

Ranking make_ranking(const CorpusStats& stats, const std::string& metric, double log_base) {
  const auto m = metric_of(metric);
  EstimationOptions options;
  options.log_base = log_base;
  Ranking r = m == Metric::TfIlf ? tf_ilf_order(stats) : build_ranking(stats, m, options);
  flag_toponyms(r, stats.locations());
  return r;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Regionalism detection: corpus statistics, word metrics, geolocation and synthetic corpora";

  py::register_exception<CorpusError>(m, "CorpusError", PyExc_ValueError);
  py::register_exception<LocationError>(m, "LocationError", PyExc_ValueError);
  py::register_exception<StatsError>(m, "StatsError", PyExc_ValueError);

  m.def("tokenize", &tokenize, py::arg("text"));
  m.def("normalize_token", &normalize_token, py::arg("token"));
  m.def("analyze", &analyze, py::arg("text"));

  py::class_<LocationTable>(m, "LocationTable")
      .def(py::init([](const std::vector<std::tuple<std::string, std::string, std::vector<std::string>, double, double>>&
                           rows) {
             std::vector<Location> entries;
             for (const auto& [id, name, aliases, lat, lon] : rows) entries.push_back({id, name, aliases, {lat, lon}});
             return LocationTable(std::move(entries));
           }),
           py::arg("rows"), "rows: (id, name, aliases, capital_lat, capital_lon)")
      .def_static("read_tsv", &LocationTable::read_tsv, py::arg("path"))
      .def("__len__", &LocationTable::size)
      .def_property_readonly("ids", [](const LocationTable& t) {
        std::vector<std::string> ids;
        for (const auto& l : t.entries()) ids.push_back(l.id);
        return ids;
      })
      .def("capital", [](const LocationTable& t, const std::string& id) {
        const auto i = t.find(id);
        if (!i) throw py::key_error(id);
        return py::make_tuple(t[*i].capital.lat, t[*i].capital.lon);
      });

  py::class_<CorpusStats>(m, "CorpusStats")
      .def_property_readonly("total_tokens", &CorpusStats::total_tokens)
      .def_property_readonly("total_users", &CorpusStats::total_users)
      .def_property_readonly("total_posts", &CorpusStats::total_posts)
      .def_property_readonly("num_locations", &CorpusStats::num_locations)
      .def_property_readonly("locations", &CorpusStats::locations)
      .def("vocabulary", &CorpusStats::vocabulary)
      .def("__len__", &CorpusStats::vocabulary_size)
      .def("__contains__", [](const CorpusStats& s, const std::string& w) { return s.contains(w); })
      .def("counts",
           [](const CorpusStats& s, const std::string& w) {
             const auto& c = s.at(w);
             py::dict d;
             d["occurrences"] = c.occurrences;
             d["users"] = c.user_count();
             d["by_location"] = c.by_location;
             d["users_by_location"] = c.users_by_location;
             return d;
           },
           py::arg("word"))
      .def("errors",
           [](const CorpusStats& s) {
             py::dict d;
             d["malformed"] = s.errors().malformed;
             d["unknown_location"] = s.errors().unknown_location;
             d["conflicting_location"] = s.errors().conflicting_location;
             return d;
           })
      .def("save", [](const CorpusStats& s, const std::filesystem::path& p) { save_stats(s, p); })
      .def_static("load", [](const std::filesystem::path& p) { return load_stats(p); })
      .def(py::self == py::self);

  m.def("ingest",
        [](const std::vector<std::tuple<std::string, std::string, std::string>>& posts, const LocationTable& locations) {
          const auto raw = to_posts(posts);
          return ingest(raw, locations);
        },
        py::arg("posts"), py::arg("locations"), "posts: (user_id, location_id, text) tuples");
  m.def("ingest_file",
        [](const std::filesystem::path& path, const LocationTable& locations, std::size_t threads) {
          std::ifstream in(path, std::ios::binary);
          if (!in) throw py::value_error("cannot read " + path.string());
          std::vector<std::string> lines;
          std::string line;
          while (std::getline(in, line)) lines.push_back(std::move(line));
          return ingest_sharded(lines, locations, threads);
        },
        py::arg("path"), py::arg("locations"), py::arg("threads") = 1);
  m.def("merge", &merge, py::arg("a"), py::arg("b"));
  m.def("apply_thresholds", &apply_thresholds, py::arg("stats"), py::arg("min_occurrences") = 40,
        py::arg("min_users") = 25);

  m.def("h_words", py::overload_cast<const CorpusStats&, std::string_view>(&h_words));
  m.def("h_users", py::overload_cast<const CorpusStats&, std::string_view>(&h_users));
  m.def("ltf_ig", py::overload_cast<const CorpusStats&, std::string_view>(&ltf_ig));
  m.def("luf_ig", py::overload_cast<const CorpusStats&, std::string_view>(&luf_ig));
  m.def("igr",
        [](const CorpusStats& s, const std::string& w, const std::string& basis) { return igr(s, w, basis_of(basis)); },
        py::arg("stats"), py::arg("word"), py::arg("basis") = "users");
  m.def("score",
        [](const CorpusStats& s, const std::string& metric, const std::string& w, double log_base) {
          EstimationOptions o;
          o.log_base = log_base;
          return MetricEvaluator(s, o).score(metric_of(metric), w);
        },
        py::arg("stats"), py::arg("metric"), py::arg("word"), py::arg("log_base") = 0.0);
  m.def("metric_names", [] {
    std::vector<std::string> names;
    for (auto metric : all_metrics()) names.emplace_back(metric_name(metric));
    return names;
  });
  m.def("build_ranking",
        [](const CorpusStats& s, const std::string& metric, double log_base) {
          return ranking_rows(make_ranking(s, metric, log_base));
        },
        py::arg("stats"), py::arg("metric"), py::arg("log_base") = 0.0,
        "List of (rank, word, value, toponym) tuples.");
  m.def("rank_diffs",
        [](const CorpusStats& s, std::size_t k) {
          const auto words = make_ranking(s, "ltf_ig", 0.0);
          const auto users = make_ranking(s, "luf_ig", 0.0);
          py::list out;
          for (const auto& d : top_rank_diffs(words, users, k)) {
            out.append(py::make_tuple(d.word, d.word_rank, d.user_rank, d.log_diff));
          }
          return out;
        },
        py::arg("stats"), py::arg("k") = 10, "(word, word_rank, user_rank, log_rank_diff) of the LTF-IG/LUF-IG pair.");

  m.def("haversine_km",
        [](double lat1, double lon1, double lat2, double lon2) { return haversine_km({lat1, lon1}, {lat2, lon2}); });

  m.def("geolocation_sweep",
        [](const std::vector<std::tuple<std::string, std::string, std::string>>& posts, const CorpusStats& stats,
           const std::vector<std::string>& metrics, const std::vector<double>& fractions, std::size_t train_users,
           std::size_t test_users, std::uint64_t seed) {
          const auto raw = to_posts(posts);
          const auto vocabulary = Vocabulary::of(stats);
          const auto docs = build_user_documents(raw, stats.locations(), vocabulary);
          const auto split = split_users(docs, train_users, test_users, seed);
          std::vector<FeatureSource> sources;
          for (const auto& name : metrics) {
            if (name == "all") {
              sources.push_back({"all", std::nullopt});
            } else {
              sources.push_back({std::string(metric_name(metric_of(name))), make_ranking(stats, name, 0.0)});
            }
          }
          TrainParams params;
          params.seed = seed;
          std::vector<SweepCell> cells;
          {
            py::gil_scoped_release release;
            cells = sweep(sources, fractions, split, vocabulary, stats.locations(), params);
          }
          py::list out;
          for (const auto& c : cells) {
            py::dict d;
            d["metric"] = c.source;
            d["fraction"] = c.fraction;
            d["n_features"] = c.n_features;
            d["accuracy"] = c.result.accuracy;
            d["mean_distance_km"] = c.result.mean_distance_km;
            out.append(d);
          }
          return out;
        },
        py::arg("posts"), py::arg("stats"), py::arg("metrics"), py::arg("fractions"), py::arg("train_users"),
        py::arg("test_users"), py::arg("seed") = 0, "Names may include 'all' for the bag-of-words baseline.");

  py::class_<SynthConfig>(m, "SynthConfig")
      .def(py::init<>())
      .def_readwrite("seed", &SynthConfig::seed)
      .def_readwrite("locations", &SynthConfig::locations)
      .def_readwrite("users_per_location", &SynthConfig::users_per_location)
      .def_readwrite("posts_min", &SynthConfig::posts_min)
      .def_readwrite("posts_max", &SynthConfig::posts_max)
      .def_readwrite("tokens_min", &SynthConfig::tokens_min)
      .def_readwrite("tokens_max", &SynthConfig::tokens_max)
      .def_readwrite("background_words", &SynthConfig::background_words)
      .def_readwrite("zipf_exponent", &SynthConfig::zipf_exponent)
      .def_readwrite("regionalisms", &SynthConfig::regionalisms)
      .def_readwrite("concentration", &SynthConfig::concentration)
      .def_readwrite("home_min", &SynthConfig::home_min)
      .def_readwrite("home_max", &SynthConfig::home_max)
      .def_readwrite("regional_rate", &SynthConfig::regional_rate)
      .def_readwrite("bot_words", &SynthConfig::bot_words)
      .def_readwrite("bot_users_max", &SynthConfig::bot_users_max)
      .def_readwrite("bot_posts", &SynthConfig::bot_posts)
      .def_readwrite("bot_tokens_per_post", &SynthConfig::bot_tokens_per_post);

  m.def("generate",
        [](const SynthConfig& config) {
          const auto corpus = generate(config);
          py::list posts;
          for (const auto& p : corpus.posts) posts.append(py::make_tuple(p.user_id, p.location_id, p.text));
          py::list truth;
          for (const auto& t : corpus.truth) {
            std::vector<std::string> homes;
            for (auto h : t.homes) homes.push_back(corpus.locations[h].id);
            truth.append(py::make_tuple(t.word, std::string(label_name(t.label)), homes));
          }
          py::dict out;
          out["locations"] = corpus.locations;
          out["posts"] = posts;
          out["truth"] = truth;
          return out;
        },
        py::arg("config") = SynthConfig{}, "Dict with 'locations', 'posts' (user, location, text) and 'truth'.");
  m.def("write_corpus", [](const SynthConfig& config, const std::filesystem::path& dir) {
    cmd_synth(config, dir);
  });
}
