#include "cbsf/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "cbsf/parallel.hpp"
#include "cbsf/predictor.hpp"

namespace cbsf {
namespace {

namespace pt = boost::property_tree;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string shortest(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(std::string_view text, const std::string& field) {
  text = trim(text);
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
    throw InvalidArgument(fmt::format("{}: '{}' is not a valid number", field, text));
  return value;
}

bool parse_bool(std::string_view text, const std::string& field) {
  text = trim(text);
  if (text == "true" || text == "yes" || text == "1" || text == "on") return true;
  if (text == "false" || text == "no" || text == "0" || text == "off") return false;
  throw InvalidArgument(fmt::format("{}: '{}' is not a boolean", field, text));
}

std::vector<std::size_t> parse_list(std::string_view text, const std::string& field) {
  std::vector<std::size_t> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    out.push_back(parse_number<std::size_t>(text.substr(0, comma), field));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void log(const RunOptions& options, const std::string& line) {
  if (options.log) options.log(line);
}

SimilarityTable build_table(const RatingMatrix& train, const SimilarityConfig& sim,
                            const RunOptions& options) {
  const Stopwatch watch;
  auto table = SimilarityTable::build(train, sim, options.threads);
  log(options, fmt::format("similarity {}: {} pairs in {:.1f}s", to_string(sim.measure),
                           table.num_pairs(), watch.seconds()));
  return table;
}

// Per-group metric values for one n_top.
struct GroupMetrics {
  double satisfaction = kNaN;
  double rmse_g = kNaN;
  double mae_g = kNaN;
  double fairness1 = kNaN;
  double fairness2 = kNaN;
  double novelty = kNaN;
  double ntc = kNaN;
  double ntr = kNaN;
  std::size_t skipped = 0;
};

struct Pipeline {
  std::string method;
  const SimilarityTable* table;
  NeighborConfig neighbors;
  CandidateConfig candidates;
};

double mean_skipping_nan(const std::vector<std::vector<GroupMetrics>>& per_group, std::size_t k,
                         double GroupMetrics::*field) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& g : per_group) {
    const double v = g[k].*field;
    if (std::isnan(v)) continue;
    sum += v;
    ++n;
  }
  return n ? sum / n : kNaN;
}

std::vector<MetricReport> evaluate_groups(const ExperimentConfig& config, const PreparedData& data,
                                          const std::vector<GroupSpec>& groups,
                                          const Pipeline& pipeline,
                                          const SimilarityTable& ntr_table,
                                          const RunOptions& options) {
  const Stopwatch watch;
  const auto& sweep = config.evaluation.n_top_sweep;
  CandidateConfig candidates = pipeline.candidates;
  candidates.n_top = *std::max_element(sweep.begin(), sweep.end());
  const RatingMatrix& train = data.split.train;

  std::vector<std::vector<GroupMetrics>> per_group(groups.size());
  parallel_for(groups.size(), options.threads, [&](std::size_t gi) {
    const GroupSpec& g = groups[gi];
    const auto pm = predict_matrix(g, pipeline.neighbors, *pipeline.table, train, 1);
    const FuzzyCapacity cap(g, train);
    const auto rec = recommend(g, pm, candidates, cap);
    auto& out = per_group[gi];
    out.resize(sweep.size());
    for (std::size_t k = 0; k < sweep.size(); ++k) {
      const std::span<const ItemIndex> items(rec.items.data(),
                                             std::min(sweep[k], rec.items.size()));
      if (items.empty()) continue;
      GroupMetrics& m = out[k];
      m.satisfaction = group_pref(g, items, pm);
      m.rmse_g = rmse_g(g, items, pm, cap);
      m.mae_g = mae_g(g, items, pm, cap);
      m.fairness1 = fairness_jain(g, items, pm);
      m.fairness2 = fairness_var(g, items, pm);
      m.novelty = novelty(items, data.full);
      if (data.trust) {
        m.ntc = ntc(items, data.full, *data.trust);
        m.ntr = ntr(items, train, *data.trust, ntr_table);
      }
      for (const UserIndex u : g.members)
        for (const ItemIndex i : items)
          if (pm.provenance(u, i) == Provenance::kMissing) ++m.skipped;
    }
  });

  std::vector<MetricReport> reports;
  for (std::size_t k = 0; k < sweep.size(); ++k) {
    MetricReport r;
    r.dataset = config.dataset.name;
    r.method = pipeline.method;
    r.strategy = std::string(to_string(pipeline.neighbors.strategy));
    r.n_top = sweep[k];
    r.satisfaction = mean_skipping_nan(per_group, k, &GroupMetrics::satisfaction);
    r.rmse_g = mean_skipping_nan(per_group, k, &GroupMetrics::rmse_g);
    r.mae_g = mean_skipping_nan(per_group, k, &GroupMetrics::mae_g);
    r.fairness1 = mean_skipping_nan(per_group, k, &GroupMetrics::fairness1);
    r.fairness2 = mean_skipping_nan(per_group, k, &GroupMetrics::fairness2);
    r.novelty = mean_skipping_nan(per_group, k, &GroupMetrics::novelty);
    r.ntc = mean_skipping_nan(per_group, k, &GroupMetrics::ntc);
    r.ntr = mean_skipping_nan(per_group, k, &GroupMetrics::ntr);
    for (const auto& g : per_group) r.skipped += g[k].skipped;
    reports.push_back(std::move(r));
  }
  log(options, fmt::format("groups {}/{}: {} groups in {:.1f}s", pipeline.method,
                           to_string(pipeline.neighbors.strategy), groups.size(),
                           watch.seconds()));
  return reports;
}

std::vector<GroupSpec> make_groups(const ExperimentConfig& config, const PreparedData& data) {
  const auto& g = config.groups;
  return generate_groups(data.split.train, g.count, g.min_size, g.max_size, g.seed);
}

std::vector<MetricReport> run_group_pipeline(const ExperimentConfig& config, bool with_baseline,
                                             const RunOptions& options) {
  config.validate();
  const auto data = prepare_data(config, options);
  const auto groups = make_groups(config, data);
  const auto table = build_table(data.split.train, config.similarity, options);
  const Pipeline proposed{std::string(to_string(config.similarity.measure)), &table,
                          config.neighbors, config.candidates};
  auto reports = evaluate_groups(config, data, groups, proposed, table, options);
  if (!with_baseline) return reports;

  SimilarityConfig cosine_config = config.similarity;
  cosine_config.measure = Measure::kCosine;
  const auto cosine_table = build_table(data.split.train, cosine_config, options);
  CandidateConfig no_borda = config.candidates;
  no_borda.n_borda = 0;
  for (const auto strategy : {NeighborStrategy::kKnn, NeighborStrategy::kTopsis}) {
    NeighborConfig neighbors = config.neighbors;
    neighbors.strategy = strategy;
    const Pipeline baseline{"cosine-reimplementation", &cosine_table, neighbors, no_borda};
    auto rows = evaluate_groups(config, data, groups, baseline, table, options);
    reports.insert(reports.end(), rows.begin(), rows.end());
  }
  return reports;
}

// Section -> key -> setter. Keeps parsing and the key list in one place.
using Setter = std::function<void(ExperimentConfig&, const std::string& value,
                                  const std::string& field)>;
using KeyTable = std::vector<std::pair<std::string, std::vector<std::pair<std::string, Setter>>>>;

const KeyTable& key_table() {
  static const KeyTable table = {
      {"dataset",
       {
           {"name", [](auto& c, const auto& v, const auto&) { c.dataset.name = v; }},
           {"data_dir", [](auto& c, const auto& v, const auto&) { c.data_dir = v; }},
           {"ratings", [](auto& c, const auto& v, const auto&) { c.dataset.ratings = v; }},
           {"format",
            [](auto& c, const auto& v, const auto& f) {
              const auto format = parse_rating_format(trim(v));
              if (!format)
                throw InvalidArgument(
                    fmt::format("{}: unknown format '{}' (movielens-tab, filmtrust-space)", f, v));
              c.dataset.format = *format;
            }},
           {"trust", [](auto& c, const auto& v, const auto&) { c.dataset.trust = trim(v); }},
           {"normalize",
            [](auto& c, const auto& v, const auto& f) {
              const auto text = trim(v);
              if (text.empty() || text == "none") {
                c.dataset.normalize_lo.reset();
                c.dataset.normalize_hi.reset();
                return;
              }
              const auto comma = text.find(',');
              if (comma == std::string_view::npos)
                throw InvalidArgument(fmt::format("{}: expected 'lo,hi' or 'none'", f));
              c.dataset.normalize_lo = parse_number<double>(text.substr(0, comma), f);
              c.dataset.normalize_hi = parse_number<double>(text.substr(comma + 1), f);
            }},
       }},
      {"split",
       {
           {"test_ratio",
            [](auto& c, const auto& v, const auto& f) {
              c.split.test_ratio = parse_number<double>(v, f);
            }},
           {"seed",
            [](auto& c, const auto& v, const auto& f) {
              c.split.seed = parse_number<std::uint64_t>(v, f);
            }},
       }},
      {"similarity",
       {
           {"measure",
            [](auto& c, const auto& v, const auto& f) {
              const auto m = parse_measure(trim(v));
              if (!m)
                throw InvalidArgument(fmt::format(
                    "{}: unknown measure '{}' (cosine, jaccard, taj, uasim, uasimj, cbs)", f, v));
              c.similarity.measure = *m;
            }},
           {"uasim_w",
            [](auto& c, const auto& v, const auto& f) {
              c.similarity.uasim.w = parse_number<double>(v, f);
            }},
           {"uasim_beta",
            [](auto& c, const auto& v, const auto& f) {
              c.similarity.uasim.beta = parse_number<double>(v, f);
            }},
           {"cbs_dominant",
            [](auto& c, const auto& v, const auto& f) {
              const auto text = trim(v);
              if (text == "uasimj")
                c.similarity.cbs.dominant = CbsParams::Dominant::kUasimj;
              else if (text == "taj")
                c.similarity.cbs.dominant = CbsParams::Dominant::kTaj;
              else
                throw InvalidArgument(fmt::format("{}: expected 'uasimj' or 'taj'", f));
            }},
           {"cbs_a",
            [](auto& c, const auto& v, const auto& f) {
              c.similarity.cbs.a = parse_number<double>(v, f);
            }},
           {"cbs_th",
            [](auto& c, const auto& v, const auto& f) {
              c.similarity.cbs.th = parse_number<double>(v, f);
            }},
       }},
      {"neighbors",
       {
           {"strategy",
            [](auto& c, const auto& v, const auto& f) {
              const auto s = parse_strategy(trim(v));
              if (!s) throw InvalidArgument(fmt::format("{}: expected 'knn' or 'topsis'", f));
              c.neighbors.strategy = *s;
            }},
           {"k",
            [](auto& c, const auto& v, const auto& f) {
              c.neighbors.k = parse_number<std::size_t>(v, f);
            }},
           {"topsis_w_s",
            [](auto& c, const auto& v, const auto& f) {
              c.neighbors.topsis.w_s = parse_number<double>(v, f);
            }},
           {"topsis_w_u",
            [](auto& c, const auto& v, const auto& f) {
              c.neighbors.topsis.w_u = parse_number<double>(v, f);
            }},
           {"topsis_w_sbar",
            [](auto& c, const auto& v, const auto& f) {
              c.neighbors.topsis.w_sbar = parse_number<double>(v, f);
            }},
           {"topsis_w",
            [](auto& c, const auto& v, const auto& f) {
              c.neighbors.topsis.w = parse_number<double>(v, f);
            }},
       }},
      {"groups",
       {
           {"count",
            [](auto& c, const auto& v, const auto& f) { c.groups.count = parse_number<int>(v, f); }},
           {"min_size",
            [](auto& c, const auto& v, const auto& f) {
              c.groups.min_size = parse_number<int>(v, f);
            }},
           {"max_size",
            [](auto& c, const auto& v, const auto& f) {
              c.groups.max_size = parse_number<int>(v, f);
            }},
           {"seed",
            [](auto& c, const auto& v, const auto& f) {
              c.groups.seed = parse_number<std::uint64_t>(v, f);
            }},
       }},
      {"candidates",
       {
           {"n_filter",
            [](auto& c, const auto& v, const auto& f) {
              c.candidates.n_filter = parse_number<std::size_t>(v, f);
            }},
           {"n_borda",
            [](auto& c, const auto& v, const auto& f) {
              c.candidates.n_borda = parse_number<std::size_t>(v, f);
            }},
           {"n_top",
            [](auto& c, const auto& v, const auto& f) {
              c.candidates.n_top = parse_number<std::size_t>(v, f);
            }},
       }},
      {"evaluation",
       {
           {"n_top_sweep",
            [](auto& c, const auto& v, const auto& f) {
              c.evaluation.n_top_sweep = parse_list(v, f);
            }},
           {"baseline",
            [](auto& c, const auto& v, const auto& f) { c.evaluation.baseline = parse_bool(v, f); }},
       }},
  };
  return table;
}

}  // namespace

std::filesystem::path ExperimentConfig::ratings_path() const {
  return dataset.ratings.is_absolute() ? dataset.ratings : data_dir / dataset.ratings;
}

std::optional<std::filesystem::path> ExperimentConfig::trust_path() const {
  if (dataset.trust.empty()) return std::nullopt;
  return dataset.trust.is_absolute() ? dataset.trust : data_dir / dataset.trust;
}

void ExperimentConfig::validate() const {
  const auto fail = [](const std::string& what) { throw InvalidArgument(what); };
  if (dataset.name.empty()) fail("dataset.name: must not be empty");
  if (dataset.name.find(',') != std::string::npos) fail("dataset.name: must not contain ','");
  if (dataset.ratings.empty()) fail("dataset.ratings: must name a ratings file");
  if (dataset.normalize_lo.has_value() != dataset.normalize_hi.has_value())
    fail("dataset.normalize: needs both bounds");
  if (dataset.normalize_lo && !(*dataset.normalize_hi > *dataset.normalize_lo))
    fail("dataset.normalize: hi must exceed lo");
  if (!(split.test_ratio > 0.0 && split.test_ratio < 1.0))
    fail("split.test_ratio: must lie in (0, 1)");
  try {
    similarity.uasim.validate();
    similarity.cbs.validate();
    neighbors.topsis.validate();
    candidates.validate();
  } catch (const InvalidArgument& e) {
    fail(e.what());
  }
  if (neighbors.k < 1) fail("neighbors.k: must be >= 1");
  if (groups.count < 1) fail("groups.count: must be >= 1");
  if (groups.min_size < 1) fail("groups.min_size: must be >= 1");
  if (groups.max_size < groups.min_size) fail("groups.max_size: must be >= groups.min_size");
  if (static_cast<std::size_t>(groups.max_size) > FuzzyCapacity::kMaxMembers)
    fail(fmt::format("groups.max_size: must be <= {}", FuzzyCapacity::kMaxMembers));
  if (evaluation.n_top_sweep.empty()) fail("evaluation.n_top_sweep: must not be empty");
  for (const auto n : evaluation.n_top_sweep)
    if (n < 1) fail("evaluation.n_top_sweep: entries must be >= 1");

  if (!std::filesystem::is_regular_file(ratings_path()))
    throw IoError(fmt::format("dataset.ratings: {} not found (see tools/fetch_datasets.sh)",
                              ratings_path().string()));
  if (const auto trust = trust_path(); trust && !std::filesystem::is_regular_file(*trust))
    throw IoError(fmt::format("dataset.trust: {} not found", trust->string()));
}

std::vector<std::string_view> preset_names() { return {"movielens100k", "filmtrust"}; }

ExperimentConfig preset(std::string_view name) {
  ExperimentConfig c;
  if (name == "movielens100k") {
    c.dataset.name = "movielens100k";
    c.dataset.ratings = "ml-100k/u.data";
    c.dataset.format = RatingFormat::kMovieLensTab;
    c.similarity.measure = Measure::kCbs;
    c.similarity.cbs = CbsParams::uasimj_dominant();
    c.neighbors.strategy = NeighborStrategy::kTopsis;
    c.neighbors.k = 100;
    return c;
  }
  if (name == "filmtrust") {
    c.dataset.name = "filmtrust";
    c.dataset.ratings = "filmtrust/ratings.txt";
    c.dataset.format = RatingFormat::kFilmTrustSpace;
    c.dataset.trust = "filmtrust/trust.txt";
    c.dataset.normalize_lo = 1.0;
    c.dataset.normalize_hi = 5.0;
    c.similarity.measure = Measure::kCbs;
    c.similarity.cbs = CbsParams::taj_dominant();
    c.neighbors.strategy = NeighborStrategy::kKnn;
    c.neighbors.k = 50;
    return c;
  }
  throw InvalidArgument(fmt::format("preset: unknown preset '{}' (movielens100k, filmtrust)", name));
}

ExperimentConfig apply_config(ExperimentConfig base, std::istream& in, std::string_view source) {
  pt::ptree tree;
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError(std::string(source), e.line(), e.message());
  }
  const auto& table = key_table();
  for (const auto& [section, keys] : tree) {
    if (!keys.data().empty() && keys.empty())
      throw InvalidArgument(
          fmt::format("{}: key '{}' must be inside a [section]", source, section));
    const auto sec = std::find_if(table.begin(), table.end(),
                                  [&](const auto& entry) { return entry.first == section; });
    if (sec == table.end())
      throw InvalidArgument(fmt::format("{}: unknown section [{}]", source, section));
    for (const auto& [key, value] : keys) {
      const std::string field = section + "." + key;
      const auto setter =
          std::find_if(sec->second.begin(), sec->second.end(),
                       [&](const auto& entry) { return entry.first == key; });
      if (setter == sec->second.end())
        throw InvalidArgument(fmt::format("{}: unknown key '{}'", source, field));
      setter->second(base, value.data(), field);
    }
  }
  return base;
}

ExperimentConfig load_config(ExperimentConfig base, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open config {}", path.string()));
  return apply_config(std::move(base), in, path.string());
}

void write_config(std::ostream& out, const ExperimentConfig& c) {
  std::string normalize = "none";
  if (c.dataset.normalize_lo && c.dataset.normalize_hi)
    normalize = shortest(*c.dataset.normalize_lo) + "," + shortest(*c.dataset.normalize_hi);
  std::string sweep;
  for (const auto n : c.evaluation.n_top_sweep) sweep += (sweep.empty() ? "" : ",") + std::to_string(n);
  out << "[dataset]\n"
      << "name = " << c.dataset.name << '\n'
      << "data_dir = " << c.data_dir.string() << '\n'
      << "ratings = " << c.dataset.ratings.string() << '\n'
      << "format = " << to_string(c.dataset.format) << '\n'
      << "trust = " << c.dataset.trust.string() << '\n'
      << "normalize = " << normalize << "\n\n"
      << "[split]\n"
      << "test_ratio = " << shortest(c.split.test_ratio) << '\n'
      << "seed = " << c.split.seed << "\n\n"
      << "[similarity]\n"
      << "measure = " << to_string(c.similarity.measure) << '\n'
      << "uasim_w = " << shortest(c.similarity.uasim.w) << '\n'
      << "uasim_beta = " << shortest(c.similarity.uasim.beta) << '\n'
      << "cbs_dominant = "
      << (c.similarity.cbs.dominant == CbsParams::Dominant::kUasimj ? "uasimj" : "taj") << '\n'
      << "cbs_a = " << shortest(c.similarity.cbs.a) << '\n'
      << "cbs_th = " << shortest(c.similarity.cbs.th) << "\n\n"
      << "[neighbors]\n"
      << "strategy = " << to_string(c.neighbors.strategy) << '\n'
      << "k = " << c.neighbors.k << '\n'
      << "topsis_w_s = " << shortest(c.neighbors.topsis.w_s) << '\n'
      << "topsis_w_u = " << shortest(c.neighbors.topsis.w_u) << '\n'
      << "topsis_w_sbar = " << shortest(c.neighbors.topsis.w_sbar) << '\n'
      << "topsis_w = " << shortest(c.neighbors.topsis.w) << "\n\n"
      << "[groups]\n"
      << "count = " << c.groups.count << '\n'
      << "min_size = " << c.groups.min_size << '\n'
      << "max_size = " << c.groups.max_size << '\n'
      << "seed = " << c.groups.seed << "\n\n"
      << "[candidates]\n"
      << "n_filter = " << c.candidates.n_filter << '\n'
      << "n_borda = " << c.candidates.n_borda << '\n'
      << "n_top = " << c.candidates.n_top << "\n\n"
      << "[evaluation]\n"
      << "n_top_sweep = " << sweep << '\n'
      << "baseline = " << (c.evaluation.baseline ? "true" : "false") << '\n';
}

PreparedData prepare_data(const ExperimentConfig& config, const RunOptions& options) {
  PreparedData data;
  data.full = load_ratings(config.ratings_path(), config.dataset.format);
  log(options, fmt::format("loaded {}: {} users, {} items, {} ratings", config.dataset.name,
                           data.full.num_users(), data.full.num_items(), data.full.num_ratings()));
  if (config.dataset.normalize_lo)
    data.full = normalize_scale(data.full, *config.dataset.normalize_lo,
                                *config.dataset.normalize_hi);
  if (const auto trust = config.trust_path()) {
    data.trust = load_trust(*trust);
    log(options, fmt::format("trust: {} edges, {} self-loops dropped, {} clamped",
                             data.trust->edges.size(), data.trust->dropped_self_loops,
                             data.trust->clamped));
  }
  data.split = split_per_user(data.full, config.split.test_ratio, config.split.seed);
  log(options, fmt::format("split seed {}: {} train, {} test, {} repaired", config.split.seed,
                           data.split.train.num_ratings(), data.split.test.num_ratings(),
                           data.split.repaired));
  return data;
}

std::vector<AccuracyRow> predict_eval(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  const auto data = prepare_data(config, options);
  std::vector<AccuracyRow> rows;
  for (const auto measure :
       {Measure::kCosine, Measure::kTaj, Measure::kUasim, Measure::kUasimj, Measure::kCbs}) {
    SimilarityConfig sim = config.similarity;
    sim.measure = measure;
    const auto table = build_table(data.split.train, sim, options);
    for (const auto strategy : {NeighborStrategy::kKnn, NeighborStrategy::kTopsis}) {
      NeighborConfig neighbors = config.neighbors;
      neighbors.strategy = strategy;
      const auto pm =
          predict_cells(data.split.test, neighbors, table, data.split.train, options.threads);
      rows.push_back({config.dataset.name, measure, strategy, neighbors.k, config.split.seed,
                      mae_rmse(pm, data.split.test)});
      log(options, fmt::format("{}/{}: rmse {:.4f} mae {:.4f}", to_string(measure),
                               to_string(strategy), rows.back().result.rmse,
                               rows.back().result.mae));
    }
  }
  return rows;
}

void write_accuracy_rows(std::ostream& out, const std::vector<AccuracyRow>& rows) {
  out << kAccuracyHeader << '\n';
  for (const auto& r : rows) {
    out << fmt::format("{},{},{},{},{},{},{},{},{}\n", r.dataset, to_string(r.measure),
                       to_string(r.strategy), r.k, r.seed, r.result.evaluated, r.result.skipped,
                       format_value(r.result.mae), format_value(r.result.rmse));
  }
}

std::vector<MetricReport> group_eval(const ExperimentConfig& config, const RunOptions& options) {
  return run_group_pipeline(config, config.evaluation.baseline, options);
}

std::vector<MetricReport> novelty_eval(const ExperimentConfig& config, const RunOptions& options) {
  if (!config.trust_path())
    throw InvalidArgument(
        "dataset.trust: novelty-eval needs a trust graph; set dataset.trust to a "
        "'truster trustee trust' file (the filmtrust preset uses filmtrust/trust.txt)");
  return run_group_pipeline(config, false, options);
}

void write_metric_reports(std::ostream& out, const std::vector<MetricReport>& rows) {
  out << kMetricReportHeader << '\n';
  for (const auto& r : rows) out << to_csv(r) << '\n';
}

RecommendResult recommend_for(const ExperimentConfig& config,
                              const std::vector<ExternalId>& members, const RunOptions& options) {
  config.validate();
  if (members.empty()) throw InvalidArgument("members: the group needs at least one user");
  const auto data = prepare_data(config, options);
  RecommendResult result;
  std::set<UserIndex> unique;
  for (const ExternalId id : members) {
    const auto u = data.full.find_user(id);
    if (!u) throw InvalidArgument(fmt::format("members: user {} is not in the dataset", id));
    unique.insert(*u);
  }
  result.group.members.assign(unique.begin(), unique.end());
  if (result.group.members.size() > FuzzyCapacity::kMaxMembers)
    throw InvalidArgument(
        fmt::format("members: groups are limited to {} users", FuzzyCapacity::kMaxMembers));

  const auto table = build_table(data.split.train, config.similarity, options);
  const auto pm =
      predict_matrix(result.group, config.neighbors, table, data.split.train, options.threads);
  const FuzzyCapacity cap(result.group, data.split.train);
  result.recommendation = recommend(result.group, pm, config.candidates, cap);
  for (const ItemIndex i : result.recommendation.items)
    result.item_ids.push_back(data.full.item_id(i));
  result.observed = pm.count(Provenance::kObserved);
  result.predicted = pm.count(Provenance::kPredicted);
  result.missing = pm.count(Provenance::kMissing);
  return result;
}

void write_recommend_result(std::ostream& out, const RecommendResult& result) {
  const auto& rec = result.recommendation;
  out << "group_id,rank,item,choquet_score\n";
  for (std::size_t j = 0; j < rec.items.size(); ++j)
    out << rec.group_id << ',' << j + 1 << ',' << result.item_ids[j] << ','
        << shortest(rec.scores[j]) << '\n';
  out << fmt::format("# candidates={} observed={} predicted={} missing={}\n",
                     rec.candidates.size(), result.observed, result.predicted, result.missing);
}

void write_split(std::ostream& out, const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  const auto data = prepare_data(config, options);
  write_split_manifest(out, data.split);
}

}  // namespace cbsf
