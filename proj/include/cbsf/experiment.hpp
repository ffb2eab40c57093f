#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cbsf/dataset.hpp"
#include "cbsf/group.hpp"
#include "cbsf/metrics.hpp"
#include "cbsf/neighbors.hpp"
#include "cbsf/similarity.hpp"

namespace cbsf {

struct ExperimentConfig {
  struct Dataset {
    std::string name;
    std::filesystem::path ratings;  // relative paths resolve against data_dir
    RatingFormat format = RatingFormat::kMovieLensTab;
    std::filesystem::path trust;    // empty when the dataset has no trust graph
    std::optional<double> normalize_lo;
    std::optional<double> normalize_hi;
  };
  struct SplitParams {
    double test_ratio = 0.2;
    std::uint64_t seed = 1;
  };
  struct Groups {
    int count = 120;
    int min_size = 3;
    int max_size = 30;
    std::uint64_t seed = 1;
  };
  struct Evaluation {
    std::vector<std::size_t> n_top_sweep{5, 10, 15, 20, 25, 30, 35, 40};
    bool baseline = true;  // cosine similarity without Borda enrichment
  };

  std::filesystem::path data_dir = ".";
  Dataset dataset;
  SplitParams split;
  SimilarityConfig similarity;
  NeighborConfig neighbors;
  Groups groups;
  CandidateConfig candidates;
  Evaluation evaluation;

  std::filesystem::path ratings_path() const;
  std::optional<std::filesystem::path> trust_path() const;

  // Throws InvalidArgument naming the offending `section.key`.
  void validate() const;
};

// Named parameter sets: "movielens100k" and "filmtrust".
std::vector<std::string_view> preset_names();
ExperimentConfig preset(std::string_view name);

// Applies an INI document on top of `base`. Only keys present in the
// document change; unknown sections or keys are rejected.
ExperimentConfig apply_config(ExperimentConfig base, std::istream& in,
                              std::string_view source = "<config>");
ExperimentConfig load_config(ExperimentConfig base, const std::filesystem::path& path);
// The INI form of `config`; apply_config(x, write) reproduces it.
void write_config(std::ostream& out, const ExperimentConfig& config);

struct RunOptions {
  unsigned threads = 0;
  std::function<void(std::string_view)> log;  // progress lines, may be empty
};

// Ratings after optional normalization, trust graph if configured, split.
struct PreparedData {
  RatingMatrix full;
  std::optional<TrustGraph> trust;
  Split split;
};

PreparedData prepare_data(const ExperimentConfig& config, const RunOptions& options = {});

struct AccuracyRow {
  std::string dataset;
  Measure measure = Measure::kCosine;
  NeighborStrategy strategy = NeighborStrategy::kKnn;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  AccuracyResult result;
};

inline constexpr const char* kAccuracyHeader =
    "dataset,measure,strategy,k,seed,evaluated,skipped,mae,rmse";

// Prediction accuracy on the test half for every measure and strategy.
std::vector<AccuracyRow> predict_eval(const ExperimentConfig& config,
                                      const RunOptions& options = {});
void write_accuracy_rows(std::ostream& out, const std::vector<AccuracyRow>& rows);

// One report per n_top for the configured pipeline, averaged over all
// generated groups, followed by the cosine baseline rows (both strategies)
// when evaluation.baseline is set.
std::vector<MetricReport> group_eval(const ExperimentConfig& config,
                                     const RunOptions& options = {});

// Novelty, NTC and NTR per n_top for the configured pipeline. Requires a
// trust graph.
std::vector<MetricReport> novelty_eval(const ExperimentConfig& config,
                                       const RunOptions& options = {});

void write_metric_reports(std::ostream& out, const std::vector<MetricReport>& rows);

struct RecommendResult {
  GroupSpec group;
  GroupRecommendation recommendation;
  std::vector<ExternalId> item_ids;  // external ids of recommendation.items
  std::size_t observed = 0;
  std::size_t predicted = 0;
  std::size_t missing = 0;
};

// Runs the configured pipeline for one ad-hoc group of external user ids.
RecommendResult recommend_for(const ExperimentConfig& config,
                              const std::vector<ExternalId>& members,
                              const RunOptions& options = {});
// `group_id,rank,item,choquet_score` rows followed by a provenance summary
// line starting with '#'.
void write_recommend_result(std::ostream& out, const RecommendResult& result);

// The split manifest for the configured dataset and seed.
void write_split(std::ostream& out, const ExperimentConfig& config, const RunOptions& options = {});

}  // namespace cbsf
