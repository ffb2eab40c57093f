#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cbsf/dataset.hpp"
#include "cbsf/group.hpp"
#include "cbsf/predictor.hpp"
#include "cbsf/similarity.hpp"

namespace cbsf {

struct AccuracyResult {
  double mae = 0.0;
  double rmse = 0.0;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;  // test cells without a prediction
};

// Error over the cells of `test` whose user is covered by pm. Cells with a
// missing prediction are skipped and counted.
AccuracyResult mae_rmse(const PredictionMatrix& pm, const RatingMatrix& test);

// Mean over items of the members' mean effective rating. Missing cells are
// left out of the member mean; items with no rating at all are left out.
double group_pref(const GroupSpec& g, std::span<const ItemIndex> items, const PredictionMatrix& pm);

// |Choquet score - members' mean effective rating| per item, aggregated as
// a mean (MAE-G) or root mean square (RMSE-G).
double mae_g(const GroupSpec& g, std::span<const ItemIndex> items, const PredictionMatrix& pm,
             const FuzzyCapacity& cap);
double rmse_g(const GroupSpec& g, std::span<const ItemIndex> items, const PredictionMatrix& pm,
              const FuzzyCapacity& cap);

// Per-member satisfaction: mean effective rating over `items`. Members
// without any rating on the list are omitted.
std::vector<double> member_satisfaction(const GroupSpec& g, std::span<const ItemIndex> items,
                                        const PredictionMatrix& pm);

double jain_index(std::span<const double> satisfaction);
double one_minus_variance(std::span<const double> satisfaction);

double fairness_jain(const GroupSpec& g, std::span<const ItemIndex> items,
                     const PredictionMatrix& pm);
double fairness_var(const GroupSpec& g, std::span<const ItemIndex> items,
                    const PredictionMatrix& pm);

// Popularity novelty: mean of -log2(|U_i| / |U|) / log2(|U|).
double novelty(std::span<const ItemIndex> items, const RatingMatrix& m);

// Users of `m` that are the target of at least one trust edge whose source
// is also a user of `m`; indexed by UserIndex.
std::vector<bool> trusted_users(const RatingMatrix& m, const TrustGraph& tg);

// Novelty over trusted raters only. Counts are floored at 1.
double ntc(std::span<const ItemIndex> items, const RatingMatrix& m, const TrustGraph& tg);

// 1 - mean over items of the sum, over trust edges whose endpoints both rated
// the item, of trust * similarity. Not clamped, can fall below 0.
double ntr(std::span<const ItemIndex> items, const RatingMatrix& m, const TrustGraph& tg,
           const SimilarityTable& t);

struct MetricReport {
  std::string dataset;
  std::string method;
  std::string strategy;
  std::size_t n_top = 0;
  double satisfaction = 0.0;
  double rmse_g = 0.0;
  double mae_g = 0.0;
  double fairness1 = 0.0;
  double fairness2 = 0.0;
  double novelty = 0.0;
  double ntc = 0.0;  // NaN when no trust graph is available
  double ntr = 0.0;  // NaN when no trust graph is available
  std::size_t skipped = 0;
};

inline constexpr const char* kMetricReportHeader =
    "dataset,method,strategy,n_top,satisfaction,rmse_g,mae_g,fairness1,fairness2,novelty,ntc,"
    "ntr,skipped";

// One CSV line without the trailing newline; NaN values are written empty.
std::string to_csv(const MetricReport& report);
MetricReport parse_metric_report(const std::string& line);

// Formats a value with the shortest round-trip representation, or "" for NaN.
std::string format_value(double value);

}  // namespace cbsf
