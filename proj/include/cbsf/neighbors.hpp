#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "cbsf/dataset.hpp"
#include "cbsf/similarity.hpp"

namespace cbsf {

// Criterion weights for TOPSIS closeness over (similarity S, uncertainty U,
// dissimilarity S-bar), plus the evidence prior `w` used for U.
struct TopsisParams {
  double w_s = 1.0 / 3.0;
  double w_u = 1.0 / 3.0;
  double w_sbar = 1.0 / 3.0;
  double w = 2.0;

  void validate() const;
};

enum class NeighborStrategy { kKnn, kTopsis };

std::optional<NeighborStrategy> parse_strategy(std::string_view name);
std::string_view to_string(NeighborStrategy strategy);

// Closeness of a pair with similarity `s` and `co_count` co-rated items.
// S is clamped to [0, 1] first; returns 0.5 if both distances vanish.
double topsis_closeness(double s, std::uint32_t co_count, const TopsisParams& p);
double topsis_closeness(UserIndex u, UserIndex v, const SimilarityTable& t,
                        const TopsisParams& p);

// Up to k raters of item i in `train` other than u, best first. Ties go to
// the smaller user index.
std::vector<UserIndex> knn_neighbors(UserIndex u, ItemIndex i, std::size_t k,
                                     const SimilarityTable& t, const RatingMatrix& train);
std::vector<UserIndex> topsis_neighbors(UserIndex u, ItemIndex i, std::size_t k,
                                        const SimilarityTable& t, const RatingMatrix& train,
                                        const TopsisParams& p);

struct NeighborConfig {
  NeighborStrategy strategy = NeighborStrategy::kTopsis;
  std::size_t k = 100;
  TopsisParams topsis;
};

std::vector<UserIndex> select_neighbors(UserIndex u, ItemIndex i, const NeighborConfig& config,
                                        const SimilarityTable& t, const RatingMatrix& train);

// Selection key of every v against u under `config` (raw score for KNN,
// closeness for TOPSIS); entry u is unused. Lets a caller that predicts a
// whole row for u rank candidates without recomputing closeness per item.
std::vector<double> neighbor_keys(UserIndex u, const NeighborConfig& config,
                                  const SimilarityTable& t);

// Same selection as select_neighbors, reading keys from neighbor_keys(u, ...).
std::vector<UserIndex> select_neighbors_by_key(UserIndex u, ItemIndex i, std::size_t k,
                                               const std::vector<double>& keys,
                                               const RatingMatrix& train);

}  // namespace cbsf
