#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cbsf/dataset.hpp"
#include "cbsf/neighbors.hpp"
#include "cbsf/similarity.hpp"

namespace cbsf {

enum class Provenance : std::uint8_t { kObserved, kPredicted, kMissing };

std::string_view to_string(Provenance provenance);

// Dense (user x item) table of effective ratings for a set of users: the
// training rating where one exists, otherwise the CF prediction, otherwise
// missing.
class PredictionMatrix {
 public:
  PredictionMatrix() = default;
  // `users` is sorted and deduplicated; every cell starts out missing.
  PredictionMatrix(std::vector<UserIndex> users, std::size_t num_items);

  std::span<const UserIndex> users() const { return users_; }
  std::size_t num_items() const { return num_items_; }

  bool contains(UserIndex u) const;
  // Throws InvalidArgument if u is not covered.
  std::size_t row_of(UserIndex u) const;

  std::optional<double> value(UserIndex u, ItemIndex i) const;
  Provenance provenance(UserIndex u, ItemIndex i) const;

  void set(std::size_t row, ItemIndex i, double value, Provenance provenance);

  // Counts over all cells.
  std::size_t count(Provenance provenance) const;

  // `user,item,value,provenance`; missing cells have an empty value.
  void write(std::ostream& out, const RatingMatrix& m) const;

 private:
  std::size_t cell(std::size_t row, ItemIndex i) const { return row * num_items_ + i; }

  std::vector<UserIndex> users_;
  std::size_t num_items_ = 0;
  std::vector<double> values_;
  std::vector<Provenance> provenance_;
};

// Mean-centered neighborhood prediction for (u, i), clamped to the training
// scale. nullopt when there are no neighbors or all their weights are zero.
std::optional<double> predict_rating(UserIndex u, ItemIndex i, std::span<const UserIndex> nbrs,
                                     const SimilarityTable& t, const RatingMatrix& train);

// Fills the effective-rating table for `users` over every item of `train`.
PredictionMatrix predict_matrix(std::span<const UserIndex> users, const NeighborConfig& config,
                                const SimilarityTable& t, const RatingMatrix& train,
                                unsigned threads = 0);
PredictionMatrix predict_matrix(const GroupSpec& g, const NeighborConfig& config,
                                const SimilarityTable& t, const RatingMatrix& train,
                                unsigned threads = 0);

// Predicts only the cells present in `cells` (typically the test half of a
// split), leaving every other cell missing. Rows cover the users of `cells`
// that have at least one cell.
PredictionMatrix predict_cells(const RatingMatrix& cells, const NeighborConfig& config,
                               const SimilarityTable& t, const RatingMatrix& train,
                               unsigned threads = 0);

inline std::optional<double> effective_rating(UserIndex u, ItemIndex i,
                                              const PredictionMatrix& pm) {
  return pm.value(u, i);
}

}  // namespace cbsf
