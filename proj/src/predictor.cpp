#include "cbsf/predictor.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>

#include "cbsf/parallel.hpp"

namespace cbsf {

std::string_view to_string(Provenance provenance) {
  switch (provenance) {
    case Provenance::kObserved: return "observed";
    case Provenance::kPredicted: return "predicted";
    case Provenance::kMissing: return "missing";
  }
  return "unknown";
}

PredictionMatrix::PredictionMatrix(std::vector<UserIndex> users, std::size_t num_items)
    : users_(std::move(users)), num_items_(num_items) {
  std::sort(users_.begin(), users_.end());
  users_.erase(std::unique(users_.begin(), users_.end()), users_.end());
  values_.assign(users_.size() * num_items_, std::numeric_limits<double>::quiet_NaN());
  provenance_.assign(users_.size() * num_items_, Provenance::kMissing);
}

bool PredictionMatrix::contains(UserIndex u) const {
  return std::binary_search(users_.begin(), users_.end(), u);
}

std::size_t PredictionMatrix::row_of(UserIndex u) const {
  const auto it = std::lower_bound(users_.begin(), users_.end(), u);
  if (it == users_.end() || *it != u)
    throw InvalidArgument("prediction matrix does not cover user index " + std::to_string(u));
  return static_cast<std::size_t>(it - users_.begin());
}

std::optional<double> PredictionMatrix::value(UserIndex u, ItemIndex i) const {
  const std::size_t c = cell(row_of(u), i);
  if (provenance_[c] == Provenance::kMissing) return std::nullopt;
  return values_[c];
}

Provenance PredictionMatrix::provenance(UserIndex u, ItemIndex i) const {
  return provenance_[cell(row_of(u), i)];
}

void PredictionMatrix::set(std::size_t row, ItemIndex i, double value, Provenance provenance) {
  const std::size_t c = cell(row, i);
  values_[c] = provenance == Provenance::kMissing ? std::numeric_limits<double>::quiet_NaN() : value;
  provenance_[c] = provenance;
}

std::size_t PredictionMatrix::count(Provenance provenance) const {
  return static_cast<std::size_t>(std::count(provenance_.begin(), provenance_.end(), provenance));
}

void PredictionMatrix::write(std::ostream& out, const RatingMatrix& m) const {
  char buf[64];
  for (std::size_t row = 0; row < users_.size(); ++row) {
    for (ItemIndex i = 0; i < num_items_; ++i) {
      const std::size_t c = cell(row, i);
      out << m.user_id(users_[row]) << ',' << m.item_id(i) << ',';
      if (provenance_[c] != Provenance::kMissing) {
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), values_[c]);
        out << std::string_view(buf, ptr - buf);
      }
      out << ',' << to_string(provenance_[c]) << '\n';
    }
  }
}

std::optional<double> predict_rating(UserIndex u, ItemIndex i, std::span<const UserIndex> nbrs,
                                     const SimilarityTable& t, const RatingMatrix& train) {
  if (nbrs.empty() || std::isnan(train.mean(u))) return std::nullopt;
  // Summing in user order makes the result independent of how the
  // neighbor list was ranked.
  std::vector<UserIndex> ordered(nbrs.begin(), nbrs.end());
  std::sort(ordered.begin(), ordered.end());
  double numerator = 0.0;
  double weight = 0.0;
  for (const UserIndex v : ordered) {
    const auto r = train.rating(v, i);
    if (!r) continue;
    const double sim = t.score(u, v);
    numerator += sim * (*r - train.mean(v));
    weight += std::abs(sim);
  }
  if (weight == 0.0) return std::nullopt;
  return std::clamp(train.mean(u) + numerator / weight, train.r_min(), train.r_max());
}

PredictionMatrix predict_matrix(std::span<const UserIndex> users, const NeighborConfig& config,
                                const SimilarityTable& t, const RatingMatrix& train,
                                unsigned threads) {
  if (config.k == 0) throw InvalidArgument("predict_matrix: k must be >= 1");
  if (config.strategy == NeighborStrategy::kTopsis) config.topsis.validate();
  PredictionMatrix pm(std::vector<UserIndex>(users.begin(), users.end()), train.num_items());
  const auto covered = pm.users();
  parallel_for(covered.size(), threads, [&](std::size_t row) {
    const UserIndex u = covered[row];
    const auto keys = neighbor_keys(u, config, t);
    const auto observed = train.user_ratings(u);
    std::size_t next_observed = 0;
    for (ItemIndex i = 0; i < train.num_items(); ++i) {
      if (next_observed < observed.size() && observed[next_observed].item == i) {
        pm.set(row, i, observed[next_observed].rating, Provenance::kObserved);
        ++next_observed;
        continue;
      }
      const auto nbrs = select_neighbors_by_key(u, i, config.k, keys, train);
      const auto predicted = predict_rating(u, i, nbrs, t, train);
      if (predicted) pm.set(row, i, *predicted, Provenance::kPredicted);
    }
  });
  return pm;
}

PredictionMatrix predict_matrix(const GroupSpec& g, const NeighborConfig& config,
                                const SimilarityTable& t, const RatingMatrix& train,
                                unsigned threads) {
  return predict_matrix(g.members, config, t, train, threads);
}

PredictionMatrix predict_cells(const RatingMatrix& cells, const NeighborConfig& config,
                               const SimilarityTable& t, const RatingMatrix& train,
                               unsigned threads) {
  if (config.k == 0) throw InvalidArgument("predict_cells: k must be >= 1");
  if (config.strategy == NeighborStrategy::kTopsis) config.topsis.validate();
  std::vector<UserIndex> users;
  for (UserIndex u = 0; u < cells.num_users(); ++u)
    if (!cells.user_ratings(u).empty()) users.push_back(u);
  PredictionMatrix pm(std::move(users), train.num_items());
  const auto covered = pm.users();
  parallel_for(covered.size(), threads, [&](std::size_t row) {
    const UserIndex u = covered[row];
    const auto keys = neighbor_keys(u, config, t);
    for (const auto& cell : cells.user_ratings(u)) {
      const auto nbrs = select_neighbors_by_key(u, cell.item, config.k, keys, train);
      if (const auto predicted = predict_rating(u, cell.item, nbrs, t, train))
        pm.set(row, cell.item, *predicted, Provenance::kPredicted);
    }
  });
  return pm;
}

}  // namespace cbsf
