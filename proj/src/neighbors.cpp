#include "cbsf/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace cbsf {
namespace {

struct Keyed {
  double key;
  UserIndex user;
};

// Descending key, then ascending user.
std::vector<UserIndex> top_k(std::vector<Keyed> candidates, std::size_t k) {
  const auto better = [](const Keyed& a, const Keyed& b) {
    if (a.key != b.key) return a.key > b.key;
    return a.user < b.user;
  };
  const std::size_t keep = std::min(k, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + keep, candidates.end(), better);
  std::vector<UserIndex> out;
  out.reserve(keep);
  for (std::size_t j = 0; j < keep; ++j) out.push_back(candidates[j].user);
  return out;
}

template <class KeyFn>
std::vector<UserIndex> select(UserIndex u, ItemIndex i, std::size_t k, const RatingMatrix& train,
                              KeyFn&& key) {
  if (k == 0) throw InvalidArgument("neighbor selection: k must be >= 1");
  std::vector<Keyed> candidates;
  const auto raters = train.item_ratings(i);
  candidates.reserve(raters.size());
  for (const auto& r : raters)
    if (r.user != u) candidates.push_back({key(r.user), r.user});
  return top_k(std::move(candidates), k);
}

}  // namespace

void TopsisParams::validate() const {
  if (!(w_s > 0.0 && w_u > 0.0 && w_sbar > 0.0))
    throw InvalidArgument("topsis: criterion weights must be > 0");
  if (std::abs(w_s + w_u + w_sbar - 1.0) > 1e-9)
    throw InvalidArgument("topsis: criterion weights must sum to 1");
  if (!(w > 0.0)) throw InvalidArgument("topsis: w must be > 0");
}

std::optional<NeighborStrategy> parse_strategy(std::string_view name) {
  if (name == "knn") return NeighborStrategy::kKnn;
  if (name == "topsis") return NeighborStrategy::kTopsis;
  return std::nullopt;
}

std::string_view to_string(NeighborStrategy strategy) {
  return strategy == NeighborStrategy::kKnn ? "knn" : "topsis";
}

double topsis_closeness(double s, std::uint32_t co_count, const TopsisParams& p) {
  s = std::clamp(s, 0.0, 1.0);
  const double uncertainty = p.w / (p.w + co_count);
  const double dissimilarity = std::max(1.0 - s - uncertainty, 0.0);
  const auto sq = [](double x) { return x * x; };
  const double to_ideal = std::sqrt(p.w_s * sq(s - 1.0) + p.w_u * sq(uncertainty) +
                                    p.w_sbar * sq(dissimilarity));
  const double to_anti = std::sqrt(p.w_s * sq(s) + p.w_u * sq(uncertainty - 1.0) +
                                   p.w_sbar * sq(dissimilarity - 1.0));
  const double total = to_ideal + to_anti;
  if (total == 0.0) return 0.5;
  return to_anti / total;
}

double topsis_closeness(UserIndex u, UserIndex v, const SimilarityTable& t,
                        const TopsisParams& p) {
  const auto& e = t.at(u, v);
  return topsis_closeness(e.score, e.co_count, p);
}

std::vector<UserIndex> knn_neighbors(UserIndex u, ItemIndex i, std::size_t k,
                                     const SimilarityTable& t, const RatingMatrix& train) {
  return select(u, i, k, train, [&](UserIndex v) { return t.score(u, v); });
}

std::vector<UserIndex> topsis_neighbors(UserIndex u, ItemIndex i, std::size_t k,
                                        const SimilarityTable& t, const RatingMatrix& train,
                                        const TopsisParams& p) {
  return select(u, i, k, train, [&](UserIndex v) { return topsis_closeness(u, v, t, p); });
}

std::vector<UserIndex> select_neighbors(UserIndex u, ItemIndex i, const NeighborConfig& config,
                                        const SimilarityTable& t, const RatingMatrix& train) {
  if (config.strategy == NeighborStrategy::kKnn) return knn_neighbors(u, i, config.k, t, train);
  return topsis_neighbors(u, i, config.k, t, train, config.topsis);
}

std::vector<double> neighbor_keys(UserIndex u, const NeighborConfig& config,
                                  const SimilarityTable& t) {
  std::vector<double> keys(t.num_users(), 0.0);
  for (UserIndex v = 0; v < t.num_users(); ++v) {
    if (v == u) continue;
    keys[v] = config.strategy == NeighborStrategy::kKnn ? t.score(u, v)
                                                          : topsis_closeness(u, v, t, config.topsis);
  }
  return keys;
}

std::vector<UserIndex> select_neighbors_by_key(UserIndex u, ItemIndex i, std::size_t k,
                                               const std::vector<double>& keys,
                                               const RatingMatrix& train) {
  return select(u, i, k, train, [&](UserIndex v) { return keys[v]; });
}

}  // namespace cbsf
