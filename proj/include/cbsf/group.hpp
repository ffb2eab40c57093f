#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "cbsf/dataset.hpp"
#include "cbsf/predictor.hpp"

namespace cbsf {

struct CandidateConfig {
  std::size_t n_filter = 40;  // per-member top list length
  std::size_t n_borda = 50;   // Borda enrichment; 0 disables it
  std::size_t n_top = 40;     // final list length

  void validate() const;
};

// Bit j refers to the j-th member of the group the capacity was built for.
using MemberMask = std::uint64_t;

// Fuzzy capacity over subsets of a group.
//
// Each member u carries a global weight |I_u| / |I| and a bias
// (#ratings above u's median - #ratings below it) / |I_u|, both from the
// training matrix. For a set of active members G' (the whole group, or the
// members that have a rating for the item being aggregated) the weights are
// renormalized over G', and
//
//   raw(A)  = sum_{u in A} (weight_{u,G'} + bias_u)
//   C(A)    = max over A' subset of A of clamp(raw(A'), 0, 1)
//   C({})   = 0,  C(G') = 1
//
// Because raw is additive, the monotone envelope reduces to
// min(1, sum of the positive per-member terms), which is what operator()
// evaluates.
class FuzzyCapacity {
 public:
  static constexpr std::size_t kMaxMembers = 64;

  FuzzyCapacity() = default;
  FuzzyCapacity(const GroupSpec& g, const RatingMatrix& train);

  std::span<const UserIndex> members() const { return members_; }
  MemberMask full_mask() const;

  double global_weight(std::size_t pos) const { return weight_[pos]; }
  double bias(std::size_t pos) const { return bias_[pos]; }

  // Weight of member `pos` renormalized over `active`.
  double normalized_weight(std::size_t pos, MemberMask active) const;

  // Unclamped additive value; the building block of the capacity.
  double raw(MemberMask subset, MemberMask active) const;

  // C(subset; active). `subset` must be contained in `active`.
  double operator()(MemberMask subset, MemberMask active) const;
  double operator()(MemberMask subset) const { return (*this)(subset, full_mask()); }

 private:
  double active_weight(MemberMask active) const;
  double normalized_weight(std::size_t pos, MemberMask active, double active_total) const;

  std::vector<UserIndex> members_;
  std::vector<double> weight_;
  std::vector<double> bias_;
};

// C(A; g) for a member subset given by user indices.
double capacity(std::span<const UserIndex> subset, const GroupSpec& g, const RatingMatrix& train);

struct GroupRecommendation {
  int group_id = 0;
  std::vector<ItemIndex> candidates;       // ascending
  std::vector<double> candidate_scores;    // Choquet score per candidate, NaN if unscorable
  std::vector<ItemIndex> items;            // final list, best first
  std::vector<double> scores;              // matching `items`
};

// The n items with the largest effective rating for u; ties by item index.
std::vector<ItemIndex> top_n_items(UserIndex u, std::size_t n, const PredictionMatrix& pm);

// Borda count over all items of pm. Each member ranks every item (missing
// effective ratings last, ties by item index) and item i earns
// n - rank + 1 from that member.
std::vector<std::int64_t> borda_scores(const GroupSpec& g, const PredictionMatrix& pm);

// Union of the members' top-n_filter lists with the n_borda best Borda items.
std::vector<ItemIndex> extended_candidates(const GroupSpec& g, const PredictionMatrix& pm,
                                           const CandidateConfig& cfg);

// Choquet integral of the members' effective ratings for item i. Members
// without a rating are dropped and the capacity is evaluated on the rest.
std::optional<double> choquet(ItemIndex i, const PredictionMatrix& pm, const FuzzyCapacity& cap);

GroupRecommendation recommend(const GroupSpec& g, const PredictionMatrix& pm,
                              const CandidateConfig& cfg, const FuzzyCapacity& cap);

// `group_id,rank,item,choquet_score`, rank starting at 1, external item ids.
void write_recommendation(std::ostream& out, const GroupRecommendation& rec,
                          const RatingMatrix& m);

}  // namespace cbsf
