#include "cbsf/group.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include <fmt/format.h>

namespace cbsf {
namespace {

constexpr MemberMask bit(std::size_t pos) { return MemberMask{1} << pos; }

struct Scored {
  double value;
  ItemIndex item;
};

bool higher_first(const Scored& a, const Scored& b) {
  if (a.value != b.value) return a.value > b.value;
  return a.item < b.item;
}

}  // namespace

void CandidateConfig::validate() const {
  if (n_filter < 1) throw InvalidArgument("candidates: n_filter must be >= 1");
  if (n_top < 1) throw InvalidArgument("candidates: n_top must be >= 1");
}

FuzzyCapacity::FuzzyCapacity(const GroupSpec& g, const RatingMatrix& train)
    : members_(g.members) {
  if (members_.empty()) throw InvalidArgument("capacity: empty group");
  if (members_.size() > kMaxMembers)
    throw InvalidArgument(fmt::format("capacity: groups are limited to {} members", kMaxMembers));
  const double n_items = static_cast<double>(train.num_items());
  for (const UserIndex u : members_) {
    const auto row = train.user_ratings(u);
    if (row.empty() || n_items == 0) {
      weight_.push_back(0.0);
      bias_.push_back(0.0);
      continue;
    }
    const double median = train.median(u);
    std::ptrdiff_t above = 0, below = 0;
    for (const auto& e : row) {
      if (e.rating > median) ++above;
      if (e.rating < median) ++below;
    }
    weight_.push_back(row.size() / n_items);
    bias_.push_back(static_cast<double>(above - below) / row.size());
  }
}

MemberMask FuzzyCapacity::full_mask() const {
  return members_.size() == kMaxMembers ? ~MemberMask{0} : bit(members_.size()) - 1;
}

double FuzzyCapacity::active_weight(MemberMask active) const {
  double total = 0.0;
  for (std::size_t j = 0; j < members_.size(); ++j)
    if (active & bit(j)) total += weight_[j];
  return total;
}

double FuzzyCapacity::normalized_weight(std::size_t pos, MemberMask active) const {
  return normalized_weight(pos, active, active_weight(active));
}

double FuzzyCapacity::normalized_weight(std::size_t pos, MemberMask active,
                                        double active_total) const {
  if (active_total == 0.0) return 1.0 / std::popcount(active);
  return weight_[pos] / active_total;
}

double FuzzyCapacity::raw(MemberMask subset, MemberMask active) const {
  const double total = active_weight(active);
  double value = 0.0;
  for (std::size_t j = 0; j < members_.size(); ++j)
    if (subset & bit(j)) value += normalized_weight(j, active, total) + bias_[j];
  return value;
}

double FuzzyCapacity::operator()(MemberMask subset, MemberMask active) const {
  if (subset == 0) return 0.0;
  if (subset == active) return 1.0;
  const double total = active_weight(active);
  double value = 0.0;
  for (std::size_t j = 0; j < members_.size(); ++j)
    if (subset & bit(j)) value += std::max(normalized_weight(j, active, total) + bias_[j], 0.0);
  return std::min(value, 1.0);
}

double capacity(std::span<const UserIndex> subset, const GroupSpec& g, const RatingMatrix& train) {
  const FuzzyCapacity cap(g, train);
  MemberMask mask = 0;
  for (const UserIndex u : subset) {
    const auto it = std::find(g.members.begin(), g.members.end(), u);
    if (it == g.members.end()) throw InvalidArgument("capacity: subset is not contained in group");
    mask |= bit(static_cast<std::size_t>(it - g.members.begin()));
  }
  return cap(mask);
}

std::vector<ItemIndex> top_n_items(UserIndex u, std::size_t n, const PredictionMatrix& pm) {
  std::vector<Scored> scored;
  for (ItemIndex i = 0; i < pm.num_items(); ++i)
    if (const auto r = pm.value(u, i)) scored.push_back({*r, i});
  const std::size_t keep = std::min(n, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + keep, scored.end(), higher_first);
  std::vector<ItemIndex> out;
  out.reserve(keep);
  for (std::size_t j = 0; j < keep; ++j) out.push_back(scored[j].item);
  return out;
}

std::vector<std::int64_t> borda_scores(const GroupSpec& g, const PredictionMatrix& pm) {
  const std::size_t n = pm.num_items();
  std::vector<std::int64_t> scores(n, 0);
  std::vector<ItemIndex> order(n);
  std::vector<double> value(n);
  for (const UserIndex u : g.members) {
    for (ItemIndex i = 0; i < n; ++i) value[i] = pm.value(u, i).value_or(std::nan(""));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](ItemIndex a, ItemIndex b) {
      const bool missing_a = std::isnan(value[a]);
      const bool missing_b = std::isnan(value[b]);
      if (missing_a != missing_b) return missing_b;
      if (!missing_a && value[a] != value[b]) return value[a] > value[b];
      return a < b;
    });
    for (std::size_t rank = 1; rank <= n; ++rank)
      scores[order[rank - 1]] += static_cast<std::int64_t>(n - rank + 1);
  }
  return scores;
}

std::vector<ItemIndex> extended_candidates(const GroupSpec& g, const PredictionMatrix& pm,
                                           const CandidateConfig& cfg) {
  std::vector<ItemIndex> out;
  for (const UserIndex u : g.members) {
    const auto top = top_n_items(u, cfg.n_filter, pm);
    out.insert(out.end(), top.begin(), top.end());
  }
  if (cfg.n_borda > 0) {
    const auto bc = borda_scores(g, pm);
    std::vector<Scored> ranked;
    ranked.reserve(bc.size());
    for (ItemIndex i = 0; i < bc.size(); ++i) ranked.push_back({static_cast<double>(bc[i]), i});
    const std::size_t keep = std::min(cfg.n_borda, ranked.size());
    std::partial_sort(ranked.begin(), ranked.begin() + keep, ranked.end(), higher_first);
    for (std::size_t j = 0; j < keep; ++j) out.push_back(ranked[j].item);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::optional<double> choquet(ItemIndex i, const PredictionMatrix& pm, const FuzzyCapacity& cap) {
  struct MemberValue {
    double value;
    std::size_t pos;
  };
  const auto members = cap.members();
  std::vector<MemberValue> values;
  values.reserve(members.size());
  MemberMask active = 0;
  for (std::size_t pos = 0; pos < members.size(); ++pos) {
    if (const auto r = pm.value(members[pos], i)) {
      values.push_back({*r, pos});
      active |= bit(pos);
    }
  }
  if (values.empty()) return std::nullopt;
  std::sort(values.begin(), values.end(), [](const MemberValue& a, const MemberValue& b) {
    if (a.value != b.value) return a.value < b.value;
    return a.pos < b.pos;
  });
  double result = values[0].value;
  MemberMask tail = active;
  for (std::size_t k = 1; k < values.size(); ++k) {
    tail &= ~bit(values[k - 1].pos);
    result += (values[k].value - values[k - 1].value) * cap(tail, active);
  }
  return result;
}

GroupRecommendation recommend(const GroupSpec& g, const PredictionMatrix& pm,
                              const CandidateConfig& cfg, const FuzzyCapacity& cap) {
  cfg.validate();
  GroupRecommendation rec;
  rec.group_id = g.id;
  rec.candidates = extended_candidates(g, pm, cfg);
  std::vector<Scored> scored;
  for (const ItemIndex i : rec.candidates) {
    const auto s = choquet(i, pm, cap);
    rec.candidate_scores.push_back(s.value_or(std::numeric_limits<double>::quiet_NaN()));
    if (s) scored.push_back({*s, i});
  }
  const std::size_t keep = std::min(cfg.n_top, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + keep, scored.end(), higher_first);
  for (std::size_t j = 0; j < keep; ++j) {
    rec.items.push_back(scored[j].item);
    rec.scores.push_back(scored[j].value);
  }
  return rec;
}

void write_recommendation(std::ostream& out, const GroupRecommendation& rec,
                          const RatingMatrix& m) {
  char buf[64];
  for (std::size_t j = 0; j < rec.items.size(); ++j) {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), rec.scores[j]);
    out << rec.group_id << ',' << j + 1 << ',' << m.item_id(rec.items[j]) << ','
        << std::string_view(buf, ptr - buf) << '\n';
  }
}

}  // namespace cbsf
