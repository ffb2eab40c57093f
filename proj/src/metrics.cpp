#include "cbsf/metrics.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include <fmt/format.h>

namespace cbsf {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Mean of the members' effective ratings for item i; NaN if none has one.
double member_mean(const GroupSpec& g, ItemIndex i, const PredictionMatrix& pm) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const UserIndex u : g.members) {
    if (const auto r = pm.value(u, i)) {
      sum += *r;
      ++n;
    }
  }
  return n ? sum / n : kNaN;
}

std::vector<double> group_deviations(const GroupSpec& g, std::span<const ItemIndex> items,
                                     const PredictionMatrix& pm, const FuzzyCapacity& cap) {
  std::vector<double> out;
  for (const ItemIndex i : items) {
    const auto score = choquet(i, pm, cap);
    if (!score) continue;
    out.push_back(*score - member_mean(g, i, pm));
  }
  return out;
}

double log_novelty(double count, double n_users) {
  return -std::log2(std::max(count, 1.0) / n_users) / std::log2(n_users);
}

}  // namespace

AccuracyResult mae_rmse(const PredictionMatrix& pm, const RatingMatrix& test) {
  AccuracyResult result;
  double abs_sum = 0.0;
  double sq_sum = 0.0;
  for (const UserIndex u : pm.users()) {
    for (const auto& cell : test.user_ratings(u)) {
      const auto predicted = pm.value(u, cell.item);
      if (!predicted || pm.provenance(u, cell.item) != Provenance::kPredicted) {
        ++result.skipped;
        continue;
      }
      const double err = *predicted - cell.rating;
      abs_sum += std::abs(err);
      sq_sum += err * err;
      ++result.evaluated;
    }
  }
  if (result.evaluated == 0) return {kNaN, kNaN, 0, result.skipped};
  result.mae = abs_sum / result.evaluated;
  result.rmse = std::sqrt(sq_sum / result.evaluated);
  return result;
}

double group_pref(const GroupSpec& g, std::span<const ItemIndex> items,
                  const PredictionMatrix& pm) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const ItemIndex i : items) {
    const double mean = member_mean(g, i, pm);
    if (std::isnan(mean)) continue;
    sum += mean;
    ++n;
  }
  return n ? sum / n : kNaN;
}

double mae_g(const GroupSpec& g, std::span<const ItemIndex> items, const PredictionMatrix& pm,
             const FuzzyCapacity& cap) {
  const auto dev = group_deviations(g, items, pm, cap);
  if (dev.empty()) return kNaN;
  double sum = 0.0;
  for (const double d : dev) sum += std::abs(d);
  return sum / dev.size();
}

double rmse_g(const GroupSpec& g, std::span<const ItemIndex> items, const PredictionMatrix& pm,
              const FuzzyCapacity& cap) {
  const auto dev = group_deviations(g, items, pm, cap);
  if (dev.empty()) return kNaN;
  double sum = 0.0;
  for (const double d : dev) sum += d * d;
  return std::sqrt(sum / dev.size());
}

std::vector<double> member_satisfaction(const GroupSpec& g, std::span<const ItemIndex> items,
                                        const PredictionMatrix& pm) {
  std::vector<double> out;
  for (const UserIndex u : g.members) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const ItemIndex i : items) {
      if (const auto r = pm.value(u, i)) {
        sum += *r;
        ++n;
      }
    }
    if (n) out.push_back(sum / n);
  }
  return out;
}

double jain_index(std::span<const double> s) {
  if (s.empty()) return kNaN;
  double sum = 0.0, sq = 0.0;
  for (const double x : s) {
    sum += x;
    sq += x * x;
  }
  if (sq == 0.0) return 1.0;
  return sum * sum / (s.size() * sq);
}

double one_minus_variance(std::span<const double> s) {
  if (s.empty()) return kNaN;
  double mean = 0.0;
  for (const double x : s) mean += x;
  mean /= s.size();
  double var = 0.0;
  for (const double x : s) var += (x - mean) * (x - mean);
  return 1.0 - var / s.size();
}

double fairness_jain(const GroupSpec& g, std::span<const ItemIndex> items,
                     const PredictionMatrix& pm) {
  return jain_index(member_satisfaction(g, items, pm));
}

double fairness_var(const GroupSpec& g, std::span<const ItemIndex> items,
                    const PredictionMatrix& pm) {
  return one_minus_variance(member_satisfaction(g, items, pm));
}

double novelty(std::span<const ItemIndex> items, const RatingMatrix& m) {
  if (items.empty() || m.num_users() < 2) return kNaN;
  const double n_users = static_cast<double>(m.num_users());
  double sum = 0.0;
  for (const ItemIndex i : items) sum += log_novelty(m.item_ratings(i).size(), n_users);
  return sum / items.size();
}

std::vector<bool> trusted_users(const RatingMatrix& m, const TrustGraph& tg) {
  std::vector<bool> trusted(m.num_users(), false);
  for (const auto& e : tg.edges) {
    const auto source = m.find_user(e.truster);
    const auto target = m.find_user(e.trustee);
    if (source && target) trusted[*target] = true;
  }
  return trusted;
}

double ntc(std::span<const ItemIndex> items, const RatingMatrix& m, const TrustGraph& tg) {
  if (items.empty() || m.num_users() < 2) return kNaN;
  const auto trusted = trusted_users(m, tg);
  const double n_users = static_cast<double>(m.num_users());
  double sum = 0.0;
  for (const ItemIndex i : items) {
    std::size_t count = 0;
    for (const auto& r : m.item_ratings(i))
      if (trusted[r.user]) ++count;
    sum += log_novelty(count, n_users);
  }
  return sum / items.size();
}

double ntr(std::span<const ItemIndex> items, const RatingMatrix& m, const TrustGraph& tg,
           const SimilarityTable& t) {
  if (items.empty()) return kNaN;
  struct Edge {
    UserIndex u, v;
    double trust;
  };
  std::vector<Edge> edges;
  for (const auto& e : tg.edges) {
    const auto u = m.find_user(e.truster);
    const auto v = m.find_user(e.trustee);
    if (u && v) edges.push_back({*u, *v, e.trust});
  }
  double sum = 0.0;
  for (const ItemIndex i : items) {
    for (const auto& e : edges)
      if (m.has_rating(e.u, i) && m.has_rating(e.v, i)) sum += e.trust * t.score(e.u, e.v);
  }
  return 1.0 - sum / items.size();
}

std::string format_value(double value) {
  if (std::isnan(value)) return {};
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

std::string to_csv(const MetricReport& r) {
  return fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}", r.dataset, r.method, r.strategy,
                     r.n_top, format_value(r.satisfaction), format_value(r.rmse_g),
                     format_value(r.mae_g), format_value(r.fairness1), format_value(r.fairness2),
                     format_value(r.novelty), format_value(r.ntc), format_value(r.ntr), r.skipped);
}

MetricReport parse_metric_report(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  if (fields.size() != 13)
    throw ParseError("metric report", 0, fmt::format("expected 13 fields, got {}", fields.size()));
  const auto number = [](const std::string& text) {
    if (text.empty()) return kNaN;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
      throw ParseError("metric report", 0, "bad number '" + text + "'");
    return value;
  };
  const auto count = [](const std::string& text) {
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
      throw ParseError("metric report", 0, "bad count '" + text + "'");
    return value;
  };
  MetricReport r;
  r.dataset = fields[0];
  r.method = fields[1];
  r.strategy = fields[2];
  r.n_top = count(fields[3]);
  r.satisfaction = number(fields[4]);
  r.rmse_g = number(fields[5]);
  r.mae_g = number(fields[6]);
  r.fairness1 = number(fields[7]);
  r.fairness2 = number(fields[8]);
  r.novelty = number(fields[9]);
  r.ntc = number(fields[10]);
  r.ntr = number(fields[11]);
  r.skipped = count(fields[12]);
  return r;
}

}  // namespace cbsf
