#include "cbsf/similarity.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include <fmt/format.h>

#include "cbsf/parallel.hpp"

namespace cbsf {

void UASimParams::validate() const {
  if (!(w > 0.0)) throw InvalidArgument("uasim: w must be > 0");
  if (!(beta >= 0.0 && beta <= 1.0)) throw InvalidArgument("uasim: beta must lie in [0, 1]");
}

void CbsParams::validate() const {
  if (!(a >= 0.0 && a <= 1.0)) throw InvalidArgument("cbs: a must lie in [0, 1]");
  if (!std::isfinite(th)) throw InvalidArgument("cbs: th must be finite");
}

std::optional<Measure> parse_measure(std::string_view name) {
  if (name == "cosine") return Measure::kCosine;
  if (name == "jaccard") return Measure::kJaccard;
  if (name == "taj") return Measure::kTaj;
  if (name == "uasim") return Measure::kUasim;
  if (name == "uasimj") return Measure::kUasimj;
  if (name == "cbs") return Measure::kCbs;
  return std::nullopt;
}

std::string_view to_string(Measure measure) {
  switch (measure) {
    case Measure::kCosine: return "cosine";
    case Measure::kJaccard: return "jaccard";
    case Measure::kTaj: return "taj";
    case Measure::kUasim: return "uasim";
    case Measure::kUasimj: return "uasimj";
    case Measure::kCbs: return "cbs";
  }
  return "unknown";
}

PairEvidence pair_evidence(UserIndex u, UserIndex v, const RatingMatrix& m) {
  PairEvidence e;
  const auto a = m.user_ratings(u);
  const auto b = m.user_ratings(v);
  const double mean_u = m.mean(u);
  const double mean_v = m.mean(v);
  std::size_t x = 0, y = 0;
  while (x < a.size() && y < b.size()) {
    if (a[x].item < b[y].item) {
      ++x;
    } else if (b[y].item < a[x].item) {
      ++y;
    } else {
      const double ru = a[x].rating;
      const double rv = b[y].rating;
      ++e.co_count;
      e.dot += ru * rv;
      e.norm2_u += ru * ru;
      e.norm2_v += rv * rv;
      const double cu = ru - mean_u;
      const double cv = rv - mean_v;
      e.centered_dot += cu * cv;
      e.centered_norm2_u += cu * cu;
      e.centered_norm2_v += cv * cv;
      if (ru <= 0.0 || rv <= 0.0)
        e.nonpositive_rating = true;
      else
        e.ratio_sum += std::min(ru, rv) / std::max(ru, rv);
      ++x;
      ++y;
    }
  }
  e.union_count = static_cast<std::uint32_t>(a.size() + b.size() - e.co_count);
  return e;
}

double cosine(const PairEvidence& e) {
  if (e.co_count == 0 || e.norm2_u == 0.0 || e.norm2_v == 0.0) return 0.0;
  return e.dot / (std::sqrt(e.norm2_u) * std::sqrt(e.norm2_v));
}

double jaccard(const PairEvidence& e) {
  if (e.union_count == 0) return 0.0;
  return static_cast<double>(e.co_count) / e.union_count;
}

double taj(const PairEvidence& e) {
  if (e.co_count == 0 || e.centered_norm2_u == 0.0 || e.centered_norm2_v == 0.0) return 0.0;
  const double nu = std::sqrt(e.centered_norm2_u);
  const double nv = std::sqrt(e.centered_norm2_v);
  const double d = e.centered_dot;
  const double overlap = jaccard(e);
  if (d >= 0.0) {
    const double denom = nu <= nv ? nu * nv * nv * nv : nu * nu * nu * nv;
    return d * d / denom * overlap;
  }
  const double denom = nu <= nv ? nv * nv : nu * nu;
  return d / denom * overlap;
}

double uasim(const PairEvidence& e, const UASimParams& p) {
  if (e.nonpositive_rating)
    throw InvalidArgument("uasim: co-rated ratings must be strictly positive");
  const double evidence = e.co_count + p.w;
  const double belief = e.ratio_sum / evidence;
  const double uncertainty = p.w / evidence;
  return belief + p.beta * uncertainty;
}

double uasimj(const PairEvidence& e, const UASimParams& p) {
  return uasim(e, p) * jaccard(e);
}

double cbs(const PairEvidence& e, const UASimParams& up, const CbsParams& cp) {
  const bool uasimj_first = cp.dominant == CbsParams::Dominant::kUasimj;
  const double dominant = uasimj_first ? uasimj(e, up) : taj(e);
  if (dominant >= cp.th) return dominant;
  const double secondary = uasimj_first ? taj(e) : uasim(e, up);
  return cp.a * dominant + (1.0 - cp.a) * secondary;
}

double score(const PairEvidence& e, const SimilarityConfig& config) {
  switch (config.measure) {
    case Measure::kCosine: return cosine(e);
    case Measure::kJaccard: return jaccard(e);
    case Measure::kTaj: return taj(e);
    case Measure::kUasim: return uasim(e, config.uasim);
    case Measure::kUasimj: return uasimj(e, config.uasim);
    case Measure::kCbs: return cbs(e, config.uasim, config.cbs);
  }
  return 0.0;
}

double cosine(UserIndex u, UserIndex v, const RatingMatrix& m) {
  return cosine(pair_evidence(u, v, m));
}
double jaccard(UserIndex u, UserIndex v, const RatingMatrix& m) {
  return jaccard(pair_evidence(u, v, m));
}
double taj(UserIndex u, UserIndex v, const RatingMatrix& m) {
  return taj(pair_evidence(u, v, m));
}
double uasim(UserIndex u, UserIndex v, const RatingMatrix& m, const UASimParams& p) {
  return uasim(pair_evidence(u, v, m), p);
}
double uasimj(UserIndex u, UserIndex v, const RatingMatrix& m, const UASimParams& p) {
  return uasimj(pair_evidence(u, v, m), p);
}
double cbs(UserIndex u, UserIndex v, const RatingMatrix& m, const UASimParams& up,
           const CbsParams& cp) {
  return cbs(pair_evidence(u, v, m), up, cp);
}

SimilarityTable::SimilarityTable(std::size_t num_users)
    : num_users_(num_users), entries_(num_users * (num_users ? num_users - 1 : 0) / 2) {}

SimilarityTable SimilarityTable::build(const RatingMatrix& train, const SimilarityConfig& config,
                                       unsigned threads) {
  config.uasim.validate();
  config.cbs.validate();
  SimilarityTable table(train.num_users());
  const std::size_t n = train.num_users();
  parallel_for(n, threads, [&](std::size_t row) {
    const auto u = static_cast<UserIndex>(row);
    for (auto v = static_cast<UserIndex>(row + 1); v < n; ++v) {
      const PairEvidence e = pair_evidence(u, v, train);
      Entry& entry = table.at(u, v);
      try {
        entry.score = cbsf::score(e, config);
      } catch (const Error& err) {
        throw InvalidArgument(fmt::format("pair ({}, {}): {}", train.user_id(u),
                                          train.user_id(v), err.what()));
      }
      entry.co_count = e.co_count;
      entry.union_count = e.union_count;
    }
  });
  return table;
}

void SimilarityTable::write(std::ostream& out, const RatingMatrix& m) const {
  char buf[64];
  for (UserIndex u = 0; u < num_users_; ++u) {
    for (UserIndex v = u + 1; v < num_users_; ++v) {
      const Entry& e = at(u, v);
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), e.score);
      out << m.user_id(u) << ',' << m.user_id(v) << ',' << std::string_view(buf, ptr - buf)
          << ',' << e.co_count << ',' << e.union_count << '\n';
    }
  }
}

SimilarityTable SimilarityTable::read(std::istream& in, const RatingMatrix& m) {
  SimilarityTable table(m.num_users());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    ExternalId uid = 0, vid = 0;
    Entry entry;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    auto field = [&](auto& out) {
      auto [next, ec] = std::from_chars(p, end, out);
      if (ec != std::errc()) throw ParseError("similarity table", line_no, "bad field");
      p = next;
      if (p < end && *p == ',') ++p;
    };
    field(uid);
    field(vid);
    field(entry.score);
    field(entry.co_count);
    field(entry.union_count);
    if (p != end) throw ParseError("similarity table", line_no, "trailing characters");
    const auto u = m.find_user(uid);
    const auto v = m.find_user(vid);
    if (!u || !v || *u == *v) throw ParseError("similarity table", line_no, "unknown user pair");
    table.at(*u, *v) = entry;
  }
  return table;
}

}  // namespace cbsf
