#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "cbsf/dataset.hpp"

namespace cbsf {

struct UASimParams {
  double w = 2.0;     // evidence prior, > 0
  double beta = 0.5;  // share of the uncertainty mass counted as agreement

  void validate() const;
};

// Composite similarity: below `th` the dominant measure is blended with its
// secondary one, at or above `th` the dominant measure is returned as is.
//   dominant UASIMJ -> secondary TAJ
//   dominant TAJ    -> secondary UASIM
struct CbsParams {
  enum class Dominant { kUasimj, kTaj };

  Dominant dominant = Dominant::kUasimj;
  double a = 0.8;
  double th = 0.2;

  // MovieLens setting: UASIMJ-dominant, a = 0.8, th = 0.2.
  static CbsParams uasimj_dominant() { return {Dominant::kUasimj, 0.8, 0.2}; }
  // FilmTrust setting: TAJ-dominant, a = 0.6, th = 0.8.
  static CbsParams taj_dominant() { return {Dominant::kTaj, 0.6, 0.8}; }

  void validate() const;
};

enum class Measure { kCosine, kJaccard, kTaj, kUasim, kUasimj, kCbs };

std::optional<Measure> parse_measure(std::string_view name);
std::string_view to_string(Measure measure);

struct SimilarityConfig {
  Measure measure = Measure::kCbs;
  UASimParams uasim;
  CbsParams cbs;
};

// Everything the pairwise measures need, gathered in one pass over the
// co-rated items of (u, v). Centered terms use each user's mean over all of
// their ratings in the matrix, not only the co-rated ones.
struct PairEvidence {
  std::uint32_t co_count = 0;
  std::uint32_t union_count = 0;
  double dot = 0.0;
  double norm2_u = 0.0;
  double norm2_v = 0.0;
  double centered_dot = 0.0;
  double centered_norm2_u = 0.0;
  double centered_norm2_v = 0.0;
  double ratio_sum = 0.0;  // sum of min/max over co-rated items
  bool nonpositive_rating = false;
};

PairEvidence pair_evidence(UserIndex u, UserIndex v, const RatingMatrix& m);

double cosine(const PairEvidence& e);
double jaccard(const PairEvidence& e);
double taj(const PairEvidence& e);
// Throws InvalidArgument when a co-rated rating is not strictly positive.
double uasim(const PairEvidence& e, const UASimParams& p);
double uasimj(const PairEvidence& e, const UASimParams& p);
double cbs(const PairEvidence& e, const UASimParams& up, const CbsParams& cp);
double score(const PairEvidence& e, const SimilarityConfig& config);

double cosine(UserIndex u, UserIndex v, const RatingMatrix& m);
double jaccard(UserIndex u, UserIndex v, const RatingMatrix& m);
double taj(UserIndex u, UserIndex v, const RatingMatrix& m);
double uasim(UserIndex u, UserIndex v, const RatingMatrix& m, const UASimParams& p);
double uasimj(UserIndex u, UserIndex v, const RatingMatrix& m, const UASimParams& p);
double cbs(UserIndex u, UserIndex v, const RatingMatrix& m, const UASimParams& up,
           const CbsParams& cp);

// Upper-triangular table of pair scores for one measure, with the co-rating
// counts cached next to each score.
class SimilarityTable {
 public:
  struct Entry {
    double score = 0.0;
    std::uint32_t co_count = 0;
    std::uint32_t union_count = 0;
  };

  SimilarityTable() = default;
  explicit SimilarityTable(std::size_t num_users);

  // Scores every unordered pair of `train`. Per-pair failures are rethrown
  // with the pair's external ids attached.
  static SimilarityTable build(const RatingMatrix& train, const SimilarityConfig& config,
                               unsigned threads = 0);

  std::size_t num_users() const { return num_users_; }
  std::size_t num_pairs() const { return entries_.size(); }

  // u != v; argument order does not matter.
  const Entry& at(UserIndex u, UserIndex v) const { return entries_[offset(u, v)]; }
  Entry& at(UserIndex u, UserIndex v) { return entries_[offset(u, v)]; }
  double score(UserIndex u, UserIndex v) const { return at(u, v).score; }

  // `u,v,score,co_count,union_count` per pair with u < v, users written as
  // the external ids of `m`. Scores use the shortest round-trip form.
  void write(std::ostream& out, const RatingMatrix& m) const;
  static SimilarityTable read(std::istream& in, const RatingMatrix& m);

 private:
  std::size_t offset(UserIndex u, UserIndex v) const {
    if (u > v) std::swap(u, v);
    return static_cast<std::size_t>(u) * num_users_ - static_cast<std::size_t>(u) * (u + 1) / 2 +
           (v - u - 1);
  }

  std::size_t num_users_ = 0;
  std::vector<Entry> entries_;
};

}  // namespace cbsf
