#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cbsf/types.hpp"

namespace cbsf {

enum class RatingFormat {
  kMovieLensTab,    // user \t item \t rating \t timestamp
  kFilmTrustSpace,  // user item rating
};

std::optional<RatingFormat> parse_rating_format(std::string_view name);
std::string_view to_string(RatingFormat format);

struct RatingRecord {
  ExternalId user = 0;
  ExternalId item = 0;
  double rating = 0.0;
};

struct ItemRating {
  ItemIndex item;
  double rating;
};

struct UserRating {
  UserIndex user;
  double rating;
};

// Immutable sparse user x item rating store with both row (per-user) and
// column (per-item) views. Two matrices derived from one another through
// with_records() share the same user/item index space, which is what lets a
// train and a test restriction be compared cell by cell.
class RatingMatrix {
 public:
  RatingMatrix() = default;

  // Builds the index space from the ids appearing in `records`. Duplicate
  // (user, item) pairs keep the last rating.
  static RatingMatrix from_records(std::span<const RatingRecord> records);

  // A matrix over this matrix's index space holding only `records`. Every
  // id must already exist in this index space.
  RatingMatrix with_records(std::span<const RatingRecord> records) const;

  std::size_t num_users() const { return user_ids_.size(); }
  std::size_t num_items() const { return item_ids_.size(); }
  std::size_t num_ratings() const { return num_ratings_; }

  ExternalId user_id(UserIndex u) const { return user_ids_[u]; }
  ExternalId item_id(ItemIndex i) const { return item_ids_[i]; }
  std::optional<UserIndex> find_user(ExternalId id) const;
  std::optional<ItemIndex> find_item(ExternalId id) const;

  // Sorted by item index.
  std::span<const ItemRating> user_ratings(UserIndex u) const { return by_user_[u]; }
  // Sorted by user index.
  std::span<const UserRating> item_ratings(ItemIndex i) const { return by_item_[i]; }

  std::optional<double> rating(UserIndex u, ItemIndex i) const;
  bool has_rating(UserIndex u, ItemIndex i) const { return rating(u, i).has_value(); }

  // Smallest / largest rating present. Both are NaN for an empty matrix.
  double r_min() const { return r_min_; }
  double r_max() const { return r_max_; }

  // Per-user mean and lower median over this matrix's ratings; NaN for
  // users without ratings.
  double mean(UserIndex u) const { return mean_[u]; }
  double median(UserIndex u) const { return median_[u]; }

  // All records in (user, item) order.
  std::vector<RatingRecord> records() const;

 private:
  void build(std::span<const RatingRecord> records);

  std::vector<ExternalId> user_ids_;
  std::vector<ExternalId> item_ids_;
  std::unordered_map<ExternalId, UserIndex> user_index_;
  std::unordered_map<ExternalId, ItemIndex> item_index_;
  std::vector<std::vector<ItemRating>> by_user_;
  std::vector<std::vector<UserRating>> by_item_;
  std::vector<double> mean_;
  std::vector<double> median_;
  std::size_t num_ratings_ = 0;
  double r_min_ = 0.0;
  double r_max_ = 0.0;
};

struct TrustEdge {
  ExternalId truster = 0;
  ExternalId trustee = 0;
  double trust = 0.0;
};

struct TrustGraph {
  std::vector<TrustEdge> edges;
  std::size_t dropped_self_loops = 0;
  std::size_t clamped = 0;
};

// Per-user partition of a matrix into train and test halves. Both halves
// share the source matrix's index space.
struct Split {
  RatingMatrix train;
  RatingMatrix test;
  std::uint64_t seed = 0;
  // Test pairs moved back to train because their item had no training rating.
  std::size_t repaired = 0;
};

struct GroupSpec {
  int id = 0;
  std::vector<UserIndex> members;  // ascending
};

RatingMatrix load_ratings(const std::filesystem::path& path, RatingFormat format);
RatingMatrix parse_ratings(std::istream& in, RatingFormat format,
                           std::string_view source = "<stream>");

TrustGraph load_trust(const std::filesystem::path& path);
TrustGraph parse_trust(std::istream& in, std::string_view source = "<stream>");

// Writes ratings in `format`, using the shortest decimal form that reads
// back to the same double. MovieLens timestamps are written as 0.
void write_ratings(std::ostream& out, const RatingMatrix& m, RatingFormat format);

// Affine map of every rating from [r_min, r_max] onto [lo, hi].
RatingMatrix normalize_scale(const RatingMatrix& m, double lo, double hi);

// Users with at most this many ratings contribute no test items.
inline constexpr std::size_t kMinTrainRatings = 5;

Split split_per_user(const RatingMatrix& m, double test_ratio, std::uint64_t seed);

// `user,item,train|test` lines in (user, item) order, external ids.
void write_split_manifest(std::ostream& out, const Split& split);

std::vector<GroupSpec> generate_groups(const RatingMatrix& m, int n_groups, int min_size,
                                       int max_size, std::uint64_t seed);

}  // namespace cbsf
