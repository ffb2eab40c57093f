#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "cbsf/dataset.hpp"

namespace cbsf::testing {

inline RatingMatrix matrix(std::vector<RatingRecord> records) {
  return RatingMatrix::from_records(records);
}

// Random matrix with ratings drawn from `levels`; each user rates each item
// with probability `density`. Every user gets at least one rating.
inline RatingMatrix random_matrix(std::mt19937_64& rng, int users, int items, double density,
                                  const std::vector<double>& levels = {1, 2, 3, 4, 5}) {
  std::bernoulli_distribution keep(density);
  std::uniform_int_distribution<std::size_t> level(0, levels.size() - 1);
  std::uniform_int_distribution<int> any_item(1, items);
  std::vector<RatingRecord> records;
  for (int u = 1; u <= users; ++u) {
    bool rated = false;
    for (int i = 1; i <= items; ++i) {
      if (!keep(rng)) continue;
      records.push_back({u, i, levels[level(rng)]});
      rated = true;
    }
    if (!rated) records.push_back({u, any_item(rng), levels[level(rng)]});
  }
  return RatingMatrix::from_records(records);
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("cbsf-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// A FilmTrust-style dataset under `dir`: ratings.txt on the 0.5..4 scale and
// a trust.txt graph among the same users.
inline void write_synthetic_filmtrust(const std::filesystem::path& dir, std::uint64_t seed,
                                      int users = 40, int items = 60) {
  std::mt19937_64 rng(seed);
  const auto m = random_matrix(rng, users, items, 0.3, {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0});
  std::ofstream ratings(dir / "ratings.txt");
  write_ratings(ratings, m, RatingFormat::kFilmTrustSpace);
  std::ofstream trust(dir / "trust.txt");
  std::uniform_int_distribution<int> user(1, users);
  for (int e = 0; e < users * 3; ++e) trust << user(rng) << ' ' << user(rng) << " 1\n";
}

// INI overrides that keep the synthetic runs small.
inline constexpr const char* kSmallRunConfig = R"([dataset]
ratings = ratings.txt
trust = trust.txt

[neighbors]
k = 10

[groups]
count = 6
min_size = 2
max_size = 5

[candidates]
n_filter = 8
n_borda = 6
n_top = 8

[evaluation]
n_top_sweep = 4,8
)";

}  // namespace cbsf::testing
