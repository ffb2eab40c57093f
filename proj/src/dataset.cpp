#include "cbsf/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <string>

#include <fmt/format.h>

namespace cbsf {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string_view> split_fields(std::string_view line, bool tabs_only) {
  std::vector<std::string_view> fields;
  if (tabs_only) {
    std::size_t start = 0;
    while (true) {
      const std::size_t pos = line.find('\t', start);
      fields.push_back(line.substr(start, pos - start));
      if (pos == std::string_view::npos) break;
      start = pos + 1;
    }
    return fields;
  }
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

template <class T>
bool parse_number(std::string_view text, T& out) {
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

bool blank(std::string_view line) {
  return line.find_first_not_of(" \t") == std::string_view::npos;
}

std::string_view chomp(const std::string& line) {
  std::string_view view = line;
  if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
  return view;
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

// Lower median: the middle value for odd counts, the smaller of the two
// middle values for even counts. It is always one of the ratings.
double median_of(std::vector<double> values) {
  if (values.empty()) return kNaN;
  const std::size_t mid = (values.size() - 1) / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  return values[mid];
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

}  // namespace

std::optional<RatingFormat> parse_rating_format(std::string_view name) {
  if (name == "movielens-tab") return RatingFormat::kMovieLensTab;
  if (name == "filmtrust-space") return RatingFormat::kFilmTrustSpace;
  return std::nullopt;
}

std::string_view to_string(RatingFormat format) {
  switch (format) {
    case RatingFormat::kMovieLensTab:
      return "movielens-tab";
    case RatingFormat::kFilmTrustSpace:
      return "filmtrust-space";
  }
  return "unknown";
}

RatingMatrix RatingMatrix::from_records(std::span<const RatingRecord> records) {
  RatingMatrix m;
  for (const auto& r : records) {
    m.user_ids_.push_back(r.user);
    m.item_ids_.push_back(r.item);
  }
  for (auto* ids : {&m.user_ids_, &m.item_ids_}) {
    std::sort(ids->begin(), ids->end());
    ids->erase(std::unique(ids->begin(), ids->end()), ids->end());
  }
  for (std::size_t u = 0; u < m.user_ids_.size(); ++u)
    m.user_index_.emplace(m.user_ids_[u], static_cast<UserIndex>(u));
  for (std::size_t i = 0; i < m.item_ids_.size(); ++i)
    m.item_index_.emplace(m.item_ids_[i], static_cast<ItemIndex>(i));
  m.build(records);
  return m;
}

RatingMatrix RatingMatrix::with_records(std::span<const RatingRecord> records) const {
  RatingMatrix m;
  m.user_ids_ = user_ids_;
  m.item_ids_ = item_ids_;
  m.user_index_ = user_index_;
  m.item_index_ = item_index_;
  m.build(records);
  return m;
}

void RatingMatrix::build(std::span<const RatingRecord> records) {
  by_user_.assign(user_ids_.size(), {});
  by_item_.assign(item_ids_.size(), {});

  // Last write wins: keep the position of the final occurrence of each pair.
  std::unordered_map<std::uint64_t, std::size_t> last;
  last.reserve(records.size());
  for (std::size_t k = 0; k < records.size(); ++k) {
    const auto u = user_index_.find(records[k].user);
    const auto i = item_index_.find(records[k].item);
    if (u == user_index_.end() || i == item_index_.end())
      throw InvalidArgument(fmt::format("record ({}, {}) outside the matrix index space",
                                        records[k].user, records[k].item));
    const std::uint64_t key = (static_cast<std::uint64_t>(u->second) << 32) | i->second;
    last[key] = k;
  }

  num_ratings_ = last.size();
  r_min_ = num_ratings_ ? std::numeric_limits<double>::infinity() : kNaN;
  r_max_ = num_ratings_ ? -std::numeric_limits<double>::infinity() : kNaN;
  for (const auto& [key, k] : last) {
    const auto u = static_cast<UserIndex>(key >> 32);
    const auto i = static_cast<ItemIndex>(key & 0xffffffffu);
    const double r = records[k].rating;
    by_user_[u].push_back({i, r});
    by_item_[i].push_back({u, r});
    r_min_ = std::min(r_min_, r);
    r_max_ = std::max(r_max_, r);
  }
  for (auto& row : by_user_)
    std::sort(row.begin(), row.end(), [](auto a, auto b) { return a.item < b.item; });
  for (auto& col : by_item_)
    std::sort(col.begin(), col.end(), [](auto a, auto b) { return a.user < b.user; });

  mean_.assign(user_ids_.size(), kNaN);
  median_.assign(user_ids_.size(), kNaN);
  for (std::size_t u = 0; u < by_user_.size(); ++u) {
    const auto& row = by_user_[u];
    if (row.empty()) continue;
    std::vector<double> values;
    values.reserve(row.size());
    for (const auto& e : row) values.push_back(e.rating);
    mean_[u] = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
    median_[u] = median_of(std::move(values));
  }
}

std::optional<UserIndex> RatingMatrix::find_user(ExternalId id) const {
  const auto it = user_index_.find(id);
  if (it == user_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<ItemIndex> RatingMatrix::find_item(ExternalId id) const {
  const auto it = item_index_.find(id);
  if (it == item_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<double> RatingMatrix::rating(UserIndex u, ItemIndex i) const {
  const auto& row = by_user_[u];
  const auto it = std::lower_bound(row.begin(), row.end(), i,
                                   [](const ItemRating& e, ItemIndex item) { return e.item < item; });
  if (it == row.end() || it->item != i) return std::nullopt;
  return it->rating;
}

std::vector<RatingRecord> RatingMatrix::records() const {
  std::vector<RatingRecord> out;
  out.reserve(num_ratings_);
  for (std::size_t u = 0; u < by_user_.size(); ++u)
    for (const auto& e : by_user_[u]) out.push_back({user_ids_[u], item_ids_[e.item], e.rating});
  return out;
}

RatingMatrix parse_ratings(std::istream& in, RatingFormat format, std::string_view source) {
  const std::string src(source);
  const bool movielens = format == RatingFormat::kMovieLensTab;
  std::vector<RatingRecord> records;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = chomp(raw);
    if (blank(line)) continue;
    const auto fields = split_fields(line, movielens);
    const bool arity_ok = movielens ? (fields.size() == 3 || fields.size() == 4) : fields.size() == 3;
    if (!arity_ok)
      throw ParseError(src, line_no, fmt::format("expected {} fields, got {}",
                                                 movielens ? "3 or 4 tab-separated" : "3",
                                                 fields.size()));
    RatingRecord r;
    if (!parse_number(fields[0], r.user)) throw ParseError(src, line_no, "bad user id");
    if (!parse_number(fields[1], r.item)) throw ParseError(src, line_no, "bad item id");
    if (!parse_number(fields[2], r.rating) || !std::isfinite(r.rating))
      throw ParseError(src, line_no, "bad rating");
    if (movielens && fields.size() == 4) {
      std::int64_t timestamp;
      if (!parse_number(fields[3], timestamp)) throw ParseError(src, line_no, "bad timestamp");
    }
    records.push_back(r);
  }
  if (records.empty()) throw ParseError(src, line_no, "no ratings");
  return RatingMatrix::from_records(records);
}

RatingMatrix load_ratings(const std::filesystem::path& path, RatingFormat format) {
  auto in = open_input(path);
  return parse_ratings(in, format, path.string());
}

TrustGraph parse_trust(std::istream& in, std::string_view source) {
  const std::string src(source);
  TrustGraph graph;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = chomp(raw);
    if (blank(line)) continue;
    const auto fields = split_fields(line, false);
    if (fields.size() != 3)
      throw ParseError(src, line_no, fmt::format("expected 3 fields, got {}", fields.size()));
    TrustEdge e;
    if (!parse_number(fields[0], e.truster)) throw ParseError(src, line_no, "bad truster id");
    if (!parse_number(fields[1], e.trustee)) throw ParseError(src, line_no, "bad trustee id");
    if (!parse_number(fields[2], e.trust) || std::isnan(e.trust))
      throw ParseError(src, line_no, "bad trust value");
    if (e.truster == e.trustee) {
      ++graph.dropped_self_loops;
      continue;
    }
    if (e.trust < 0.0 || e.trust > 1.0) {
      e.trust = std::clamp(e.trust, 0.0, 1.0);
      ++graph.clamped;
    }
    graph.edges.push_back(e);
  }
  return graph;
}

TrustGraph load_trust(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_trust(in, path.string());
}

void write_ratings(std::ostream& out, const RatingMatrix& m, RatingFormat format) {
  for (const auto& r : m.records()) {
    if (format == RatingFormat::kMovieLensTab)
      out << r.user << '\t' << r.item << '\t' << format_double(r.rating) << "\t0\n";
    else
      out << r.user << ' ' << r.item << ' ' << format_double(r.rating) << '\n';
  }
}

RatingMatrix normalize_scale(const RatingMatrix& m, double lo, double hi) {
  if (!(hi > lo)) throw InvalidArgument("normalize_scale: target scale must satisfy hi > lo");
  if (!(m.r_max() > m.r_min()))
    throw InvalidArgument("normalize_scale: degenerate source scale (r_max == r_min)");
  const double from_lo = m.r_min();
  const double factor = (hi - lo) / (m.r_max() - m.r_min());
  auto records = m.records();
  for (auto& r : records) r.rating = lo + (r.rating - from_lo) * factor;
  return m.with_records(records);
}

Split split_per_user(const RatingMatrix& m, double test_ratio, std::uint64_t seed) {
  if (!(test_ratio > 0.0 && test_ratio < 1.0))
    throw InvalidArgument("split_per_user: test_ratio must lie in (0, 1)");

  std::mt19937_64 rng(seed);
  // Per user, the chosen test items; filled in user order so the RNG stream
  // is consumed deterministically.
  std::vector<std::vector<ItemRating>> test_rows(m.num_users());
  std::vector<std::vector<ItemRating>> train_rows(m.num_users());
  for (UserIndex u = 0; u < m.num_users(); ++u) {
    const auto row = m.user_ratings(u);
    std::vector<ItemRating> items(row.begin(), row.end());
    std::size_t n_test = 0;
    if (items.size() > kMinTrainRatings) {
      n_test = static_cast<std::size_t>(std::floor(test_ratio * items.size() + 1e-9));
      n_test = std::min(n_test, items.size() - kMinTrainRatings);
    }
    std::shuffle(items.begin(), items.end(), rng);
    test_rows[u].assign(items.begin(), items.begin() + n_test);
    train_rows[u].assign(items.begin() + n_test, items.end());
  }

  std::vector<std::size_t> train_count(m.num_items(), 0);
  for (const auto& row : train_rows)
    for (const auto& e : row) ++train_count[e.item];

  Split split;
  split.seed = seed;
  for (UserIndex u = 0; u < m.num_users(); ++u) {
    auto& test = test_rows[u];
    std::sort(test.begin(), test.end(), [](auto a, auto b) { return a.item < b.item; });
    std::vector<ItemRating> kept;
    for (const auto& e : test) {
      if (train_count[e.item] == 0) {
        train_rows[u].push_back(e);
        ++train_count[e.item];
        ++split.repaired;
      } else {
        kept.push_back(e);
      }
    }
    test = std::move(kept);
  }

  std::vector<RatingRecord> train, test;
  for (UserIndex u = 0; u < m.num_users(); ++u) {
    for (const auto& e : train_rows[u]) train.push_back({m.user_id(u), m.item_id(e.item), e.rating});
    for (const auto& e : test_rows[u]) test.push_back({m.user_id(u), m.item_id(e.item), e.rating});
  }
  split.train = m.with_records(train);
  split.test = m.with_records(test);
  return split;
}

void write_split_manifest(std::ostream& out, const Split& split) {
  const auto& train = split.train;
  const auto& test = split.test;
  for (UserIndex u = 0; u < train.num_users(); ++u) {
    const auto a = train.user_ratings(u);
    const auto b = test.user_ratings(u);
    std::size_t x = 0, y = 0;
    while (x < a.size() || y < b.size()) {
      const bool take_train = y == b.size() || (x < a.size() && a[x].item < b[y].item);
      const ItemIndex item = take_train ? a[x++].item : b[y++].item;
      out << train.user_id(u) << ',' << train.item_id(item) << ','
          << (take_train ? "train" : "test") << '\n';
    }
  }
}

std::vector<GroupSpec> generate_groups(const RatingMatrix& m, int n_groups, int min_size,
                                       int max_size, std::uint64_t seed) {
  if (n_groups < 0) throw InvalidArgument("generate_groups: n_groups must be >= 0");
  if (min_size < 1) throw InvalidArgument("generate_groups: min_size must be >= 1");
  if (max_size < min_size) throw InvalidArgument("generate_groups: max_size < min_size");
  if (static_cast<std::size_t>(max_size) > m.num_users())
    throw InvalidArgument(fmt::format("generate_groups: max_size {} exceeds user count {}",
                                      max_size, m.num_users()));

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> size_dist(min_size, max_size);
  std::vector<UserIndex> population(m.num_users());
  std::iota(population.begin(), population.end(), 0);

  std::vector<GroupSpec> groups;
  groups.reserve(n_groups);
  for (int g = 0; g < n_groups; ++g) {
    GroupSpec spec;
    spec.id = g;
    const int size = size_dist(rng);
    std::sample(population.begin(), population.end(), std::back_inserter(spec.members), size, rng);
    groups.push_back(std::move(spec));
  }
  return groups;
}

}  // namespace cbsf
