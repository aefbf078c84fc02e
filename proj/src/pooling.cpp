#include "gtsi/pooling.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <numeric>
#include <unordered_set>

#include "gtsi/csv.hpp"

namespace gtsi {

PoolingMatrix PoolingMatrix::from_entries(int m, int n,
                                          std::vector<std::pair<int, int>> entries) {
  if (m <= 0 || n <= 0) throw DimensionError("pooling matrix: m and n must be positive");
  PoolingMatrix A;
  A.m_ = m;
  A.n_ = n;
  A.rows_.resize(m);
  A.cols_.resize(n);
  std::sort(entries.begin(), entries.end());
  std::pair<int, int> prev{-1, -1};
  for (const auto& [r, c] : entries) {
    if (r < 0 || r >= m || c < 0 || c >= n)
      throw DimensionError("pooling matrix: entry out of range");
    if (std::pair{r, c} == prev) throw ConfigError("pooling matrix: duplicate entry");
    prev = {r, c};
    A.rows_[r].push_back(c);
    A.cols_[c].push_back(r);
  }
  A.nnz_ = static_cast<long>(entries.size());
  for (int j = 0; j < m; ++j)
    if (A.rows_[j].empty())
      throw ConfigError("pooling matrix: pool " + std::to_string(j) + " is empty");
  for (int i = 0; i < n; ++i) {
    if (A.cols_[i].empty())
      throw ConfigError("pooling matrix: individual " + std::to_string(i) + " is unpooled");
    std::sort(A.cols_[i].begin(), A.cols_[i].end());
  }
  return A;
}

std::vector<std::pair<int, int>> PoolingMatrix::entries() const {
  std::vector<std::pair<int, int>> out;
  out.reserve(nnz_);
  for (int j = 0; j < m_; ++j)
    for (int c : rows_[j]) out.emplace_back(j, c);
  return out;
}

namespace {

struct PairSet {
  explicit PairSet(int m) : m_(m) {}
  bool used(int a, int b) const { return set_.count(key(a, b)) != 0; }
  void mark(int a, int b) { set_.insert(key(a, b)); }
  void unmark(int a, int b) { set_.erase(key(a, b)); }
  long key(int a, int b) const {
    if (a > b) std::swap(a, b);
    return static_cast<long>(a) * m_ + b;
  }
  int m_;
  std::unordered_set<long> set_;
};

// depth-first search for 3 mutually compatible rows following `order`;
// preference for light rows is encoded in the ordering itself
bool pick_triple(const std::vector<int>& order, const PairSet& used,
                 std::array<int, 3>& out, long budget) {
  const int m = static_cast<int>(order.size());
  long steps = 0;
  for (int a = 0; a < m; ++a) {
    for (int b = a + 1; b < m; ++b) {
      if (++steps > budget) return false;
      if (used.used(order[a], order[b])) continue;
      for (int c = b + 1; c < m; ++c) {
        if (++steps > budget) return false;
        if (used.used(order[a], order[c]) || used.used(order[b], order[c])) continue;
        out = {order[a], order[b], order[c]};
        return true;
      }
    }
  }
  return false;
}

// Exact backtracking over columns for when the greedy dead-ends right at the
// pair-capacity bound. Columns are interchangeable, so completeness only needs
// lexicographically increasing triple sequences; triples are enumerated in
// place, never materialized. Exhausting the space (without hitting the step
// budget) proves no design exists.
struct ExactTripleSearch {
  int m, n;
  PairSet used;
  std::vector<std::array<int, 3>> cols;
  long budget;
  bool budget_hit = false;

  ExactTripleSearch(int m_in, int n_in, long budget_in)
      : m(m_in), n(n_in), used(m_in), budget(budget_in) {}

  bool dfs(int col, int a0, int b0, int c0) {
    if (col == n) return true;
    for (int a = a0; a < m; ++a) {
      const int b_start = a == a0 ? b0 : a + 1;
      for (int b = b_start; b < m; ++b) {
        if (used.used(a, b)) continue;
        const int c_start = (a == a0 && b == b0) ? std::max(b + 1, c0 + 1) : b + 1;
        for (int c = c_start; c < m; ++c) {
          if (--budget < 0) {
            budget_hit = true;
            return false;
          }
          if (used.used(a, c) || used.used(b, c)) continue;
          used.mark(a, b);
          used.mark(a, c);
          used.mark(b, c);
          cols.push_back({a, b, c});
          if (dfs(col + 1, a, b, c)) return true;
          cols.pop_back();
          used.unmark(a, b);
          used.unmark(a, c);
          used.unmark(b, c);
          if (budget_hit) return false;
        }
      }
    }
    return false;
  }
};

}  // namespace

PoolingMatrix build_triple_design(int n, int m, Rng& rng) {
  if (m < 3) throw ConfigError("triple design: need m >= 3");
  if (n < 1) throw ConfigError("triple design: need n >= 1");
  if (3L * n < m)
    throw ConfigError("triple design: m > 3n leaves empty pools");
  if (3L * n > static_cast<long>(m) * (m - 1) / 2)
    throw ConfigError("triple design: not enough row pairs for n disjoint-pair columns");

  // greedy packing can dead-end near the pair-capacity bound even when a
  // design exists, so the whole construction restarts on failure
  for (int restart = 0; restart < 10; ++restart) {
    PairSet used(m);
    std::vector<int> weight(m, 0);
    std::vector<std::pair<int, int>> entries;
    entries.reserve(3L * n);
    std::vector<int> order(m);
    bool dead_end = false;

    for (int col = 0; col < n && !dead_end; ++col) {
      std::array<int, 3> triple{};
      bool found = false;
      for (int attempt = 0; attempt < 40 && !found; ++attempt) {
        std::iota(order.begin(), order.end(), 0);
        std::vector<std::uint64_t> key(m);
        for (int r = 0; r < m; ++r) key[r] = rng.raw();
        if (attempt < 20) {
          // balance-first: lightest rows first, random tie-break
          std::sort(order.begin(), order.end(), [&](int a, int b) {
            return weight[a] != weight[b] ? weight[a] < weight[b] : key[a] < key[b];
          });
        } else {
          // balance relaxed: fully random order, overlap constraint only
          std::sort(order.begin(), order.end(),
                    [&](int a, int b) { return key[a] < key[b]; });
        }
        found = pick_triple(order, used, triple, attempt < 20 ? 20000 : 2000000);
      }
      if (!found) {
        // deterministic sweep: exhaustive, so failure here means no triple
        // is admissible given the columns placed so far
        std::iota(order.begin(), order.end(), 0);
        found = pick_triple(order, used, triple, 2L * m * m * m);
      }
      if (!found) {
        dead_end = true;
        break;
      }
      used.mark(triple[0], triple[1]);
      used.mark(triple[0], triple[2]);
      used.mark(triple[1], triple[2]);
      for (int r : triple) {
        ++weight[r];
        entries.emplace_back(r, col);
      }
    }
    if (!dead_end) return PoolingMatrix::from_entries(m, n, std::move(entries));
  }

  ExactTripleSearch exact(m, n, 50'000'000);
  if (exact.dfs(0, 0, 1, 0)) {
    std::vector<std::pair<int, int>> entries;
    entries.reserve(3L * n);
    for (int col = 0; col < n; ++col)
      for (int r : exact.cols[col]) entries.emplace_back(r, col);
    return PoolingMatrix::from_entries(m, n, std::move(entries));
  }
  if (exact.budget_hit)
    throw ConfigError("triple design: could not pack " + std::to_string(n) +
                      " disjoint-pair columns into " + std::to_string(m) +
                      " pools within the search budget");
  throw ConfigError("triple design: no " + std::to_string(n) +
                    "-column disjoint-pair design exists for " + std::to_string(m) +
                    " pools");
}

void NoiseModel::validate() const {
  if (!(fp >= 0 && fp < 0.5) || !(fn >= 0 && fn < 0.5))
    throw ConfigError("noise model: fp and fn must lie in [0, 0.5)");
}

std::vector<int> noiseless_pool(const PoolingMatrix& A, std::span<const std::uint8_t> x) {
  if (static_cast<int>(x.size()) != A.n())
    throw DimensionError("noiseless_pool: x has wrong length");
  std::vector<int> w(A.m(), 0);
  for (int j = 0; j < A.m(); ++j)
    for (int i : A.row(j)) w[j] += x[i];
  return w;
}

std::vector<std::uint8_t> measure(const PoolingMatrix& A, std::span<const std::uint8_t> x,
                                  const NoiseModel& noise, Rng& rng) {
  const std::vector<int> w = noiseless_pool(A, x);
  std::vector<std::uint8_t> y(A.m());
  for (int j = 0; j < A.m(); ++j) {
    const double p_one = w[j] > 0 ? 1.0 - noise.fn : noise.fp;
    y[j] = rng.bernoulli(p_one) ? 1 : 0;
  }
  return y;
}

void save_matrix(const std::filesystem::path& path, const PoolingMatrix& A) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << A.m() << ' ' << A.n() << ' ' << A.nnz() << '\n';
  for (const auto& [r, c] : A.entries()) out << r << ' ' << c << '\n';
  if (!out) throw ConfigError("write failed: " + path.string());
}

PoolingMatrix load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  int m = 0, n = 0;
  long nnz = 0;
  if (!(in >> m >> n >> nnz)) throw ConfigError("matrix file: bad header in " + path.string());
  std::vector<std::pair<int, int>> entries;
  entries.reserve(nnz);
  int r = 0, c = 0;
  while (in >> r >> c) entries.emplace_back(r, c);
  if (static_cast<long>(entries.size()) != nnz)
    throw ConfigError("matrix file: header claims " + std::to_string(nnz) + " entries, found " +
                      std::to_string(entries.size()));
  return PoolingMatrix::from_entries(m, n, std::move(entries));
}

void write_measurements_csv(const std::filesystem::path& path,
                            std::span<const std::uint8_t> y) {
  std::vector<std::vector<std::string>> rows;
  for (size_t j = 0; j < y.size(); ++j)
    rows.push_back({std::to_string(j), std::to_string(static_cast<int>(y[j]))});
  write_csv(path, {"pool", "y"}, rows);
}

std::vector<std::uint8_t> read_measurements_csv(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  const int cp = t.column("pool"), cy = t.column("y");
  std::vector<std::uint8_t> y(t.rows.size(), 0);
  for (const auto& row : t.rows) {
    const long j = parse_long(row[cp], "measurements pool");
    const long v = parse_long(row[cy], "measurements y");
    if (j < 0 || j >= static_cast<long>(y.size()))
      throw ConfigError("measurements csv: pool ids must be 0..m-1 without gaps");
    if (v != 0 && v != 1) throw ConfigError("measurements csv: y must be 0 or 1");
    y[j] = static_cast<std::uint8_t>(v);
  }
  return y;
}

}  // namespace gtsi
