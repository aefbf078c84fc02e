#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "gtsi/errors.hpp"
#include "gtsi/rng.hpp"

namespace gtsi {

// Sparse binary pooling matrix stored as row and column adjacency lists, both
// sorted ascending. Immutable after construction; every pool and every
// individual must be covered at least once.
class PoolingMatrix {
 public:
  static PoolingMatrix from_entries(int m, int n, std::vector<std::pair<int, int>> entries);

  int m() const { return m_; }
  int n() const { return n_; }
  long nnz() const { return nnz_; }
  const std::vector<int>& row(int j) const { return rows_[j]; }  // individuals in pool j
  const std::vector<int>& col(int i) const { return cols_[i]; }  // pools containing i

  std::vector<std::pair<int, int>> entries() const;  // row-major sorted

 private:
  PoolingMatrix() = default;
  int m_ = 0, n_ = 0;
  long nnz_ = 0;
  std::vector<std::vector<int>> rows_, cols_;
};

// Constant-column-weight-3 design with pairwise column overlap <= 1 and row
// weights balanced within +-1 of 3n/m where the overlap constraint permits.
// Greedy: each column takes 3 admissible rows preferring the currently
// lightest (random tie-break), with bounded backtracking and restarts; the
// balance preference is relaxed before the overlap constraint, and an
// unsatisfiable overlap constraint is a ConfigError.
PoolingMatrix build_triple_design(int n, int m, Rng& rng);

struct NoiseModel {
  double fp = 0.0;  // P(y=1 | pool contains no infected)
  double fn = 0.0;  // P(y=0 | pool contains at least one infected)

  void validate() const;  // requires 0 <= fp, fn < 0.5
};

inline NoiseModel noise_asymmetric() { return {0.001, 0.02}; }
inline NoiseModel noise_symmetric() { return {0.01, 0.01}; }

// integer pool loads w = A x
std::vector<int> noiseless_pool(const PoolingMatrix& A, std::span<const std::uint8_t> x);

// y_j ~ Bernoulli(1-fn) if w_j > 0 else Bernoulli(fp)
std::vector<std::uint8_t> measure(const PoolingMatrix& A, std::span<const std::uint8_t> x,
                                  const NoiseModel& noise, Rng& rng);

// text format: first line "m n nnz", then one "row col" pair per line, 0-indexed
void save_matrix(const std::filesystem::path& path, const PoolingMatrix& A);
PoolingMatrix load_matrix(const std::filesystem::path& path);

// csv "pool,y"
void write_measurements_csv(const std::filesystem::path& path,
                            std::span<const std::uint8_t> y);
std::vector<std::uint8_t> read_measurements_csv(const std::filesystem::path& path);

}  // namespace gtsi
