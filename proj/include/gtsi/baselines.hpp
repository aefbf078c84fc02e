#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gtsi/pooling.hpp"

namespace gtsi {

// Combinatorial orthogonal matching (noisy variant): an item is declared
// positive when the fraction of its pools that tested positive reaches the
// threshold. threshold = 1 reproduces the classical noiseless rule.
struct ComaConfig {
  double threshold = 1.0;
};
std::vector<std::uint8_t> noisy_coma(const PoolingMatrix& A, std::span<const std::uint8_t> y,
                                     const ComaConfig& cfg);

// Definite defectives (noisy variant). Stage 1: items appearing in more than
// negative_slack negative pools are definitely non-defective. Stage 2: a
// remaining item that is the only remaining candidate in some positive pool is
// declared positive; everything else is declared negative. slack = 0
// reproduces the classical rule, whose noiseless false-positive rate is 0.
struct DdConfig {
  int negative_slack = 0;
};
std::vector<std::uint8_t> noisy_dd(const PoolingMatrix& A, std::span<const std::uint8_t> y,
                                   const DdConfig& cfg);

// one decoded instance for baseline tuning
struct LabeledInstance {
  const PoolingMatrix* A;
  std::vector<std::uint8_t> y;
  std::vector<std::uint8_t> truth;
};

// grid searches minimizing summed (FPR + FNR) over the validation instances;
// ties prefer the smaller parameter
ComaConfig tune_coma(std::span<const LabeledInstance> val,
                     std::span<const double> threshold_grid);
DdConfig tune_dd(std::span<const LabeledInstance> val, int max_slack);

}  // namespace gtsi
