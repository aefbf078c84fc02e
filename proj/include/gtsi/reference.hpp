#pragma once

#include "gtsi/gamp.hpp"

namespace gtsi::reference {

// Serial reference engine: same update rules as gamp_run but written against a
// dense 0/1 expansion of the pooling matrix with plain nested loops and no
// OpenMP. Kept as an independent implementation for tests (results must match
// the sparse parallel engine bit for bit, since per-element summation order is
// identical) and as the baseline side of the benchmark tool.
GampResult gamp_run_dense(const PoolingMatrix& A, std::span<const std::uint8_t> y,
                          const NoiseModel& noise, const Denoiser& denoiser,
                          const GampConfig& cfg);

}  // namespace gtsi::reference
