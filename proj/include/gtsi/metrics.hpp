#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gtsi/errors.hpp"

namespace gtsi {

// Classification rule everywhere: declare positive iff xhat >= threshold.
struct Metrics {
  long tp = 0, fp = 0, tn = 0, fn = 0;
  double fpr = 0.0;                 // fp / (fp + tn); 0 when no true negatives
  std::optional<double> fnr;        // fn / (fn + tp); absent when no true positives
  double total_error = 0.0;         // fpr + fnr (fnr treated as 0 when absent)
  bool success = false;             // exact recovery: fp == 0 and fn == 0
};

Metrics confusion(std::span<const double> xhat, std::span<const std::uint8_t> truth,
                  double threshold);

struct RocPoint {
  double threshold = 0.0;
  double fpr = 0.0;
  std::optional<double> fnr;
};

// 0, step, 2*step, ..., 1 (the endpoint is always included)
std::vector<double> threshold_grid(double step);

std::vector<RocPoint> roc_sweep(std::span<const double> xhat,
                                std::span<const std::uint8_t> truth,
                                std::span<const double> thresholds);

struct OperatingPoint {
  double threshold = 0.0;
  double fpr = 0.0;
  double fnr = 0.0;
  double total_error = 0.0;
};

// Grid point minimizing fpr + fnr (absent fnr counts as 0). Ties go to the
// lower FNR; a contiguous run of fully tied points returns its midpoint
// threshold, which keeps the selection stable when the posterior mass is
// saturated near 0 and 1 and the error curve has flat valleys.
OperatingPoint select_operating_point(std::span<const RocPoint> sweep);

// fraction of instances with exact recovery
double success_probability(std::span<const Metrics> runs);

double mean(std::span<const double> xs);
double median(std::vector<double> xs);  // by value: sorts a copy

}  // namespace gtsi
