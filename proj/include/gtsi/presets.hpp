#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gtsi/contact_sim.hpp"
#include "gtsi/pooling.hpp"

namespace gtsi {

// Named simulation presets producing a chosen average infection prevalence
// over the weekly test days (mean across seeds). Prevalence is driven by the
// cross-clique contact level; lambda0 and the remaining dynamics are shared.
// The p_cross values were fitted with tools/calibrate.
SimConfig preset_sim(const std::string& name);

// (name, target mean sparsity) for all shipped presets
const std::vector<std::pair<std::string, double>>& sparsity_preset_targets();

// "asymmetric" (fp 0.001, fn 0.02) or "symmetric" (fp = fn = 0.01)
NoiseModel preset_noise(const std::string& name);

}  // namespace gtsi
