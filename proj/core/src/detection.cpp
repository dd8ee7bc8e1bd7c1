#include "pairstat/detection.hpp"

#include <cmath>
#include <stdexcept>

namespace pairstat {

void DetectorModel::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("collection efficiency must lie in [0,1]");
  }
  if (!(dark >= 0.0 && dark < 1.0)) {
    throw std::invalid_argument("dark-count probability must lie in [0,1)");
  }
}

double click_prob(const DetectorModel& det, int photons) {
  if (photons < 0) throw std::invalid_argument("photon number must be >= 0");
  if (det.mode == ClickModel::Linearized) return photons * det.alpha + det.dark;
  if (photons == 0) return det.dark;
  if (det.alpha >= 1.0) return 1.0;
  // 1 - (1-d)(1-α)^x written to keep precision when the click is rare.
  const double log_miss = std::log1p(-det.dark) + photons * std::log1p(-det.alpha);
  return -std::expm1(log_miss);
}

std::vector<double> click_table(const DetectorModel& det, int max_photons) {
  if (max_photons < 0) throw std::invalid_argument("max_photons must be >= 0");
  det.validate();
  std::vector<double> table(static_cast<std::size_t>(max_photons) + 1);
  for (int n = 0; n <= max_photons; ++n) table[n] = click_prob(det, n);
  return table;
}

}  // namespace pairstat
