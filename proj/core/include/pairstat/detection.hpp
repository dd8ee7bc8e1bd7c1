#pragma once

#include <vector>

namespace pairstat {

enum class ClickModel {
  Exact,       ///< 1 - (1-d)(1-α)^x
  Linearized,  ///< xα + d, small-α/d approximation; may exceed 1
};

/// Threshold (non photon-number-resolving) detector behind one arm.
struct DetectorModel {
  double alpha = 0.0;  ///< collection efficiency in [0,1], optics loss included
  double dark = 0.0;   ///< dark-count probability per gate, in [0,1)
  ClickModel mode = ClickModel::Exact;

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

/// Probability that the detector clicks when `photons` photons reach it.
double click_prob(const DetectorModel& det, int photons);

/// click_prob(det, 0..max_photons).
std::vector<double> click_table(const DetectorModel& det, int max_photons);

}  // namespace pairstat
