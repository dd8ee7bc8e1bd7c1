#pragma once

#include <optional>
#include <string_view>

#include "pairstat/detection.hpp"
#include "pairstat/distributions.hpp"
#include "pairstat/polarization_rates.hpp"

namespace pairstat {

/// Output ports of the two 1-bit delay interferometers. μ for every
/// time-bin quantity counts pairs per two time slots.
enum class TimebinPorts {
  aa,     ///< fringe peak
  ab,     ///< fringe bottom
  aplus,  ///< basis mismatch
};

std::string_view to_string(TimebinPorts ports) noexcept;

/// Polarization setting the time-bin measurement maps onto.
Setting polarization_equivalent(TimebinPorts ports) noexcept;

/// Halves the collection efficiency; dark counts stay per slot.
DetectorModel halve_collection(const DetectorModel& det) noexcept;

/// Coincidence probability of the central time slot. ExactSeries evaluates
/// the polarization series with α → α/2 on both arms; ClosedForm uses the
/// small-α expressions with dark counts. Only entangled kinds.
double timebin_rate(SourceKind kind, TimebinPorts ports, double mu, const DetectorModel& det_s,
                    const DetectorModel& det_i, RateMethod method,
                    const TruncationPolicy& policy = {}, HplusModel model = HplusModel::Coherent);

/// Single-pair coincidence probability at port aa with unit collection,
/// (1 + cos(θs + θi))/16.
double fringe_per_pair(double phase_sum) noexcept;

}  // namespace pairstat
