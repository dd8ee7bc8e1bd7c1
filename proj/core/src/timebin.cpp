#include "pairstat/timebin.hpp"

#include <cmath>
#include <stdexcept>

#include "pairstat/errors.hpp"

namespace pairstat {

namespace {

double closed_form(SourceKind kind, TimebinPorts ports, double mu, double as, double ai,
                   double ds, double di) {
  const double aa = as * ai;
  if (kind == SourceKind::DisEntangled) {
    const double accidental = (0.25 * mu * as + ds) * (0.25 * mu * ai + di);
    switch (ports) {
      case TimebinPorts::aa: return mu * aa / 8.0 + accidental;
      case TimebinPorts::ab: return accidental;
      case TimebinPorts::aplus: return mu * aa / 16.0 + accidental;
    }
  }
  const double cross = 0.25 * mu * as * di + 0.25 * mu * ai * ds + ds * di;
  switch (ports) {
    case TimebinPorts::aa: return aa * (mu * mu / 8.0 + mu / 8.0) + cross;
    case TimebinPorts::ab: return mu * mu * aa / 16.0 + cross;
    case TimebinPorts::aplus: return aa * (3.0 * mu * mu / 32.0 + mu / 16.0) + cross;
  }
  return 0.0;
}

}  // namespace

std::string_view to_string(TimebinPorts ports) noexcept {
  switch (ports) {
    case TimebinPorts::aa: return "aa";
    case TimebinPorts::ab: return "ab";
    case TimebinPorts::aplus: return "a+";
  }
  return "?";
}

Setting polarization_equivalent(TimebinPorts ports) noexcept {
  switch (ports) {
    case TimebinPorts::aa: return Setting::HH;
    case TimebinPorts::ab: return Setting::HV;
    case TimebinPorts::aplus: return Setting::Hplus;
  }
  return Setting::HH;
}

DetectorModel halve_collection(const DetectorModel& det) noexcept {
  DetectorModel half = det;
  half.alpha = 0.5 * det.alpha;
  return half;
}

double timebin_rate(SourceKind kind, TimebinPorts ports, double mu, const DetectorModel& det_s,
                    const DetectorModel& det_i, RateMethod method, const TruncationPolicy& policy,
                    HplusModel model) {
  if (!is_entangled(kind)) throw UnsupportedSetting("time-bin rates need an entangled source");
  const PairSource source(kind, mu);
  switch (method) {
    case RateMethod::ExactSeries:
      return coincidence_rate(source, polarization_equivalent(ports), halve_collection(det_s),
                              halve_collection(det_i), policy, model)
          .value;
    case RateMethod::ClosedForm:
      det_s.validate();
      det_i.validate();
      return closed_form(kind, ports, mu, det_s.alpha, det_i.alpha, det_s.dark, det_i.dark);
    case RateMethod::Oracle:
      break;
  }
  throw std::invalid_argument("timebin_rate supports exact-series and closed-form methods only");
}

double fringe_per_pair(double phase_sum) noexcept {
  // |(e^{iθ} + 1)/(4√2)|^2, the |2,a>_s|2,a>_i amplitude squared.
  return (1.0 + std::cos(phase_sum)) / 16.0;
}

}  // namespace pairstat
