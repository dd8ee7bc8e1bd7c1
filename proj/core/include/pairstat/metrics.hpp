#pragma once

#include <optional>
#include <string_view>

#include "pairstat/detection.hpp"
#include "pairstat/distributions.hpp"
#include "pairstat/polarization_rates.hpp"

namespace pairstat {

/// Two-photon-interference fringe quality.
struct VisibilityResult {
  double visibility = 1.0;  ///< (R_HH - R_HV)/(R_HH + R_HV)
  double contrast = 0.0;    ///< R_HH / R_HV, +infinity when R_HV = 0
  RateMethod method = RateMethod::ExactSeries;
};

/// Throws std::domain_error if both rates are zero.
VisibilityResult visibility_from_rates(double r_peak, double r_bottom, RateMethod method);

/// From the exact HH/HV series. Entangled kinds only. A source with μ = 0 and
/// no dark counts reports the μ→0 limit (visibility 1, infinite contrast).
VisibilityResult visibility_exact(const PairSource& source, const DetectorModel& det_s,
                                  const DetectorModel& det_i, const TruncationPolicy& policy = {});

/// Loss-independent small-α limit: 1/(1+μ), 1+2/μ (distinguishable) and
/// (μ+2)/(3μ+2), 2+2/μ (indistinguishable).
VisibilityResult visibility_approx(SourceKind kind, double mu);

/// From the closed-form rates including dark counts.
VisibilityResult visibility_closed_form(SourceKind kind, double mu, const DetectorModel& det_s,
                                        const DetectorModel& det_i);

/// Coincidence-to-accidental ratio of a correlated pair source.
struct CarResult {
  double matched_rate = 0.0;
  double unmatched_rate = 0.0;
  double car = 0.0;
};

/// mode is ExactSeries (threshold-detector series) or ClosedForm (small α,
/// linearized dark counts). Correlated kinds only (UnsupportedSetting
/// otherwise); throws std::domain_error when the unmatched rate is zero.
CarResult car(const PairSource& source, const DetectorModel& det_s, const DetectorModel& det_i,
              const TruncationPolicy& policy, RateMethod mode);

enum class Objective {
  MaxVisibility,
  MaxConcurrence,
  MaxCoincidenceTimesVisibility,
};

std::string_view to_string(Objective objective) noexcept;
std::optional<Objective> parse_objective(std::string_view name) noexcept;

struct MuRange {
  double lo = 1e-4;
  double hi = 1.0;
};

struct OptimizeOptions {
  int scan_points = 65;           ///< log-spaced samples for bracketing and the unimodality check
  double relative_tolerance = 1e-6;
  bool exact_refinement = false;  ///< re-optimize near μ* on the exact series
  TruncationPolicy policy{};      ///< used by the exact refinement only
  HplusModel model = HplusModel::Coherent;
};

struct OptimizeResult {
  double mu = 0.0;
  double value = 0.0;
  bool not_unimodal = false;  ///< scanned objective had more than one local maximum
  RateMethod method = RateMethod::ClosedForm;
};

/// Objective evaluated on the closed-form rates.
double objective_value(SourceKind kind, Objective objective, double mu, const DetectorModel& det_s,
                       const DetectorModel& det_i);

/// Objective evaluated on the exact series.
double objective_value_exact(SourceKind kind, Objective objective, double mu,
                             const DetectorModel& det_s, const DetectorModel& det_i,
                             const TruncationPolicy& policy = {},
                             HplusModel model = HplusModel::Coherent);

/// Maximizes the objective over μ ∈ [range.lo, range.hi] by golden-section
/// search in log μ. If the maximum lies on a bracket end, that end is
/// returned exactly.
OptimizeResult optimize_mu(SourceKind kind, const DetectorModel& det_s, const DetectorModel& det_i,
                           Objective objective, MuRange range, const OptimizeOptions& options = {});

}  // namespace pairstat
