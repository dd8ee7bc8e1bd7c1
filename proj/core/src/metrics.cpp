#include "pairstat/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "pairstat/errors.hpp"
#include "pairstat/tomography.hpp"
#include "summation.hpp"

namespace pairstat {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool dark_free(const DetectorModel& s, const DetectorModel& i) { return s.dark == 0.0 && i.dark == 0.0; }

void require_entangled(SourceKind kind) {
  if (!is_entangled(kind)) throw UnsupportedSetting("visibility needs an entangled source");
}

using Objective1D = std::function<double(double)>;

// Maximizes f over [lo, hi] in log space; both ends are candidates.
double golden_section_max(const Objective1D& f, double lo, double hi, double rel_tol) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = std::log(lo), b = std::log(hi);
  double c = b - kInvPhi * (b - a), d = a + kInvPhi * (b - a);
  double fc = f(std::exp(c)), fd = f(std::exp(d));
  while (b - a > rel_tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(std::exp(c));
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(std::exp(d));
    }
  }
  return std::exp(0.5 * (a + b));
}

OptimizeResult maximize(const Objective1D& f, MuRange range, const OptimizeOptions& options) {
  const int n = std::max(options.scan_points, 3);
  std::vector<double> mus(n), vals(n);
  const double log_lo = std::log(range.lo), log_hi = std::log(range.hi);
  for (int k = 0; k < n; ++k) {
    mus[k] = k == 0 ? range.lo : k == n - 1 ? range.hi : std::exp(log_lo + (log_hi - log_lo) * k / (n - 1));
    vals[k] = f(mus[k]);
  }
  const int best = static_cast<int>(std::max_element(vals.begin(), vals.end()) - vals.begin());

  OptimizeResult result;
  auto slack = [](double v) { return 1e-12 * std::max(1.0, std::abs(v)); };
  for (int k = 1; k <= best; ++k) {
    if (vals[k] < vals[k - 1] - slack(vals[k - 1])) result.not_unimodal = true;
  }
  for (int k = best + 1; k < n; ++k) {
    if (vals[k] > vals[k - 1] + slack(vals[k - 1])) result.not_unimodal = true;
  }
  if (result.not_unimodal) {
    result.mu = mus[best];
    result.value = vals[best];
    return result;
  }

  const double lo = mus[std::max(best - 1, 0)];
  const double hi = mus[std::min(best + 1, n - 1)];
  const double mu = golden_section_max(f, lo, hi, options.relative_tolerance);
  result.mu = mu;
  result.value = f(mu);
  // The bracket ends of the whole range are returned exactly when they win.
  for (int end : {0, n - 1}) {
    if ((end == 0 && best <= 1) || (end == n - 1 && best >= n - 2)) {
      if (vals[end] >= result.value) {
        result.mu = mus[end];
        result.value = vals[end];
      }
    }
  }
  return result;
}

}  // namespace

VisibilityResult visibility_from_rates(double r_peak, double r_bottom, RateMethod method) {
  const double total = r_peak + r_bottom;
  if (!(total > 0.0)) throw std::domain_error("visibility undefined: no coincidences");
  VisibilityResult v;
  v.visibility = (r_peak - r_bottom) / total;
  v.contrast = r_bottom == 0.0 ? kInf : r_peak / r_bottom;
  v.method = method;
  return v;
}

VisibilityResult visibility_exact(const PairSource& source, const DetectorModel& det_s,
                                  const DetectorModel& det_i, const TruncationPolicy& policy) {
  require_entangled(source.kind());
  if (source.mu() == 0.0 && dark_free(det_s, det_i)) return {1.0, kInf, RateMethod::ExactSeries};
  const double hh = coincidence_rate(source, Setting::HH, det_s, det_i, policy).value;
  const double hv = coincidence_rate(source, Setting::HV, det_s, det_i, policy).value;
  return visibility_from_rates(hh, hv, RateMethod::ExactSeries);
}

VisibilityResult visibility_approx(SourceKind kind, double mu) {
  require_entangled(kind);
  if (!(mu >= 0.0)) throw std::invalid_argument("mu must be >= 0");
  VisibilityResult v;
  v.method = RateMethod::ClosedForm;
  if (kind == SourceKind::DisEntangled) {
    v.visibility = 1.0 / (1.0 + mu);
    v.contrast = 1.0 + 2.0 / mu;
  } else {
    v.visibility = (mu + 2.0) / (3.0 * mu + 2.0);
    v.contrast = 2.0 + 2.0 / mu;
  }
  return v;
}

VisibilityResult visibility_closed_form(SourceKind kind, double mu, const DetectorModel& det_s,
                                        const DetectorModel& det_i) {
  require_entangled(kind);
  if (mu == 0.0 && dark_free(det_s, det_i)) return {1.0, kInf, RateMethod::ClosedForm};
  const RateReport r = closed_form_rates(kind, mu, det_s.alpha, det_i.alpha, det_s.dark, det_i.dark);
  return visibility_from_rates(r.r_hh, r.r_hv, RateMethod::ClosedForm);
}

CarResult car(const PairSource& source, const DetectorModel& det_s, const DetectorModel& det_i,
              const TruncationPolicy& policy, RateMethod mode) {
  if (is_entangled(source.kind())) {
    throw UnsupportedSetting("CAR is defined for correlated (non-entangled) sources");
  }
  CarResult out;
  if (mode == RateMethod::ExactSeries) {
    const Truncation trunc = truncate(source, policy);
    const auto cs = click_table(det_s, trunc.x_max);
    const auto ci = click_table(det_i, trunc.x_max);
    detail::CompensatedSum matched, single_s, single_i;
    for (int x = 0; x <= trunc.x_max; ++x) {
      matched.add(trunc.pmf[x] * cs[x] * ci[x]);
      single_s.add(trunc.pmf[x] * cs[x]);
      single_i.add(trunc.pmf[x] * ci[x]);
    }
    out.matched_rate = matched.value();
    out.unmatched_rate = single_s.value() * single_i.value();
  } else if (mode == RateMethod::ClosedForm) {
    det_s.validate();
    det_i.validate();
    const double mu = source.mu();
    const double aa = det_s.alpha * det_i.alpha;
    const double side = (mu * det_s.alpha + det_s.dark) * (mu * det_i.alpha + det_i.dark);
    const double correlated = source.kind() == SourceKind::ThermalCorrelated ? mu * (mu + 1.0) * aa : mu * aa;
    out.matched_rate = correlated + side;
    out.unmatched_rate = side;
  } else {
    throw std::invalid_argument("car supports exact-series and closed-form modes only");
  }
  if (!(out.unmatched_rate > 0.0)) {
    throw std::domain_error("CAR undefined: unmatched-slot coincidence rate is zero");
  }
  out.car = out.matched_rate / out.unmatched_rate;
  return out;
}

std::string_view to_string(Objective objective) noexcept {
  switch (objective) {
    case Objective::MaxVisibility: return "visibility";
    case Objective::MaxConcurrence: return "concurrence";
    case Objective::MaxCoincidenceTimesVisibility: return "coincidence-visibility";
  }
  return "?";
}

std::optional<Objective> parse_objective(std::string_view name) noexcept {
  for (auto o : {Objective::MaxVisibility, Objective::MaxConcurrence,
                 Objective::MaxCoincidenceTimesVisibility}) {
    if (name == to_string(o)) return o;
  }
  return std::nullopt;
}

namespace {

double objective_from_rates(Objective objective, const RateReport& rates) {
  switch (objective) {
    case Objective::MaxVisibility:
      return visibility_from_rates(rates.r_hh, rates.r_hv, rates.method).visibility;
    case Objective::MaxConcurrence:
      return concurrence(reconstruct(assemble_r(rates)));
    case Objective::MaxCoincidenceTimesVisibility:
      return rates.r_hh * visibility_from_rates(rates.r_hh, rates.r_hv, rates.method).visibility;
  }
  return 0.0;
}

}  // namespace

double objective_value(SourceKind kind, Objective objective, double mu, const DetectorModel& det_s,
                       const DetectorModel& det_i) {
  require_entangled(kind);
  return objective_from_rates(
      objective, closed_form_rates(kind, mu, det_s.alpha, det_i.alpha, det_s.dark, det_i.dark));
}

double objective_value_exact(SourceKind kind, Objective objective, double mu,
                             const DetectorModel& det_s, const DetectorModel& det_i,
                             const TruncationPolicy& policy, HplusModel model) {
  require_entangled(kind);
  return objective_from_rates(objective, exact_rates(PairSource(kind, mu), det_s, det_i, policy, model));
}

OptimizeResult optimize_mu(SourceKind kind, const DetectorModel& det_s, const DetectorModel& det_i,
                           Objective objective, MuRange range, const OptimizeOptions& options) {
  require_entangled(kind);
  if (!(range.lo > 0.0 && range.lo < range.hi && std::isfinite(range.hi))) {
    throw std::invalid_argument("mu range must satisfy 0 < lo < hi");
  }
  det_s.validate();
  det_i.validate();
  OptimizeResult result = maximize(
      [&](double mu) { return objective_value(kind, objective, mu, det_s, det_i); }, range, options);
  if (!options.exact_refinement || result.not_unimodal) return result;

  const MuRange local{std::max(range.lo, 0.5 * result.mu), std::min(range.hi, 2.0 * result.mu)};
  OptimizeOptions local_opts = options;
  local_opts.scan_points = 9;
  OptimizeResult refined = maximize(
      [&](double mu) {
        return objective_value_exact(kind, objective, mu, det_s, det_i, options.policy, options.model);
      },
      local, local_opts);
  refined.method = RateMethod::ExactSeries;
  return refined;
}

}  // namespace pairstat
