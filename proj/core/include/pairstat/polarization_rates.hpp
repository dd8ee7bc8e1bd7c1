#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "pairstat/detection.hpp"
#include "pairstat/distributions.hpp"

namespace pairstat {

/// Analyzer setting: signal polarizer at H, idler at H (fringe peak),
/// V (fringe bottom) or the diagonal + state (basis mismatch).
enum class Setting { HH, HV, Hplus };

/// How the idler's |x-k,k> state is projected onto the diagonal basis for
/// indistinguishable pairs.
enum class HplusModel {
  Coherent,     ///< single-mode beam-splitter transform of the Fock state (default)
  Independent,  ///< every idler photon independently routed to + with probability 1/2
};

enum class RateMethod { ExactSeries, ClosedForm, Oracle };

std::string_view to_string(Setting setting) noexcept;
std::string_view to_string(HplusModel model) noexcept;
std::string_view to_string(RateMethod method) noexcept;
std::optional<HplusModel> parse_hplus_model(std::string_view name) noexcept;

/// A truncated series together with how it was truncated. tail_bound bounds
/// the omitted part whenever every per-x term is a probability (Exact
/// detectors).
struct SeriesValue {
  double value = 0.0;
  int truncation_used = 0;
  double tail_bound = 0.0;
};

/// Coincidence and single-count probabilities per pulse.
struct RateReport {
  double r_hh = 0.0;
  double r_hv = 0.0;
  double r_hplus = 0.0;
  double single_s = 0.0;
  double single_i = 0.0;
  RateMethod method = RateMethod::ExactSeries;
  int truncation_used = 0;
  HplusModel hplus_model = HplusModel::Coherent;
};

/// Coincidence probability given exactly x pairs. Throws UnsupportedSetting
/// for correlated (non-entangled) kinds.
double per_x_coincidence(SourceKind kind, Setting setting, int x, const DetectorModel& det_s,
                         const DetectorModel& det_i, HplusModel model = HplusModel::Coherent);

/// Single-count probability given exactly x pairs. Entangled kinds are
/// measured behind an H polarizer; correlated kinds without polarizer.
double per_x_single(SourceKind kind, int x, const DetectorModel& det);

/// sum_x pmf(x) * per_x_coincidence(x) up to the certified truncation index.
SeriesValue coincidence_rate(const PairSource& source, Setting setting,
                             const DetectorModel& det_s, const DetectorModel& det_i,
                             const TruncationPolicy& policy = {},
                             HplusModel model = HplusModel::Coherent);

SeriesValue single_rate(const PairSource& source, const DetectorModel& det,
                        const TruncationPolicy& policy = {});

/// All five exact-series rates of an entangled source, sharing one truncation.
RateReport exact_rates(const PairSource& source, const DetectorModel& det_s,
                       const DetectorModel& det_i, const TruncationPolicy& policy = {},
                       HplusModel model = HplusModel::Coherent);

/// Small-α closed forms with linearized dark counts.
RateReport closed_form_rates(SourceKind kind, double mu, double alpha_s, double alpha_i,
                             double dark_s = 0.0, double dark_i = 0.0);

/// 2^-n C(n, y) for y = 0..n.
std::vector<double> binomial_half_row(int n);

/// Distribution of the number p of +-polarized photons when the idler Fock
/// state |x-k, k> (x-k H photons, k V photons) is analyzed in the diagonal
/// basis. Entry p is P(p), p = 0..x.
std::vector<double> plus_photon_distribution(int x, int k);

}  // namespace pairstat
