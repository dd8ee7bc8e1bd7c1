#include "pairstat/validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pairstat/metrics.hpp"
#include "pairstat/timebin.hpp"

namespace pairstat {

using oracle::Quantity;

namespace {

bool depends_on_model(SourceKind kind, Quantity q) {
  return kind == SourceKind::IndisEntangled && (q == Quantity::Hplus || q == Quantity::TimebinAplus);
}

}  // namespace

double series_rate(const PairSource& source, Quantity q, const DetectorModel& det_s,
                   const DetectorModel& det_i, const TruncationPolicy& policy, HplusModel model) {
  switch (q) {
    case Quantity::HH: return coincidence_rate(source, Setting::HH, det_s, det_i, policy, model).value;
    case Quantity::HV: return coincidence_rate(source, Setting::HV, det_s, det_i, policy, model).value;
    case Quantity::Hplus: return coincidence_rate(source, Setting::Hplus, det_s, det_i, policy, model).value;
    case Quantity::SingleS: return single_rate(source, det_s, policy).value;
    case Quantity::SingleI: return single_rate(source, det_i, policy).value;
    case Quantity::CarMatched:
    case Quantity::CarUnmatched: {
      try {
        const CarResult r = car(source, det_s, det_i, policy, RateMethod::ExactSeries);
        return q == Quantity::CarMatched ? r.matched_rate : r.unmatched_rate;
      } catch (const std::domain_error&) {
        return 0.0;  // no singles on one arm, so no coincidences either
      }
    }
    case Quantity::TimebinAA:
      return timebin_rate(source.kind(), TimebinPorts::aa, source.mu(), det_s, det_i,
                          RateMethod::ExactSeries, policy, model);
    case Quantity::TimebinAB:
      return timebin_rate(source.kind(), TimebinPorts::ab, source.mu(), det_s, det_i,
                          RateMethod::ExactSeries, policy, model);
    case Quantity::TimebinAplus:
      return timebin_rate(source.kind(), TimebinPorts::aplus, source.mu(), det_s, det_i,
                          RateMethod::ExactSeries, policy, model);
  }
  throw std::invalid_argument("unknown quantity");
}

std::vector<Quantity> quantities_for(SourceKind kind) {
  std::vector<Quantity> out;
  for (auto q : {Quantity::HH, Quantity::HV, Quantity::Hplus, Quantity::SingleS, Quantity::SingleI,
                 Quantity::CarMatched, Quantity::CarUnmatched, Quantity::TimebinAA,
                 Quantity::TimebinAB, Quantity::TimebinAplus}) {
    if (oracle::supports(kind, q)) out.push_back(q);
  }
  return out;
}

bool ValidationReport::all_pass() const noexcept {
  for (const auto& r : rows) {
    if (!r.pass()) return false;
  }
  return true;
}

ValidationReport validate_grid(const ValidationConfig& config) {
  config.policy.validate();
  if (config.models.empty()) throw std::invalid_argument("at least one H+ model is required");
  ValidationReport report;
  for (SourceKind kind : config.kinds) {
    for (double mu : config.mus) {
      const PairSource source(kind, mu);
      const int depth =
          std::min(config.enumeration_x_max, oracle::enumeration_depth(source, config.enumeration_tail));
      for (double alpha : config.alphas) {
        for (double dark : config.darks) {
          const DetectorModel det{alpha, dark, ClickModel::Exact};
          det.validate();
          for (Quantity q : quantities_for(kind)) {
            const std::size_t n_models = depends_on_model(kind, q) ? config.models.size() : 1;
            for (std::size_t m = 0; m < n_models; ++m) {
              ValidationRow row;
              row.kind = kind;
              row.mu = mu;
              row.alpha = alpha;
              row.dark = dark;
              row.quantity = q;
              row.model = config.models[m];
              row.series = series_rate(source, q, det, det, config.policy, row.model);
              const auto e = oracle::enumerate_rate(source, q, det, det, depth, row.model);
              row.x_max = e.x_max;
              row.enumerated = e.value;
              // The series omits at most tail_epsilon per factor.
              const double series_tail =
                  (q == Quantity::CarUnmatched ? 2.0 : 1.0) * config.policy.tail_epsilon;
              row.tolerance = config.abs_tolerance + e.tail_bound + series_tail;
              row.enumeration_pass = std::abs(row.series - row.enumerated) <= row.tolerance;
              if (config.mc_trials > 0) {
                row.mc = oracle::mc_rate(source, q, det, det, config.mc_trials, config.seed, row.model,
                                         config.workers);
                const double diff = row.mc->mean - row.series;
                if (row.mc->std_error > 0.0) {
                  row.z = diff / row.mc->std_error;
                } else {
                  row.z = diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
                }
                row.mc_pass = std::abs(row.z) <= config.max_z;
              }
              report.rows.push_back(row);
            }
          }
        }
      }
    }
  }
  return report;
}

}  // namespace pairstat
