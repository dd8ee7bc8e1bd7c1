#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pairstat/oracle.hpp"

namespace pairstat {

/// The analytic series value of an oracle quantity.
double series_rate(const PairSource& source, oracle::Quantity q, const DetectorModel& det_s,
                   const DetectorModel& det_i, const TruncationPolicy& policy = {},
                   HplusModel model = HplusModel::Coherent);

/// Every quantity defined for `kind`, in enum order.
std::vector<oracle::Quantity> quantities_for(SourceKind kind);

struct ValidationConfig {
  std::vector<SourceKind> kinds{SourceKind::IndisEntangled, SourceKind::DisEntangled,
                                SourceKind::DisCorrelated, SourceKind::ThermalCorrelated};
  std::vector<double> mus{0.05, 0.2};
  std::vector<double> alphas{0.05, 0.5};
  std::vector<double> darks{0.0, 1e-3};
  std::vector<HplusModel> models{HplusModel::Coherent, HplusModel::Independent};
  TruncationPolicy policy{};
  int enumeration_x_max = oracle::kMaxEnumerationPairs;  ///< upper limit on the depth
  double enumeration_tail = 1e-13;  ///< enumeration stops once the omitted mass is below this
  double abs_tolerance = 1e-9;   ///< series vs enumeration, on top of both tail bounds
  std::uint64_t mc_trials = 0;   ///< 0 skips the Monte-Carlo comparison
  std::uint64_t seed = 1;
  double max_z = 4.0;
  unsigned workers = 0;
};

struct ValidationRow {
  SourceKind kind{};
  double mu = 0.0;
  double alpha = 0.0;
  double dark = 0.0;
  oracle::Quantity quantity{};
  HplusModel model = HplusModel::Coherent;
  double series = 0.0;
  double enumerated = 0.0;
  int x_max = 0;           ///< enumeration depth used
  double tolerance = 0.0;  ///< abs_tolerance + series tail + enumeration tail
  bool enumeration_pass = false;
  std::optional<oracle::McEstimate> mc;
  double z = 0.0;
  bool mc_pass = true;

  bool pass() const noexcept { return enumeration_pass && mc_pass; }
};

struct ValidationReport {
  std::vector<ValidationRow> rows;
  bool all_pass() const noexcept;
};

/// Compares the series against the enumeration oracle (and optionally the
/// Monte-Carlo oracle) over the configured grid. Both detectors share α and d.
ValidationReport validate_grid(const ValidationConfig& config);

}  // namespace pairstat
