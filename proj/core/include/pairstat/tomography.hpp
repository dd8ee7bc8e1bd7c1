#pragma once

#include <array>
#include <complex>
#include <span>
#include <string_view>

#include "pairstat/detection.hpp"
#include "pairstat/distributions.hpp"
#include "pairstat/polarization_rates.hpp"

namespace pairstat {

using Complex = std::complex<double>;

/// Single-photon polarization state, amplitudes on {|H>, |V>}.
using PolarizationState = std::array<Complex, 2>;

namespace polarization {
PolarizationState H() noexcept;
PolarizationState V() noexcept;
PolarizationState D() noexcept;  ///< |+> = (|H> + |V>)/√2
PolarizationState L() noexcept;  ///< (|H> + i|V>)/√2
PolarizationState R() noexcept;  ///< (|H> - i|V>)/√2
}  // namespace polarization

/// A two-photon projection |signal>|idler>.
struct ProjectionSetting {
  std::string_view label;
  PolarizationState signal;
  PolarizationState idler;
};

/// The sixteen projections, in measurement order ν = 1..16 (index ν-1).
std::span<const ProjectionSetting, 16> standard_projections();

/// Coincidence rates for the sixteen standard projections.
struct TomographyVector {
  std::array<double, 16> r{};
  RateMethod method = RateMethod::ClosedForm;
};

/// Two-qubit density matrix in the basis {HH, HV, VH, VV} (signal first),
/// stored row-major. Always Hermitian with unit trace.
class DensityMatrix {
 public:
  using Entries = std::array<Complex, 16>;

  /// Maximally mixed state I/4.
  DensityMatrix();

  /// Validates Hermiticity, unit trace and positivity within `tol`;
  /// throws std::invalid_argument otherwise.
  static DensityMatrix from_entries(const Entries& entries, double tol = 1e-9);

  /// Turns a raw estimate into a state: Hermitian part, trace
  /// normalization, and clipping of eigenvalues below -1e-10 (recorded in
  /// clipped_mass()). Throws std::invalid_argument if the trace is not positive.
  static DensityMatrix from_estimate(const Entries& raw);

  /// |psi><psi| for a (not necessarily normalized) two-photon state vector.
  static DensityMatrix pure(const std::array<Complex, 4>& psi);

  Complex operator()(int row, int col) const noexcept { return m_[row * 4 + col]; }
  const Entries& entries() const noexcept { return m_; }
  double trace() const noexcept;

  /// Eigenvalues in ascending order.
  std::array<double, 4> eigenvalues() const;

  /// Negative eigenvalue mass removed while building the state (0 if none).
  double clipped_mass() const noexcept { return clipped_mass_; }

 private:
  explicit DensityMatrix(const Entries& m, double clipped) : m_(m), clipped_mass_(clipped) {}

  Entries m_;
  double clipped_mass_ = 0.0;
};

/// <ψ|ρ|ψ> for the projection's product state.
double projection_probability(const DensityMatrix& rho, const ProjectionSetting& setting);

/// Fills r_ν from the peak (HH), bottom (HV) and mismatch (H+) rates:
/// ν ∈ {1,3,10,16} → HH, ν ∈ {2,4} → HV, all others → H+.
/// With mu = 0 and no dark counts every rate vanishes; the μ→0 limit (the
/// |Φ+> projection probabilities) is returned instead.
TomographyVector assemble_r(const PairSource& source, const DetectorModel& det_s,
                            const DetectorModel& det_i, const TruncationPolicy& policy,
                            RateMethod method, HplusModel model = HplusModel::Coherent);

/// Same fill rule from an already computed rate report.
TomographyVector assemble_r(const RateReport& rates);

/// Linear-inversion reconstruction, trace normalized afterwards.
/// Throws SingularSystem if the projections are not informationally
/// complete and std::invalid_argument if all rates are zero.
DensityMatrix reconstruct(const std::array<double, 16>& r,
                          std::span<const ProjectionSetting, 16> projections = standard_projections());

inline DensityMatrix reconstruct(const TomographyVector& r) { return reconstruct(r.r); }

/// X-shaped small-α density matrices as functions of μ.
DensityMatrix closed_form_rho(SourceKind kind, double mu);

/// Wootters concurrence, from the singular values of √ρ·√ρ̃ (these are the
/// square roots of the eigenvalues of ρ·(σy⊗σy)ρ*(σy⊗σy)).
double concurrence(const DensityMatrix& rho);

/// 2·max(0, |ρ14| - √(ρ22ρ33), |ρ23| - √(ρ11ρ44)); exact for X-shaped states.
double x_state_concurrence(const DensityMatrix& rho);

/// Small-α concurrence: (2-μ)/(2(1+μ)) (clamped at 0) for distinguishable,
/// 2/(2+3μ) for indistinguishable pairs.
double concurrence_closed_form(SourceKind kind, double mu);

}  // namespace pairstat
