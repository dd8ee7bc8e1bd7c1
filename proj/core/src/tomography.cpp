#include "pairstat/tomography.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pairstat/errors.hpp"

namespace pairstat {

namespace {

using Matrix4c = Eigen::Matrix4cd;

Matrix4c to_eigen(const DensityMatrix::Entries& e) {
  Matrix4c m;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) m(r, c) = e[r * 4 + c];
  return m;
}

DensityMatrix::Entries from_eigen(const Matrix4c& m) {
  DensityMatrix::Entries e;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) e[r * 4 + c] = m(r, c);
  return e;
}

std::array<Complex, 4> product_state(const PolarizationState& s, const PolarizationState& i) {
  return {s[0] * i[0], s[0] * i[1], s[1] * i[0], s[1] * i[1]};
}

// Pauli matrices I, X, Y, Z.
Eigen::Matrix2cd pauli(int which) {
  const Complex j(0.0, 1.0);
  Eigen::Matrix2cd p;
  switch (which) {
    case 0: p << 1, 0, 0, 1; break;
    case 1: p << 0, 1, 1, 0; break;
    case 2: p << 0, -j, j, 0; break;
    default: p << 1, 0, 0, -1; break;
  }
  return p;
}

Matrix4c kron(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  Matrix4c out;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) out.block<2, 2>(2 * r, 2 * c) = a(r, c) * b;
  return out;
}

const std::array<Matrix4c, 16>& pauli_basis() {
  static const std::array<Matrix4c, 16> basis = [] {
    std::array<Matrix4c, 16> b;
    for (int a = 0; a < 4; ++a)
      for (int c = 0; c < 4; ++c) b[a * 4 + c] = kron(pauli(a), pauli(c));
    return b;
  }();
  return basis;
}

const Matrix4c& yy() {
  static const Matrix4c m = kron(pauli(2), pauli(2));
  return m;
}

Matrix4c hermitian_sqrt(const Matrix4c& m) {
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(m);
  Eigen::Vector4d ev = es.eigenvalues();
  const double cutoff = 16.0 * std::numeric_limits<double>::epsilon() * std::max(ev.maxCoeff(), 0.0);
  for (int k = 0; k < 4; ++k) ev(k) = ev(k) > cutoff ? std::sqrt(ev(k)) : 0.0;
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

constexpr double kClipThreshold = -1e-10;

}  // namespace

namespace polarization {
PolarizationState H() noexcept { return {1.0, 0.0}; }
PolarizationState V() noexcept { return {0.0, 1.0}; }
PolarizationState D() noexcept {
  const double s = 1.0 / std::sqrt(2.0);
  return {s, s};
}
PolarizationState L() noexcept {
  const double s = 1.0 / std::sqrt(2.0);
  return {Complex(s, 0.0), Complex(0.0, s)};
}
PolarizationState R() noexcept {
  const double s = 1.0 / std::sqrt(2.0);
  return {Complex(s, 0.0), Complex(0.0, -s)};
}
}  // namespace polarization

std::span<const ProjectionSetting, 16> standard_projections() {
  using namespace polarization;
  static const std::array<ProjectionSetting, 16> table{{
      {"HH", H(), H()}, {"HV", H(), V()}, {"VV", V(), V()}, {"VH", V(), H()},
      {"RH", R(), H()}, {"RV", R(), V()}, {"DV", D(), V()}, {"DH", D(), H()},
      {"DR", D(), R()}, {"DD", D(), D()}, {"RD", R(), D()}, {"HD", H(), D()},
      {"VD", V(), D()}, {"VL", V(), L()}, {"HL", H(), L()}, {"RL", R(), L()},
  }};
  return std::span<const ProjectionSetting, 16>(table);
}

DensityMatrix::DensityMatrix() {
  m_.fill(0.0);
  for (int k = 0; k < 4; ++k) m_[k * 5] = 0.25;
}

double DensityMatrix::trace() const noexcept {
  return m_[0].real() + m_[5].real() + m_[10].real() + m_[15].real();
}

std::array<double, 4> DensityMatrix::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(to_eigen(m_), Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return {ev(0), ev(1), ev(2), ev(3)};
}

DensityMatrix DensityMatrix::from_entries(const Entries& entries, double tol) {
  const Matrix4c m = to_eigen(entries);
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > tol) {
    throw std::invalid_argument("density matrix is not Hermitian");
  }
  if (std::abs(m.trace() - Complex(1.0, 0.0)) > tol) {
    throw std::invalid_argument("density matrix trace is not 1");
  }
  DensityMatrix out(from_eigen(0.5 * (m + m.adjoint())), 0.0);
  if (out.eigenvalues()[0] < -tol) {
    throw std::invalid_argument("density matrix is not positive semidefinite");
  }
  return out;
}

DensityMatrix DensityMatrix::from_estimate(const Entries& raw) {
  Matrix4c m = to_eigen(raw);
  m = 0.5 * (m + m.adjoint()).eval();
  const double tr = m.trace().real();
  if (!(tr > 0.0)) throw std::invalid_argument("estimated density matrix has non-positive trace");
  m /= tr;

  Eigen::SelfAdjointEigenSolver<Matrix4c> es(m);
  if (es.eigenvalues().minCoeff() >= kClipThreshold) return DensityMatrix(from_eigen(m), 0.0);

  Eigen::Vector4d ev = es.eigenvalues();
  double clipped = 0.0;
  for (int k = 0; k < 4; ++k) {
    if (ev(k) < 0.0) {
      clipped -= ev(k);
      ev(k) = 0.0;
    }
  }
  ev /= ev.sum();
  const Matrix4c fixed = es.eigenvectors() * ev.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
  return DensityMatrix(from_eigen(fixed), clipped);
}

DensityMatrix DensityMatrix::pure(const std::array<Complex, 4>& psi) {
  double norm2 = 0.0;
  for (const auto& a : psi) norm2 += std::norm(a);
  if (!(norm2 > 0.0)) throw std::invalid_argument("zero state vector");
  Entries e;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) e[r * 4 + c] = psi[r] * std::conj(psi[c]) / norm2;
  return DensityMatrix(e, 0.0);
}

double projection_probability(const DensityMatrix& rho, const ProjectionSetting& setting) {
  const auto psi = product_state(setting.signal, setting.idler);
  Complex acc = 0.0;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) acc += std::conj(psi[r]) * rho(r, c) * psi[c];
  return acc.real();
}

TomographyVector assemble_r(const RateReport& rates) {
  TomographyVector out;
  out.method = rates.method;
  for (int nu = 1; nu <= 16; ++nu) {
    double v = rates.r_hplus;
    if (nu == 1 || nu == 3 || nu == 10 || nu == 16) v = rates.r_hh;
    if (nu == 2 || nu == 4) v = rates.r_hv;
    out.r[nu - 1] = v;
  }
  return out;
}

TomographyVector assemble_r(const PairSource& source, const DetectorModel& det_s,
                            const DetectorModel& det_i, const TruncationPolicy& policy,
                            RateMethod method, HplusModel model) {
  RateReport rates;
  switch (method) {
    case RateMethod::ClosedForm:
      rates = closed_form_rates(source.kind(), source.mu(), det_s.alpha, det_i.alpha,
                                det_s.dark, det_i.dark);
      break;
    case RateMethod::ExactSeries:
      rates = exact_rates(source, det_s, det_i, policy, model);
      break;
    case RateMethod::Oracle:
      throw std::invalid_argument("assemble_r supports exact-series and closed-form rates only");
  }
  if (rates.r_hh == 0.0 && rates.r_hv == 0.0 && rates.r_hplus == 0.0) {
    if (source.mu() != 0.0) throw std::invalid_argument("all projection rates vanish");
    // μ→0 limit: projections of |Φ+>.
    rates.r_hh = 0.5;
    rates.r_hv = 0.0;
    rates.r_hplus = 0.25;
  }
  return assemble_r(rates);
}

DensityMatrix reconstruct(const std::array<double, 16>& r,
                          std::span<const ProjectionSetting, 16> projections) {
  if (std::all_of(r.begin(), r.end(), [](double v) { return v == 0.0; })) {
    throw std::invalid_argument("cannot reconstruct from an all-zero rate vector");
  }
  // r_ν = tr(ρ Π_ν) with ρ = Σ_j c_j σ_j over the 16 Pauli products; each
  // tr(σ_j Π_ν) = <ψ_ν|σ_j|ψ_ν> is real.
  const auto& basis = pauli_basis();
  Eigen::Matrix<double, 16, 16> design;
  for (int nu = 0; nu < 16; ++nu) {
    const auto psi_arr = product_state(projections[nu].signal, projections[nu].idler);
    const Eigen::Vector4cd psi(psi_arr[0], psi_arr[1], psi_arr[2], psi_arr[3]);
    for (int j = 0; j < 16; ++j) design(nu, j) = (psi.adjoint() * basis[j] * psi)(0, 0).real();
  }
  Eigen::FullPivLU<Eigen::Matrix<double, 16, 16>> lu(design);
  lu.setThreshold(1e-10);
  if (lu.rank() < 16) {
    throw SingularSystem("projection set is not informationally complete (rank " +
                         std::to_string(lu.rank()) + " of 16)");
  }
  const Eigen::Matrix<double, 16, 1> rv = Eigen::Map<const Eigen::Matrix<double, 16, 1>>(r.data());
  const Eigen::Matrix<double, 16, 1> coeff = lu.solve(rv);

  Matrix4c rho = Matrix4c::Zero();
  for (int j = 0; j < 16; ++j) rho += coeff(j) * basis[j];
  return DensityMatrix::from_estimate(from_eigen(rho));
}

DensityMatrix closed_form_rho(SourceKind kind, double mu) {
  if (!is_entangled(kind)) throw UnsupportedSetting("closed-form density matrix needs an entangled source");
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw std::invalid_argument("mu must be finite and >= 0");
  double outer, inner, corner;
  if (kind == SourceKind::DisEntangled) {
    outer = (2.0 + mu) / (4.0 + 4.0 * mu);
    inner = mu / (4.0 + 4.0 * mu);
    corner = 1.0 / (2.0 + 2.0 * mu);
  } else {
    outer = (1.0 + mu) / (2.0 + 3.0 * mu);
    inner = mu / (4.0 + 6.0 * mu);
    corner = (2.0 + mu) / (4.0 + 6.0 * mu);
  }
  DensityMatrix::Entries e;
  e.fill(0.0);
  e[0] = outer;
  e[5] = inner;
  e[10] = inner;
  e[15] = outer;
  e[3] = corner;
  e[12] = corner;
  return DensityMatrix::from_entries(e, 1e-12);
}

double concurrence(const DensityMatrix& rho) {
  const Matrix4c m = to_eigen(rho.entries());
  const Matrix4c root = hermitian_sqrt(m);
  // √ρ̃ = (σy⊗σy) (√ρ)* (σy⊗σy), since σy⊗σy is a real unitary involution.
  const Matrix4c root_tilde = yy() * root.conjugate() * yy();
  Eigen::JacobiSVD<Matrix4c> svd(root * root_tilde);
  const Eigen::Vector4d s = svd.singularValues();  // descending
  return std::max(0.0, s(0) - s(1) - s(2) - s(3));
}

double x_state_concurrence(const DensityMatrix& rho) {
  const double a = std::abs(rho(0, 3)) - std::sqrt(std::max(0.0, rho(1, 1).real() * rho(2, 2).real()));
  const double b = std::abs(rho(1, 2)) - std::sqrt(std::max(0.0, rho(0, 0).real() * rho(3, 3).real()));
  return 2.0 * std::max({0.0, a, b});
}

double concurrence_closed_form(SourceKind kind, double mu) {
  if (!is_entangled(kind)) throw UnsupportedSetting("concurrence needs an entangled source");
  if (kind == SourceKind::DisEntangled) return std::max(0.0, (2.0 - mu) / (2.0 * (mu + 1.0)));
  return 2.0 / (2.0 + 3.0 * mu);
}

}  // namespace pairstat
