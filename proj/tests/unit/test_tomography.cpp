#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "frozen.hpp"
#include "pairstat/errors.hpp"
#include "pairstat/tomography.hpp"

using namespace pairstat;

namespace {

constexpr SourceKind kEntangled[] = {SourceKind::IndisEntangled, SourceKind::DisEntangled};

double max_diff(const DensityMatrix& a, const DensityMatrix& b) {
  double worst = 0.0;
  for (int k = 0; k < 16; ++k) worst = std::max(worst, std::abs(a.entries()[k] - b.entries()[k]));
  return worst;
}

std::array<double, 16> rates_of(const DensityMatrix& rho, double scale = 1.0) {
  std::array<double, 16> r{};
  const auto proj = standard_projections();
  for (int nu = 0; nu < 16; ++nu) r[nu] = scale * projection_probability(rho, proj[nu]);
  return r;
}

// Random mixed state: G G† / tr for a complex Gaussian G.
DensityMatrix random_state(std::mt19937_64& gen) {
  std::normal_distribution<double> n;
  Complex g[16];
  for (auto& z : g) z = Complex(n(gen), n(gen));
  DensityMatrix::Entries e;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      Complex acc = 0.0;
      for (int k = 0; k < 4; ++k) acc += g[r * 4 + k] * std::conj(g[c * 4 + k]);
      e[r * 4 + c] = acc;
    }
  return DensityMatrix::from_estimate(e);
}

const std::array<Complex, 4> kPhiPlus{1.0, 0.0, 0.0, 1.0};

}  // namespace

TEST_SUITE("tomography") {

TEST_CASE("projection order") {
  const char* labels[] = {"HH", "HV", "VV", "VH", "RH", "RV", "DV", "DH",
                          "DR", "DD", "RD", "HD", "VD", "VL", "HL", "RL"};
  const auto proj = standard_projections();
  for (int nu = 0; nu < 16; ++nu) CHECK(proj[nu].label == labels[nu]);
}

TEST_CASE("linear inversion recovers random states") {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 50; ++trial) {
    const DensityMatrix rho = random_state(gen);
    // overall scale (detection efficiency) drops out after normalization
    const DensityMatrix back = reconstruct(rates_of(rho, 3.7e-4));
    CHECK(max_diff(rho, back) <= 1e-12);
    CHECK(back.clipped_mass() == 0.0);
  }
}

TEST_CASE("reconstruction closes on the small-alpha states") {
  for (auto kind : kEntangled) {
    for (double mu : {0.0, 0.01, 0.3, 1.0, 5.0}) {
      const DetectorModel det{0.01, 0.0};
      const auto r = assemble_r(PairSource(kind, mu), det, det, {}, RateMethod::ClosedForm);
      const DensityMatrix rho = reconstruct(r);
      CAPTURE(mu);
      CHECK(max_diff(rho, closed_form_rho(kind, mu)) <= 1e-10);
      CHECK(concurrence(rho) == doctest::Approx(concurrence_closed_form(kind, mu)).epsilon(1e-10));
    }
  }
}

TEST_CASE("distinguishable state at mu = 0.3") {
  const DetectorModel det{0.01, 0.0};
  const auto r = assemble_r(PairSource(SourceKind::DisEntangled, 0.3), det, det, {}, RateMethod::ClosedForm);
  const DensityMatrix rho = reconstruct(r);
  CHECK(rho(0, 0).real() == doctest::Approx(frozen::kRhoDisMu03Diag).epsilon(1e-12));
  CHECK(rho(3, 3).real() == doctest::Approx(frozen::kRhoDisMu03Diag).epsilon(1e-12));
  CHECK(rho(1, 1).real() == doctest::Approx(frozen::kRhoDisMu03Off).epsilon(1e-12));
  CHECK(rho(2, 2).real() == doctest::Approx(frozen::kRhoDisMu03Off).epsilon(1e-12));
  CHECK(rho(0, 3).real() == doctest::Approx(frozen::kRhoDisMu03Corner).epsilon(1e-12));
  CHECK(rho(3, 0).real() == doctest::Approx(frozen::kRhoDisMu03Corner).epsilon(1e-12));
  CHECK(std::abs(rho(1, 2)) <= 1e-13);
  for (int k = 0; k < 16; ++k) CHECK(std::abs(rho.entries()[k].imag()) <= 1e-13);
  CHECK(concurrence(rho) == doctest::Approx(frozen::kConcDisMu03).epsilon(1e-12));
  CHECK(concurrence(closed_form_rho(SourceKind::IndisEntangled, 0.3)) ==
        doctest::Approx(frozen::kConcIndisMu03).epsilon(1e-12));
}

TEST_CASE("Bell state and the maximally mixed state") {
  const DensityMatrix bell = DensityMatrix::pure(kPhiPlus);
  CHECK(concurrence(bell) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(x_state_concurrence(bell) == doctest::Approx(1.0).epsilon(1e-15));
  const DensityMatrix mixed;
  CHECK(concurrence(mixed) == doctest::Approx(0.0));
  CHECK(mixed.trace() == 1.0);
  CHECK(concurrence(DensityMatrix::pure({1.0, 0.0, 0.0, 0.0})) <= 1e-12);
  // a product of superpositions is separable
  CHECK(concurrence(DensityMatrix::pure({0.5, 0.5, 0.5, 0.5})) <= 1e-7);
}

TEST_CASE("X-state shortcut agrees with the general formula") {
  for (auto kind : kEntangled) {
    for (double mu : {0.0, 0.1, 0.5, 1.5, 2.0, 4.0}) {
      const DensityMatrix rho = closed_form_rho(kind, mu);
      CAPTURE(mu);
      CHECK(std::abs(concurrence(rho) - x_state_concurrence(rho)) <= 1e-12);
      CHECK(std::abs(concurrence(rho) - concurrence_closed_form(kind, mu)) <= 1e-12);
    }
  }
  CHECK(concurrence_closed_form(SourceKind::DisEntangled, 3.0) == 0.0);
}

TEST_CASE("exact-series states stay positive and keep the concurrence ordering") {
  const DetectorModel det{0.1, 0.0};
  for (int k = 1; k <= 20; ++k) {
    const double mu = 0.1 * k;
    const DensityMatrix dis =
        reconstruct(assemble_r(PairSource(SourceKind::DisEntangled, mu), det, det, {}, RateMethod::ExactSeries));
    const DensityMatrix indis =
        reconstruct(assemble_r(PairSource(SourceKind::IndisEntangled, mu), det, det, {}, RateMethod::ExactSeries));
    CAPTURE(mu);
    CHECK(dis.eigenvalues()[0] >= -1e-12);
    CHECK(indis.eigenvalues()[0] >= -1e-12);
    CHECK(dis.clipped_mass() == 0.0);
    CHECK(concurrence(indis) > concurrence(dis));
  }
}

TEST_CASE("rate assembly") {
  RateReport rates;
  rates.r_hh = 3.0;
  rates.r_hv = 1.0;
  rates.r_hplus = 2.0;
  rates.method = RateMethod::ExactSeries;
  const TomographyVector v = assemble_r(rates);
  for (int nu = 1; nu <= 16; ++nu) {
    const double expected = (nu == 1 || nu == 3 || nu == 10 || nu == 16) ? 3.0 : (nu == 2 || nu == 4) ? 1.0 : 2.0;
    CHECK(v.r[nu - 1] == expected);
  }
  CHECK(v.method == RateMethod::ExactSeries);

  // μ = 0: the projections of |Φ+>
  const DetectorModel det{0.1, 0.0};
  const auto zero = assemble_r(PairSource(SourceKind::IndisEntangled, 0.0), det, det, {}, RateMethod::ExactSeries);
  const auto bell = rates_of(DensityMatrix::pure(kPhiPlus));
  for (int nu = 0; nu < 16; ++nu) CHECK(zero.r[nu] == doctest::Approx(bell[nu]).epsilon(1e-15));
  CHECK(concurrence(reconstruct(zero)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(reconstruct(std::array<double, 16>{}), std::invalid_argument);

  std::array<ProjectionSetting, 16> repeated;
  for (auto& p : repeated) p = {"HH", polarization::H(), polarization::H()};
  CHECK_THROWS_AS(reconstruct(rates_of(DensityMatrix()), std::span<const ProjectionSetting, 16>(repeated)),
                  SingularSystem);

  DensityMatrix::Entries e{};
  e[0] = 0.5;
  e[15] = 0.5;
  CHECK_NOTHROW(DensityMatrix::from_entries(e));
  auto bad = e;
  bad[1] = Complex(0.1, 0.0);  // not Hermitian
  CHECK_THROWS_AS(DensityMatrix::from_entries(bad), std::invalid_argument);
  bad = e;
  bad[0] = 0.7;  // trace 1.2
  CHECK_THROWS_AS(DensityMatrix::from_entries(bad), std::invalid_argument);
  bad = e;
  bad[0] = 1.2;
  bad[15] = -0.2;  // negative eigenvalue
  CHECK_THROWS_AS(DensityMatrix::from_entries(bad), std::invalid_argument);

  const DensityMatrix clipped = DensityMatrix::from_estimate(bad);
  CHECK(clipped.clipped_mass() == doctest::Approx(0.2));
  CHECK(clipped.eigenvalues()[0] >= 0.0);
  CHECK(clipped.trace() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(DensityMatrix::from_estimate(DensityMatrix::Entries{}), std::invalid_argument);
  CHECK_THROWS_AS(DensityMatrix::pure({0.0, 0.0, 0.0, 0.0}), std::invalid_argument);

  CHECK_THROWS_AS(closed_form_rho(SourceKind::DisCorrelated, 0.1), UnsupportedSetting);
  CHECK_THROWS_AS(closed_form_rho(SourceKind::DisEntangled, -1.0), std::invalid_argument);
  const DetectorModel det{0.1, 0.0};
  CHECK_THROWS_AS(assemble_r(PairSource(SourceKind::DisEntangled, 0.1), det, det, {}, RateMethod::Oracle),
                  std::invalid_argument);
}

}  // TEST_SUITE
