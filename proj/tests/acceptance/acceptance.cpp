// Acceptance checks. Each criterion prints one PASS/FAIL line; the process
// exits nonzero if any criterion fails. Tolerances and time budgets are
// pinned below and are not configurable.

#include <boost/multiprecision/cpp_int.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "pairstat/distributions.hpp"
#include "pairstat/metrics.hpp"
#include "pairstat/oracle.hpp"
#include "pairstat/polarization_rates.hpp"
#include "pairstat/timebin.hpp"
#include "pairstat/tomography.hpp"
#include "pairstat/validation.hpp"

using namespace pairstat;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  std::string failures;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      failures += " [failed: " + what + "]";
    }
  }
};

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<void(Outcome&)> body;
};

constexpr SourceKind kEntangled[] = {SourceKind::IndisEntangled, SourceKind::DisEntangled};

// 1. exact visibilities at μ = 0.1, α = 0.1, d = 0
void anchor_visibilities(Outcome& o) {
  constexpr double kTol = 0.002;
  const DetectorModel det{0.1, 0.0};
  const double vi = visibility_exact(PairSource(SourceKind::IndisEntangled, 0.1), det, det).visibility;
  const double vd = visibility_exact(PairSource(SourceKind::DisEntangled, 0.1), det, det).visibility;
  o.detail << "v_indis=" << vi << " v_dis=" << vd;
  o.require(std::abs(vi - 0.912) <= kTol, "v_indis vs 0.912");
  o.require(std::abs(vd - 0.908) <= kTol, "v_dis vs 0.908");
}

// 2. indistinguishable visibility gap over α ∈ [0.01, 1]
void visibility_gap(Outcome& o) {
  constexpr double kBound = 0.004 + 0.001;
  const double mu = 0.1, approx = (mu + 2) / (3 * mu + 2);
  double worst = 0.0, at = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double a = 0.01 + 0.99 * k / 99;
    const DetectorModel det{a, 0.0};
    const double gap =
        std::abs(visibility_exact(PairSource(SourceKind::IndisEntangled, mu), det, det).visibility - approx);
    if (gap > worst) worst = gap, at = a;
  }
  o.detail << "max gap=" << worst << " at alpha=" << at;
  o.require(worst <= kBound, "gap <= 0.005");
}

// 3. small-α visibility and contrast forms
void closed_form_visibility(Outcome& o) {
  constexpr double kRel = 4 * 2.220446049250313e-16;
  double worst = 0.0;
  auto rel = [&](double got, double want) {
    const double r = std::abs(got - want) / std::abs(want);
    worst = std::max(worst, r);
    return r <= kRel;
  };
  for (double mu : {0.01, 0.1, 1.0, 10.0}) {
    const auto p = visibility_approx(SourceKind::DisEntangled, mu);
    const auto i = visibility_approx(SourceKind::IndisEntangled, mu);
    o.require(rel(p.visibility, 1 / (1 + mu)), "v_dis");
    o.require(rel(i.visibility, (mu + 2) / (3 * mu + 2)), "v_indis");
    o.require(rel(p.contrast, 1 + 2 / mu), "contrast_dis");
    o.require(rel(i.contrast, 2 + 2 / mu), "contrast_indis");
  }
  o.detail << "max rel err=" << worst;
}

// 4. tomography closure on the small-α states
void tomography_closure(Outcome& o) {
  constexpr double kTol = 1e-8;
  double worst_entry = 0.0, worst_conc = 0.0;
  for (auto kind : kEntangled) {
    for (double mu : {0.01, 0.1, 0.3, 1.0}) {
      const DetectorModel det{0.01, 0.0};
      const DensityMatrix rho = reconstruct(assemble_r(PairSource(kind, mu), det, det, {}, RateMethod::ClosedForm));
      // expected X state, written out independently of closed_form_rho
      double outer, inner, corner, conc;
      if (kind == SourceKind::DisEntangled) {
        outer = (2 + mu) / (4 * (1 + mu)), inner = mu / (4 * (1 + mu)), corner = 1 / (2 * (1 + mu));
        conc = (2 - mu) / (2 * (mu + 1));
      } else {
        outer = (1 + mu) / (2 + 3 * mu), inner = mu / (2 * (2 + 3 * mu)), corner = (2 + mu) / (2 * (2 + 3 * mu));
        conc = 2 / (2 + 3 * mu);
      }
      for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
          double want = 0.0;
          if (r == c) want = (r == 0 || r == 3) ? outer : inner;
          if ((r == 0 && c == 3) || (r == 3 && c == 0)) want = corner;
          worst_entry = std::max(worst_entry, std::abs(rho(r, c) - Complex(want, 0.0)));
        }
      }
      worst_conc = std::max(worst_conc, std::abs(concurrence(rho) - conc));
      if (mu == 0.3) {
        const double anchor = kind == SourceKind::DisEntangled ? 0.653846 : 0.689655;
        o.require(std::abs(concurrence(rho) - anchor) <= 5e-7, "concurrence anchor at mu=0.3");
      }
    }
  }
  o.detail << "max entry err=" << worst_entry << " max concurrence err=" << worst_conc;
  o.require(worst_entry <= kTol, "entries");
  o.require(worst_conc <= kTol, "concurrence");
}

// 5. CAR anchors, convergence and thermal excess
void car_anchors(Outcome& o) {
  const DetectorModel ten{0.1, 0.0};
  const double cp = car(PairSource(SourceKind::DisCorrelated, 0.1), ten, ten, {}, RateMethod::ClosedForm).car;
  const double ct = car(PairSource(SourceKind::ThermalCorrelated, 0.1), ten, ten, {}, RateMethod::ClosedForm).car;
  o.require(std::abs(cp - 11.0) <= 1e-12, "C_p = 11");
  o.require(std::abs(ct - 12.0) <= 1e-12, "C_th = 12");

  double worst_ratio = 0.0;  // relative error / α
  for (double a : {1e-2, 1e-3, 1e-4}) {
    const DetectorModel det{a, 0.0};
    for (double mu : {0.01, 0.1, 1.0}) {
      for (auto kind : {SourceKind::DisCorrelated, SourceKind::ThermalCorrelated}) {
        const PairSource s(kind, mu);
        const double exact = car(s, det, det, {}, RateMethod::ExactSeries).car;
        const double closed = car(s, det, det, {}, RateMethod::ClosedForm).car;
        worst_ratio = std::max(worst_ratio, std::abs(exact - closed) / closed / a);
      }
    }
  }
  o.require(worst_ratio <= 10.0, "exact CAR within 10 alpha");

  const DetectorModel small{1e-4, 0.0};
  double worst_excess = 0.0;
  for (int k = 0; k <= 40; ++k) {
    const double mu = 0.01 * std::pow(100.0, k / 40.0);
    const double th = car(PairSource(SourceKind::ThermalCorrelated, mu), small, small, {}, RateMethod::ExactSeries).car;
    const double p = car(PairSource(SourceKind::DisCorrelated, mu), small, small, {}, RateMethod::ExactSeries).car;
    worst_excess = std::max(worst_excess, std::abs(th - p - 1.0));
  }
  o.require(worst_excess <= 0.01, "thermal excess 1 +- 0.01");
  o.detail << "C_p=" << cp << " C_th=" << ct << " max relerr/alpha=" << worst_ratio
           << " max |excess-1|=" << worst_excess;
}

// 6. moment and combinatorial identities
void identities(Outcome& o) {
  using boost::multiprecision::cpp_rational;
  auto fact = [](int n) {
    cpp_rational f = 1;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
  };
  auto inv_fact = [&](int n) { return n < 0 ? cpp_rational(0) : 1 / fact(n); };
  auto pow2 = [](int n) { return cpp_rational(boost::multiprecision::cpp_int(1) << n); };
  int bad = 0;
  for (int x = 2; x <= 30; ++x) {
    cpp_rational s1 = 0, s2 = 0, s3 = 0, s4 = 0;
    for (int y = 0; y <= x; ++y) {
      s1 += cpp_rational(x - y) * inv_fact(y) * inv_fact(x - y - 1);
      s2 += inv_fact(y - 1) * inv_fact(x - y - 1);
      s3 += cpp_rational((x - y) * (x - y), x + 1);
      s4 += cpp_rational((x - y) * y, x + 1);
    }
    bad += s1 != pow2(x - 1) * x * inv_fact(x - 1) - pow2(x - 2) * inv_fact(x - 2);
    bad += s2 != pow2(x - 2) * inv_fact(x - 2);
    bad += s3 != cpp_rational(x * (1 + 2 * x), 6);
    bad += s4 != cpp_rational(x * (x - 1), 6);
  }
  o.require(bad == 0, "integer identities");

  // The x² tail beyond the cut is about ε·x_max², so ε = 1e-15 keeps the
  // truncation error of every moment far below the 1e-9 tolerance.
  constexpr double kTol = 1e-9;
  const TruncationPolicy policy{1e-15, 400};
  double worst = 0.0;
  for (double mu : {0.01, 0.1, 0.5, 1.0, 2.0}) {
    auto moments = [&](SourceKind kind) {
      const Truncation t = truncate(PairSource(kind, mu), policy);
      long double m0 = 0, m1 = 0, m2 = 0;
      for (int x = 0; x <= t.x_max; ++x) {
        m0 += t.pmf[x];
        m1 += static_cast<long double>(x) * t.pmf[x];
        m2 += static_cast<long double>(x) * x * t.pmf[x];
      }
      return std::array<double, 3>{double(m0), double(m1), double(m2)};
    };
    const auto p = moments(SourceKind::DisEntangled);
    const auto i = moments(SourceKind::IndisEntangled);
    const auto th = moments(SourceKind::ThermalCorrelated);
    const double errs[] = {
        p[0] - 1, p[1] - mu, p[2] - (mu + mu * mu),
        i[0] - 1, i[1] - mu, i[2] - (mu + 1.5 * mu * mu),
        th[0] - 1, th[1] - mu, th[2] - (mu + 2 * mu * mu),
        // second-order coefficients of the distinguishable and indistinguishable peak rates
        (p[1] / 2 + (p[2] - p[1]) / 4) - (mu / 2 + mu * mu / 4),
        (i[1] + 2 * i[2]) / 6 - (mu / 2 + mu * mu / 2),
    };
    for (double e : errs) worst = std::max(worst, std::abs(e));
  }
  o.require(worst <= kTol, "moment identities");
  o.detail << "integer mismatches=" << bad << " max moment err=" << worst;
}

// 7. series vs exhaustive enumeration
void oracle_equivalence(Outcome& o) {
  const ValidationReport report = validate_grid({});
  double worst = 0.0;
  int failures = 0;
  for (const auto& row : report.rows) {
    worst = std::max(worst, std::abs(row.series - row.enumerated));
    failures += !row.enumeration_pass;
  }
  o.require(failures == 0, "grid rows");

  const double a = 1e-3;
  const DetectorModel det{a, 0.0};
  double worst_rel = 0.0;
  for (double mu : {0.05, 0.2}) {
    const double target = a * a * (3 * mu * mu / 8 + mu / 4);
    const PairSource src(SourceKind::IndisEntangled, mu);
    for (auto model : {HplusModel::Coherent, HplusModel::Independent}) {
      const auto e = oracle::enumerate_rate(src, oracle::Quantity::Hplus, det, det, oracle::enumeration_depth(src), model);
      worst_rel = std::max(worst_rel, std::abs(e.value - target) / target);
    }
  }
  o.require(worst_rel <= 10 * a, "H+ models vs small-alpha form");
  o.detail << report.rows.size() << " rows, failures=" << failures << " max |series-enum|=" << worst
           << " H+ max rel err=" << worst_rel;
}

// 8. Monte Carlo on the same grid
void monte_carlo(Outcome& o) {
  ValidationConfig cfg;
  cfg.mc_trials = 10'000'000;
  cfg.seed = 20240601;
  cfg.max_z = 4.0;
  const ValidationReport report = validate_grid(cfg);
  double worst_z = 0.0;
  int failures = 0;
  for (const auto& row : report.rows) {
    worst_z = std::max(worst_z, std::abs(row.z));
    failures += !row.mc_pass;
  }
  o.require(failures == 0, "|z| <= 4");

  // reproducibility: same seed, different worker counts
  const DetectorModel det{0.5, 1e-3};
  const PairSource src(SourceKind::IndisEntangled, 0.2);
  const auto a = oracle::mc_rate(src, oracle::Quantity::Hplus, det, det, 1'000'000, cfg.seed, HplusModel::Coherent, 1);
  const auto b = oracle::mc_rate(src, oracle::Quantity::Hplus, det, det, 1'000'000, cfg.seed, HplusModel::Coherent, 4);
  o.require(a.mean == b.mean && a.std_error == b.std_error, "bit reproducibility");
  o.detail << report.rows.size() << " rows, max |z|=" << worst_z << " failures=" << failures;
}

// 9. time-bin rates
void timebin(Outcome& o) {
  constexpr double kRel = 4 * 2.220446049250313e-16;
  double worst = 0.0;
  for (auto kind : kEntangled) {
    for (double mu : {0.05, 0.3, 1.0}) {
      for (double d : {0.0, 1e-4}) {
        const double as = 0.02, ai = 0.05, ds = d, di = 2 * d;
        const DetectorModel s{as, ds}, i{ai, di};
        double want[3];
        if (kind == SourceKind::DisEntangled) {
          const double acc = (mu * as / 4 + ds) * (mu * ai / 4 + di);
          want[0] = mu * as * ai / 8 + acc;
          want[1] = acc;
          want[2] = mu * as * ai / 16 + acc;
        } else {
          const double cross = mu * as * di / 4 + mu * ai * ds / 4 + ds * di;
          want[0] = as * ai * (mu * mu / 8 + mu / 8) + cross;
          want[1] = as * ai * mu * mu / 16 + cross;
          want[2] = as * ai * (3 * mu * mu / 32 + mu / 16) + cross;
        }
        const TimebinPorts ports[] = {TimebinPorts::aa, TimebinPorts::ab, TimebinPorts::aplus};
        for (int k = 0; k < 3; ++k) {
          const double got = timebin_rate(kind, ports[k], mu, s, i, RateMethod::ClosedForm);
          worst = std::max(worst, std::abs(got - want[k]) / want[k]);
        }
      }
    }
  }
  o.require(worst <= kRel, "closed forms");

  double worst_quarter = 0.0;
  for (double a : {1e-3, 1e-2}) {
    const DetectorModel det{a, 0.0};
    for (auto kind : kEntangled) {
      for (double mu : {0.01, 0.1, 0.5}) {
        const double tb = timebin_rate(kind, TimebinPorts::aa, mu, det, det, RateMethod::ExactSeries);
        const double hh = coincidence_rate(PairSource(kind, mu), Setting::HH, det, det).value;
        worst_quarter = std::max(worst_quarter, std::abs(tb / (hh / 4) - 1));
      }
    }
  }
  o.require(worst_quarter <= 0.05, "aa = HH/4 within 5%");
  o.require(fringe_per_pair(0.0) == 0.125, "fringe(0) = 1/8");
  o.detail << "closed-form rel err=" << worst << " max |aa/(HH/4)-1|=" << worst_quarter;
}

// 10. μ optimization with dark counts
void optimization(Outcome& o) {
  constexpr double kRel = 1e-3;
  const DetectorModel det{0.01, 1e-5};
  const MuRange range{1e-4, 1.0};
  double worst = 0.0;
  for (auto kind : kEntangled) {
    const auto r = optimize_mu(kind, det, det, Objective::MaxVisibility, range);
    double best_mu = 0.0, best = -1.0;
    for (int k = 0; k < 10000; ++k) {
      const double mu = range.lo * std::pow(range.hi / range.lo, k / 9999.0);
      const double v = visibility_closed_form(kind, mu, det, det).visibility;
      if (v > best) best = v, best_mu = mu;
    }
    const double rel = std::abs(r.mu - best_mu) / best_mu;
    worst = std::max(worst, rel);
    o.require(r.mu > range.lo && r.mu < range.hi, "interior optimum");
    o.require(rel <= kRel, "matches grid scan");
    o.detail << to_string(kind) << " mu*=" << r.mu << " grid=" << best_mu << "; ";
  }
  const DetectorModel clean{0.01, 0.0};
  for (auto kind : kEntangled) {
    o.require(optimize_mu(kind, clean, clean, Objective::MaxVisibility, range).mu == range.lo,
              "d=0 returns the lower end");
  }
  o.detail << "max rel diff=" << worst;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "anchor visibilities", 1.0, anchor_visibilities},
      {2, "indistinguishable visibility gap", 5.0, visibility_gap},
      {3, "closed-form visibility and contrast", 1.0, closed_form_visibility},
      {4, "tomography closure", 1.0, tomography_closure},
      {5, "CAR anchors and convergence", 5.0, car_anchors},
      {6, "identity suite", 5.0, identities},
      {7, "oracle equivalence", 60.0, oracle_equivalence},
      {8, "Monte-Carlo consistency", 120.0, monte_carlo},
      {9, "time-bin rates", 1.0, timebin},
      {10, "dark-count optimization", 5.0, optimization},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.body(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ostringstream budget;
    budget << "runtime " << secs << "s > " << c.budget_s << "s";
    o.require(secs < c.budget_s, budget.str());
    failed += !o.pass;
    std::printf("criterion %2d %s: %s (%.3fs) %s%s\n", c.id, c.name, o.pass ? "PASS" : "FAIL", secs,
                o.detail.str().c_str(), o.failures.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
