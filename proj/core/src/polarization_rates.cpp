#include "pairstat/polarization_rates.hpp"

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>

#include "pairstat/errors.hpp"
#include "summation.hpp"

namespace pairstat {

namespace {

void require_entangled(SourceKind kind, Setting setting) {
  if (!is_entangled(kind)) {
    throw UnsupportedSetting(std::string("setting ") + std::string(to_string(setting)) +
                             " is not defined for correlated source kind " +
                             std::string(to_string(kind)));
  }
}

// Per-x terms evaluated from precomputed click tables (index = photon count).
class PerX {
 public:
  PerX(std::span<const double> click_s, std::span<const double> click_i, HplusModel model)
      : cs_(click_s), ci_(click_i), model_(model) {}

  double coincidence(SourceKind kind, Setting setting, int x) const {
    const bool indis = kind == SourceKind::IndisEntangled;
    switch (setting) {
      case Setting::HH: return indis ? hh_indis(x) : hh_dis(x);
      case Setting::HV: return indis ? hv_indis(x) : hv_dis(x);
      case Setting::Hplus: return indis ? hplus_indis(x) : hplus_dis(x);
    }
    return 0.0;
  }

  static double single(SourceKind kind, int x, std::span<const double> click) {
    switch (kind) {
      case SourceKind::DisEntangled: {
        // H-photon count is Binomial(x, 1/2).
        const auto b = binomial_half_row(x);
        detail::CompensatedSum s;
        for (int y = 0; y <= x; ++y) s.add(b[y] * click[x - y]);
        return s.value();
      }
      case SourceKind::IndisEntangled: {
        detail::CompensatedSum s;
        for (int k = 0; k <= x; ++k) s.add(click[k]);
        return s.value() / (x + 1.0);
      }
      case SourceKind::DisCorrelated:
      case SourceKind::ThermalCorrelated:
        return click[x];
    }
    return 0.0;
  }

 private:
  // Distinguishable pairs: y of the x pairs are VV, each pattern weight 2^-x.
  double hh_dis(int x) const {
    const auto b = binomial_half_row(x);
    detail::CompensatedSum s;
    for (int y = 0; y <= x; ++y) s.add(b[y] * cs_[x - y] * ci_[x - y]);
    return s.value();
  }
  double hv_dis(int x) const {
    const auto b = binomial_half_row(x);
    detail::CompensatedSum s;
    for (int y = 0; y <= x; ++y) s.add(b[y] * cs_[x - y] * ci_[y]);
    return s.value();
  }
  // Signal H count and idler + count are independent Binomial(x, 1/2).
  double hplus_dis(int x) const {
    const auto b = binomial_half_row(x);
    detail::CompensatedSum s, i;
    for (int k = 0; k <= x; ++k) {
      s.add(b[k] * cs_[k]);
      i.add(b[k] * ci_[k]);
    }
    return s.value() * i.value();
  }

  // Indistinguishable pairs: |x-k,k>_s|x-k,k>_i with k uniform on 0..x.
  double hh_indis(int x) const {
    detail::CompensatedSum s;
    for (int k = 0; k <= x; ++k) s.add(cs_[x - k] * ci_[x - k]);
    return s.value() / (x + 1.0);
  }
  double hv_indis(int x) const {
    detail::CompensatedSum s;
    for (int k = 0; k <= x; ++k) s.add(cs_[x - k] * ci_[k]);
    return s.value() / (x + 1.0);
  }
  // The k = x term is kept: with dark counts the signal can still click.
  double hplus_indis(int x) const {
    if (model_ == HplusModel::Independent) {
      const auto b = binomial_half_row(x);
      detail::CompensatedSum s, i;
      for (int k = 0; k <= x; ++k) s.add(cs_[x - k]);
      for (int p = 0; p <= x; ++p) i.add(b[p] * ci_[p]);
      return s.value() / (x + 1.0) * i.value();
    }
    detail::CompensatedSum s;
    for (int k = 0; k <= x; ++k) {
      const auto plus = plus_photon_distribution(x, k);
      detail::CompensatedSum idler;
      for (int p = 0; p <= x; ++p) idler.add(plus[p] * ci_[p]);
      s.add(cs_[x - k] * idler.value());
    }
    return s.value() / (x + 1.0);
  }

  std::span<const double> cs_;
  std::span<const double> ci_;
  HplusModel model_;
};

}  // namespace

std::string_view to_string(Setting setting) noexcept {
  switch (setting) {
    case Setting::HH: return "HH";
    case Setting::HV: return "HV";
    case Setting::Hplus: return "H+";
  }
  return "?";
}

std::string_view to_string(HplusModel model) noexcept {
  return model == HplusModel::Coherent ? "coherent" : "independent";
}

std::string_view to_string(RateMethod method) noexcept {
  switch (method) {
    case RateMethod::ExactSeries: return "exact-series";
    case RateMethod::ClosedForm: return "closed-form";
    case RateMethod::Oracle: return "oracle";
  }
  return "?";
}

std::optional<HplusModel> parse_hplus_model(std::string_view name) noexcept {
  if (name == "coherent") return HplusModel::Coherent;
  if (name == "independent") return HplusModel::Independent;
  return std::nullopt;
}

std::vector<double> binomial_half_row(int n) {
  if (n < 0) throw std::invalid_argument("binomial row index must be >= 0");
  std::vector<double> row(static_cast<std::size_t>(n) + 1);
  row[0] = std::ldexp(1.0, -n);
  for (int y = 0; y < n; ++y) row[y + 1] = row[y] * (n - y) / (y + 1.0);
  return row;
}

std::vector<double> plus_photon_distribution(int x, int k) {
  if (x < 0 || k < 0 || k > x) throw std::invalid_argument("need 0 <= k <= x");
  // Build |x-k,k> = (a_H†)^(x-k) (a_V†)^k |0> / sqrt((x-k)! k!) one creation
  // at a time in the ± Fock basis, with a_H† = (a_+† + a_-†)/√2 and
  // a_V† = (a_+† - a_-†)/√2. Dividing by √(count) after each creation keeps
  // the state normalized, so amplitudes stay O(1) for any x.
  std::vector<double> amp{1.0};
  std::vector<double> next;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  auto create = [&](double sign, int count) {
    const int n = static_cast<int>(amp.size()) - 1;  // photons so far
    next.assign(amp.size() + 1, 0.0);
    const double norm = inv_sqrt2 / std::sqrt(static_cast<double>(count));
    for (int p = 0; p <= n; ++p) {
      const double a = amp[p];
      if (a == 0.0) continue;
      next[p + 1] += a * std::sqrt(p + 1.0) * norm;
      next[p] += sign * a * std::sqrt(static_cast<double>(n - p + 1)) * norm;
    }
    amp.swap(next);
  };
  for (int v = 1; v <= k; ++v) create(-1.0, v);
  for (int h = 1; h <= x - k; ++h) create(+1.0, h);

  std::vector<double> prob(amp.size());
  for (std::size_t p = 0; p < amp.size(); ++p) prob[p] = amp[p] * amp[p];
  return prob;
}

double per_x_coincidence(SourceKind kind, Setting setting, int x, const DetectorModel& det_s,
                         const DetectorModel& det_i, HplusModel model) {
  require_entangled(kind, setting);
  if (x < 0) throw std::invalid_argument("pair number must be >= 0");
  const auto cs = click_table(det_s, x);
  const auto ci = click_table(det_i, x);
  return PerX(cs, ci, model).coincidence(kind, setting, x);
}

double per_x_single(SourceKind kind, int x, const DetectorModel& det) {
  if (x < 0) throw std::invalid_argument("pair number must be >= 0");
  const auto c = click_table(det, x);
  return PerX::single(kind, x, c);
}

SeriesValue coincidence_rate(const PairSource& source, Setting setting,
                             const DetectorModel& det_s, const DetectorModel& det_i,
                             const TruncationPolicy& policy, HplusModel model) {
  require_entangled(source.kind(), setting);
  const Truncation trunc = truncate(source, policy);
  const auto cs = click_table(det_s, trunc.x_max);
  const auto ci = click_table(det_i, trunc.x_max);
  const PerX per_x(cs, ci, model);
  detail::CompensatedSum sum;
  for (int x = 0; x <= trunc.x_max; ++x) {
    sum.add(trunc.pmf[x] * per_x.coincidence(source.kind(), setting, x));
  }
  return {sum.value(), trunc.x_max, trunc.tail_bound};
}

SeriesValue single_rate(const PairSource& source, const DetectorModel& det,
                        const TruncationPolicy& policy) {
  const Truncation trunc = truncate(source, policy);
  const auto c = click_table(det, trunc.x_max);
  detail::CompensatedSum sum;
  for (int x = 0; x <= trunc.x_max; ++x) {
    sum.add(trunc.pmf[x] * PerX::single(source.kind(), x, c));
  }
  return {sum.value(), trunc.x_max, trunc.tail_bound};
}

RateReport exact_rates(const PairSource& source, const DetectorModel& det_s,
                       const DetectorModel& det_i, const TruncationPolicy& policy,
                       HplusModel model) {
  require_entangled(source.kind(), Setting::HH);
  const Truncation trunc = truncate(source, policy);
  const auto cs = click_table(det_s, trunc.x_max);
  const auto ci = click_table(det_i, trunc.x_max);
  const PerX per_x(cs, ci, model);
  detail::CompensatedSum hh, hv, hp, ss, si;
  for (int x = 0; x <= trunc.x_max; ++x) {
    const double p = trunc.pmf[x];
    hh.add(p * per_x.coincidence(source.kind(), Setting::HH, x));
    hv.add(p * per_x.coincidence(source.kind(), Setting::HV, x));
    hp.add(p * per_x.coincidence(source.kind(), Setting::Hplus, x));
    ss.add(p * PerX::single(source.kind(), x, cs));
    si.add(p * PerX::single(source.kind(), x, ci));
  }
  RateReport report;
  report.r_hh = hh.value();
  report.r_hv = hv.value();
  report.r_hplus = hp.value();
  report.single_s = ss.value();
  report.single_i = si.value();
  report.method = RateMethod::ExactSeries;
  report.truncation_used = trunc.x_max;
  report.hplus_model = model;
  return report;
}

RateReport closed_form_rates(SourceKind kind, double mu, double alpha_s, double alpha_i,
                             double dark_s, double dark_i) {
  require_entangled(kind, Setting::HH);
  RateReport r;
  r.method = RateMethod::ClosedForm;
  const double aa = alpha_s * alpha_i;
  if (kind == SourceKind::DisEntangled) {
    // Accidentals factor into the product of the two single rates.
    const double accidental = (0.5 * mu * alpha_s + dark_s) * (0.5 * mu * alpha_i + dark_i);
    r.r_hh = 0.5 * mu * aa + accidental;
    r.r_hv = accidental;
    r.r_hplus = 0.25 * mu * aa + accidental;
  } else {
    const double cross = 0.5 * mu * alpha_s * dark_i + 0.5 * mu * alpha_i * dark_s + dark_s * dark_i;
    r.r_hh = aa * (0.5 * mu * mu + 0.5 * mu) + cross;
    r.r_hv = 0.25 * mu * mu * aa + cross;
    r.r_hplus = aa * (0.375 * mu * mu + 0.25 * mu) + cross;
  }
  r.single_s = 0.5 * mu * alpha_s + dark_s;
  r.single_i = 0.5 * mu * alpha_i + dark_i;
  return r;
}

}  // namespace pairstat
