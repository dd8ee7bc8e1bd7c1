#include "pairstat/oracle.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>

#include "pairstat/errors.hpp"

namespace pairstat::oracle {

namespace {

// ---- independent building blocks -------------------------------------------

// 1 - (1-d)(1-α)^n, straight from the definition.
double oracle_click(const DetectorModel& det, int n) {
  return 1.0 - (1.0 - det.dark) * std::pow(1.0 - det.alpha, n);
}

// Direct pmf formulas through lgamma, not the recurrence.
double direct_pmf(const PairSource& source, int x) {
  const double mu = source.mu();
  if (mu == 0.0) return x == 0 ? 1.0 : 0.0;
  switch (source.kind()) {
    case SourceKind::DisEntangled:
    case SourceKind::DisCorrelated:
      return std::exp(x * std::log(mu) - mu - std::lgamma(x + 1.0));
    case SourceKind::IndisEntangled:
      return (1.0 + x) * std::exp(x * std::log(mu / 2) - (x + 2.0) * std::log1p(mu / 2));
    case SourceKind::ThermalCorrelated:
      return std::exp(x * std::log(mu) - (x + 1.0) * std::log1p(mu));
  }
  return 0.0;
}

// Exact integer binomial coefficient, n <= 60.
std::uint64_t choose(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t c = 1;
  for (int j = 1; j <= k; ++j) c = c * static_cast<std::uint64_t>(n - k + j) / static_cast<std::uint64_t>(j);
  return c;
}

bool is_timebin(Quantity q) {
  return q == Quantity::TimebinAA || q == Quantity::TimebinAB || q == Quantity::TimebinAplus;
}

bool is_single(Quantity q) { return q == Quantity::SingleS || q == Quantity::SingleI; }

// Polarization analyzer states of one pair: which single-photon states the
// signal and idler polarizers transmit.
struct Analyzers {
  std::array<double, 2> signal;
  std::array<double, 2> idler;
};

Analyzers analyzers_for(Quantity q) {
  constexpr double r = 0.70710678118654752440;
  const std::array<double, 2> h{1.0, 0.0}, v{0.0, 1.0}, plus{r, r};
  switch (q) {
    case Quantity::HV:
    case Quantity::TimebinAB: return {h, v};
    case Quantity::Hplus:
    case Quantity::TimebinAplus: return {h, plus};
    default: return {h, h};
  }
}

// Joint pass/block probabilities of one |Φ+> pair in front of the two
// polarizers, P[sp][ip] with 1 = transmitted.
std::array<std::array<double, 2>, 2> pair_outcomes(const Analyzers& an) {
  auto perp = [](const std::array<double, 2>& s) { return std::array<double, 2>{-s[1], s[0]}; };
  std::array<std::array<double, 2>, 2> p{};
  for (int sp = 0; sp < 2; ++sp) {
    for (int ip = 0; ip < 2; ++ip) {
      const auto a = sp ? an.signal : perp(an.signal);
      const auto b = ip ? an.idler : perp(an.idler);
      const double amp = (a[0] * b[0] + a[1] * b[1]) / std::sqrt(2.0);
      p[sp][ip] = amp * amp;
    }
  }
  return p;
}

// Click probability with each photon first surviving a 1/2 time-slot
// selection, by explicit binomial thinning.
double thinned_click(const DetectorModel& det, int n) {
  double s = 0.0;
  for (int j = 0; j <= n; ++j) s += static_cast<double>(choose(n, j)) * oracle_click(det, j);
  return std::ldexp(s, -n);
}

// Click tables for up to `n` photons, from the oracle's own click function.
struct Clicks {
  std::vector<double> s;
  std::vector<double> i;

  Clicks(const DetectorModel& det_s, const DetectorModel& det_i, bool thin, int n) {
    for (int j = 0; j <= n; ++j) {
      s.push_back(thin ? thinned_click(det_s, j) : oracle_click(det_s, j));
      i.push_back(thin ? thinned_click(det_i, j) : oracle_click(det_i, j));
    }
  }
  double sig(int n) const { return s[n]; }
  double idl(int n) const { return i[n]; }
};

// Event probability once the transmitted photon numbers are fixed.
double event(Quantity q, const Clicks& c, int ns, int ni) {
  if (q == Quantity::SingleS) return c.sig(ns);
  if (q == Quantity::SingleI) return c.idl(ni);
  return c.sig(ns) * c.idl(ni);
}

// Walks every pair-by-pair outcome sequence of x distinguishable pairs.
void walk_pairs(const std::array<std::array<double, 2>, 2>& p, int remaining, int ns, int ni,
                double weight, Quantity q, const Clicks& c, long double& acc) {
  if (weight == 0.0) return;
  if (remaining == 0) {
    acc += static_cast<long double>(weight) * event(q, c, ns, ni);
    return;
  }
  for (int sp = 0; sp < 2; ++sp) {
    for (int ip = 0; ip < 2; ++ip) {
      walk_pairs(p, remaining - 1, ns + sp, ni + ip, weight * p[sp][ip], q, c, acc);
    }
  }
}

// P(p | x, k) with per-photon independent ± splits (2^x subsets).
std::vector<double> independent_plus_distribution(int x) {
  std::vector<double> out(x + 1, 0.0);
  const std::uint64_t subsets = std::uint64_t{1} << x;
  for (std::uint64_t m = 0; m < subsets; ++m) out[std::popcount(m)] += 1.0;
  for (double& v : out) v = std::ldexp(v, -x);
  return out;
}

void require_exact(const DetectorModel& det) {
  det.validate();
  if (det.mode != ClickModel::Exact) {
    throw std::invalid_argument("oracle models physical threshold detectors only (exact click model)");
  }
}

void require_supported(SourceKind kind, Quantity q) {
  if (!supports(kind, q)) {
    throw UnsupportedSetting(std::string(to_string(q)) + " is not defined for a " +
                             std::string(to_string(kind)) + " source");
  }
}

}  // namespace

std::string_view to_string(Quantity q) noexcept {
  switch (q) {
    case Quantity::HH: return "HH";
    case Quantity::HV: return "HV";
    case Quantity::Hplus: return "H+";
    case Quantity::SingleS: return "single-s";
    case Quantity::SingleI: return "single-i";
    case Quantity::CarMatched: return "car-matched";
    case Quantity::CarUnmatched: return "car-unmatched";
    case Quantity::TimebinAA: return "timebin-aa";
    case Quantity::TimebinAB: return "timebin-ab";
    case Quantity::TimebinAplus: return "timebin-a+";
  }
  return "?";
}

bool supports(SourceKind kind, Quantity q) noexcept {
  if (is_single(q)) return true;
  const bool car_q = q == Quantity::CarMatched || q == Quantity::CarUnmatched;
  return is_entangled(kind) ? !car_q : car_q;
}

std::vector<double> expand_plus_distribution(int x, int k) {
  if (x < 0 || k < 0 || k > x) throw std::invalid_argument("need 0 <= k <= x");
  if (x > 60) throw XMaxTooLarge("plus-basis expansion supports x <= 60");
  // (a+ + a-)^(x-k) (a+ - a-)^k / 2^(x/2), normalized by sqrt((x-k)! k!).
  std::vector<long double> log_fact(x + 1, 0.0L);
  for (int j = 1; j <= x; ++j) log_fact[j] = log_fact[j - 1] + std::log(static_cast<long double>(j));
  std::vector<double> out(x + 1);
  for (int p = 0; p <= x; ++p) {
    long double coeff = 0.0L;
    for (int n = std::max(0, p - (x - k)); n <= std::min(k, p); ++n) {
      const long double term = static_cast<long double>(choose(x - k, p - n)) *
                               static_cast<long double>(choose(k, n));
      coeff += ((k - n) % 2 == 0) ? term : -term;
    }
    const long double log_norm = 0.5L * (log_fact[p] + log_fact[x - p] - log_fact[x - k] - log_fact[k]) -
                                 0.5L * x * std::log(2.0L);
    const long double amp = coeff * std::exp(log_norm);
    out[p] = static_cast<double>(amp * amp);
  }
  return out;
}

double enumerate_per_x(SourceKind kind, Quantity q, int x, const DetectorModel& det_s,
                       const DetectorModel& det_i, HplusModel model) {
  require_supported(kind, q);
  require_exact(det_s);
  require_exact(det_i);
  if (q == Quantity::CarUnmatched) throw std::invalid_argument("unmatched rate involves two pulses");
  if (x < 0) throw std::invalid_argument("pair number must be >= 0");
  if (x > kMaxEnumerationPairs) throw XMaxTooLarge("enumeration supports x <= 14");

  const Clicks c(det_s, det_i, is_timebin(q), x);
  switch (kind) {
    case SourceKind::DisCorrelated:
    case SourceKind::ThermalCorrelated:
      return event(q, c, x, x);
    case SourceKind::DisEntangled: {
      long double acc = 0.0L;
      walk_pairs(pair_outcomes(analyzers_for(q)), x, 0, 0, 1.0, q, c, acc);
      return static_cast<double>(acc);
    }
    case SourceKind::IndisEntangled: {
      // |x-k, k>_s |x-k, k>_i, k = 0..x, equal weights.
      const bool plus_idler = q == Quantity::Hplus || q == Quantity::TimebinAplus;
      const bool v_idler = q == Quantity::HV || q == Quantity::TimebinAB;
      long double acc = 0.0L;
      for (int k = 0; k <= x; ++k) {
        const int ns = x - k;
        if (!plus_idler) {
          acc += event(q, c, ns, v_idler ? k : x - k);
          continue;
        }
        const auto dist = model == HplusModel::Coherent ? expand_plus_distribution(x, k)
                                                        : independent_plus_distribution(x);
        for (int p = 0; p <= x; ++p) acc += static_cast<long double>(dist[p]) * event(q, c, ns, p);
      }
      return static_cast<double>(acc / (x + 1));
    }
  }
  return 0.0;
}

int enumeration_depth(const PairSource& source, double tail_target) {
  long double head = 0.0L;
  for (int x = 0; x < kMaxEnumerationPairs; ++x) {
    head += direct_pmf(source, x);
    if (1.0L - head <= tail_target) return x;
  }
  return kMaxEnumerationPairs;
}

EnumerationResult enumerate_rate(const PairSource& source, Quantity q, const DetectorModel& det_s,
                                 const DetectorModel& det_i, int x_max, HplusModel model) {
  require_supported(source.kind(), q);
  require_exact(det_s);
  require_exact(det_i);
  if (x_max < 0) throw std::invalid_argument("x_max must be >= 0");
  if (x_max > kMaxEnumerationPairs) {
    throw XMaxTooLarge("enumeration supports x_max <= " + std::to_string(kMaxEnumerationPairs));
  }

  long double head = 0.0L;
  std::vector<double> p(x_max + 1);
  for (int x = 0; x <= x_max; ++x) {
    p[x] = direct_pmf(source, x);
    head += p[x];
  }
  const double tail = std::max(0.0, static_cast<double>(1.0L - head));

  EnumerationResult out;
  out.x_max = x_max;
  if (q == Quantity::CarUnmatched) {
    long double acc = 0.0L;
    for (int x1 = 0; x1 <= x_max; ++x1) {
      for (int x2 = 0; x2 <= x_max; ++x2) {
        acc += static_cast<long double>(p[x1]) * p[x2] * oracle_click(det_s, x1) * oracle_click(det_i, x2);
      }
    }
    out.value = static_cast<double>(acc);
    out.tail_bound = 2.0 * tail + tail * tail;
    return out;
  }
  long double acc = 0.0L;
  for (int x = 0; x <= x_max; ++x) {
    acc += static_cast<long double>(p[x]) * enumerate_per_x(source.kind(), q, x, det_s, det_i, model);
  }
  out.value = static_cast<double>(acc);
  out.tail_bound = tail;
  return out;
}

// ---- Monte Carlo -------------------------------------------------------------

BlockRng::BlockRng(std::uint64_t seed, std::uint64_t block) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32)};
  engine_.seed(seq);
}

int sample_vv_count(BlockRng& rng, int x) {
  int vv = 0;
  for (int j = 0; j < x; ++j) vv += rng.bernoulli(0.5);
  return vv;
}

int sample_pattern_index(BlockRng& rng, int x) {
  const int k = static_cast<int>(rng.uniform() * (x + 1));
  return std::min(k, x);
}

namespace {

// Inverse-CDF sampler of the pair number, tabulated where the mass is.
class PairSampler {
 public:
  explicit PairSampler(const PairSource& source) : source_(source) {
    double cdf = 0.0;
    for (int x = 0;; ++x) {
      const double p = direct_pmf(source, x);
      cdf += p;
      cdf_.push_back(cdf);
      if ((1.0 - cdf < 1e-17 && x > source.mu()) || (p == 0.0 && x > source.mu()) || x >= 4000) break;
    }
  }

  int sample(BlockRng& rng) const {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it != cdf_.end()) return static_cast<int>(it - cdf_.begin());
    // Far tail: continue the sum term by term.
    int x = static_cast<int>(cdf_.size()) - 1;
    double cdf = cdf_.back();
    while (true) {
      ++x;
      const double p = direct_pmf(source_, x);
      cdf += p;
      if (cdf > u || p == 0.0) return x;
    }
  }

  int table_size() const { return static_cast<int>(cdf_.size()); }

 private:
  PairSource source_;
  std::vector<double> cdf_;
};

bool photons_click(BlockRng& rng, const DetectorModel& det, int n) {
  if (det.dark > 0.0 && rng.bernoulli(det.dark)) return true;
  for (int j = 0; j < n; ++j) {
    if (rng.bernoulli(det.alpha)) return true;
  }
  return false;
}

int survive_half(BlockRng& rng, int n) {
  int kept = 0;
  for (int j = 0; j < n; ++j) kept += rng.bernoulli(0.5);
  return kept;
}

class TrialSimulator {
 public:
  TrialSimulator(const PairSource& source, Quantity q, const DetectorModel& det_s,
                 const DetectorModel& det_i, HplusModel model)
      : sampler_(source), kind_(source.kind()), q_(q), det_s_(det_s), det_i_(det_i), model_(model) {
    const auto p = pair_outcomes(analyzers_for(q));
    double acc = 0.0;
    for (int sp = 0; sp < 2; ++sp) {
      for (int ip = 0; ip < 2; ++ip) {
        acc += p[sp][ip];
        pair_cdf_[2 * sp + ip] = acc;
      }
    }
    const bool plus_idler = q == Quantity::Hplus || q == Quantity::TimebinAplus;
    if (kind_ == SourceKind::IndisEntangled && plus_idler && model == HplusModel::Coherent) {
      const int n = std::min(sampler_.table_size(), 61);
      plus_cdf_.resize(n);
      for (int x = 0; x < n; ++x) {
        for (int k = 0; k <= x; ++k) plus_cdf_[x].push_back(cumulative(expand_plus_distribution(x, k)));
      }
    }
  }

  bool trial(BlockRng& rng) const {
    if (q_ == Quantity::CarUnmatched) {
      const int x1 = sampler_.sample(rng);
      const int x2 = sampler_.sample(rng);
      return photons_click(rng, det_s_, x1) && photons_click(rng, det_i_, x2);
    }
    const int x = sampler_.sample(rng);
    int ns = 0, ni = 0;
    transmitted(rng, x, ns, ni);
    if (is_timebin(q_)) {
      ns = survive_half(rng, ns);
      ni = survive_half(rng, ni);
    }
    if (q_ == Quantity::SingleS) return photons_click(rng, det_s_, ns);
    if (q_ == Quantity::SingleI) return photons_click(rng, det_i_, ni);
    return photons_click(rng, det_s_, ns) && photons_click(rng, det_i_, ni);
  }

 private:
  static std::vector<double> cumulative(const std::vector<double>& p) {
    std::vector<double> c(p.size());
    double acc = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) c[j] = acc += p[j];
    return c;
  }

  static int draw(BlockRng& rng, const std::vector<double>& cdf) {
    const double u = rng.uniform() * cdf.back();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    return std::min(static_cast<int>(it - cdf.begin()), static_cast<int>(cdf.size()) - 1);
  }

  void transmitted(BlockRng& rng, int x, int& ns, int& ni) const {
    switch (kind_) {
      case SourceKind::DisCorrelated:
      case SourceKind::ThermalCorrelated:
        ns = ni = x;
        return;
      case SourceKind::DisEntangled:
        if (q_ == Quantity::Hplus || q_ == Quantity::TimebinAplus) {
          for (int j = 0; j < x; ++j) {
            const double u = rng.uniform();
            int outcome = 0;
            while (outcome < 3 && u >= pair_cdf_[outcome]) ++outcome;
            ns += outcome >> 1;
            ni += outcome & 1;
          }
        } else {
          const int vv = sample_vv_count(rng, x);
          ns = x - vv;
          ni = (q_ == Quantity::HV || q_ == Quantity::TimebinAB) ? vv : x - vv;
        }
        return;
      case SourceKind::IndisEntangled: {
        const int k = sample_pattern_index(rng, x);
        ns = x - k;
        if (q_ == Quantity::HV || q_ == Quantity::TimebinAB) {
          ni = k;
        } else if (q_ == Quantity::Hplus || q_ == Quantity::TimebinAplus) {
          if (model_ == HplusModel::Independent) {
            ni = survive_half(rng, x);
          } else if (x < static_cast<int>(plus_cdf_.size())) {
            ni = draw(rng, plus_cdf_[x][k]);
          } else {
            ni = draw(rng, cumulative(expand_plus_distribution(x, k)));
          }
        } else {
          ni = x - k;
        }
        return;
      }
    }
  }

  PairSampler sampler_;
  SourceKind kind_;
  Quantity q_;
  DetectorModel det_s_, det_i_;
  HplusModel model_;
  std::array<double, 4> pair_cdf_{};
  std::vector<std::vector<std::vector<double>>> plus_cdf_;
};

}  // namespace

McEstimate mc_rate(const PairSource& source, Quantity q, const DetectorModel& det_s,
                   const DetectorModel& det_i, std::uint64_t trials, std::uint64_t seed,
                   HplusModel model, unsigned workers) {
  require_supported(source.kind(), q);
  require_exact(det_s);
  require_exact(det_i);
  if (trials == 0) throw std::invalid_argument("trials must be positive");

  const TrialSimulator sim(source, q, det_s, det_i, model);
  const std::uint64_t blocks = (trials + kTrialsPerBlock - 1) / kTrialsPerBlock;
  std::vector<std::uint64_t> hits(blocks, 0);

  auto run = [&](unsigned w, unsigned stride) {
    for (std::uint64_t b = w; b < blocks; b += stride) {
      BlockRng rng(seed, b);
      const std::uint64_t n = std::min(kTrialsPerBlock, trials - b * kTrialsPerBlock);
      std::uint64_t h = 0;
      for (std::uint64_t t = 0; t < n; ++t) h += sim.trial(rng);
      hits[b] = h;
    }
  };

  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, blocks));
  if (workers <= 1) {
    run(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w, workers);
    for (auto& t : pool) t.join();
  }

  std::uint64_t total = 0;
  for (std::uint64_t h : hits) total += h;

  McEstimate est;
  est.trials = trials;
  est.seed = seed;
  const double n = static_cast<double>(trials);
  est.mean = static_cast<double>(total) / n;
  if (trials > 1) est.std_error = std::sqrt(est.mean * (1.0 - est.mean) / (n - 1.0));
  return est;
}

}  // namespace pairstat::oracle
