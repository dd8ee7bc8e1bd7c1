#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "pairstat/detection.hpp"
#include "pairstat/distributions.hpp"
#include "pairstat/polarization_rates.hpp"

// Independent ground truth for the analytic rate engines. Nothing in here
// calls the series code: pair-number probabilities come from the direct
// pmf formulas, polarization patterns are enumerated (or sampled) pair by
// pair from the two-photon amplitudes, and the diagonal-basis photon
// statistics of indistinguishable pairs come from the binomial expansion of
// the idler creation operators.

namespace pairstat::oracle {

enum class Quantity {
  HH,
  HV,
  Hplus,
  SingleS,
  SingleI,
  CarMatched,    ///< both arms see the same pulse
  CarUnmatched,  ///< signal and idler from two independent pulses
  TimebinAA,
  TimebinAB,
  TimebinAplus,
};

std::string_view to_string(Quantity q) noexcept;

/// Entangled kinds: polarization, single and time-bin quantities.
/// Correlated kinds: single and CAR quantities.
bool supports(SourceKind kind, Quantity q) noexcept;

inline constexpr int kMaxEnumerationPairs = 14;

struct EnumerationResult {
  double value = 0.0;       ///< exact contribution of x = 0..x_max
  double tail_bound = 0.0;  ///< bound on the omitted x > x_max contribution
  int x_max = 0;
};

/// Smallest x_max <= kMaxEnumerationPairs whose omitted pmf mass is at most
/// tail_target (kMaxEnumerationPairs if none is).
int enumeration_depth(const PairSource& source, double tail_target = 1e-13);

/// Probability of the quantity's click event given exactly x pairs, by
/// exhaustive pattern enumeration. Not defined for CarUnmatched.
double enumerate_per_x(SourceKind kind, Quantity q, int x, const DetectorModel& det_s,
                       const DetectorModel& det_i, HplusModel model = HplusModel::Coherent);

/// Rate per pulse summed over x = 0..x_max. Throws XMaxTooLarge above
/// kMaxEnumerationPairs, UnsupportedSetting for an undefined
/// kind/quantity pair, std::invalid_argument for Linearized detectors.
EnumerationResult enumerate_rate(const PairSource& source, Quantity q, const DetectorModel& det_s,
                                 const DetectorModel& det_i, int x_max,
                                 HplusModel model = HplusModel::Coherent);

/// Distribution of the number of +-polarized photons for the idler state
/// |x-k, k>, from the explicit double binomial sum (entry p, p = 0..x).
std::vector<double> expand_plus_distribution(int x, int k);

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;  ///< sample standard deviation / √trials
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
};

/// Trials are processed in blocks of this size; block b draws from its own
/// std::mt19937_64 seeded with std::seed_seq{seed_lo, seed_hi, b_lo, b_hi}.
inline constexpr std::uint64_t kTrialsPerBlock = std::uint64_t{1} << 16;

/// Uniform variates for one trial block. Doubles are built from the top 53
/// bits of each engine output, so streams are identical on every platform.
class BlockRng {
 public:
  BlockRng(std::uint64_t seed, std::uint64_t block);
  double uniform() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool bernoulli(double p) noexcept { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

/// Number of VV pairs among x distinguishable pairs.
int sample_vv_count(BlockRng& rng, int x);
/// Pattern index k of an indistinguishable x-pair state (k V photons per arm).
int sample_pattern_index(BlockRng& rng, int x);

/// Seeded Monte-Carlo estimate of the same quantity enumerate_rate computes,
/// without any truncation in x. Bit-reproducible for fixed arguments and
/// independent of `workers` (0 = hardware concurrency).
McEstimate mc_rate(const PairSource& source, Quantity q, const DetectorModel& det_s,
                   const DetectorModel& det_i, std::uint64_t trials, std::uint64_t seed,
                   HplusModel model = HplusModel::Coherent, unsigned workers = 0);

}  // namespace pairstat::oracle
