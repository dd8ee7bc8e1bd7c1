#pragma once

#include <optional>
#include <string_view>
#include <vector>

namespace pairstat {

/// Kind of photon-pair source. Entangled kinds emit polarization (or
/// time-bin) entangled pairs; correlated kinds emit pairs that are only
/// temporally correlated and are characterized by their CAR.
enum class SourceKind {
  IndisEntangled,     ///< single-mode entangled pairs, P(x) = (1+x)(μ/2)^x/(1+μ/2)^(x+2)
  DisEntangled,       ///< multimode entangled pairs, Poissonian
  DisCorrelated,      ///< multimode correlated pairs, Poissonian
  ThermalCorrelated,  ///< single-mode correlated pairs, thermal
};

bool is_entangled(SourceKind kind) noexcept;
std::string_view to_string(SourceKind kind) noexcept;
std::optional<SourceKind> parse_source_kind(std::string_view name) noexcept;

/// A source kind together with its mean pair number μ (per pulse, or per two
/// time slots for time-bin measurements).
class PairSource {
 public:
  /// Throws std::invalid_argument unless mu is finite and >= 0.
  PairSource(SourceKind kind, double mu);

  SourceKind kind() const noexcept { return kind_; }
  double mu() const noexcept { return mu_; }

 private:
  SourceKind kind_;
  double mu_;
};

/// Where infinite series over the pair number are cut.
struct TruncationPolicy {
  double tail_epsilon = 1e-12;  ///< max omitted probability mass, in (0,1)
  int hard_cap = 200;           ///< absolute max pair number

  /// Throws std::invalid_argument on an out-of-range field.
  void validate() const;
};

/// Probability of emitting exactly x pairs (x >= 0).
double pmf(const PairSource& source, int x);

/// pmf(0..x_max), built with the multiplicative recurrence pmf(x+1)/pmf(x).
std::vector<double> pmf_table(const PairSource& source, int x_max);

double mean(const PairSource& source) noexcept;
double second_moment(const PairSource& source) noexcept;

/// Certified upper bound on sum_{x > x_max} pmf(x), given pmf(x_max).
/// Returns +infinity when the geometric ratio bound is not yet below one.
double certified_tail(const PairSource& source, int x_max, double pmf_at_x_max) noexcept;

/// A certified truncation: the pmf over [0, x_max] and the bound on the
/// probability mass left out.
struct Truncation {
  int x_max = 0;
  double tail_bound = 0.0;
  std::vector<double> pmf;
};

/// Smallest x_max whose certified tail is below policy.tail_epsilon.
/// Throws CapExceeded if no x_max <= policy.hard_cap qualifies.
Truncation truncate(const PairSource& source, const TruncationPolicy& policy);

inline int truncation_index(const PairSource& source, const TruncationPolicy& policy) {
  return truncate(source, policy).x_max;
}

}  // namespace pairstat
