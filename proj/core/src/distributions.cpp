#include "pairstat/distributions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "pairstat/errors.hpp"

namespace pairstat {

namespace {

// pmf(0) and the recurrence factor pmf(x+1)/pmf(x).
struct Recurrence {
  SourceKind kind;
  double mu;

  double first() const {
    switch (kind) {
      case SourceKind::DisEntangled:
      case SourceKind::DisCorrelated:
        return std::exp(-mu);
      case SourceKind::IndisEntangled: {
        const double base = 1.0 + 0.5 * mu;
        return 1.0 / (base * base);
      }
      case SourceKind::ThermalCorrelated:
        return 1.0 / (1.0 + mu);
    }
    return 0.0;
  }

  double ratio(int x) const {
    switch (kind) {
      case SourceKind::DisEntangled:
      case SourceKind::DisCorrelated:
        return mu / (x + 1.0);
      case SourceKind::IndisEntangled: {
        const double half = 0.5 * mu;
        return half / (1.0 + half) * (x + 2.0) / (x + 1.0);
      }
      case SourceKind::ThermalCorrelated:
        return mu / (1.0 + mu);
    }
    return 0.0;
  }
};

}  // namespace

bool is_entangled(SourceKind kind) noexcept {
  return kind == SourceKind::IndisEntangled || kind == SourceKind::DisEntangled;
}

std::string_view to_string(SourceKind kind) noexcept {
  switch (kind) {
    case SourceKind::IndisEntangled: return "indis-entangled";
    case SourceKind::DisEntangled: return "dis-entangled";
    case SourceKind::DisCorrelated: return "dis-correlated";
    case SourceKind::ThermalCorrelated: return "thermal-correlated";
  }
  return "unknown";
}

std::optional<SourceKind> parse_source_kind(std::string_view name) noexcept {
  for (auto kind : {SourceKind::IndisEntangled, SourceKind::DisEntangled,
                    SourceKind::DisCorrelated, SourceKind::ThermalCorrelated}) {
    if (name == to_string(kind)) return kind;
  }
  return std::nullopt;
}

PairSource::PairSource(SourceKind kind, double mu) : kind_(kind), mu_(mu) {
  if (!std::isfinite(mu) || mu < 0.0) {
    throw std::invalid_argument("mean pair number must be finite and >= 0, got " +
                                std::to_string(mu));
  }
}

void TruncationPolicy::validate() const {
  if (!(tail_epsilon > 0.0 && tail_epsilon < 1.0)) {
    throw std::invalid_argument("tail_epsilon must lie in (0,1)");
  }
  if (hard_cap < 0) throw std::invalid_argument("hard_cap must be >= 0");
}

double pmf(const PairSource& source, int x) {
  if (x < 0) throw std::invalid_argument("pair number must be >= 0");
  const Recurrence rec{source.kind(), source.mu()};
  double p = rec.first();
  for (int k = 0; k < x && p > 0.0; ++k) p *= rec.ratio(k);
  return p;
}

std::vector<double> pmf_table(const PairSource& source, int x_max) {
  if (x_max < 0) throw std::invalid_argument("x_max must be >= 0");
  const Recurrence rec{source.kind(), source.mu()};
  std::vector<double> table(static_cast<std::size_t>(x_max) + 1);
  table[0] = rec.first();
  for (int x = 0; x < x_max; ++x) table[x + 1] = table[x] * rec.ratio(x);
  return table;
}

double mean(const PairSource& source) noexcept { return source.mu(); }

double second_moment(const PairSource& source) noexcept {
  const double mu = source.mu();
  switch (source.kind()) {
    case SourceKind::DisEntangled:
    case SourceKind::DisCorrelated:
      return mu + mu * mu;
    case SourceKind::IndisEntangled:
      return mu + 1.5 * mu * mu;
    case SourceKind::ThermalCorrelated:
      return mu + 2.0 * mu * mu;
  }
  return 0.0;
}

double certified_tail(const PairSource& source, int x_max, double pmf_at_x_max) noexcept {
  if (source.mu() == 0.0) return 0.0;
  // A zero pmf with mu > 0 is an underflow, not a certified end of support.
  if (pmf_at_x_max == 0.0) return std::numeric_limits<double>::infinity();
  // The ratio pmf(x+1)/pmf(x) is non-increasing in x for every kind, so the
  // ratio at x_max bounds all later ratios and the tail is dominated by a
  // geometric series.
  const double r = Recurrence{source.kind(), source.mu()}.ratio(x_max);
  if (r >= 1.0) return std::numeric_limits<double>::infinity();
  return pmf_at_x_max * r / (1.0 - r);
}

Truncation truncate(const PairSource& source, const TruncationPolicy& policy) {
  policy.validate();
  const Recurrence rec{source.kind(), source.mu()};
  Truncation out;
  out.pmf.reserve(32);
  double p = rec.first();
  for (int x = 0; x <= policy.hard_cap; ++x) {
    out.pmf.push_back(p);
    const double tail = certified_tail(source, x, p);
    if (tail < policy.tail_epsilon) {
      out.x_max = x;
      out.tail_bound = tail;
      return out;
    }
    p *= rec.ratio(x);
  }
  throw CapExceeded(policy.hard_cap, policy.hard_cap);
}

}  // namespace pairstat
