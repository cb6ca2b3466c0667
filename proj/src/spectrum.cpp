// Copyright 2026 The torus-partitions Authors.
// SPDX-License-Identifier: Apache-2.0

#include "tpl/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "tpl/error.hpp"

namespace tpl {

namespace {

using i128 = __int128;

constexpr i128 kInt64Max = std::numeric_limits<std::int64_t>::max();

// Orders modes either through exact integer keys proportional to
// lambda/(4 pi^2), or through doubles with a relative grouping tolerance.
class ModeOrder {
 public:
  ModeOrder(const TorusGeometry& geom, const SpectrumOptions& opts)
      : geom_(geom), tol_(opts.group_tol) {
    if (!geom.is_rational()) return;
    const Fraction a = *geom.exact_a();
    const Fraction b = *geom.exact_b();
    // 1/a^2 = da^2/na^2; over the common denominator na^2 nb^2 the key is
    // m^2 (da nb)^2 + n^2 (db na)^2.
    const i128 x = static_cast<i128>(a.den) * b.num;
    const i128 y = static_cast<i128>(b.den) * a.num;
    i128 alpha = x * x;
    i128 beta = y * y;
    if (alpha > kInt64Max || beta > kInt64Max) return;
    const auto g = std::gcd(static_cast<std::int64_t>(alpha), static_cast<std::int64_t>(beta));
    alpha_ = static_cast<std::int64_t>(alpha) / g;
    beta_ = static_cast<std::int64_t>(beta) / g;
    exact_ = true;
  }

  bool exact() const { return exact_; }

  struct Key {
    i128 exact = 0;
    double value = 0.0;
  };

  Key key(EigenIndex idx) const {
    Key k;
    k.value = eigenvalue(geom_, idx);
    if (exact_) {
      const i128 m2 = static_cast<i128>(idx.m) * idx.m;
      const i128 n2 = static_cast<i128>(idx.n) * idx.n;
      k.exact = m2 * alpha_ + n2 * beta_;
    }
    return k;
  }

  bool less(const Key& l, const Key& r) const {
    return exact_ ? l.exact < r.exact : l.value < r.value;
  }

  // Grouping relation between a group's first member and a later member
  // (sorted order).
  bool same(const Key& first, const Key& later) const {
    if (exact_) return first.exact == later.exact;
    return later.value - first.value <= tol_ * std::abs(later.value);
  }

  // `k` lies at or below `bound`, widened by the grouping tolerance in float
  // mode so that complete groups are collected.
  bool at_most(const Key& k, const Key& bound) const {
    if (exact_) return k.exact <= bound.exact;
    return k.value <= bound.value * (1.0 + 2.0 * tol_);
  }

 private:
  const TorusGeometry& geom_;
  double tol_;
  bool exact_ = false;
  std::int64_t alpha_ = 0;
  std::int64_t beta_ = 0;
};

struct Mode {
  EigenIndex idx;
  ModeOrder::Key key;
};

Sharpness classify(const SpectrumEntry& e) {
  if (e.modes.size() != 1) return Sharpness::undetermined;
  const EigenIndex idx = e.modes.front();
  std::int64_t nodal = 0;
  if (idx.m >= 1 && idx.n >= 1) nodal = 4 * idx.m * idx.n;
  else if (idx.m >= 1) nodal = 2 * idx.m;
  else if (idx.n >= 1) nodal = 2 * idx.n;
  else nodal = 1;
  return nodal == e.first_index ? Sharpness::yes : Sharpness::no;
}

std::vector<SpectrumEntry> group_modes(std::vector<Mode>& modes, const ModeOrder& order) {
  std::stable_sort(modes.begin(), modes.end(), [&](const Mode& l, const Mode& r) {
    if (order.less(l.key, r.key)) return true;
    if (order.less(r.key, l.key)) return false;
    return l.idx < r.idx;
  });
  std::vector<SpectrumEntry> entries;
  std::int64_t next_index = 1;
  std::size_t i = 0;
  while (i < modes.size()) {
    SpectrumEntry e;
    e.value = modes[i].key.value;
    e.first_index = next_index;
    const auto first = modes[i].key;
    while (i < modes.size() && order.same(first, modes[i].key)) {
      e.modes.push_back(modes[i].idx);
      e.multiplicity += mode_multiplicity(modes[i].idx);
      ++i;
    }
    std::sort(e.modes.begin(), e.modes.end());
    next_index += e.multiplicity;
    e.courant_sharp = classify(e);
    entries.push_back(std::move(e));
  }
  return entries;
}

// All modes whose eigenvalue does not exceed the eigenvalue of `target`.
std::vector<SpectrumEntry> entries_through(const TorusGeometry& /*geom*/, EigenIndex target,
                                           const SpectrumOptions& opts, ModeOrder& order) {
  const auto bound = order.key(target);
  std::vector<Mode> modes;
  for (std::int64_t m = 0;; ++m) {
    if (m > opts.radius_cap) fail(ErrorCode::CapOverflow, "mode search radius exceeds cap");
    const auto km = order.key({m, 0});
    if (!order.at_most(km, bound)) break;
    for (std::int64_t n = 0;; ++n) {
      if (n > opts.radius_cap) fail(ErrorCode::CapOverflow, "mode search radius exceeds cap");
      const auto k = order.key({m, n});
      if (!order.at_most(k, bound)) break;
      modes.push_back({{m, n}, k});
    }
  }
  return group_modes(modes, order);
}

const SpectrumEntry& entry_of(const std::vector<SpectrumEntry>& entries, EigenIndex idx) {
  for (const auto& e : entries) {
    if (std::find(e.modes.begin(), e.modes.end(), idx) != e.modes.end()) return e;
  }
  fail(ErrorCode::InvalidArgument, "mode not present in its own enumeration");
}

void check_index(EigenIndex idx) {
  if (idx.m < 0 || idx.n < 0) fail(ErrorCode::InvalidArgument, "mode indices must be non-negative");
}

}  // namespace

const char* to_string(Sharpness s) {
  switch (s) {
    case Sharpness::yes: return "yes";
    case Sharpness::no: return "no";
    case Sharpness::undetermined: return "undetermined";
  }
  return "undetermined";
}

std::int64_t mode_multiplicity(EigenIndex idx) {
  if (idx.m == 0 && idx.n == 0) return 1;
  if (idx.m == 0 || idx.n == 0) return 2;
  return 4;
}

std::int64_t courant_lower_bound(EigenIndex idx) {
  return 4 * idx.m * idx.n + 2 * idx.m + 2 * idx.n - 2;
}

std::optional<RationalEigenvalue> rational_eigenvalue(const TorusGeometry& geom) {
  if (!geom.is_rational()) return std::nullopt;
  const Fraction a = *geom.exact_a();
  const Fraction b = *geom.exact_b();
  auto inv_square = [](Fraction f) -> std::optional<Fraction> {
    const i128 num = static_cast<i128>(f.den) * f.den;
    const i128 den = static_cast<i128>(f.num) * f.num;
    if (num > kInt64Max || den > kInt64Max) return std::nullopt;
    return Fraction{static_cast<std::int64_t>(num), static_cast<std::int64_t>(den)};
  };
  auto cm = inv_square(a);
  auto cn = inv_square(b);
  if (!cm || !cn) return std::nullopt;
  return RationalEigenvalue{*cm, *cn};
}

double eigenvalue(const TorusGeometry& geom, EigenIndex idx) {
  const double m = static_cast<double>(idx.m) / geom.a();
  const double n = static_cast<double>(idx.n) / geom.b();
  return 4.0 * kPi2 * (m * m + n * n);
}

Spectrum enumerate_spectrum(const TorusGeometry& geom, std::size_t count,
                            const SpectrumOptions& opts) {
  if (count < 1) fail(ErrorCode::InvalidArgument, "count must be >= 1");
  ModeOrder order(geom, opts);
  auto radius = static_cast<std::int64_t>(
                    std::ceil(std::sqrt(static_cast<double>(count)) * std::max(geom.a(), geom.b()))) +
                2;
  for (;;) {
    if (radius > opts.radius_cap) fail(ErrorCode::CapOverflow, "mode search radius exceeds cap");
    // Every mode outside [0,R]^2 lies at or above min(lambda_{R+1,0}, lambda_{0,R+1}).
    const auto kx = order.key({radius + 1, 0});
    const auto ky = order.key({0, radius + 1});
    const auto bound = order.less(kx, ky) ? kx : ky;
    std::vector<Mode> modes;
    for (std::int64_t m = 0; m <= radius; ++m) {
      for (std::int64_t n = 0; n <= radius; ++n) {
        const auto k = order.key({m, n});
        if (!order.less(k, bound)) break;
        modes.push_back({{m, n}, k});
      }
    }
    auto entries = group_modes(modes, order);
    // The last group may be missing members in float mode if they straddle
    // the bound; require one spare group as margin.
    const std::size_t needed = order.exact() ? count : count + 1;
    if (entries.size() >= needed) {
      entries.resize(count);
      Spectrum s;
      s.exact = order.exact();
      s.generic = std::all_of(entries.begin(), entries.end(),
                              [](const SpectrumEntry& e) { return e.modes.size() == 1; });
      s.entries = std::move(entries);
      return s;
    }
    radius *= 2;
  }
}

std::int64_t courant_index(const TorusGeometry& geom, EigenIndex idx, const SpectrumOptions& opts) {
  check_index(idx);
  ModeOrder order(geom, opts);
  const auto entries = entries_through(geom, idx, opts, order);
  return entry_of(entries, idx).first_index;
}

std::int64_t max_nodal_count(const TorusGeometry& geom, EigenIndex idx, const SpectrumOptions& opts) {
  check_index(idx);
  ModeOrder order(geom, opts);
  const auto entries = entries_through(geom, idx, opts, order);
  const auto& e = entry_of(entries, idx);
  if (e.modes.size() != 1) {
    std::ostringstream os;
    os << "eigenvalue of (" << idx.m << "," << idx.n << ") is shared by " << e.modes.size()
       << " mode pairs";
    fail(ErrorCode::AmbiguousEigenspace, os.str());
  }
  if (idx.m >= 1 && idx.n >= 1) return 4 * idx.m * idx.n;
  if (idx.m >= 1) return 2 * idx.m;
  if (idx.n >= 1) return 2 * idx.n;
  return 1;
}

Sharpness is_courant_sharp(const TorusGeometry& geom, EigenIndex idx, const SpectrumOptions& opts) {
  std::int64_t nodal = 0;
  try {
    nodal = max_nodal_count(geom, idx, opts);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::AmbiguousEigenspace) return Sharpness::undetermined;
    throw;
  }
  return nodal == courant_index(geom, idx, opts) ? Sharpness::yes : Sharpness::no;
}

std::vector<SpectrumRow> spectrum_rows(const TorusGeometry& geom, std::size_t count,
                                       const SpectrumOptions& opts) {
  const auto spec = enumerate_spectrum(geom, count, opts);
  std::vector<SpectrumRow> rows;
  rows.reserve(count);
  for (const auto& e : spec.entries) {
    for (const auto& mode : e.modes) {
      for (std::int64_t r = 0; r < mode_multiplicity(mode); ++r) {
        if (rows.size() == count) return rows;
        SpectrumRow row;
        row.index = static_cast<std::int64_t>(rows.size()) + 1;
        row.mode = mode;
        row.value = e.value;
        row.multiplicity = e.multiplicity;
        row.courant_index = e.first_index;
        row.courant_sharp = e.courant_sharp;
        rows.push_back(row);
      }
    }
  }
  return rows;
}

void write_spectrum_csv(std::ostream& os, const std::vector<SpectrumRow>& rows) {
  os << "index,m,n,value,value_over_pi2,multiplicity,courant_index,courant_sharp\n";
  std::ostringstream line;
  for (const auto& r : rows) {
    line.str("");
    line << r.index << ',' << r.mode.m << ',' << r.mode.n << ',' << std::setprecision(17)
         << r.value << ',' << std::setprecision(12) << r.value / kPi2 << ',' << r.multiplicity << ',' << r.courant_index << ','
         << to_string(r.courant_sharp) << '\n';
    os << line.str();
  }
}

}  // namespace tpl
