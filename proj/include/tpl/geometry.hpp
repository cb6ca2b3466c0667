// Copyright 2026 The torus-partitions Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <numbers>
#include <optional>

namespace tpl {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kPi2 = kPi * kPi;

/// Exact non-negative fraction num/den in lowest terms.
struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Fraction&, const Fraction&) = default;
};

/// Smallest-denominator fraction that converts back to exactly `x`, found by
/// continued-fraction convergents. Returns nullopt when no fraction with
/// denominator <= max_den reproduces x bit-for-bit (treated as irrational).
std::optional<Fraction> rationalize(double x, std::int64_t max_den = 1'000'000);

/// Flat torus T(a,b) = R^2 / (aZ x bZ); a and b are the two circumferences.
class TorusGeometry {
 public:
  /// Throws InvalidArgument unless a, b are finite and positive.
  TorusGeometry(double a, double b);

  /// Same torus with axes ordered so that a >= b; swapped() records whether
  /// the input axes were exchanged.
  static TorusGeometry normalized(double a, double b);

  double a() const { return a_; }
  double b() const { return b_; }
  bool swapped() const { return swapped_; }
  double area() const { return a_ * b_; }

  /// Exact values of a and b when both inputs are exactly representable
  /// fractions; this switches spectrum comparisons to exact arithmetic.
  const std::optional<Fraction>& exact_a() const { return exact_a_; }
  const std::optional<Fraction>& exact_b() const { return exact_b_; }
  bool is_rational() const { return exact_a_.has_value() && exact_b_.has_value(); }

  /// T(fx*a, fy*b), the covering torus obtained by repeating each period.
  TorusGeometry covering(int fx, int fy) const;
  /// T(s*a, s*b).
  TorusGeometry scaled(double s) const;

 private:
  double a_;
  double b_;
  bool swapped_ = false;
  std::optional<Fraction> exact_a_;
  std::optional<Fraction> exact_b_;
};

}  // namespace tpl
