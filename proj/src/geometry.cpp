// Copyright 2026 The torus-partitions Authors.
// SPDX-License-Identifier: Apache-2.0

#include "tpl/geometry.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <utility>

#include "tpl/error.hpp"

namespace tpl {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::CapOverflow: return "CapOverflow";
    case ErrorCode::AmbiguousEigenspace: return "AmbiguousEigenspace";
    case ErrorCode::ResolutionUnstable: return "ResolutionUnstable";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::IndivisibleResolution: return "IndivisibleResolution";
    case ErrorCode::NotAnnular: return "NotAnnular";
    case ErrorCode::SolverDiverged: return "SolverDiverged";
    case ErrorCode::InvalidPartition: return "InvalidPartition";
    case ErrorCode::HypothesisNotMet: return "HypothesisNotMet";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

std::optional<Fraction> rationalize(double x, std::int64_t max_den) {
  if (!std::isfinite(x) || x < 0.0) return std::nullopt;
  // Convergents h/k of the continued fraction of x.
  std::int64_t h_prev = 1, h = static_cast<std::int64_t>(std::floor(x));
  std::int64_t k_prev = 0, k = 1;
  double rem = x - std::floor(x);
  for (int iter = 0; iter < 64; ++iter) {
    if (static_cast<double>(h) / static_cast<double>(k) == x) return Fraction{h, k};
    if (rem == 0.0) break;
    const double inv = 1.0 / rem;
    const double digit_d = std::floor(inv);
    if (digit_d > 1e12) break;
    const auto digit = static_cast<std::int64_t>(digit_d);
    rem = inv - digit_d;
    const std::int64_t h_next = digit * h + h_prev;
    const std::int64_t k_next = digit * k + k_prev;
    if (k_next > max_den || h_next > max_den * 1000) break;
    h_prev = std::exchange(h, h_next);
    k_prev = std::exchange(k, k_next);
  }
  return std::nullopt;
}

TorusGeometry::TorusGeometry(double a, double b) : a_(a), b_(b) {
  if (!(std::isfinite(a) && std::isfinite(b) && a > 0.0 && b > 0.0)) {
    std::ostringstream os;
    os << "torus circumferences must be positive, got a=" << a << " b=" << b;
    fail(ErrorCode::InvalidArgument, os.str());
  }
  exact_a_ = rationalize(a);
  exact_b_ = rationalize(b);
}

TorusGeometry TorusGeometry::normalized(double a, double b) {
  if (a >= b) return TorusGeometry(a, b);
  TorusGeometry g(b, a);
  g.swapped_ = true;
  return g;
}

TorusGeometry TorusGeometry::covering(int fx, int fy) const {
  if (fx < 1 || fy < 1) fail(ErrorCode::InvalidArgument, "covering factors must be >= 1");
  TorusGeometry g(a_ * fx, b_ * fy);
  g.swapped_ = swapped_;
  return g;
}

TorusGeometry TorusGeometry::scaled(double s) const {
  TorusGeometry g(a_ * s, b_ * s);
  g.swapped_ = swapped_;
  return g;
}

}  // namespace tpl
