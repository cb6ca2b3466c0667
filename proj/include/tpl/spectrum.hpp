// Copyright 2026 The torus-partitions Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "tpl/geometry.hpp"

namespace tpl {

/// Mode (m,n) of the torus eigenbasis: m oscillations along the a-period,
/// n along the b-period.
struct EigenIndex {
  std::int64_t m = 0;
  std::int64_t n = 0;
  friend auto operator<=>(const EigenIndex&, const EigenIndex&) = default;
};

enum class Sharpness { yes, no, undetermined };
const char* to_string(Sharpness s);

/// Dimension contributed by a single mode pair: 1 for (0,0), 2 when exactly
/// one index vanishes, 4 otherwise.
std::int64_t mode_multiplicity(EigenIndex idx);

/// Counting lower bound 4mn + 2m + 2n - 2 on the Courant index of (m,n) for
/// m,n >= 1.
std::int64_t courant_lower_bound(EigenIndex idx);

struct SpectrumEntry {
  double value = 0.0;
  std::vector<EigenIndex> modes;
  std::int64_t multiplicity = 0;
  std::int64_t first_index = 0;  // 1-based
  Sharpness courant_sharp = Sharpness::undetermined;
};

struct SpectrumOptions {
  std::int64_t radius_cap = 1'000'000;
  double group_tol = 1e-9;  // relative; only used when the torus is not rational
};

struct Spectrum {
  std::vector<SpectrumEntry> entries;
  bool exact = false;    // grouping done in exact rational arithmetic
  bool generic = false;  // no entry merges two distinct mode pairs
};

/// lambda / (4 pi^2) = coeff_m2 * m^2 + coeff_n2 * n^2, exact when a, b are
/// rational.
struct RationalEigenvalue {
  Fraction coeff_m2;
  Fraction coeff_n2;
};
std::optional<RationalEigenvalue> rational_eigenvalue(const TorusGeometry& geom);

/// 4 pi^2 (m^2/a^2 + n^2/b^2).
double eigenvalue(const TorusGeometry& geom, EigenIndex idx);

/// The first `count` distinct eigenvalues (entries), each with its modes,
/// multiplicity and 1-based index of first occurrence. Throws CapOverflow
/// when the mode search radius would exceed opts.radius_cap.
Spectrum enumerate_spectrum(const TorusGeometry& geom, std::size_t count,
                            const SpectrumOptions& opts = {});

/// Minimal k with lambda_k = lambda_{m,n}.
std::int64_t courant_index(const TorusGeometry& geom, EigenIndex idx,
                           const SpectrumOptions& opts = {});

/// Nodal-domain count attained by eigenfunctions of a simple mode pair:
/// 4mn, 2m, 2n or 1. Throws AmbiguousEigenspace when the eigenvalue is shared
/// with another mode pair, where that count is not known to apply.
std::int64_t max_nodal_count(const TorusGeometry& geom, EigenIndex idx,
                             const SpectrumOptions& opts = {});

Sharpness is_courant_sharp(const TorusGeometry& geom, EigenIndex idx,
                           const SpectrumOptions& opts = {});

/// One row per eigenvalue counted with multiplicity (lambda_1, lambda_2, ...).
struct SpectrumRow {
  std::int64_t index = 0;
  EigenIndex mode;
  double value = 0.0;
  std::int64_t multiplicity = 0;
  std::int64_t courant_index = 0;
  Sharpness courant_sharp = Sharpness::undetermined;
};

std::vector<SpectrumRow> spectrum_rows(const TorusGeometry& geom, std::size_t count,
                                       const SpectrumOptions& opts = {});

/// CSV with header index,m,n,value,value_over_pi2,multiplicity,courant_index,courant_sharp
void write_spectrum_csv(std::ostream& os, const std::vector<SpectrumRow>& rows);

}  // namespace tpl
