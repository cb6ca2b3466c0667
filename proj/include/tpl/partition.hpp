// Copyright 2026 The torus-partitions Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tpl/geometry.hpp"

namespace tpl {

/// k-partition of the torus as a label field on a periodic nx-by-ny cell grid.
/// Labels are 1..k, row-major with index j * nx + i; cell (i,j) covers
/// [i a/nx, (i+1) a/nx) x [j b/ny, (j+1) b/ny).
///
/// Invariants (checked by validate()): every cell labeled, every label in
/// 1..k present, every label class 4-connected on the periodic grid.
class GridPartition {
 public:
  GridPartition(TorusGeometry geometry, int nx, int ny, int k, std::vector<int> labels);

  /// Relabels classes to 1..k in order of first appearance and splits
  /// disconnected classes into separate labels; the result always satisfies
  /// the invariants.
  static GridPartition from_components(TorusGeometry geometry, int nx, int ny,
                                       const std::vector<int>& raw_labels);

  const TorusGeometry& geometry() const { return geometry_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int k() const { return k_; }
  const std::vector<int>& labels() const { return labels_; }
  std::size_t cells() const { return labels_.size(); }

  int at(int i, int j) const { return labels_[index(i, j)]; }
  std::size_t index(int i, int j) const {
    const int ii = ((i % nx_) + nx_) % nx_;
    const int jj = ((j % ny_) + ny_) % ny_;
    return static_cast<std::size_t>(jj) * nx_ + ii;
  }
  std::size_t cell_count(int label) const;

  friend bool operator==(const GridPartition& l, const GridPartition& r) {
    return l.nx_ == r.nx_ && l.ny_ == r.ny_ && l.k_ == r.k_ && l.labels_ == r.labels_ &&
           l.geometry_.a() == r.geometry_.a() && l.geometry_.b() == r.geometry_.b();
  }

 private:
  void validate() const;

  TorusGeometry geometry_;
  int nx_;
  int ny_;
  int k_;
  std::vector<int> labels_;
};

/// Connected components of the cells carrying label `label` (4-adjacency,
/// periodic). Each component is a list of cell indices.
std::vector<std::vector<std::size_t>> label_components(int nx, int ny, const std::vector<int>& labels,
                                                       int label);

// Partition container, little-endian:
//   magic "TPLPART" (7 bytes), version byte (1),
//   a, b as IEEE-754 binary64, nx, ny, k as uint32,
//   nx*ny labels as uint32, row-major.
inline constexpr char kPartitionMagic[7] = {'T', 'P', 'L', 'P', 'A', 'R', 'T'};
inline constexpr std::uint8_t kPartitionVersion = 1;

void write_partition(std::ostream& os, const GridPartition& part);
GridPartition read_partition(std::istream& is);
void save_partition(const std::string& path, const GridPartition& part);
GridPartition load_partition(const std::string& path);

/// Binary PGM of the labels (top row = largest y).
void write_partition_pgm(std::ostream& os, const GridPartition& part);

}  // namespace tpl
