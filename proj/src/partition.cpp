// Copyright 2026 The torus-partitions Authors.
// SPDX-License-Identifier: Apache-2.0

#include "tpl/partition.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "tpl/error.hpp"
#include "tpl/nodal.hpp"

namespace tpl {

std::vector<std::vector<std::size_t>> label_components(int nx, int ny, const std::vector<int>& labels,
                                                       int label) {
  const std::size_t n = labels.size();
  std::vector<char> seen(n, 0);
  std::vector<std::vector<std::size_t>> comps;
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < n; ++start) {
    if (labels[start] != label || seen[start]) continue;
    comps.emplace_back();
    auto& comp = comps.back();
    stack.push_back(start);
    seen[start] = 1;
    while (!stack.empty()) {
      const std::size_t c = stack.back();
      stack.pop_back();
      comp.push_back(c);
      const int i = static_cast<int>(c % nx), j = static_cast<int>(c / nx);
      const std::array<std::size_t, 4> nb{
          static_cast<std::size_t>(j) * nx + (i + 1) % nx,
          static_cast<std::size_t>(j) * nx + (i + nx - 1) % nx,
          static_cast<std::size_t>((j + 1) % ny) * nx + i,
          static_cast<std::size_t>((j + ny - 1) % ny) * nx + i};
      for (auto d : nb) {
        if (labels[d] == label && !seen[d]) {
          seen[d] = 1;
          stack.push_back(d);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
  }
  return comps;
}

GridPartition::GridPartition(TorusGeometry geometry, int nx, int ny, int k, std::vector<int> labels)
    : geometry_(geometry), nx_(nx), ny_(ny), k_(k), labels_(std::move(labels)) {
  validate();
}

void GridPartition::validate() const {
  if (nx_ < 1 || ny_ < 1) fail(ErrorCode::InvalidPartition, "grid dimensions must be positive");
  if (k_ < 1) fail(ErrorCode::InvalidPartition, "k must be >= 1");
  if (labels_.size() != static_cast<std::size_t>(nx_) * ny_)
    fail(ErrorCode::InvalidPartition, "label array size does not match nx*ny");
  std::vector<std::size_t> counts(static_cast<std::size_t>(k_) + 1, 0);
  for (int l : labels_) {
    if (l < 1 || l > k_) fail(ErrorCode::InvalidPartition, "label outside 1..k (unlabeled cell)");
    ++counts[static_cast<std::size_t>(l)];
  }
  for (int l = 1; l <= k_; ++l) {
    if (counts[static_cast<std::size_t>(l)] == 0) {
      fail(ErrorCode::InvalidPartition, "label " + std::to_string(l) + " is empty");
    }
    if (label_components(nx_, ny_, labels_, l).size() != 1) {
      fail(ErrorCode::InvalidPartition, "label " + std::to_string(l) + " is not 4-connected");
    }
  }
}

GridPartition GridPartition::from_components(TorusGeometry geometry, int nx, int ny,
                                             const std::vector<int>& raw_labels) {
  if (raw_labels.size() != static_cast<std::size_t>(nx) * ny)
    fail(ErrorCode::InvalidPartition, "label array size does not match nx*ny");
  std::vector<int> out(raw_labels.size(), 0);
  int next = 0;
  for (std::size_t c = 0; c < raw_labels.size(); ++c) {
    if (out[c] != 0) continue;
    ++next;
    std::vector<std::size_t> stack{c};
    out[c] = next;
    const int lab = raw_labels[c];
    while (!stack.empty()) {
      const std::size_t cur = stack.back();
      stack.pop_back();
      const int i = static_cast<int>(cur % nx), j = static_cast<int>(cur / nx);
      const std::array<std::size_t, 4> nb{
          static_cast<std::size_t>(j) * nx + (i + 1) % nx,
          static_cast<std::size_t>(j) * nx + (i + nx - 1) % nx,
          static_cast<std::size_t>((j + 1) % ny) * nx + i,
          static_cast<std::size_t>((j + ny - 1) % ny) * nx + i};
      for (auto d : nb) {
        if (out[d] == 0 && raw_labels[d] == lab) {
          out[d] = next;
          stack.push_back(d);
        }
      }
    }
  }
  return GridPartition(geometry, nx, ny, next, std::move(out));
}

std::size_t GridPartition::cell_count(int label) const {
  return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), label));
}

namespace {

static_assert(std::endian::native == std::endian::little, "container I/O assumes little-endian host");

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) fail(ErrorCode::Io, "truncated partition container");
  return v;
}

}  // namespace

void write_partition(std::ostream& os, const GridPartition& part) {
  os.write(kPartitionMagic, sizeof(kPartitionMagic));
  put<std::uint8_t>(os, kPartitionVersion);
  put<double>(os, part.geometry().a());
  put<double>(os, part.geometry().b());
  put<std::uint32_t>(os, static_cast<std::uint32_t>(part.nx()));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(part.ny()));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(part.k()));
  for (int l : part.labels()) put<std::uint32_t>(os, static_cast<std::uint32_t>(l));
  if (!os) fail(ErrorCode::Io, "failed writing partition container");
}

GridPartition read_partition(std::istream& is) {
  char magic[sizeof(kPartitionMagic)];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kPartitionMagic, sizeof(magic)) != 0)
    fail(ErrorCode::Io, "not a partition container (bad magic)");
  const auto version = get<std::uint8_t>(is);
  if (version != kPartitionVersion)
    fail(ErrorCode::Io, "unsupported partition container version " + std::to_string(version));
  const double a = get<double>(is);
  const double b = get<double>(is);
  const auto nx = get<std::uint32_t>(is);
  const auto ny = get<std::uint32_t>(is);
  const auto k = get<std::uint32_t>(is);
  if (nx == 0 || ny == 0 || nx > (1u << 15) || ny > (1u << 15))
    fail(ErrorCode::Io, "implausible grid size in partition container");
  std::vector<int> labels(static_cast<std::size_t>(nx) * ny);
  for (auto& l : labels) l = static_cast<int>(get<std::uint32_t>(is));
  return GridPartition(TorusGeometry(a, b), static_cast<int>(nx), static_cast<int>(ny),
                       static_cast<int>(k), std::move(labels));
}

void save_partition(const std::string& path, const GridPartition& part) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorCode::Io, "cannot open " + path + " for writing");
  write_partition(os, part);
}

GridPartition load_partition(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorCode::Io, "cannot open " + path);
  return read_partition(is);
}

void write_partition_pgm(std::ostream& os, const GridPartition& part) {
  write_labels_pgm(os, part.nx(), part.ny(), part.labels());
}

}  // namespace tpl
