#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace crad {

using NodeIndex = std::uint32_t;

/// Number of unordered node pairs {i, j}, i != j.
constexpr std::size_t pair_count(std::size_t n_nodes) noexcept {
  return n_nodes < 2 ? 0 : n_nodes * (n_nodes - 1) / 2;
}

/// Row-major index of the unordered pair {i, j} in the strict upper triangle.
/// Arguments may come in either order; i == j is a precondition violation.
constexpr std::size_t pair_index(std::size_t n_nodes, std::size_t i,
                                 std::size_t j) noexcept {
  if (i > j) std::swap(i, j);
  return i * (2 * n_nodes - i - 1) / 2 + (j - i - 1);
}

/// Inverse of pair_index. Linear in the row; intended for I/O and tests.
std::pair<NodeIndex, NodeIndex> pair_from_index(std::size_t n_nodes,
                                                std::size_t index);

/// Dense symmetric storage of one value per unordered pair. Used for the
/// anomaly posterior Q, which is dense by nature.
template <class T>
class PairArray {
 public:
  PairArray() = default;
  PairArray(std::size_t n_nodes, T fill)
      : n_nodes_(n_nodes), values_(pair_count(n_nodes), fill) {}

  std::size_t n_nodes() const noexcept { return n_nodes_; }
  std::size_t size() const noexcept { return values_.size(); }

  T& operator()(std::size_t i, std::size_t j) {
    return values_[pair_index(n_nodes_, i, j)];
  }
  const T& operator()(std::size_t i, std::size_t j) const {
    return values_[pair_index(n_nodes_, i, j)];
  }

  T& at_index(std::size_t p) { return values_[p]; }
  const T& at_index(std::size_t p) const { return values_[p]; }

  std::vector<T>& values() noexcept { return values_; }
  const std::vector<T>& values() const noexcept { return values_; }

  bool operator==(const PairArray&) const = default;

 private:
  std::size_t n_nodes_ = 0;
  std::vector<T> values_;
};

using PairValues = PairArray<double>;

/// Marks unordered pairs excluded from fitting (held-out pairs in CV).
using PairMask = PairArray<std::uint8_t>;

inline std::pair<NodeIndex, NodeIndex> pair_from_index(std::size_t n_nodes,
                                                       std::size_t index) {
  if (index >= pair_count(n_nodes)) throw std::out_of_range("pair index");
  std::size_t i = 0;
  std::size_t row = n_nodes - 1;
  while (index >= row) {
    index -= row;
    ++i;
    --row;
  }
  return {static_cast<NodeIndex>(i), static_cast<NodeIndex>(i + 1 + index)};
}

}  // namespace crad
