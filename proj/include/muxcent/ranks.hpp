#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <numeric>
#include <vector>

namespace muxcent {

// Fractional ranks with rank 1 for the largest value; tied values share the
// average of the positions they span, e.g. (3, 1, 3) -> (1.5, 3, 1.5).
inline Eigen::VectorXd fractionalRanks(const Eigen::VectorXd& values) {
  const auto n = values.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return values[a] > values[b]; });

  Eigen::VectorXd ranks(n);
  for (Eigen::Index pos = 0; pos < n;) {
    Eigen::Index end = pos;
    while (end + 1 < n && values[order[static_cast<std::size_t>(end + 1)]] == values[order[static_cast<std::size_t>(pos)]]) {
      ++end;
    }
    // positions pos..end (0-based) tie; ranks are 1-based
    const double avg = 0.5 * static_cast<double>(pos + end) + 1.0;
    for (Eigen::Index k = pos; k <= end; ++k) {
      ranks[order[static_cast<std::size_t>(k)]] = avg;
    }
    pos = end + 1;
  }
  return ranks;
}

// Indices whose value ties with at least one other entry, in index order.
inline std::vector<Eigen::Index> tiedIndices(const Eigen::VectorXd& values) {
  const auto n = values.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return values[a] < values[b]; });

  std::vector<bool> tied(static_cast<std::size_t>(n), false);
  for (Eigen::Index pos = 0; pos < n;) {
    Eigen::Index end = pos;
    while (end + 1 < n && values[order[static_cast<std::size_t>(end + 1)]] == values[order[static_cast<std::size_t>(pos)]]) {
      ++end;
    }
    if (end > pos) {
      for (Eigen::Index k = pos; k <= end; ++k) tied[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = true;
    }
    pos = end + 1;
  }

  std::vector<Eigen::Index> ties;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (tied[static_cast<std::size_t>(i)]) ties.push_back(i);
  }
  return ties;
}

}  // namespace muxcent
