#include "qlock/metrics.hpp"

#include <cstdlib>

#include "qlock/error.hpp"

namespace qlock {

namespace {

void require_shots(const Distribution& d) {
  if (d.shots == 0) throw Error(ErrorCode::ZeroShots, "distribution has zero shots");
}

}  // namespace

double tvd(const Distribution& a, const Distribution& b) {
  require_shots(a);
  require_shots(b);
  if (a.shots != b.shots) {
    throw Error(ErrorCode::ShotMismatch, std::to_string(a.shots) + " vs " +
                                             std::to_string(b.shots) + " shots");
  }
  double total = 0.0;
  for (const auto& [key, count] : a.counts) {
    const auto it = b.counts.find(key);
    const uint64_t other = it == b.counts.end() ? 0 : it->second;
    total += std::abs(static_cast<double>(count) - static_cast<double>(other));
  }
  for (const auto& [key, count] : b.counts) {
    if (!a.counts.contains(key)) total += static_cast<double>(count);
  }
  return total / static_cast<double>(a.shots);
}

double dfc(const Distribution& d, std::string_view correct_outcome) {
  require_shots(d);
  uint64_t correct = 0;
  uint64_t worst_incorrect = 0;
  for (const auto& [key, count] : d.counts) {
    if (key == correct_outcome) {
      correct = count;
    } else {
      worst_incorrect = std::max(worst_incorrect, count);
    }
  }
  return (static_cast<double>(correct) - static_cast<double>(worst_incorrect)) /
         static_cast<double>(d.shots);
}

double fidelity(const Distribution& d, std::string_view correct_outcome) {
  require_shots(d);
  const auto it = d.counts.find(std::string(correct_outcome));
  const uint64_t correct = it == d.counts.end() ? 0 : it->second;
  return static_cast<double>(correct) / static_cast<double>(d.shots);
}

}  // namespace qlock
