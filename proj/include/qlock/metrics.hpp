#pragma once

#include <string_view>

#include "qlock/simulator.hpp"

namespace qlock {

// Total variation distance over the union of outcome keys:
//   sum_x |count_a(x) - count_b(x)| / shots.
// Ranges over [0, 2]; 0 for identical histograms, 2 for disjoint support.
// Both distributions must carry the same positive shot count.
double tvd(const Distribution& a, const Distribution& b);

// Degree of functional corruption:
//   (count(correct) - max over incorrect outcomes) / shots.
// +1 when every shot lands on the correct outcome, -1 when some incorrect
// outcome takes every shot; positive iff the correct outcome is the strict
// plurality winner.
double dfc(const Distribution& d, std::string_view correct_outcome);

// Fraction of shots on the correct outcome.
double fidelity(const Distribution& d, std::string_view correct_outcome);

}  // namespace qlock
