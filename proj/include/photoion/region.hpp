// region.hpp — momentum regions T for charge measurements
#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "photoion/common.hpp"

namespace photoion {

struct MomentumRegion {
  double p_min = 0.0;
  double p_max = std::numeric_limits<double>::infinity();
  std::vector<int> signs;                    // d = 1: allowed signs of p (empty = both)
  std::function<bool(const Vec3&)> angular;  // d = 3: optional predicate on p/|p|
  bool all_space = false;
  std::string id = "region";

  bool contains(const Vec3& p, int dim) const;
  void validate() const;
  // Radial interval actually covered ([0, inf) for all_space).
  double radial_min() const { return all_space ? 0.0 : p_min; }
  double radial_max() const { return all_space ? std::numeric_limits<double>::infinity() : p_max; }
};

}  // namespace photoion
