#pragma once

#include <vector>

namespace geoanneal {

// Ground-state gap E1 - E0 sampled along s, sorted by s.
struct GapProfile {
  std::vector<double> s;
  std::vector<double> gap;
  double bottleneck = 0.0;      // argmax of gap^-2 over all samples
  double min_gap = 0.0;
  int resolution_exponent = 5;  // coarse grid spacing 2^-r
  int refine_exponent = 10;     // refinement spacing near the minimum
  bool degenerate = false;      // some sample below 1e-12
};

}  // namespace geoanneal
