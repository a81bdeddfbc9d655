#pragma once

#include <span>
#include <stdexcept>
#include <vector>

namespace psm {

// Raised when a density cannot be smoothed (fewer than two points or no
// spread); callers draw the histogram alone.
class DegenerateData : public std::domain_error {
 public:
  DegenerateData() : std::domain_error("degenerate data: no spread to smooth") {}
};

struct KdeCurve {
  double bandwidth = 0.0;
  std::vector<double> x;
  std::vector<double> density;
};

inline constexpr std::size_t kKdeGridPoints = 256;

// Gaussian kernel density with Silverman's bandwidth
//   h = 0.9 * min(sd, IQR / 1.34) * n^(-1/5)
// (sd alone when the IQR is zero), evaluated on 256 equally spaced points
// over [min - 3h, max + 3h]. With weights, sd, quantiles and the kernel sum
// use normalised weights and n is the effective size (sum w)^2 / sum w^2.
KdeCurve kde(std::span<const double> values, std::span<const double> weights = {});

}  // namespace psm
