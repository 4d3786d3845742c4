#pragma once

#include <cstdint>

#include "isp/suffstats.hpp"

namespace isp {

// Planar-rotation (Givens) updating least squares for y on (1, t).
//
// Alternative to the plain running sums for very long partitions, where the
// raw sums of t and t^2 eventually swamp double precision. Maintains the
// factored normal equations instead of the sums; one add() per point, same
// O(1) memory, and the same rss()/coefficients() contracts as SuffStats.
class RotationRegression {
  public:
    void add(const SamplePoint& p);

    std::int64_t count() const { return n_; }
    double rss() const;              // requires count >= 2
    LineFit coefficients() const;    // requires count >= 2

  private:
    double d_[2] = {0.0, 0.0};       // row scale factors
    double rbar_ = 0.0;              // off-diagonal of the unit upper-triangular factor
    double thetab_[2] = {0.0, 0.0};  // rotated responses
    double sserr_ = 0.0;
    std::int64_t n_ = 0;
};

} // namespace isp
