#pragma once

#include <cstdint>
#include <span>

#include "isp/errors.hpp"

namespace isp {

// One observed time step: a 1-based step index (strictly increasing within a
// series) and a finite scalar response.
struct SamplePoint {
    std::int64_t t = 0;
    double y = 0.0;
};

// Intercept/slope of a simple linear fit, in response units and response
// units per step.
struct LineFit {
    double beta0 = 0.0;
    double beta1 = 0.0;

    double at(double t) const { return beta0 + beta1 * t; }
};

// Constant-size accumulator for a simple linear regression of y on t.
//
// Only five running sums plus the point count are kept; the residual sum of
// squares and the fitted coefficients are recovered from them on demand, so
// an arbitrarily long stretch of a series can be carried in O(1) memory.
struct SuffStats {
    double theta = 0.0;     // sum of t
    double big_theta = 0.0; // sum of t^2
    double psi = 0.0;       // sum of y
    double big_psi = 0.0;   // sum of y^2
    double tau = 0.0;       // sum of t*y
    std::int64_t count = 0;

    // Accumulate one point. Throws DataQualityError on non-finite y: a single
    // NaN would poison all five sums with no way to back it out.
    void add(const SamplePoint& p);

    // Componentwise sum. The two operands must cover disjoint step sets;
    // disjointness is the caller's contract and is not checked.
    [[nodiscard]] SuffStats merged(const SuffStats& other) const;

    // Residual sum of squares of the least-squares line through the
    // accumulated points. Requires count >= 2. Clamped below at zero, since
    // cancellation in the closed form can produce tiny negatives.
    [[nodiscard]] double rss() const;

    // Recover the fitted intercept and slope. Requires count >= 2 (with
    // strictly increasing t the design is then full rank).
    [[nodiscard]] LineFit coefficients() const;

    static SuffStats of(std::span<const SamplePoint> pts);
};

inline SuffStats accumulate(SuffStats stats, const SamplePoint& p) {
    stats.add(p);
    return stats;
}

inline SuffStats merge(const SuffStats& a, const SuffStats& b) {
    return a.merged(b);
}

// Paired update used when the partition boundary slides one step forward:
// `curr` absorbs the point leaving the buffer while the running union of
// curr and buffer absorbs the point that just arrived. The buffer itself is
// recomputed from its raw points by the caller.
void shift_update(SuffStats& curr, SuffStats& curr_union, const SamplePoint& oldest,
                  const SamplePoint& fresh);

} // namespace isp
