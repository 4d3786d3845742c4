#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "isp/partitioner.hpp"

namespace isp {

// Gaussian deviates from a named, portable stream: mt19937_64 plus an
// explicit Box-Muller transform (uniforms taken as the top 53 engine bits),
// so a seed pins the exact draw sequence independent of the standard
// library's distribution internals. Derive per-series streams by giving each
// series its own seed; a single sampler is never shared across series.
class GaussianSampler {
  public:
    explicit GaussianSampler(std::uint64_t seed) : eng_(seed) {}

    double next();

  private:
    double uniform01(); // in (0, 1]

    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Piecewise-linear truth plus optional Gaussian noise. breakpoints[j] is the
// last step of piece j; pieces holds one intercept/slope pair per piece
// (breakpoints.size() + 1 entries).
struct SynthSpec {
    std::int64_t length = 0;
    std::vector<std::int64_t> breakpoints;
    std::vector<LineFit> pieces;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
    double true_value(std::int64_t t) const;
};

std::vector<SamplePoint> generate(const SynthSpec& spec);

// Full-data reference implementation of the greedy loop: every residual sum
// is recomputed from raw points with centered two-pass least squares, no
// incremental statistics anywhere. Exists to cross-check the streaming
// partitioner decision by decision.
std::vector<Segment> oracle_greedy(const PartitionerConfig& cfg,
                                   std::span<const SamplePoint> points);

struct OracleRun {
    std::vector<Segment> segments;
    // Smallest |p_value - alpha| seen over every hypothesis test in the run;
    // near-threshold streams can be excluded from equivalence checks.
    double min_alpha_gap = 0.0;
};

OracleRun oracle_greedy_run(const PartitionerConfig& cfg, std::span<const SamplePoint> points);

// Exact least-squares segmentation into m contiguous pieces by dynamic
// programming, ties broken toward earlier breakpoints. O(m T^2) time and
// O(T) extra memory per cost row; a fidelity yardstick for offline use only.
// Requires 1 <= m <= T/2.
std::vector<Segment> optimal_segments(std::span<const SamplePoint> points, std::size_t m);

} // namespace isp
