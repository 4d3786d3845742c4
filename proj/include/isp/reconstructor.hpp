#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "isp/partitioner.hpp"

namespace isp {

// A piecewise-linear approximation rebuilt from closed segments. Evaluation
// is defined for every step in [t_begin, t_end]; the pieces need not be
// continuous at breakpoints.
struct Reconstruction {
    std::vector<Segment> segments; // ordered, tiling [t_begin, t_end]
    double rss_total = 0.0;
    std::size_t n_partitions = 0;

    std::int64_t t_begin() const { return segments.front().start_t; }
    std::int64_t t_end() const { return segments.back().end_t; }

    // Value of the containing segment's line at t. Throws
    // std::invalid_argument outside [t_begin, t_end].
    double evaluate(std::int64_t t) const;
};

// Validate ordering and tiling (throws IntegrityError on a gap or overlap)
// and total the per-segment residuals.
Reconstruction make_reconstruction(std::vector<Segment> segments);

// The standard keep-every-kth-step practice: pick k evenly spaced steps
// (endpoints always included), connect consecutive saved points by straight
// chords, and measure the interpolant's residual against the full series.
// n_partitions is reported as k, matching the saved-step accounting.
// Offline only: needs the whole series. Requires 2 <= k <= T.
Reconstruction evenly_spaced_baseline(std::span<const SamplePoint> series, std::size_t k);

struct SegmentRss {
    std::size_t segment_index = 0;
    double rss = 0.0;
};

struct ComparisonReport {
    std::size_t n_partitions_a = 0;
    std::size_t n_partitions_b = 0;
    double rss_total_a = 0.0;
    double rss_total_b = 0.0;
    // Per-segment residuals sorted descending: where each reconstruction
    // fits worst, for deciding which stretches deserve a second look.
    std::vector<SegmentRss> worst_a;
    std::vector<SegmentRss> worst_b;
};

// Side-by-side cost/fidelity report. Both reconstructions must cover the
// same step range.
ComparisonReport compare(const Reconstruction& a, const Reconstruction& b);

struct AuditRow {
    std::size_t segment_index = 0;
    double stored_rss = 0.0;
    double replayed_rss = 0.0;
};

// Replay each segment's line against retained raw data and report the
// squared-residual sums next to the stored values.
std::vector<AuditRow> audit_rss(const Reconstruction& recon, std::span<const SamplePoint> series);

} // namespace isp
