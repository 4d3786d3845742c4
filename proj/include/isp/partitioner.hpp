#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "isp/ftest.hpp"
#include "isp/suffstats.hpp"

namespace isp {

struct PartitionerConfig {
    int buffer_size = 5; // B: raw steps the method may retain
    double alpha = 1e-3;
    double delta2 = 0.0;

    FTestConfig ftest() const { return FTestConfig{alpha, delta2}; }
    void validate() const; // buffer_size >= 3, alpha in (0,1), delta2 >= 0
};

// A closed partition: an inclusive step range, its sufficient statistics,
// and the residual and line recovered from them at close time.
struct Segment {
    std::size_t index = 0;
    std::int64_t start_t = 0;
    std::int64_t end_t = 0;
    SuffStats stats;
    double rss = 0.0;
    LineFit fit;

    std::int64_t length() const { return end_t - start_t + 1; }
};

// Build a segment from closed statistics. Single-point segments get a flat
// line through their one response and zero residual.
Segment make_segment(std::size_t index, std::int64_t start_t, std::int64_t end_t,
                     const SuffStats& stats);

// Interior boundaries of an ordered segment list (end_t of every segment but
// the last).
std::vector<std::int64_t> breakpoints(std::span<const Segment> segments);

// Greedy online partitioner.
//
// Feed points in step order with push(). The stream is split into three
// regions: already-closed history (kept only as emitted segments), the
// current open partition (kept only as sufficient statistics), and a buffer
// of at most `buffer_size` raw points. Once the buffer is full, each arrival
// tests whether two lines (current partition | buffer) beat one line over
// their union; a rejection closes the current partition at its last step,
// promotes the buffer to the new current partition, and starts refilling the
// buffer (with the triggering arrival as its first point) before testing
// resumes.
//
// Rejection uses strict p < alpha; outcomes with p within ~1e-9 of alpha are
// at the mercy of round-off and should be treated as implementation-defined.
class Partitioner {
  public:
    enum class Phase { Warmup, Steady, Refill };

    explicit Partitioner(const PartitionerConfig& cfg);

    // Consume the next time step (t must equal next_t()). Returns the closed
    // segment when this arrival triggers a breakpoint.
    std::optional<Segment> push(const SamplePoint& p);

    // Flush at stream end; returns the final one or two segments. The
    // remaining current/buffer pair gets one last test when the buffer holds
    // enough points to fit its own line, otherwise everything left is closed
    // as a single segment.
    std::vector<Segment> finish();

    Phase phase() const;
    const SuffStats& curr_stats() const { return curr_; }
    const SuffStats& union_stats() const { return union_; }
    const std::deque<SamplePoint>& buffer() const { return buffer_; }
    std::int64_t next_t() const { return next_t_; }
    std::size_t segments_emitted() const { return emitted_; }

    // Union statistics must equal current + batch of the buffer; used by
    // tests and debug checks.
    bool invariants_hold(double rel_tol = 1e-9) const;

  private:
    SuffStats buffer_stats() const;

    PartitionerConfig cfg_;
    FTestConfig ftest_;
    SuffStats curr_;
    SuffStats union_;
    std::deque<SamplePoint> buffer_;
    std::int64_t next_t_ = 1;
    std::int64_t curr_start_ = 0;
    std::int64_t curr_end_ = 0;
    std::size_t emitted_ = 0;
    bool finished_ = false;
};

// Run the whole algorithm over an in-memory series with consecutive t
// starting at 1. Returns segments tiling 1..T.
std::vector<Segment> run_series(const PartitionerConfig& cfg, std::span<const SamplePoint> points);

} // namespace isp
