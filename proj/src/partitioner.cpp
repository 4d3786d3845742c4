#include "isp/partitioner.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace isp {

void PartitionerConfig::validate() const {
    if (buffer_size < 3) {
        throw std::invalid_argument("buffer_size must be >= 3 (two line parameters need three "
                                    "points), got " +
                                    std::to_string(buffer_size));
    }
    ftest().validate();
}

Segment make_segment(std::size_t index, std::int64_t start_t, std::int64_t end_t,
                     const SuffStats& stats) {
    Segment seg;
    seg.index = index;
    seg.start_t = start_t;
    seg.end_t = end_t;
    seg.stats = stats;
    if (stats.count >= 2) {
        seg.rss = stats.rss();
        seg.fit = stats.coefficients();
    } else {
        seg.rss = 0.0;
        seg.fit = LineFit{stats.psi, 0.0};
    }
    return seg;
}

std::vector<std::int64_t> breakpoints(std::span<const Segment> segments) {
    std::vector<std::int64_t> out;
    if (segments.size() < 2) return out;
    out.reserve(segments.size() - 1);
    for (std::size_t i = 0; i + 1 < segments.size(); ++i) {
        out.push_back(segments[i].end_t);
    }
    return out;
}

Partitioner::Partitioner(const PartitionerConfig& cfg) : cfg_(cfg), ftest_(cfg.ftest()) {
    cfg_.validate();
}

Partitioner::Phase Partitioner::phase() const {
    if (curr_.count < cfg_.buffer_size) return Phase::Warmup;
    if (buffer_.size() < static_cast<std::size_t>(cfg_.buffer_size)) {
        return emitted_ > 0 ? Phase::Refill : Phase::Warmup;
    }
    return Phase::Steady;
}

SuffStats Partitioner::buffer_stats() const {
    SuffStats s;
    for (const SamplePoint& p : buffer_) {
        s.add(p);
    }
    return s;
}

std::optional<Segment> Partitioner::push(const SamplePoint& p) {
    if (finished_) {
        throw std::logic_error("push after finish");
    }
    if (p.t != next_t_) {
        throw SequenceError("expected time step " + std::to_string(next_t_) + ", got " +
                            std::to_string(p.t));
    }
    if (!std::isfinite(p.y)) {
        throw DataQualityError("non-finite response at t=" + std::to_string(p.t));
    }
    ++next_t_;

    const auto b = static_cast<std::size_t>(cfg_.buffer_size);

    // First B points form the opening partition; they are folded straight
    // into statistics and never buffered.
    if (curr_.count < cfg_.buffer_size) {
        if (curr_.count == 0) curr_start_ = p.t;
        curr_.add(p);
        union_.add(p);
        curr_end_ = p.t;
        return std::nullopt;
    }

    // Initial fill or post-breakpoint refill: no testing until the buffer
    // again holds B raw points.
    if (buffer_.size() < b) {
        buffer_.push_back(p);
        union_.add(p);
        return std::nullopt;
    }

    // Steady state. The buffer statistics are recomputed from its B raw
    // points; current and union are carried incrementally.
    const SuffStats buff = buffer_stats();
    const double rss_curr = curr_.rss();
    const double rss_buff = buff.rss();
    const double rss_one = union_.rss();
    const double rss_two = rss_curr + rss_buff;
    const FTestResult res = f_modified(rss_one, rss_two, union_.count, ftest_);

    if (res.reject) {
        Segment closed = make_segment(emitted_, curr_start_, curr_end_, curr_);
        ++emitted_;
        curr_ = buff;
        curr_start_ = buffer_.front().t;
        curr_end_ = buffer_.back().t;
        buffer_.clear();
        union_ = curr_;
        // The arrival that exposed the break becomes the first refill point.
        buffer_.push_back(p);
        union_.add(p);
        return closed;
    }

    const SamplePoint oldest = buffer_.front();
    buffer_.pop_front();
    buffer_.push_back(p);
    shift_update(curr_, union_, oldest, p);
    curr_end_ = oldest.t;
    return std::nullopt;
}

std::vector<Segment> Partitioner::finish() {
    if (finished_) {
        throw std::logic_error("finish called twice");
    }
    finished_ = true;

    std::vector<Segment> out;
    if (curr_.count == 0 && buffer_.empty()) {
        return out;
    }

    const SuffStats buff = buffer_stats();
    if (curr_.count >= 2 && buffer_.size() >= 3) {
        const double rss_two = curr_.rss() + buff.rss();
        const FTestResult res = f_modified(union_.rss(), rss_two, union_.count, ftest_);
        if (res.reject) {
            out.push_back(make_segment(emitted_++, curr_start_, curr_end_, curr_));
            out.push_back(make_segment(emitted_++, buffer_.front().t, buffer_.back().t, buff));
            return out;
        }
    }

    const std::int64_t start = curr_.count > 0 ? curr_start_ : buffer_.front().t;
    const std::int64_t end = buffer_.empty() ? curr_end_ : buffer_.back().t;
    out.push_back(make_segment(emitted_++, start, end, union_));
    return out;
}

bool Partitioner::invariants_hold(double rel_tol) const {
    if (buffer_.size() > static_cast<std::size_t>(cfg_.buffer_size)) return false;
    const SuffStats rebuilt = curr_.merged(buffer_stats());
    const auto close = [rel_tol](double a, double b) {
        const double scale = std::max({std::fabs(a), std::fabs(b), 1.0});
        return std::fabs(a - b) <= rel_tol * scale;
    };
    return rebuilt.count == union_.count && close(rebuilt.theta, union_.theta) &&
           close(rebuilt.big_theta, union_.big_theta) && close(rebuilt.psi, union_.psi) &&
           close(rebuilt.big_psi, union_.big_psi) && close(rebuilt.tau, union_.tau);
}

std::vector<Segment> run_series(const PartitionerConfig& cfg, std::span<const SamplePoint> points) {
    Partitioner part(cfg);
    std::vector<Segment> segments;
    for (const SamplePoint& p : points) {
        if (auto seg = part.push(p)) {
            segments.push_back(*seg);
        }
    }
    for (Segment& seg : part.finish()) {
        segments.push_back(seg);
    }
    return segments;
}

} // namespace isp
