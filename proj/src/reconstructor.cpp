#include "isp/reconstructor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "isp/errors.hpp"

namespace isp {

double Reconstruction::evaluate(std::int64_t t) const {
    if (segments.empty() || t < t_begin() || t > t_end()) {
        throw std::invalid_argument("evaluate: step " + std::to_string(t) + " outside range");
    }
    // First segment starting after t is one past the containing segment.
    auto it = std::upper_bound(segments.begin(), segments.end(), t,
                               [](std::int64_t v, const Segment& s) { return v < s.start_t; });
    --it;
    return it->fit.at(static_cast<double>(t));
}

Reconstruction make_reconstruction(std::vector<Segment> segments) {
    if (segments.empty()) {
        throw IntegrityError("reconstruction needs at least one segment");
    }
    if (segments.front().start_t != 1) {
        throw IntegrityError("segments do not tile from t=1 (first starts at t=" +
                             std::to_string(segments.front().start_t) + ")");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const Segment& s = segments[i];
        if (s.end_t < s.start_t) {
            throw IntegrityError("segment " + std::to_string(i) + " has inverted range");
        }
        if (i > 0 && s.start_t != segments[i - 1].end_t + 1) {
            throw IntegrityError("segments " + std::to_string(i - 1) + " and " +
                                 std::to_string(i) + " do not tile: gap or overlap at t=" +
                                 std::to_string(s.start_t));
        }
        total += s.rss;
    }
    Reconstruction recon;
    recon.n_partitions = segments.size();
    recon.segments = std::move(segments);
    recon.rss_total = total;
    return recon;
}

Reconstruction evenly_spaced_baseline(std::span<const SamplePoint> series, std::size_t k) {
    const std::size_t n = series.size();
    if (k < 2) {
        throw std::invalid_argument("baseline needs k >= 2 saved steps");
    }
    if (k > n) {
        throw std::invalid_argument("baseline k=" + std::to_string(k) + " exceeds series length " +
                                    std::to_string(n));
    }
    // Saved positions: round(1 + (i-1)(T-1)/(k-1)) as 0-based offsets. With
    // k <= T consecutive picks are always distinct.
    std::vector<std::size_t> anchors(k);
    for (std::size_t i = 0; i < k; ++i) {
        const double pos = static_cast<double>(i) * static_cast<double>(n - 1) /
                           static_cast<double>(k - 1);
        anchors[i] = static_cast<std::size_t>(std::llround(pos));
    }

    std::vector<Segment> pieces;
    pieces.reserve(k - 1);
    for (std::size_t i = 0; i + 1 < k; ++i) {
        const SamplePoint& a = series[anchors[i]];
        const SamplePoint& b = series[anchors[i + 1]];
        LineFit chord;
        chord.beta1 = (b.y - a.y) / static_cast<double>(b.t - a.t);
        chord.beta0 = a.y - chord.beta1 * static_cast<double>(a.t);

        // Tile without overlap; the shared anchor has zero residual either
        // way, so the assignment does not change the totals.
        const std::size_t lo = anchors[i];
        const std::size_t hi = (i + 2 < k) ? anchors[i + 1] - 1 : anchors[i + 1];

        Segment seg;
        seg.index = i;
        seg.start_t = series[lo].t;
        seg.end_t = series[hi].t;
        seg.fit = chord;
        double rss = 0.0;
        SuffStats stats;
        for (std::size_t j = lo; j <= hi; ++j) {
            const double r = series[j].y - chord.at(static_cast<double>(series[j].t));
            rss += r * r;
            stats.add(series[j]);
        }
        seg.rss = rss;
        seg.stats = stats;
        pieces.push_back(seg);
    }

    Reconstruction recon = make_reconstruction(std::move(pieces));
    recon.n_partitions = k; // saved-step accounting
    return recon;
}

namespace {

std::vector<SegmentRss> ranked_by_rss(const Reconstruction& r) {
    std::vector<SegmentRss> out;
    out.reserve(r.segments.size());
    for (const Segment& s : r.segments) {
        out.push_back(SegmentRss{s.index, s.rss});
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const SegmentRss& a, const SegmentRss& b) { return a.rss > b.rss; });
    return out;
}

} // namespace

ComparisonReport compare(const Reconstruction& a, const Reconstruction& b) {
    if (a.t_begin() != b.t_begin() || a.t_end() != b.t_end()) {
        throw std::invalid_argument("compare: reconstructions cover different step ranges");
    }
    ComparisonReport rep;
    rep.n_partitions_a = a.n_partitions;
    rep.n_partitions_b = b.n_partitions;
    rep.rss_total_a = a.rss_total;
    rep.rss_total_b = b.rss_total;
    rep.worst_a = ranked_by_rss(a);
    rep.worst_b = ranked_by_rss(b);
    return rep;
}

std::vector<AuditRow> audit_rss(const Reconstruction& recon, std::span<const SamplePoint> series) {
    if (series.empty() || series.front().t != recon.t_begin() ||
        series.back().t != recon.t_end()) {
        throw std::invalid_argument("audit: series does not cover the reconstruction range");
    }
    std::vector<AuditRow> rows;
    rows.reserve(recon.segments.size());
    std::size_t pos = 0;
    for (const Segment& seg : recon.segments) {
        double sum = 0.0;
        while (pos < series.size() && series[pos].t <= seg.end_t) {
            const double r = series[pos].y - seg.fit.at(static_cast<double>(series[pos].t));
            sum += r * r;
            ++pos;
        }
        rows.push_back(AuditRow{seg.index, seg.rss, sum});
    }
    return rows;
}

} // namespace isp
