#include "doctest.h"

#include <stdexcept>

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "isp/io.hpp"
#include "isp/reconstructor.hpp"
#include "isp/refkit.hpp"
#include "oracles.hpp"

using isp::evenly_spaced_baseline;
using isp::make_reconstruction;
using isp::Reconstruction;
using isp::SamplePoint;
using isp::Segment;
using isp::SuffStats;
using testkit::make_points;
using testkit::rel_close;

namespace {

std::vector<SamplePoint> exact_line(std::int64_t total, double b0, double b1) {
    std::vector<SamplePoint> pts;
    for (std::int64_t t = 1; t <= total; ++t) {
        pts.push_back({t, b0 + b1 * static_cast<double>(t)});
    }
    return pts;
}

} // namespace

TEST_CASE("evaluate a single exact-line segment") {
    const auto pts = exact_line(20, 1.0, 2.0);
    const Segment seg = isp::make_segment(0, 1, 20, SuffStats::of(pts));
    const Reconstruction recon = make_reconstruction({seg});
    CHECK(recon.evaluate(10) == doctest::Approx(21.0).epsilon(1e-12));
    CHECK(recon.evaluate(1) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK_THROWS_AS(recon.evaluate(0), std::invalid_argument);
    CHECK_THROWS_AS(recon.evaluate(21), std::invalid_argument);
}

TEST_CASE("two-piece evaluation honors discontinuities at the boundary") {
    const auto left = exact_line(10, 0.0, 1.0);
    auto right = exact_line(20, 100.0, -2.0);
    right.erase(right.begin(), right.begin() + 10);
    const Segment a = isp::make_segment(0, 1, 10, SuffStats::of(left));
    const Segment b = isp::make_segment(1, 11, 20, SuffStats::of(right));
    const Reconstruction recon = make_reconstruction({a, b});
    CHECK(recon.evaluate(10) == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(recon.evaluate(11) == doctest::Approx(78.0).epsilon(1e-12));
    CHECK(recon.rss_total == doctest::Approx(0.0));
    CHECK(recon.n_partitions == 2);
}

TEST_CASE("tiling violations are rejected") {
    const auto pts = exact_line(10, 0.0, 1.0);
    const Segment a = isp::make_segment(0, 1, 5, SuffStats::of(std::span(pts).first(5)));
    const Segment gap = isp::make_segment(1, 7, 10, SuffStats::of(std::span(pts).subspan(6)));
    const Segment overlap = isp::make_segment(1, 5, 10, SuffStats::of(std::span(pts).subspan(4)));
    CHECK_THROWS_AS(make_reconstruction({a, gap}), isp::IntegrityError);
    CHECK_THROWS_AS(make_reconstruction({a, overlap}), isp::IntegrityError);
    CHECK_THROWS_AS(make_reconstruction({}), isp::IntegrityError);
}

TEST_CASE("rss_total adds per-segment residuals") {
    isp::SynthSpec spec;
    spec.length = 500;
    spec.breakpoints = {200};
    spec.pieces = {{0.0, 0.1}, {60.0, -0.15}};
    spec.noise_sigma = 0.5;
    spec.seed = 31;
    const auto pts = isp::generate(spec);
    const auto segs = isp::run_series(isp::PartitionerConfig{5, 1e-3, 1e-3}, pts);
    const Reconstruction recon = make_reconstruction(segs);
    double total = 0.0;
    for (const auto& s : recon.segments) total += s.rss;
    CHECK(rel_close(recon.rss_total, total, 1e-12));

    // Replaying the fits against the retained series reproduces the stored
    // residuals.
    for (const auto& row : isp::audit_rss(recon, pts)) {
        CHECK(rel_close(row.stored_rss, row.replayed_rss, 1e-6));
    }
}

TEST_CASE("baseline on an exact line has zero residual") {
    const auto pts = exact_line(100, -2.0, 0.5);
    for (std::size_t k : {2ul, 5ul, 25ul, 100ul}) {
        const Reconstruction base = evenly_spaced_baseline(pts, k);
        CHECK(base.rss_total == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(base.n_partitions == k);
        CHECK(base.t_begin() == 1);
        CHECK(base.t_end() == 100);
    }
}

TEST_CASE("baseline endpoints-only example") {
    const auto pts = make_points(std::vector<double>{0, 0, 4, 0, 0});
    const Reconstruction base = evenly_spaced_baseline(pts, 2);
    CHECK(base.rss_total == doctest::Approx(16.0).epsilon(1e-12));
    CHECK(base.segments.size() == 1);
    CHECK(base.evaluate(3) == doctest::Approx(0.0));
}

TEST_CASE("baseline parameter validation") {
    const auto pts = exact_line(10, 0.0, 1.0);
    CHECK_THROWS_AS(evenly_spaced_baseline(pts, 1), std::invalid_argument);
    CHECK_THROWS_AS(evenly_spaced_baseline(pts, 11), std::invalid_argument);
    CHECK_NOTHROW(evenly_spaced_baseline(pts, 10));
}

TEST_CASE("baseline anchors include both endpoints and interpolate between") {
    const auto pts = make_points(std::vector<double>{1, 5, 2, 8, 3, 9, 4});
    const Reconstruction base = evenly_spaced_baseline(pts, 3); // anchors t=1,4,7
    CHECK(base.evaluate(1) == doctest::Approx(1.0));
    CHECK(base.evaluate(4) == doctest::Approx(8.0));
    CHECK(base.evaluate(7) == doctest::Approx(4.0));
    // Chord between t=1 and t=4: y = 1 + (7/3)(t-1).
    CHECK(base.evaluate(2) == doctest::Approx(1.0 + 7.0 / 3.0));
}

TEST_CASE("compare reports zero deltas against itself and sorts worst first") {
    isp::SynthSpec spec;
    spec.length = 300;
    spec.breakpoints = {140};
    spec.pieces = {{0.0, 0.2}, {80.0, -0.3}};
    spec.noise_sigma = 0.8;
    spec.seed = 8;
    const auto pts = isp::generate(spec);
    const auto segs = isp::run_series(isp::PartitionerConfig{5, 1e-3, 1e-3}, pts);
    const Reconstruction recon = make_reconstruction(segs);
    const auto rep = isp::compare(recon, recon);
    CHECK(rep.n_partitions_a == rep.n_partitions_b);
    CHECK(rep.rss_total_a == rep.rss_total_b);
    for (std::size_t i = 0; i + 1 < rep.worst_a.size(); ++i) {
        CHECK(rep.worst_a[i].rss >= rep.worst_a[i + 1].rss);
    }
    const Reconstruction other = evenly_spaced_baseline(pts, 4);
    CHECK_NOTHROW(isp::compare(recon, other));
    const Reconstruction shorter =
        make_reconstruction({isp::make_segment(0, 1, 100, SuffStats::of(std::span(pts).first(100)))});
    CHECK_THROWS_AS(isp::compare(recon, shorter), std::invalid_argument);
}

TEST_CASE("committed reference dataset: matched-count baseline loses, fewer pieces cost more") {
    const auto pts = isp::read_series_csv(std::string(TEST_DATA_DIR) + "/reference_2000.csv");
    REQUIRE(pts.size() == 2000);

    const Reconstruction tuned =
        make_reconstruction(isp::run_series(isp::PartitionerConfig{5, 1e-3, 1e-3}, pts));
    const Reconstruction baseline = evenly_spaced_baseline(pts, tuned.n_partitions);
    CHECK(baseline.rss_total > tuned.rss_total);

    // A coarser tuning buys fewer partitions at a higher total residual.
    const Reconstruction coarse =
        make_reconstruction(isp::run_series(isp::PartitionerConfig{5, 1e-7, 0.1}, pts));
    const auto rep = isp::compare(tuned, coarse);
    CHECK(rep.n_partitions_b < rep.n_partitions_a);
    CHECK(rep.rss_total_b > rep.rss_total_a);
    REQUIRE_FALSE(rep.worst_b.empty());
    CHECK(rep.worst_b.front().rss == coarse.segments[rep.worst_b.front().segment_index].rss);
}

TEST_CASE("serialized segments evaluate bit-identically after reload") {
    isp::SynthSpec spec;
    spec.length = 250;
    spec.breakpoints = {100, 180};
    spec.pieces = {{0.3, 0.11}, {45.0, -0.21}, {-60.0, 0.31}};
    spec.noise_sigma = 0.6;
    spec.seed = 555;
    const auto pts = isp::generate(spec);
    const auto segs = isp::run_series(isp::PartitionerConfig{5, 1e-3, 1e-4}, pts);
    std::vector<isp::SegmentRecord> records;
    for (const auto& s : segs) records.push_back({"s0", s});

    for (const bool json : {false, true}) {
        std::stringstream buf;
        if (json) {
            isp::write_segments_json(buf, records);
        } else {
            isp::write_segments_csv(buf, records);
        }
        const auto loaded = isp::read_segments(buf);
        REQUIRE(loaded.size() == records.size());
        std::vector<Segment> reloaded;
        for (const auto& rec : loaded) reloaded.push_back(rec.segment);
        const Reconstruction before = make_reconstruction(segs);
        const Reconstruction after = make_reconstruction(reloaded);
        for (std::int64_t t = 1; t <= spec.length; ++t) {
            CHECK(before.evaluate(t) == after.evaluate(t)); // bitwise
        }
    }
}
