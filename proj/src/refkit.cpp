#include "isp/refkit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace isp {

double GaussianSampler::uniform01() {
    // Top 53 bits, shifted into (0, 1] so the log below is always defined.
    return static_cast<double>((eng_() >> 11) + 1) * 0x1.0p-53;
}

double GaussianSampler::next() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

void SynthSpec::validate() const {
    if (length < 1) {
        throw std::invalid_argument("series length must be >= 1");
    }
    if (pieces.size() != breakpoints.size() + 1) {
        throw std::invalid_argument("need exactly one intercept/slope pair per piece (" +
                                    std::to_string(breakpoints.size() + 1) + " pieces, got " +
                                    std::to_string(pieces.size()) + ")");
    }
    std::int64_t prev = 0;
    for (std::int64_t bp : breakpoints) {
        if (bp <= prev || bp >= length) {
            throw std::invalid_argument("breakpoints must be strictly increasing within 1.." +
                                        std::to_string(length - 1));
        }
        prev = bp;
    }
    if (!(noise_sigma >= 0.0)) {
        throw std::invalid_argument("noise sigma must be nonnegative");
    }
}

double SynthSpec::true_value(std::int64_t t) const {
    const auto it = std::lower_bound(breakpoints.begin(), breakpoints.end(), t);
    const std::size_t piece = static_cast<std::size_t>(it - breakpoints.begin());
    return pieces[piece].at(static_cast<double>(t));
}

std::vector<SamplePoint> generate(const SynthSpec& spec) {
    spec.validate();
    GaussianSampler noise(spec.seed);
    std::vector<SamplePoint> out;
    out.reserve(static_cast<std::size_t>(spec.length));
    for (std::int64_t t = 1; t <= spec.length; ++t) {
        double y = spec.true_value(t);
        if (spec.noise_sigma > 0.0) {
            y += spec.noise_sigma * noise.next();
        }
        out.push_back(SamplePoint{t, y});
    }
    return out;
}

namespace {

struct RawFit {
    double rss = 0.0;
    double beta0 = 0.0;
    double beta1 = 0.0;
};

// Centered two-pass least squares straight from raw points; shares no code
// with the running-sum path it is checking.
RawFit raw_ols(std::span<const SamplePoint> pts, std::size_t lo, std::size_t hi) {
    const double n = static_cast<double>(hi - lo + 1);
    double tbar = 0.0;
    double ybar = 0.0;
    for (std::size_t i = lo; i <= hi; ++i) {
        tbar += static_cast<double>(pts[i].t);
        ybar += pts[i].y;
    }
    tbar /= n;
    ybar /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = lo; i <= hi; ++i) {
        const double dt = static_cast<double>(pts[i].t) - tbar;
        const double dy = pts[i].y - ybar;
        sxx += dt * dt;
        sxy += dt * dy;
        syy += dy * dy;
    }
    RawFit fit;
    fit.beta1 = sxy / sxx;
    fit.beta0 = ybar - fit.beta1 * tbar;
    fit.rss = std::max(0.0, syy - sxy * sxy / sxx);
    return fit;
}

Segment segment_from_range(std::size_t index, std::span<const SamplePoint> pts, std::size_t lo,
                           std::size_t hi) {
    Segment seg;
    seg.index = index;
    seg.start_t = pts[lo].t;
    seg.end_t = pts[hi].t;
    seg.stats = SuffStats::of(pts.subspan(lo, hi - lo + 1));
    if (hi > lo) {
        const RawFit fit = raw_ols(pts, lo, hi);
        seg.rss = fit.rss;
        seg.fit = LineFit{fit.beta0, fit.beta1};
    } else {
        seg.rss = 0.0;
        seg.fit = LineFit{pts[lo].y, 0.0};
    }
    return seg;
}

} // namespace

OracleRun oracle_greedy_run(const PartitionerConfig& cfg, std::span<const SamplePoint> points) {
    cfg.validate();
    const FTestConfig ftcfg = cfg.ftest();
    const std::size_t b = static_cast<std::size_t>(cfg.buffer_size);
    const std::size_t n = points.size();

    OracleRun run;
    run.min_alpha_gap = std::numeric_limits<double>::infinity();
    if (n == 0) return run;

    // Index ranges into `points`: current partition [cs, ce], buffer
    // [bs, be]; the buffer always directly follows the current partition, so
    // their union is [cs, be]. have_* track emptiness during warmup.
    std::size_t cs = 0, ce = 0, bs = 0, be = 0;
    std::size_t curr_len = 0, buff_len = 0;
    std::size_t emitted = 0;

    const auto test_pair = [&](std::size_t ucs, std::size_t uce, std::size_t ubs,
                               std::size_t ube) {
        const double rss_curr = raw_ols(points, ucs, uce).rss;
        const double rss_buff = raw_ols(points, ubs, ube).rss;
        const double rss_one = raw_ols(points, ucs, ube).rss;
        const auto total = static_cast<std::int64_t>(ube - ucs + 1);
        const FTestResult res = f_modified(rss_one, rss_curr + rss_buff, total, ftcfg);
        run.min_alpha_gap = std::min(run.min_alpha_gap, std::fabs(res.p_value - ftcfg.alpha));
        return res;
    };

    for (std::size_t i = 0; i < n; ++i) {
        if (curr_len < b) {
            if (curr_len == 0) cs = i;
            ce = i;
            ++curr_len;
            continue;
        }
        if (buff_len < b) {
            if (buff_len == 0) bs = i;
            be = i;
            ++buff_len;
            continue;
        }
        const FTestResult res = test_pair(cs, ce, bs, be);
        if (res.reject) {
            run.segments.push_back(segment_from_range(emitted++, points, cs, ce));
            cs = bs;
            ce = be;
            bs = be = i;
            buff_len = 1;
        } else {
            ce = bs;
            ++bs;
            be = i;
        }
    }

    if (curr_len >= 2 && buff_len >= 3) {
        const FTestResult res = test_pair(cs, ce, bs, be);
        if (res.reject) {
            run.segments.push_back(segment_from_range(emitted++, points, cs, ce));
            run.segments.push_back(segment_from_range(emitted++, points, bs, be));
            return run;
        }
    }
    const std::size_t lo = curr_len > 0 ? cs : bs;
    const std::size_t hi = buff_len > 0 ? be : ce;
    run.segments.push_back(segment_from_range(emitted++, points, lo, hi));
    return run;
}

std::vector<Segment> oracle_greedy(const PartitionerConfig& cfg,
                                   std::span<const SamplePoint> points) {
    return oracle_greedy_run(cfg, points).segments;
}

std::vector<Segment> optimal_segments(std::span<const SamplePoint> points, std::size_t m) {
    const std::size_t n = points.size();
    if (m < 1) {
        throw std::invalid_argument("need at least one piece");
    }
    if (m > n / 2) {
        throw std::invalid_argument("m=" + std::to_string(m) + " pieces exceeds " +
                                    std::to_string(n) + "/2 points");
    }

    // Prefix sums make any window's least-squares cost O(1).
    std::vector<double> pt(n + 1, 0.0), ptt(n + 1, 0.0), py(n + 1, 0.0), pyy(n + 1, 0.0),
        pty(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(points[i].t);
        const double y = points[i].y;
        pt[i + 1] = pt[i] + t;
        ptt[i + 1] = ptt[i] + t * t;
        py[i + 1] = py[i] + y;
        pyy[i + 1] = pyy[i] + y * y;
        pty[i + 1] = pty[i] + t * y;
    }
    const auto cost = [&](std::size_t i, std::size_t j) { // inclusive window
        const double len = static_cast<double>(j - i + 1);
        if (j == i) return 0.0;
        const double th = pt[j + 1] - pt[i];
        const double thth = ptt[j + 1] - ptt[i];
        const double ps = py[j + 1] - py[i];
        const double psps = pyy[j + 1] - pyy[i];
        const double ty = pty[j + 1] - pty[i];
        const double sxx = thth - th * th / len;
        const double sxy = ty - th * ps / len;
        const double syy = psps - ps * ps / len;
        if (sxx <= 0.0) return std::max(0.0, syy);
        return std::max(0.0, syy - sxy * sxy / sxx);
    };

    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> prev(n, 0.0), cur(n, 0.0);
    std::vector<std::vector<std::uint32_t>> split(m, std::vector<std::uint32_t>(n, 0));
    for (std::size_t j = 0; j < n; ++j) {
        prev[j] = cost(0, j);
    }
    for (std::size_t k = 1; k < m; ++k) {
        for (std::size_t j = 0; j < n; ++j) {
            double best = inf;
            std::uint32_t arg = 0;
            if (j >= k) {
                // Last piece starts at i; scanning i upward with strict <
                // keeps the earliest split on ties.
                for (std::size_t i = k; i <= j; ++i) {
                    const double c = prev[i - 1] + cost(i, j);
                    if (c < best) {
                        best = c;
                        arg = static_cast<std::uint32_t>(i);
                    }
                }
            }
            cur[j] = best;
            split[k][j] = arg;
        }
        std::swap(prev, cur);
    }

    std::vector<std::pair<std::size_t, std::size_t>> ranges(m);
    std::size_t j = n - 1;
    for (std::size_t k = m; k-- > 1;) {
        const std::size_t i = split[k][j];
        ranges[k] = {i, j};
        j = i - 1;
    }
    ranges[0] = {0, j};

    std::vector<Segment> out;
    out.reserve(m);
    for (std::size_t k = 0; k < m; ++k) {
        Segment seg = segment_from_range(k, points, ranges[k].first, ranges[k].second);
        seg.rss = cost(ranges[k].first, ranges[k].second);
        out.push_back(seg);
    }
    return out;
}

} // namespace isp
