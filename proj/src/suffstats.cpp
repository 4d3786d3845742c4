#include "isp/suffstats.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace isp {

void SuffStats::add(const SamplePoint& p) {
    if (!std::isfinite(p.y)) {
        throw DataQualityError("non-finite response at t=" + std::to_string(p.t));
    }
    const double t = static_cast<double>(p.t);
    theta += t;
    big_theta += t * t;
    psi += p.y;
    big_psi += p.y * p.y;
    tau += t * p.y;
    ++count;
}

SuffStats SuffStats::merged(const SuffStats& other) const {
    SuffStats out;
    out.theta = theta + other.theta;
    out.big_theta = big_theta + other.big_theta;
    out.psi = psi + other.psi;
    out.big_psi = big_psi + other.big_psi;
    out.tau = tau + other.tau;
    out.count = count + other.count;
    return out;
}

double SuffStats::rss() const {
    if (count < 2) {
        throw std::invalid_argument("rss: need at least 2 points, have " + std::to_string(count));
    }
    const double n = static_cast<double>(count);
    const double sxx = big_theta - theta * theta / n;
    const double sxy = tau - theta * psi / n;
    const double syy = big_psi - psi * psi / n;
    if (sxx <= 0.0) {
        // Unreachable with distinct t except under extreme cancellation; fall
        // back to the intercept-only residual.
        return syy > 0.0 ? syy : 0.0;
    }
    const double r = syy - sxy * sxy / sxx;
    return r > 0.0 ? r : 0.0;
}

LineFit SuffStats::coefficients() const {
    if (count < 2) {
        throw std::invalid_argument("coefficients: need at least 2 points, have " +
                                    std::to_string(count));
    }
    const double n = static_cast<double>(count);
    const double sxx = big_theta - theta * theta / n;
    const double sxy = tau - theta * psi / n;
    const double beta1 = sxy / sxx;
    const double beta0 = (psi - beta1 * theta) / n;
    return LineFit{beta0, beta1};
}

SuffStats SuffStats::of(std::span<const SamplePoint> pts) {
    SuffStats s;
    for (const SamplePoint& p : pts) {
        s.add(p);
    }
    return s;
}

void shift_update(SuffStats& curr, SuffStats& curr_union, const SamplePoint& oldest,
                  const SamplePoint& fresh) {
    curr.add(oldest);
    curr_union.add(fresh);
}

} // namespace isp
