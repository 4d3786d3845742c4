#include "isp/rotreg.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace isp {

void RotationRegression::add(const SamplePoint& p) {
    if (!std::isfinite(p.y)) {
        throw DataQualityError("non-finite response at t=" + std::to_string(p.t));
    }
    ++n_;
    double w = 1.0;
    double x1 = static_cast<double>(p.t);
    double y = p.y;

    // Rotate against the intercept row (regressor value fixed at 1).
    {
        const double di = d_[0];
        const double dpi = di + w;
        const double cbar = di / dpi;
        const double sbar = w / dpi;
        w = cbar * w;
        d_[0] = dpi;
        const double xk = x1;
        x1 = xk - rbar_;
        rbar_ = cbar * rbar_ + sbar * xk;
        const double xy = y;
        y = xy - thetab_[0];
        thetab_[0] = cbar * thetab_[0] + sbar * xy;
    }
    // Rotate the remainder against the slope row.
    if (w > 0.0 && x1 != 0.0) {
        const double di = d_[1];
        const double dpi = di + w * x1 * x1;
        const double cbar = di / dpi;
        const double sbar = w * x1 / dpi;
        w = cbar * w;
        d_[1] = dpi;
        const double xy = y;
        y = xy - x1 * thetab_[1];
        thetab_[1] = cbar * thetab_[1] + sbar * xy;
    }
    sserr_ += w * y * y;
}

double RotationRegression::rss() const {
    if (n_ < 2) {
        throw std::invalid_argument("rss: need at least 2 points, have " + std::to_string(n_));
    }
    return sserr_;
}

LineFit RotationRegression::coefficients() const {
    if (n_ < 2) {
        throw std::invalid_argument("coefficients: need at least 2 points, have " +
                                    std::to_string(n_));
    }
    const double beta1 = thetab_[1];
    const double beta0 = thetab_[0] - rbar_ * beta1;
    return LineFit{beta0, beta1};
}

} // namespace isp
