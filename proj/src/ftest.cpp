#include "isp/ftest.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace isp {

void FTestConfig::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("alpha must lie in (0,1), got " + std::to_string(alpha));
    }
    if (!(delta2 >= 0.0)) {
        throw std::invalid_argument("delta2 must be nonnegative, got " + std::to_string(delta2));
    }
}

namespace {

// Continued fraction for the incomplete beta function, evaluated with the
// modified Lentz scheme. Converges for x < (a+1)/(a+b+2).
double beta_cont_frac(double a, double b, double x) {
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-16;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 500; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) break;
    }
    return h;
}

// Regularized incomplete beta I_x(a, b).
double ibeta_reg(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    // Log prefactor is symmetric under (a,b,x) -> (b,a,1-x).
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_cont_frac(a, b, x) / a;
    }
    return 1.0 - front * beta_cont_frac(b, a, 1.0 - x) / b;
}

// Shared ratio so that the delta2 = 0 path of f_modified and f_standard are
// the same expression, bit for bit.
double f_ratio(double rss1, double rss2, std::int64_t n_total, double delta2) {
    const double num =
        std::max(0.0, rss1 - rss2) / static_cast<double>(FTestConfig::p_two - FTestConfig::p_single);
    const double den = (rss2 + delta2 * static_cast<double>(n_total)) /
                       static_cast<double>(n_total - FTestConfig::p_two);
    return num / den;
}

} // namespace

double f_survival(double f, int d1, std::int64_t d2) {
    if (d1 < 1 || d2 < 1) {
        throw std::invalid_argument("f_survival: degrees of freedom must be >= 1");
    }
    if (!(f >= 0.0)) {
        throw std::invalid_argument("f_survival: statistic must be nonnegative");
    }
    if (std::isinf(f)) return 0.0;
    const double df1 = static_cast<double>(d1);
    const double df2 = static_cast<double>(d2);
    const double x = df2 / (df2 + df1 * f);
    return ibeta_reg(df2 / 2.0, df1 / 2.0, x);
}

double f_standard(double rss1, double rss2, std::int64_t n_total) {
    if (n_total <= FTestConfig::p_two) {
        throw std::invalid_argument("f_standard: need more than 4 points, have " +
                                    std::to_string(n_total));
    }
    if (!(rss2 > 0.0)) {
        throw std::domain_error("f_standard: two-line fit is degenerate (rss2 = 0)");
    }
    return f_ratio(rss1, rss2, n_total, 0.0);
}

FTestResult f_modified(double rss1, double rss2, std::int64_t n_total, const FTestConfig& cfg) {
    if (n_total <= FTestConfig::p_two) {
        throw std::invalid_argument("f_modified: need more than 4 points, have " +
                                    std::to_string(n_total));
    }
    FTestResult res;
    res.rss1 = rss1;
    res.rss2 = rss2;
    res.n_total = n_total;
    if (rss2 == 0.0 && cfg.delta2 == 0.0) {
        if (rss1 > 0.0) {
            res.f_stat = std::numeric_limits<double>::infinity();
            res.p_value = 0.0;
        } else {
            res.f_stat = 0.0;
            res.p_value = 1.0;
        }
    } else {
        res.f_stat = f_ratio(rss1, rss2, n_total, cfg.delta2);
        res.p_value = f_survival(res.f_stat, FTestConfig::p_two - FTestConfig::p_single,
                                 n_total - FTestConfig::p_two);
    }
    res.reject = res.p_value < cfg.alpha;
    return res;
}

} // namespace isp
