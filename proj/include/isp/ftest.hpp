#pragma once

#include <cstdint>

namespace isp {

// Tuning knobs for the one-line vs two-line comparison. alpha is treated as a
// tuning parameter, not a false-rejection probability; delta2 inflates the
// error-variance estimate (in response units squared) so that near-perfect
// fits on both sides stop triggering rejections in flat regions.
struct FTestConfig {
    double alpha = 1e-3;
    double delta2 = 0.0;

    static constexpr int p_single = 2; // parameters of the one-line model
    static constexpr int p_two = 4;    // parameters of the two-line model

    void validate() const; // throws std::invalid_argument
};

struct FTestResult {
    double f_stat = 0.0;
    double p_value = 1.0;
    bool reject = false;
    double rss1 = 0.0;
    double rss2 = 0.0;
    std::int64_t n_total = 0;
};

// Upper-tail probability P(F(d1, d2) > f), computed through the regularized
// incomplete beta function. Requires d1 >= 1, d2 >= 1, f >= 0.
double f_survival(double f, int d1, std::int64_t d2);

// Classic two-phase F ratio. Requires n_total > 4 and rss2 > 0; a zero rss2
// is a degenerate two-line fit and throws std::domain_error (the inflated
// form below resolves that case explicitly).
double f_standard(double rss1, double rss2, std::int64_t n_total);

// Variance-inflated F ratio plus the rejection decision against cfg.alpha
// (strict p < alpha). A negative numerator is clamped to zero. When the
// denominator vanishes (rss2 = 0 with delta2 = 0), a positive rss1 is the
// strongest possible evidence for a break and yields reject with an infinite
// statistic; if rss1 is zero too, both fits are perfect and nothing fires.
FTestResult f_modified(double rss1, double rss2, std::int64_t n_total, const FTestConfig& cfg);

} // namespace isp
