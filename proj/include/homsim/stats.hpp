#ifndef HOMSIM_STATS_HPP
#define HOMSIM_STATS_HPP

#include <cstdint>

namespace homsim {

// Quantile of the standard normal distribution, p in (0, 1).
double inverse_normal_cdf(double p);

struct Interval {
    double lo;
    double hi;
};

// Wilson score interval for a binomial proportion at the given two-sided
// confidence level.
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double confidence);

}  // namespace homsim

#endif
