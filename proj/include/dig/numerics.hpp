#ifndef DIG_NUMERICS_HPP
#define DIG_NUMERICS_HPP

#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace dig {

// A real number in [0, 1]. Converts implicitly to double for arithmetic.
class Probability {
public:
  constexpr Probability() = default;
  explicit Probability(double value);

  constexpr double value() const noexcept { return value_; }
  constexpr operator double() const noexcept { return value_; }

private:
  double value_ = 0.0;
};

// Regularized lower incomplete gamma function P(a, x).
Probability reg_gamma_P(double a, double x);

// Regularized upper incomplete gamma function 1 - P(a, x), computed directly
// so that small tails keep their relative accuracy.
Probability reg_gamma_Q(double a, double x);

// Standard normal upper-tail probability.
Probability q_function(double x);

Probability chi2_cdf(long dof, double x);
Probability chi2_sf(long dof, double x);

// Sup-norm distance between the empirical CDF of `samples` and `cdf`.
// Samples need not be pre-sorted.
double ks_statistic(std::span<const double> samples,
                    const std::function<double(double)> &cdf);

// Least-squares slope of log(y) against log(n).
double loglog_slope(std::span<const std::pair<double, double>> points);

struct SampleSummary {
  double mean = 0.0;
  double variance = 0.0; // unbiased
  double sd = 0.0;
  double skewness = 0.0;
  double median = 0.0;
};

SampleSummary summarize(std::span<const double> values);

double median(std::vector<double> values);

} // namespace dig

#endif // DIG_NUMERICS_HPP
