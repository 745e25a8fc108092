#include "dig/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "dig/error.hpp"

namespace dig {

namespace {

constexpr double kRelTol = 1e-14;
constexpr int kMaxIterations = 1'000'000;
constexpr double kTiny = 1e-300;

// lgamma(a) - [(a - 1/2) ln a - a + ln(2 pi)/2], valid for a >= 10.
double stirling_correction(double a) {
  const double inv = 1.0 / a;
  const double inv2 = inv * inv;
  return inv *
         (1.0 / 12.0 -
          inv2 * (1.0 / 360.0 -
                  inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 / 1188.0))));
}

// log(x^a e^{-x} / Gamma(a)). For large a the leading terms cancel, so the
// expression is rearranged around t = x / a.
double log_prefactor(double a, double x) {
  if (a < 10.0) {
    return a * std::log(x) - x - std::lgamma(a);
  }
  const double u = (x - a) / a;
  const double deviance = u - std::log1p(u);
  return 0.5 * std::log(a) - a * deviance -
         0.5 * std::log(2.0 * std::numbers::pi) - stirling_correction(a);
}

double lower_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int i = 0; i < kMaxIterations; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * kRelTol) {
      return sum * std::exp(log_prefactor(a, x));
    }
  }
  fail(ErrorKind::Domain, "reg_gamma: series did not converge");
}

// Modified Lentz evaluation of the continued fraction for Q(a, x).
double upper_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) {
      d = kTiny;
    }
    c = b + an / c;
    if (std::fabs(c) < kTiny) {
      c = kTiny;
    }
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kRelTol) {
      return std::exp(log_prefactor(a, x)) * h;
    }
  }
  fail(ErrorKind::Domain, "reg_gamma: continued fraction did not converge");
}

void check_gamma_args(double a, double x) {
  require(std::isfinite(a) && a > 0.0, ErrorKind::Domain,
          "reg_gamma: a must be positive");
  require(!std::isnan(x) && x >= 0.0, ErrorKind::Domain,
          "reg_gamma: x must be nonnegative");
}

double clamp01(double p) { return std::clamp(p, 0.0, 1.0); }

} // namespace

Probability::Probability(double value) : value_(value) {
  require(value >= 0.0 && value <= 1.0, ErrorKind::Domain,
          "probability outside [0, 1]: " + std::to_string(value));
}

Probability reg_gamma_P(double a, double x) {
  check_gamma_args(a, x);
  if (x == 0.0) {
    return Probability(0.0);
  }
  if (std::isinf(x)) {
    return Probability(1.0);
  }
  if (x < a + 1.0) {
    return Probability(clamp01(lower_series(a, x)));
  }
  return Probability(clamp01(1.0 - upper_fraction(a, x)));
}

Probability reg_gamma_Q(double a, double x) {
  check_gamma_args(a, x);
  if (x == 0.0) {
    return Probability(1.0);
  }
  if (std::isinf(x)) {
    return Probability(0.0);
  }
  if (x < a + 1.0) {
    return Probability(clamp01(1.0 - lower_series(a, x)));
  }
  return Probability(clamp01(upper_fraction(a, x)));
}

Probability q_function(double x) {
  require(std::isfinite(x), ErrorKind::Domain, "q_function: non-finite input");
  return Probability(clamp01(0.5 * std::erfc(x / std::numbers::sqrt2)));
}

Probability chi2_cdf(long dof, double x) {
  require(dof >= 1, ErrorKind::Domain, "chi2_cdf: dof must be at least 1");
  return reg_gamma_P(0.5 * static_cast<double>(dof), 0.5 * x);
}

Probability chi2_sf(long dof, double x) {
  require(dof >= 1, ErrorKind::Domain, "chi2_sf: dof must be at least 1");
  return reg_gamma_Q(0.5 * static_cast<double>(dof), 0.5 * x);
}

double ks_statistic(std::span<const double> samples,
                    const std::function<double(double)> &cdf) {
  require(!samples.empty(), ErrorKind::Domain, "ks_statistic: no samples");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double distance = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    const double above = static_cast<double>(i + 1) / n - f;
    const double below = f - static_cast<double>(i) / n;
    distance = std::max({distance, above, below});
  }
  return std::clamp(distance, 0.0, 1.0);
}

double loglog_slope(std::span<const std::pair<double, double>> points) {
  require(points.size() >= 2, ErrorKind::Domain,
          "loglog_slope: need at least two points");
  double sx = 0.0;
  double sy = 0.0;
  for (const auto &[n, y] : points) {
    require(n > 0.0 && y > 0.0, ErrorKind::Domain,
            "loglog_slope: coordinates must be positive");
    sx += std::log(n);
    sy += std::log(y);
  }
  const double count = static_cast<double>(points.size());
  const double mx = sx / count;
  const double my = sy / count;
  double sxx = 0.0;
  double sxy = 0.0;
  for (const auto &[n, y] : points) {
    const double dx = std::log(n) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y) - my);
  }
  require(sxx > 0.0, ErrorKind::Domain, "loglog_slope: all n are equal");
  return sxy / sxx;
}

double median(std::vector<double> values) {
  require(!values.empty(), ErrorKind::Domain, "median: empty input");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) {
    return values[mid];
  }
  return 0.5 * (values[mid - 1] + values[mid]);
}

SampleSummary summarize(std::span<const double> values) {
  require(!values.empty(), ErrorKind::Domain, "summarize: empty input");
  SampleSummary s;
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) {
    sum += v;
  }
  s.mean = sum / n;
  double m2 = 0.0;
  double m3 = 0.0;
  for (double v : values) {
    const double d = v - s.mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  s.variance = values.size() > 1 ? m2 / (n - 1.0) : 0.0;
  s.sd = std::sqrt(s.variance);
  const double pop_var = m2 / n;
  s.skewness = pop_var > 0.0 ? (m3 / n) / std::pow(pop_var, 1.5) : 0.0;
  s.median = median(std::vector<double>(values.begin(), values.end()));
  return s;
}

} // namespace dig
