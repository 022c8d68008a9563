#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace rc {

double mean(const std::vector<double>& xs);
double median(std::vector<double> xs); // by value: sorts a copy
double variance(const std::vector<double>& xs);

struct LinFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    size_t points = 0;
};

// Ordinary least squares of y against x.
LinFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

// Regularized incomplete gamma functions (series / continued fraction).
double gamma_p(double a, double x); // P(a,x)
double gamma_q(double a, double x); // Q(a,x) = 1 - P(a,x)

// Survival function of the chi-squared distribution with k degrees of freedom.
double chi2_sf(double stat, int dof);

// Pearson chi-squared statistic of observed counts against expected counts.
double chi2_stat(const std::vector<double>& observed, const std::vector<double>& expected);

// One-sample Kolmogorov-Smirnov distance against a CDF, and the asymptotic
// Kolmogorov p-value Q(sqrt(n)*D). For a discrete null the p-value is
// conservative.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);
double ks_pvalue(double d_stat, size_t n);

// Coupon collector with m coupons: P(T <= t) by inclusion-exclusion, and the
// exact mean m*H_m.
double coupon_collector_cdf(uint32_t m, double t);
double coupon_collector_mean(uint32_t m);

// Chernoff bound P(Bin(n,p) >= s) <= e^(s-mu) (s/mu)^(-s) for s >= mu = n*p.
double binomial_chernoff_upper(double n, double p, double s);

// P(Bin(n,p) = k) and upper tail P(Bin(n,p) >= k), computed in log space.
double binomial_pmf(uint64_t n, double p, uint64_t k);
double binomial_upper_tail(uint64_t n, double p, uint64_t k);

} // namespace rc
