#include "rc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rc {

double mean(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double median(std::vector<double> xs) {
    if (xs.empty()) return 0.0;
    const size_t mid = xs.size() / 2;
    std::nth_element(xs.begin(), xs.begin() + mid, xs.end());
    double hi = xs[mid];
    if (xs.size() % 2 == 1) return hi;
    double lo = *std::max_element(xs.begin(), xs.begin() + mid);
    return 0.5 * (lo + hi);
}

double variance(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    const double m = mean(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return s / static_cast<double>(xs.size() - 1);
}

LinFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    LinFit fit;
    const size_t n = std::min(x.size(), y.size());
    fit.points = n;
    if (n < 2) return fit;
    double sx = 0, sy = 0;
    for (size_t i = 0; i < n; ++i) { sx += x[i]; sy += y[i]; }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) return fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = (syy == 0.0) ? 1.0 : (sxy * sxy) / (sxx * syy);
    return fit;
}

// --- incomplete gamma ------------------------------------------------------

namespace {

double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_contfrac(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

} // namespace

double gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_p: bad arguments");
    if (x == 0.0) return 0.0;
    return (x < a + 1.0) ? gamma_p_series(a, x) : 1.0 - gamma_q_contfrac(a, x);
}

double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q: bad arguments");
    if (x == 0.0) return 1.0;
    return (x < a + 1.0) ? 1.0 - gamma_p_series(a, x) : gamma_q_contfrac(a, x);
}

double chi2_sf(double stat, int dof) {
    if (stat <= 0.0) return 1.0;
    return gamma_q(0.5 * dof, 0.5 * stat);
}

double chi2_stat(const std::vector<double>& observed, const std::vector<double>& expected) {
    double s = 0.0;
    for (size_t i = 0; i < observed.size(); ++i) {
        if (expected[i] <= 0.0) continue;
        const double d = observed[i] - expected[i];
        s += d * d / expected[i];
    }
    return s;
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max(d, std::fabs(f - static_cast<double>(i) / n));
        d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - f));
    }
    return d;
}

double ks_pvalue(double d_stat, size_t n) {
    const double t = (std::sqrt(static_cast<double>(n)) + 0.12 + 0.11 / std::sqrt(static_cast<double>(n))) * d_stat;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = 2.0 * ((k % 2 == 1) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * t * t);
        sum += term;
        if (std::fabs(term) < 1e-12) break;
    }
    return std::clamp(sum, 0.0, 1.0);
}

double coupon_collector_cdf(uint32_t m, double t) {
    if (t < m) return 0.0;
    // P(T <= t) = sum_k (-1)^k C(m,k) (1-k/m)^t; terms shrink quickly for t
    // in the relevant range, so plain double summation is adequate.
    double sum = 0.0;
    double log_binom = 0.0; // log C(m,0)
    for (uint32_t k = 0; k <= m; ++k) {
        if (k > 0) log_binom += std::log(static_cast<double>(m - k + 1)) - std::log(static_cast<double>(k));
        if (k == m) break; // (1-k/m)^t = 0
        const double log_term = log_binom + t * std::log1p(-static_cast<double>(k) / m);
        const double term = std::exp(log_term);
        sum += (k % 2 == 0) ? term : -term;
        if (k > 2 && term < 1e-16) break;
    }
    return std::clamp(sum, 0.0, 1.0);
}

double coupon_collector_mean(uint32_t m) {
    double h = 0.0;
    for (uint32_t k = 1; k <= m; ++k) h += 1.0 / k;
    return m * h;
}

double binomial_chernoff_upper(double n, double p, double s) {
    const double mu = n * p;
    if (s <= mu) return 1.0;
    return std::exp(s - mu - s * std::log(s / mu));
}

double binomial_pmf(uint64_t n, double p, uint64_t k) {
    if (k > n) return 0.0;
    if (p <= 0.0) return k == 0 ? 1.0 : 0.0;
    if (p >= 1.0) return k == n ? 1.0 : 0.0;
    const double lg = std::lgamma(static_cast<double>(n) + 1) - std::lgamma(static_cast<double>(k) + 1) -
                      std::lgamma(static_cast<double>(n - k) + 1);
    return std::exp(lg + k * std::log(p) + (n - k) * std::log1p(-p));
}

double binomial_upper_tail(uint64_t n, double p, uint64_t k) {
    double s = 0.0;
    for (uint64_t i = k; i <= n; ++i) {
        const double t = binomial_pmf(n, p, i);
        s += t;
        if (i > k + 10 && t < 1e-16 * s) break;
    }
    return std::min(1.0, s);
}

} // namespace rc
