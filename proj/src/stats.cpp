#include "kpzsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace kpzsim {

EmpiricalCdf::EmpiricalCdf(std::vector<double> samples) : sorted_(std::move(samples))
{
    if (sorted_.empty()) throw std::invalid_argument("EmpiricalCdf: empty sample");
    std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::operator()(double x) const
{
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
    return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

double ks_distance(std::span<const double> a, std::span<const double> b)
{
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_distance: empty sample");
    std::vector<double> sa(a.begin(), a.end());
    std::vector<double> sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());

    const double na = static_cast<double>(sa.size());
    const double nb = static_cast<double>(sb.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < sa.size() && j < sb.size()) {
        const double x = std::min(sa[i], sb[j]);
        while (i < sa.size() && sa[i] <= x) ++i;
        while (j < sb.size() && sb[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

double ks_critical(double alpha, std::size_t n, std::size_t m)
{
    const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
    return c * std::sqrt(static_cast<double>(n + m) / (static_cast<double>(n) * static_cast<double>(m)));
}

namespace {

// Series and continued-fraction evaluation of P(a,x), the usual split at a+1.
double gamma_series(double a, double x)
{
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_cf(double a, double x)
{
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

} // namespace

double gammp(double a, double x)
{
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gammp: bad arguments");
    if (x == 0.0) return 0.0;
    return (x < a + 1.0) ? gamma_series(a, x) : 1.0 - gamma_cf(a, x);
}

double chi_square_cdf(double x, int dof)
{
    if (dof <= 0) throw std::invalid_argument("chi_square_cdf: dof must be positive");
    if (x <= 0.0) return 0.0;
    return gammp(0.5 * dof, 0.5 * x);
}

double chi_square_quantile(double p, int dof)
{
    if (p <= 0.0 || p >= 1.0) throw std::invalid_argument("chi_square_quantile: p in (0,1)");
    double lo = 0.0, hi = 1.0;
    while (chi_square_cdf(hi, dof) < p) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (chi_square_cdf(mid, dof) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

ChiSquareResult chi_square_test(std::span<const std::int64_t> observed,
                                std::span<const double> expected_prob)
{
    if (observed.size() != expected_prob.size() || observed.empty())
        throw std::invalid_argument("chi_square_test: size mismatch");
    const double n = static_cast<double>(std::accumulate(observed.begin(), observed.end(), std::int64_t{0}));
    double stat = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double e = n * expected_prob[i];
        if (e < 5.0) throw std::invalid_argument("chi_square_test: expected cell count below 5");
        const double d = static_cast<double>(observed[i]) - e;
        stat += d * d / e;
    }
    const int dof = static_cast<int>(observed.size()) - 1;
    return {stat, dof, 1.0 - chi_square_cdf(stat, dof)};
}

double proportion_stderr(double p, std::int64_t n)
{
    if (n <= 0) throw std::invalid_argument("proportion_stderr: n must be positive");
    return std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(n));
}

double normal_upper_quantile(double p)
{
    if (p <= 0.0 || p > 0.5) throw std::invalid_argument("normal_upper_quantile: p in (0, 0.5]");
    double lo = 0.0, hi = 1.0;
    auto tail = [](double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); };
    while (tail(hi) > p) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (tail(mid) > p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double ks_distance_to_cdf(std::span<const double> sample, const std::function<double(double)>& cdf)
{
    if (sample.empty()) throw std::invalid_argument("ks_distance_to_cdf: empty sample");
    std::vector<double> s(sample.begin(), sample.end());
    std::sort(s.begin(), s.end());
    const double n = static_cast<double>(s.size());
    double d = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double f = cdf(s[i]);
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    }
    return d;
}

namespace {
std::int64_t gcd64(std::int64_t a, std::int64_t b)
{
    while (b != 0) {
        const std::int64_t t = a % b;
        a = b;
        b = t;
    }
    return a < 0 ? -a : a;
}
} // namespace

Fraction::Fraction(std::int64_t n, std::int64_t d) : num(n), den(d)
{
    if (den == 0) throw std::invalid_argument("Fraction: zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const std::int64_t g = gcd64(num == 0 ? den : num, den);
    num /= g;
    den /= g;
}

Fraction Fraction::operator*(const Fraction& o) const { return Fraction(num * o.num, den * o.den); }
Fraction Fraction::operator+(const Fraction& o) const
{
    return Fraction(num * o.den + o.num * den, den * o.den);
}
Fraction Fraction::operator-(const Fraction& o) const
{
    return Fraction(num * o.den - o.num * den, den * o.den);
}

} // namespace kpzsim
