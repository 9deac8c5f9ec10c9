#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace kpzsim {

// Right-continuous empirical CDF built from a sample.
class EmpiricalCdf {
public:
    explicit EmpiricalCdf(std::vector<double> samples);

    double operator()(double x) const; // P(X <= x)
    std::size_t size() const { return sorted_.size(); }
    const std::vector<double>& sorted() const { return sorted_; }

private:
    std::vector<double> sorted_;
};

// Two-sample Kolmogorov-Smirnov statistic sup_x |F_a(x) - F_b(x)|.
double ks_distance(std::span<const double> a, std::span<const double> b);

// Critical value for the two-sample KS test at significance alpha.
double ks_critical(double alpha, std::size_t n, std::size_t m);

// Regularized lower incomplete gamma P(a, x).
double gammp(double a, double x);

// Chi-square distribution: CDF and (upper) quantile.
double chi_square_cdf(double x, int dof);
double chi_square_quantile(double p, int dof);

struct ChiSquareResult {
    double statistic;
    int dof;
    double p_value;
};

// Goodness of fit of observed counts against expected probabilities.
ChiSquareResult chi_square_test(std::span<const std::int64_t> observed,
                                std::span<const double> expected_prob);

// Standard error of a binomial proportion estimate p over n trials.
double proportion_stderr(double p, std::int64_t n);

// z such that P(N(0,1) > z) = p, for p in (0, 0.5].
double normal_upper_quantile(double p);

// One-sample KS statistic of a sample against a CDF given as a callable.
double ks_distance_to_cdf(std::span<const double> sample, const std::function<double(double)>& cdf);

// Exact rational q for desk checks of vertex-weight identities.
struct Fraction {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Fraction() = default;
    Fraction(std::int64_t n, std::int64_t d);

    Fraction operator*(const Fraction& o) const;
    Fraction operator+(const Fraction& o) const;
    Fraction operator-(const Fraction& o) const;
    bool operator==(const Fraction& o) const { return num == o.num && den == o.den; }

    static Fraction one() { return Fraction(1, 1); }
};

} // namespace kpzsim
