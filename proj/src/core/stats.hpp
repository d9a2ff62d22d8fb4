#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace repsys::stats {

double normal_cdf(double z);
double normal_sf(double z);
// Two-sided p-value for an asymptotically N(0,1) statistic.
double normal_two_sided_p(double z);

double chisq_cdf(double x, double df);
double chisq_sf(double x, double df);

// Regularized incomplete gamma P(a, x) and Q(a, x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);
// Inverse of P(a, .) and Q(a, .).
double gamma_p_inv(double a, double p);
double gamma_q_inv(double a, double q);

double mean(std::span<const double> x);
double sample_sd(std::span<const double> x); // n-1 denominator
double lag1_autocorrelation(std::span<const double> x);

// Anderson-Darling A^2 against Uniform(0,1); u need not be sorted.
double anderson_darling_a2(std::vector<double> u);
// Asymptotic upper tail P(A^2 >= a2) (Marsaglia & Marsaglia approximation).
double anderson_darling_sf(double a2);

double logsumexp(std::span<const double> x);

// Adaptive numerical integration of f over [a, b] (relative tolerance).
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-10);

} // namespace repsys::stats
