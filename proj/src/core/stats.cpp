#include "stats.hpp"

#include <algorithm>
#include <cmath>

#include <gsl/gsl_cdf.h>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_sf_gamma.h>

#include "common.hpp"

namespace repsys::stats {

namespace {

struct GslErrorsOff {
    GslErrorsOff() { gsl_set_error_handler_off(); }
};
const GslErrorsOff gsl_errors_off{};

} // namespace

double normal_cdf(double z) { return gsl_cdf_ugaussian_P(z); }
double normal_sf(double z) { return gsl_cdf_ugaussian_Q(z); }

double normal_two_sided_p(double z) {
    return std::min(1.0, 2.0 * gsl_cdf_ugaussian_Q(std::fabs(z)));
}

double chisq_cdf(double x, double df) { return x <= 0 ? 0.0 : gsl_cdf_chisq_P(x, df); }
double chisq_sf(double x, double df) { return x <= 0 ? 1.0 : gsl_cdf_chisq_Q(x, df); }

double gamma_p(double a, double x) { return gsl_sf_gamma_inc_P(a, x); }
double gamma_q(double a, double x) { return gsl_sf_gamma_inc_Q(a, x); }

double gamma_p_inv(double a, double p) {
    if (p < 0 || p >= 1) throw numeric_error("gamma quantile: probability outside [0,1)");
    if (p == 0) return 0.0;
    return gsl_cdf_gamma_Pinv(p, a, 1.0);
}

double gamma_q_inv(double a, double q) {
    if (q <= 0 || q > 1) throw numeric_error("gamma quantile: tail probability outside (0,1]");
    if (q == 1) return 0.0;
    return gsl_cdf_gamma_Qinv(q, a, 1.0);
}

double mean(std::span<const double> x) {
    double s = 0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

double sample_sd(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n < 2) throw numeric_error("sample_sd: need at least 2 values");
    const double m = mean(x);
    double ss = 0;
    for (double v : x) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(n - 1));
}

double lag1_autocorrelation(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n < 3) throw numeric_error("lag1_autocorrelation: need at least 3 values");
    const double m = mean(x);
    double num = 0, den = 0;
    for (std::size_t i = 0; i < n; ++i) {
        den += (x[i] - m) * (x[i] - m);
        if (i + 1 < n) num += (x[i] - m) * (x[i + 1] - m);
    }
    if (den == 0) throw numeric_error("lag1_autocorrelation: zero variance");
    return num / den;
}

double anderson_darling_a2(std::vector<double> u) {
    const std::size_t n = u.size();
    if (n == 0) throw numeric_error("anderson_darling: empty sample");
    std::sort(u.begin(), u.end());
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double ui = std::min(std::max(u[i], 1e-300), 1.0 - 1e-16);
        double urev = std::min(std::max(u[n - 1 - i], 1e-300), 1.0 - 1e-16);
        s += (2.0 * static_cast<double>(i) + 1.0) * (std::log(ui) + std::log1p(-urev));
    }
    return -static_cast<double>(n) - s / static_cast<double>(n);
}

double anderson_darling_sf(double z) {
    // Marsaglia & Marsaglia (2004) approximation to the limiting distribution.
    if (z <= 0) return 1.0;
    double cdf;
    if (z < 2.0) {
        cdf = std::pow(z, -0.5) * std::exp(-1.2337141 / z) *
              (2.00012 +
               (0.247105 -
                (0.0649821 - (0.0347962 - (0.011672 - 0.00168691 * z) * z) * z) * z) *
                   z);
    } else {
        cdf = std::exp(
            -std::exp(1.0776 -
                      (2.30695 -
                       (0.43424 - (0.082433 - (0.008056 - 0.0003146 * z) * z) * z) * z) *
                          z));
    }
    cdf = std::min(std::max(cdf, 0.0), 1.0);
    return 1.0 - cdf;
}

double logsumexp(std::span<const double> x) {
    double m = -HUGE_VAL;
    for (double v : x) m = std::max(m, v);
    if (!std::isfinite(m)) return m;
    double s = 0;
    for (double v : x) s += std::exp(v - m);
    return m + std::log(s);
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol) {
    struct Ctx {
        const std::function<double(double)>* f;
    } ctx{&f};
    gsl_function gf;
    gf.function = [](double x, void* p) { return (*static_cast<Ctx*>(p)->f)(x); };
    gf.params = &ctx;
    gsl_integration_workspace* ws = gsl_integration_workspace_alloc(2000);
    double result = 0, abserr = 0;
    int status = gsl_integration_qags(&gf, a, b, 0.0, rel_tol, 2000, ws, &result, &abserr);
    gsl_integration_workspace_free(ws);
    if (status != GSL_SUCCESS && status != GSL_EROUND) {
        throw numeric_error("numerical integration failed (gsl status " +
                            std::to_string(status) + ")");
    }
    return result;
}

} // namespace repsys::stats
