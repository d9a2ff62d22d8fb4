#include "distributions.hpp"

#include <cmath>

#include <gsl/gsl_sf_gamma.h>
#include <lapacke.h>

#include "common.hpp"
#include "stats.hpp"

namespace repsys {

namespace {
constexpr double kLogSurvivalFloor = -700.0;
}

RenewalDistribution::RenewalDistribution(RenewalFamily f, double shape, double var)
    : family_(f), shape_(shape), var_(var) {
    if (f == RenewalFamily::Weibull) {
        if (!(shape > 0)) throw usage_error("invalid parameter: Weibull shape s <= 0");
        weibull_scale_ = 1.0 / std::tgamma(1.0 + 1.0 / shape);
    } else if (f == RenewalFamily::Gamma) {
        if (!(var > 0)) throw usage_error("invalid parameter: Gamma variance <= 0");
    }
}

RenewalDistribution RenewalDistribution::exponential() {
    return RenewalDistribution(RenewalFamily::Exponential, 1, 1);
}
RenewalDistribution RenewalDistribution::weibull(double shape) {
    return RenewalDistribution(RenewalFamily::Weibull, shape, 1);
}
RenewalDistribution RenewalDistribution::gamma(double variance) {
    return RenewalDistribution(RenewalFamily::Gamma, 1, variance);
}

bool RenewalDistribution::is_exponential() const {
    switch (family_) {
        case RenewalFamily::Exponential: return true;
        case RenewalFamily::Weibull: return shape_ == 1;
        case RenewalFamily::Gamma: return var_ == 1;
    }
    return false;
}

double RenewalDistribution::cumulative_hazard(double t) const {
    if (t <= 0) return 0;
    switch (family_) {
        case RenewalFamily::Exponential:
            return t;
        case RenewalFamily::Weibull:
            return std::pow(t / weibull_scale_, shape_);
        case RenewalFamily::Gamma: {
            const double k = 1.0 / var_;
            const double x = t / var_;
            double q = stats::gamma_q(k, x);
            if (q > 0) return -std::log(q);
            // deep tail: Q(k,x) ~ x^{k-1} e^{-x} / Gamma(k)
            return x - (k - 1) * std::log(x) + std::lgamma(k);
        }
    }
    return 0;
}

double RenewalDistribution::inverse_cumulative_hazard(double z) const {
    if (z <= 0) return 0;
    switch (family_) {
        case RenewalFamily::Exponential:
            return z;
        case RenewalFamily::Weibull:
            return weibull_scale_ * std::pow(z, 1.0 / shape_);
        case RenewalFamily::Gamma: {
            const double k = 1.0 / var_;
            if (z < 700) return var_ * stats::gamma_q_inv(k, std::exp(-z));
            // fixed point of x = z + (k-1) log x - lgamma(k) in the deep tail
            double x = std::max(z, 1.0);
            for (int i = 0; i < 50; ++i) {
                double nx = z + (k - 1) * std::log(x) - std::lgamma(k);
                if (std::fabs(nx - x) < 1e-12 * x) { x = nx; break; }
                x = nx;
            }
            return var_ * x;
        }
    }
    return 0;
}

double RenewalDistribution::log_survival(double t) const {
    return -cumulative_hazard(t);
}

double RenewalDistribution::survival(double t) const {
    return std::exp(log_survival(t));
}

double RenewalDistribution::cdf(double t) const {
    if (t <= 0) return 0;
    if (family_ == RenewalFamily::Gamma) return stats::gamma_p(1.0 / var_, t / var_);
    return -std::expm1(log_survival(t));
}

double RenewalDistribution::log_hazard(double t) const {
    if (!(t > 0) && family_ != RenewalFamily::Exponential) {
        if (family_ == RenewalFamily::Weibull && shape_ < 1) {
            throw numeric_error("Weibull hazard undefined at t = 0 for shape < 1");
        }
    }
    switch (family_) {
        case RenewalFamily::Exponential:
            return 0;
        case RenewalFamily::Weibull:
            return std::log(shape_ / weibull_scale_) +
                   (shape_ - 1) * std::log(t / weibull_scale_);
        case RenewalFamily::Gamma:
            return log_pdf(t) - log_survival(t);
    }
    return 0;
}

double RenewalDistribution::hazard(double t) const { return std::exp(log_hazard(t)); }

double RenewalDistribution::log_pdf(double t) const {
    switch (family_) {
        case RenewalFamily::Exponential:
            return -t;
        case RenewalFamily::Weibull:
            return std::log(shape_ / weibull_scale_) +
                   (shape_ - 1) * std::log(t / weibull_scale_) -
                   std::pow(t / weibull_scale_, shape_);
        case RenewalFamily::Gamma: {
            const double k = 1.0 / var_;
            return (k - 1) * std::log(t) - t / var_ - std::lgamma(k) - k * std::log(var_);
        }
    }
    return 0;
}

double RenewalDistribution::pdf(double t) const {
    return t <= 0 ? (family_ == RenewalFamily::Exponential ? 1.0 : 0.0)
                  : std::exp(log_pdf(t));
}

double RenewalDistribution::quantile(double u) const {
    if (u < 0 || u >= 1) throw numeric_error("quantile argument outside [0,1)");
    if (u == 0) return 0;
    switch (family_) {
        case RenewalFamily::Exponential:
            return -std::log1p(-u);
        case RenewalFamily::Weibull:
            return weibull_scale_ * std::pow(-std::log1p(-u), 1.0 / shape_);
        case RenewalFamily::Gamma:
            return var_ * stats::gamma_p_inv(1.0 / var_, u);
    }
    return 0;
}

double RenewalDistribution::conditional_quantile(double v, double u) const {
    if (u < 0 || u >= 1) throw numeric_error("quantile argument outside [0,1)");
    if (v <= 0) return quantile(u);
    const double zv = cumulative_hazard(v);
    if (-zv < kLogSurvivalFloor) throw numeric_error("degenerate conditional distribution");
    if (family_ == RenewalFamily::Gamma) {
        // invert through whichever incomplete-gamma tail is better conditioned
        const double k = 1.0 / var_;
        const double sv = survival(v);
        const double target_p = cdf(v) + u * sv;
        if (target_p < 0.5) return var_ * stats::gamma_p_inv(k, target_p) - v;
        const double target_q = sv * (1 - u);
        if (target_q > 0) return var_ * stats::gamma_q_inv(k, target_q) - v;
    }
    return inverse_cumulative_hazard(zv - std::log1p(-u)) - v;
}

ScaledDistribution::ScaledDistribution(RenewalDistribution base, double scale)
    : base_(std::move(base)), scale_(scale) {
    if (!(scale > 0)) throw usage_error("invalid parameter: time scale <= 0");
}

double ScaledDistribution::hazard(double t) const { return base_.hazard(t / scale_) / scale_; }
double ScaledDistribution::log_hazard(double t) const {
    return base_.log_hazard(t / scale_) - std::log(scale_);
}
double ScaledDistribution::cumulative_hazard(double t) const {
    return base_.cumulative_hazard(t / scale_);
}
double ScaledDistribution::inverse_cumulative_hazard(double z) const {
    return scale_ * base_.inverse_cumulative_hazard(z);
}
double ScaledDistribution::cdf(double t) const { return base_.cdf(t / scale_); }
double ScaledDistribution::conditional_quantile(double v, double u) const {
    return scale_ * base_.conditional_quantile(v / scale_, u);
}

FrailtyDistribution FrailtyDistribution::gamma(double variance) {
    if (!(variance >= 0)) throw usage_error("invalid parameter: frailty variance < 0");
    return {variance};
}

double FrailtyDistribution::quantile(double u) const {
    if (is_degenerate()) return 1.0;
    return variance * stats::gamma_p_inv(1.0 / variance, u);
}

std::vector<QuadratureNode> frailty_quadrature(const FrailtyDistribution& h,
                                               int node_count) {
    if (h.is_degenerate()) {
        throw usage_error("frailty_quadrature: degenerate frailty, use the delta=0 path");
    }
    if (node_count < 1) throw usage_error("frailty_quadrature: node_count must be >= 1");
    const double k = 1.0 / h.variance;
    if (node_count == 1) return {{1.0, 1.0}}; // one-point rule matches the mean

    // Golub-Welsch for the generalized Laguerre weight x^{k-1} e^{-x},
    // normalized so the quadrature weights sum to 1 (avoids Gamma(k) overflow).
    const int n = node_count;
    std::vector<double> diag(static_cast<std::size_t>(n));
    std::vector<double> off(static_cast<std::size_t>(n > 1 ? n - 1 : 0));
    const double alpha = k - 1.0;
    for (int i = 0; i < n; ++i) diag[static_cast<std::size_t>(i)] = 2.0 * i + alpha + 1.0;
    for (int i = 1; i < n; ++i) {
        off[static_cast<std::size_t>(i - 1)] = std::sqrt(i * (i + alpha));
    }
    std::vector<double> evec(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
    int info = LAPACKE_dstev(LAPACK_ROW_MAJOR, 'V', n, diag.data(), off.data(),
                             evec.data(), n);
    if (info != 0) throw numeric_error("frailty_quadrature: eigensolver failed");
    std::vector<QuadratureNode> out(static_cast<std::size_t>(n));
    double total = 0;
    for (int i = 0; i < n; ++i) {
        double w = evec[static_cast<std::size_t>(i)] * evec[static_cast<std::size_t>(i)];
        out[static_cast<std::size_t>(i)] = {h.variance * diag[static_cast<std::size_t>(i)], w};
        total += w;
    }
    for (auto& q : out) q.weight /= total;
    return out;
}

} // namespace repsys
