#pragma once

#include <string>
#include <vector>

#include "event_data.hpp"
#include "intensity.hpp"

namespace repsys {

struct LogLikReport {
    double total = 0;
    std::vector<double> per_system;
    std::string method = "closed-form"; // or "quadrature"
    int node_count = 0;                 // quadrature only

    static LogLikReport from_parts(std::vector<double> parts, std::string method,
                                   int nodes = 0);
};

// Exact log-likelihood, dispatching on the spec (frailty included when set:
// multiplicative families use the gamma-frailty closed form, TRP uses the
// quadrature expectation).
LogLikReport loglik(const ModelSpec& spec, const EventDataset& d);

// Frailty-free likelihood (delta = 0 path).
LogLikReport loglik_no_frailty(const ModelSpec& spec, const EventDataset& d);

// Gamma-frailty closed form for models whose intensity is multiplicative in
// the frailty (NHPP, RP, virtual-age, modulated). Rejects TRP specs.
LogLikReport loglik_gamma_frailty(const ModelSpec& spec, const EventDataset& d,
                                  double delta);

// HTRP likelihood: expectation over a mean-1 gamma frailty on the trend,
// computed by Gauss quadrature with adaptive node doubling (cap 512).
LogLikReport loglik_htrp(const RenewalDistribution& renewal, const TrendFunction& trend,
                         double delta, const EventDataset& d, int node_count = 8);

// Same computation but carrying the best estimate instead of throwing when the
// doubling stalls at the cap (optimizers need a finite value off the sweet
// region; the gap reports the residual doubling change).
struct HtrpEval {
    LogLikReport report;
    bool converged = false;
    double gap = 0;
};
HtrpEval loglik_htrp_best(const RenewalDistribution& renewal, const TrendFunction& trend,
                          double delta, const EventDataset& d, int node_count = 8);

// Total log-likelihood for optimization: identical to loglik except that HTRP
// quadrature non-convergence yields the best estimate rather than an error.
double loglik_for_fit(const ModelSpec& spec, const EventDataset& d);

// Closed form for the inhomogeneous gamma process with gamma frailty, valid
// when every system's tau equals its last event time.
LogLikReport loglik_inhom_gamma_closed(double gamma_var, const TrendFunction& trend,
                                       double delta, const EventDataset& d);

// TRP likelihood evaluated through the hazard/cumulative-hazard route
// (test cross-check against the density/survival route used by loglik).
double trp_loglik_intensity_form(const CubeSpec& cube, const SystemHistory& h);

// Sum of log gamma(T_i) and the integrated intensity int_0^tau gamma for one
// system, at unit frailty. Building blocks for the frailty forms and residuals.
struct IntensityParts {
    double sum_log_intensity = 0;
    double integrated_intensity = 0;
};
IntensityParts intensity_parts(const ModelSpec& spec, const SystemHistory& h);

// Integrated intensity over (0, t], unit frailty.
double integrated_intensity(const ModelSpec& spec, const SystemHistory& h, double t);

} // namespace repsys
