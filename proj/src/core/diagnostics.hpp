#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "event_data.hpp"
#include "fitting.hpp"
#include "trend_tests.hpp"

namespace repsys {

struct StepFunctionPlot {
    enum class Kind { RightContinuousStep, PiecewiseLinear } kind = Kind::RightContinuousStep;
    std::vector<double> t;
    std::vector<double> value;
    std::vector<double> variance; // empty or same length as t
    std::string note;             // emitted as metadata with the plot file
};

// Mean cumulative function estimate: jump 1/y(T_k) at each pooled event time,
// variance column sum of 1/y(T_k)^2.
StepFunctionPlot nelson_aalen(const EventDataset& d);

// Points (i/N, r(T_i)/r(tau_max)); both coordinates nondecreasing in [0,1].
StepFunctionPlot ttt_plot(const EventDataset& d);

// Per-system cumulative event count (single-system special case of the MCF).
StepFunctionPlot cumulative_count(const SystemHistory& h);

struct ResidualReport {
    // increments of the fitted integrated intensity between consecutive events
    std::vector<std::vector<double>> increments;        // per system
    std::vector<double> posterior_frailty;              // per system (1 when no frailty)
    TrendTestResult exponentiality;                     // A^2 on F(increment)
    TrendTestResult residual_trend;                     // Laplace on residual processes
    double lag1_autocorrelation = 0;
    double lag1_p = 1;                                  // normal approximation
};

// Time-change residuals: at the fitted parameters the per-system integrated
// intensities form a unit-rate Poisson process. Frailty fits evaluate at the
// per-system posterior-mean frailty.
ResidualReport cox_snell_residuals(const FitResult& fit, const EventDataset& d);

void write_plot_csv(const StepFunctionPlot& plot, std::ostream& out);
// Minimal fixed-layout SVG rendering (the CSV is the contract).
void write_plot_svg(const StepFunctionPlot& plot, std::ostream& out,
                    const std::string& title);

} // namespace repsys
