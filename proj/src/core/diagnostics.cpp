#include "diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "common.hpp"
#include "likelihood.hpp"
#include "stats.hpp"
#include "trend_tests.hpp"

namespace repsys {

StepFunctionPlot nelson_aalen(const EventDataset& d) {
    const SuperposedProcess sp(d);
    StepFunctionPlot p;
    p.kind = StepFunctionPlot::Kind::RightContinuousStep;
    p.note = "variance column is the simple sum of 1/y(T_k)^2";
    double m = 0, var = 0;
    const auto& times = sp.pooled_times();
    for (std::size_t i = 0; i < times.size(); ++i) {
        const int y = sp.at_risk(times[i]);
        if (y <= 0) {
            throw data_error("mean cumulative function: event at t with no system at risk");
        }
        m += 1.0 / y;
        var += 1.0 / (static_cast<double>(y) * y);
        // merge tied event times into a single breakpoint
        if (i + 1 < times.size() && times[i + 1] == times[i]) continue;
        p.t.push_back(times[i]);
        p.value.push_back(m);
        p.variance.push_back(var);
    }
    return p;
}

StepFunctionPlot ttt_plot(const EventDataset& d) {
    const auto u = ttt_transform(d);
    StepFunctionPlot p;
    p.kind = StepFunctionPlot::Kind::PiecewiseLinear;
    const double n = static_cast<double>(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        p.t.push_back(static_cast<double>(i + 1) / n);
        p.value.push_back(u[i]);
    }
    return p;
}

StepFunctionPlot cumulative_count(const SystemHistory& h) {
    StepFunctionPlot p;
    p.kind = StepFunctionPlot::Kind::RightContinuousStep;
    for (std::size_t i = 0; i < h.times.size(); ++i) {
        p.t.push_back(h.times[i]);
        p.value.push_back(static_cast<double>(i + 1));
    }
    return p;
}

ResidualReport cox_snell_residuals(const FitResult& fit, const EventDataset& d) {
    if (!fit.converged) {
        throw usage_error("residuals: fit did not converge; refusing to diagnose a "
                          "non-optimal parameter point");
    }
    const double v = fit.spec.frailty_variance();
    const ModelSpec base = fit.spec.with_frailty(0.0);

    ResidualReport rep;
    EventDataset residual_processes;
    std::vector<double> pooled;

    for (const auto& h : d.systems) {
        const auto parts = intensity_parts(base, h);
        double a = 1.0;
        if (v > 0) {
            // gamma-conjugacy posterior mean given this system's history
            a = (static_cast<double>(h.n()) + 1.0 / v) /
                (parts.integrated_intensity + 1.0 / v);
        }
        rep.posterior_frailty.push_back(a);

        std::vector<double> inc;
        double prev = 0;
        for (double t : h.times) {
            const double cum = a * integrated_intensity(base, h, t);
            const double delta = cum - prev;
            if (!(delta > 0)) {
                throw numeric_error("residuals: nonpositive increment in system '" +
                                    h.system_id + "'");
            }
            inc.push_back(delta);
            pooled.push_back(delta);
            prev = cum;
        }
        SystemHistory res;
        res.system_id = h.system_id;
        res.censor_time = a * parts.integrated_intensity;
        double t = 0;
        for (double x : inc) {
            t += x;
            res.times.push_back(std::min(t, res.censor_time));
            res.marks.push_back(kDefaultMark);
        }
        rep.increments.push_back(std::move(inc));
        if (res.censor_time > 0) residual_processes.systems.push_back(std::move(res));
    }

    if (pooled.empty()) throw data_error("residuals: no events in dataset");
    residual_processes.mark_set.push_back(kDefaultMark);

    // (i) exponentiality of the increments
    std::vector<double> u;
    u.reserve(pooled.size());
    for (double x : pooled) u.push_back(-std::expm1(-x));
    rep.exponentiality = anderson_darling_uniform(std::move(u));
    rep.exponentiality.method = "residual-exponentiality";

    // (ii) trend in the residual processes
    rep.residual_trend = combined_laplace(residual_processes);
    rep.residual_trend.method = "residual-trend";

    // (iii) serial dependence
    if (pooled.size() >= 3) {
        rep.lag1_autocorrelation = stats::lag1_autocorrelation(pooled);
        const double z =
            rep.lag1_autocorrelation * std::sqrt(static_cast<double>(pooled.size()));
        rep.lag1_p = stats::normal_two_sided_p(z);
    }
    return rep;
}

void write_plot_csv(const StepFunctionPlot& plot, std::ostream& out) {
    if (!plot.note.empty()) out << "# " << plot.note << "\n";
    const bool linear = plot.kind == StepFunctionPlot::Kind::PiecewiseLinear;
    const bool with_var = !plot.variance.empty();
    if (linear) out << "x,y\n";
    else if (with_var) out << "t,value,variance\n";
    else out << "t,value\n";
    out.precision(17);
    for (std::size_t i = 0; i < plot.t.size(); ++i) {
        out << plot.t[i] << ',' << plot.value[i];
        if (!linear && with_var) out << ',' << plot.variance[i];
        out << '\n';
    }
}

void write_plot_svg(const StepFunctionPlot& plot, std::ostream& out,
                    const std::string& title) {
    constexpr double W = 640, H = 480, pad = 60;
    double tmax = 1e-12, vmax = 1e-12;
    for (std::size_t i = 0; i < plot.t.size(); ++i) {
        tmax = std::max(tmax, plot.t[i]);
        vmax = std::max(vmax, plot.value[i]);
    }
    auto sx = [&](double t) { return pad + (W - 2 * pad) * t / tmax; };
    auto sy = [&](double v) { return H - pad - (H - 2 * pad) * v / vmax; };
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\""
        << H << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\">" << title
        << "</text>\n";
    out << "<line x1=\"" << pad << "\" y1=\"" << H - pad << "\" x2=\"" << W - pad
        << "\" y2=\"" << H - pad << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << pad << "\" y1=\"" << pad << "\" x2=\"" << pad << "\" y2=\""
        << H - pad << "\" stroke=\"black\"/>\n";
    out << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
    const bool step = plot.kind == StepFunctionPlot::Kind::RightContinuousStep;
    double px = sx(0), py = sy(0);
    out << px << ',' << py << ' ';
    for (std::size_t i = 0; i < plot.t.size(); ++i) {
        const double x = sx(plot.t[i]), y = sy(plot.value[i]);
        if (step) out << x << ',' << py << ' ';
        out << x << ',' << y << ' ';
        px = x;
        py = y;
    }
    out << "\"/>\n</svg>\n";
}

} // namespace repsys
