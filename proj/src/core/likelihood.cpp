#include "likelihood.hpp"

#include <cmath>
#include <numeric>

#include "common.hpp"
#include "stats.hpp"

namespace repsys {

LogLikReport LogLikReport::from_parts(std::vector<double> parts, std::string method,
                                      int nodes) {
    LogLikReport r;
    r.per_system = std::move(parts);
    r.total = std::accumulate(r.per_system.begin(), r.per_system.end(), 0.0);
    r.method = std::move(method);
    r.node_count = nodes;
    return r;
}

namespace {

double modulated_value_log(const ModulatedSpec& m, double t, double gap) {
    return m.b0 + m.b1 * link_value(m.g1, t) + m.b2 * link_value(m.g2, gap);
}

double modulated_interval_integral(const ModulatedSpec& m, double from, double to) {
    if (to <= from) return 0;
    // Closed form when both links are identity; numeric otherwise.
    if (m.g1 == Link::Identity && m.g2 == Link::Identity) {
        const double slope = m.b1 + m.b2;
        const double at_from = m.b0 + m.b1 * from; // gap = 0 at interval start
        if (slope == 0) return std::exp(at_from) * (to - from);
        return std::exp(at_from) * std::expm1(slope * (to - from)) / slope;
    }
    return stats::integrate(
        [&](double u) { return std::exp(modulated_value_log(m, u, u - from)); }, from, to,
        1e-10);
}

} // namespace

IntensityParts intensity_parts(const ModelSpec& spec, const SystemHistory& h) {
    IntensityParts out;
    const auto& times = h.times;
    const std::size_t n = times.size();
    const double tau = h.censor_time;

    if (const auto* cube = std::get_if<CubeSpec>(&spec.model)) {
        if (cube->renewal.is_exponential()) {
            for (double t : times) out.sum_log_intensity += cube->trend.log_value(t);
            out.integrated_intensity = cube->trend.cumulative(tau);
        } else {
            double prev_cum = 0;
            double integral = 0;
            for (double t : times) {
                const double cum = cube->trend.cumulative(t);
                out.sum_log_intensity +=
                    cube->renewal.log_hazard(cum - prev_cum) + cube->trend.log_value(t);
                integral += cube->renewal.cumulative_hazard(cum - prev_cum);
                prev_cum = cum;
            }
            integral += cube->renewal.cumulative_hazard(cube->trend.cumulative(tau) - prev_cum);
            out.integrated_intensity = integral;
        }
    } else if (const auto* va = std::get_if<VirtualAgeSpec>(&spec.model)) {
        const auto x = interevent_times(h);
        const auto v = va->policy.post_event_ages(
            x, va->policy.needs_effects() ? h.repair_effects() : std::vector<double>{});
        const auto& z = va->hazard_dist;
        double integral = 0;
        for (std::size_t i = 0; i < n; ++i) {
            out.sum_log_intensity += z.log_hazard(v[i] + x[i]);
            integral += z.cumulative_hazard(v[i] + x[i]) - z.cumulative_hazard(v[i]);
        }
        const double t_last = n == 0 ? 0 : times[n - 1];
        integral += z.cumulative_hazard(v[n] + (tau - t_last)) - z.cumulative_hazard(v[n]);
        out.integrated_intensity = integral;
    } else {
        const auto& m = std::get<ModulatedSpec>(spec.model);
        double prev = 0;
        double integral = 0;
        for (double t : times) {
            out.sum_log_intensity += modulated_value_log(m, t, t - prev);
            integral += modulated_interval_integral(m, prev, t);
            prev = t;
        }
        integral += modulated_interval_integral(m, prev, tau);
        out.integrated_intensity = integral;
    }

    const double cov = covariate_log_multiplier(spec, h);
    if (cov != 0) {
        out.sum_log_intensity += static_cast<double>(n) * cov;
        out.integrated_intensity *= std::exp(cov);
    }
    return out;
}

double integrated_intensity(const ModelSpec& spec, const SystemHistory& h, double t) {
    SystemHistory truncated = h;
    truncated.censor_time = t;
    std::size_t keep = 0;
    while (keep < h.times.size() && h.times[keep] <= t) ++keep;
    truncated.times.resize(keep);
    truncated.marks.resize(std::min(truncated.marks.size(), keep));
    return intensity_parts(spec, truncated).integrated_intensity;
}

namespace {

// TRP via Eq-(8) shape: sum log f(dLambda_i) + log lambda(T_i), plus log-survival tail.
double trp_loglik_density_form(const CubeSpec& cube, const SystemHistory& h,
                               double frailty = 1.0) {
    double ll = 0;
    double prev_cum = 0;
    for (double t : h.times) {
        const double cum = cube.trend.cumulative(t);
        ll += cube.renewal.log_pdf(frailty * (cum - prev_cum)) + std::log(frailty) +
              cube.trend.log_value(t);
        prev_cum = cum;
    }
    ll += cube.renewal.log_survival(frailty *
                                    (cube.trend.cumulative(h.censor_time) - prev_cum));
    return ll;
}

double per_system_no_frailty(const ModelSpec& spec, const SystemHistory& h) {
    if (const auto* cube = std::get_if<CubeSpec>(&spec.model)) {
        if (!cube->renewal.is_exponential()) {
            double ll = trp_loglik_density_form(*cube, h);
            const double cov = covariate_log_multiplier(spec, h);
            if (cov != 0) {
                // covariates multiply the trend; fold them in via parts instead
                const auto parts = intensity_parts(spec, h);
                return parts.sum_log_intensity - parts.integrated_intensity;
            }
            return ll;
        }
    }
    const auto parts = intensity_parts(spec, h);
    return parts.sum_log_intensity - parts.integrated_intensity;
}

} // namespace

double trp_loglik_intensity_form(const CubeSpec& cube, const SystemHistory& h) {
    double ll = 0;
    double prev_cum = 0;
    double integral = 0;
    for (double t : h.times) {
        const double cum = cube.trend.cumulative(t);
        ll += cube.renewal.log_hazard(cum - prev_cum) + cube.trend.log_value(t);
        integral += cube.renewal.cumulative_hazard(cum - prev_cum);
        prev_cum = cum;
    }
    integral += cube.renewal.cumulative_hazard(cube.trend.cumulative(h.censor_time) - prev_cum);
    return ll - integral;
}

LogLikReport loglik_no_frailty(const ModelSpec& spec, const EventDataset& d) {
    std::vector<double> parts;
    parts.reserve(d.systems.size());
    for (const auto& s : d.systems) parts.push_back(per_system_no_frailty(spec, s));
    return LogLikReport::from_parts(std::move(parts), "closed-form");
}

LogLikReport loglik_gamma_frailty(const ModelSpec& spec, const EventDataset& d,
                                  double delta) {
    if (!(delta > 0)) throw usage_error("loglik_gamma_frailty: delta must be > 0");
    if (const auto* cube = std::get_if<CubeSpec>(&spec.model)) {
        // constant trend (renewal process) keeps a multiplicative intensity a z(t - T_last)
        if (!cube->renewal.is_exponential() &&
            cube->trend.family() != TrendFamily::Constant) {
            throw usage_error(
                "frailty enters TRP non-multiplicatively; use loglik_htrp");
        }
    }
    const double inv = 1.0 / delta;
    std::vector<double> parts;
    parts.reserve(d.systems.size());
    for (const auto& s : d.systems) {
        const auto p = intensity_parts(spec, s);
        const double n = static_cast<double>(s.n());
        double ll = p.sum_log_intensity + std::lgamma(n + inv) - std::lgamma(inv) -
                    inv * std::log(delta) -
                    (n + inv) * std::log(inv + p.integrated_intensity);
        parts.push_back(ll);
    }
    return LogLikReport::from_parts(std::move(parts), "closed-form");
}

namespace {

double htrp_total(const RenewalDistribution& renewal, const TrendFunction& trend,
                  double delta, const EventDataset& d, int nodes,
                  std::vector<double>* parts_out) {
    const auto rule = frailty_quadrature(FrailtyDistribution::gamma(delta), nodes);
    CubeSpec cube{renewal, trend, 0};
    double total = 0;
    if (parts_out) parts_out->clear();
    std::vector<double> terms(rule.size());
    for (const auto& s : d.systems) {
        for (std::size_t k = 0; k < rule.size(); ++k) {
            terms[k] = std::log(rule[k].weight) +
                       trp_loglik_density_form(cube, s, rule[k].node);
        }
        const double ll = stats::logsumexp(terms);
        total += ll;
        if (parts_out) parts_out->push_back(ll);
    }
    return total;
}

} // namespace

HtrpEval loglik_htrp_best(const RenewalDistribution& renewal, const TrendFunction& trend,
                          double delta, const EventDataset& d, int node_count) {
    if (!(delta > 0)) throw usage_error("loglik_htrp: delta must be > 0");
    if (node_count < 8) node_count = 8;
    constexpr int kCap = 512;
    constexpr double kTol = 1e-8;
    double prev = htrp_total(renewal, trend, delta, d, node_count, nullptr);
    int n = node_count;
    while (true) {
        const int n2 = std::min(2 * n, kCap);
        std::vector<double> parts;
        const double cur = htrp_total(renewal, trend, delta, d, n2, &parts);
        HtrpEval ev;
        ev.gap = std::fabs(cur - prev);
        if (ev.gap < kTol) {
            // report at the node count whose doubling changed the value by < tol
            ev.report = LogLikReport::from_parts(std::move(parts), "quadrature", n);
            ev.converged = true;
            return ev;
        }
        if (n2 == kCap) {
            ev.report = LogLikReport::from_parts(std::move(parts), "quadrature", n2);
            return ev;
        }
        prev = cur;
        n = n2;
    }
}

LogLikReport loglik_htrp(const RenewalDistribution& renewal, const TrendFunction& trend,
                         double delta, const EventDataset& d, int node_count) {
    HtrpEval ev = loglik_htrp_best(renewal, trend, delta, d, node_count);
    if (!ev.converged) {
        throw numeric_error(
            "HTRP quadrature did not converge at 512 nodes; best estimate " +
            std::to_string(ev.report.total) + ", gap " + std::to_string(ev.gap));
    }
    return ev.report;
}

LogLikReport loglik_inhom_gamma_closed(double gamma_var, const TrendFunction& trend,
                                       double delta, const EventDataset& d) {
    if (!(gamma_var > 0) || !(delta > 0)) {
        throw usage_error("loglik_inhom_gamma_closed: gamma and delta must be > 0");
    }
    const double ig = 1.0 / gamma_var;
    const double id = 1.0 / delta;
    std::vector<double> parts;
    parts.reserve(d.systems.size());
    for (const auto& s : d.systems) {
        const std::size_t n = s.n();
        if (n == 0 || s.times.back() != s.censor_time) {
            throw usage_error("loglik_inhom_gamma_closed: system '" + s.system_id +
                              "' is not stopped at its last event time");
        }
        double ll = 0;
        double prev_cum = 0;
        for (double t : s.times) {
            const double cum = trend.cumulative(t);
            ll += (ig - 1) * std::log(cum - prev_cum) + trend.log_value(t);
            prev_cum = cum;
        }
        const double nn = static_cast<double>(n);
        ll += std::lgamma(nn * ig + id);
        ll -= nn * ig * std::log(gamma_var) + nn * std::lgamma(ig) +
              id * std::log(delta) + std::lgamma(id) +
              (nn * ig + id) * std::log(id + ig * trend.cumulative(s.times.back()));
        parts.push_back(ll);
    }
    return LogLikReport::from_parts(std::move(parts), "closed-form");
}

double loglik_for_fit(const ModelSpec& spec, const EventDataset& d) {
    const double v = spec.frailty_variance();
    if (v > 0) {
        if (const auto* cube = std::get_if<CubeSpec>(&spec.model)) {
            if (!cube->renewal.is_exponential()) {
                return loglik_htrp_best(cube->renewal, cube->trend, v, d).report.total;
            }
        }
    }
    return loglik(spec, d).total;
}

LogLikReport loglik(const ModelSpec& spec, const EventDataset& d) {
    const double v = spec.frailty_variance();
    if (v <= 0) return loglik_no_frailty(spec, d);
    if (const auto* cube = std::get_if<CubeSpec>(&spec.model)) {
        if (!cube->renewal.is_exponential()) {
            return loglik_htrp(cube->renewal, cube->trend, v, d);
        }
    }
    return loglik_gamma_frailty(spec, d, v);
}

} // namespace repsys
