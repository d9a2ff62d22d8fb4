#include "simulation.hpp"

#include <cmath>
#include <cstdio>
#include <set>

#include "common.hpp"
#include "likelihood.hpp"
#include "stats.hpp"

namespace repsys {

namespace {

constexpr std::size_t kMaxEventsPerWindow = 10'000'000;

inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(mix64(seed ^ mix64(stream))) {}

double CounterRng::uniform() {
    const std::uint64_t h = mix64(key_ ^ mix64(counter_++ + 0x632be59bd9b4e019ULL));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double CounterRng::uniform_open() {
    double u;
    do {
        u = uniform();
    } while (u == 0.0);
    return u;
}

double SimulationPlan::tau_for(int i) const {
    if (censor_times.empty()) throw usage_error("simulation plan: no censor time");
    if (censor_times.size() == 1) return censor_times[0];
    if (i < 0 || static_cast<std::size_t>(i) >= censor_times.size()) {
        throw usage_error("simulation plan: censor time list shorter than system count");
    }
    return censor_times[static_cast<std::size_t>(i)];
}

namespace {

std::string format_d_mark(double d) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "d=%.17g", d);
    return buf;
}

// Solve int_{from}^{from+x} gamma(u) du = target for x by bracketing +
// bisection (modulated models with log links have no closed inverse).
double invert_interval_integral(const ModulatedSpec& m, double scale, double from,
                                double target, double horizon) {
    auto integral = [&](double x) {
        return scale * stats::integrate(
                           [&](double u) {
                               return std::exp(m.b0 + m.b1 * link_value(m.g1, u) +
                                               m.b2 * link_value(m.g2, u - from));
                           },
                           from, from + x, 1e-12);
    };
    double hi = std::max(horizon - from, 1e-6);
    if (integral(hi) < target) return HUGE_VAL; // next event past the window
    double lo = 0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (integral(mid) < target) lo = mid;
        else hi = mid;
        if (hi - lo < 1e-12 * (1 + hi)) break;
    }
    return 0.5 * (lo + hi);
}

} // namespace

SystemHistory simulate_system(const ModelSpec& spec, double tau, std::uint64_t seed,
                              std::uint64_t system_index,
                              const std::optional<std::vector<double>>& covariates) {
    SystemHistory h;
    h.system_id = "sim";
    h.censor_time = tau;
    if (covariates) h.covariates = *covariates;

    CounterRng rng(seed, system_index);
    // Repair-effect draws use their own stream so that policies with and
    // without D draws produce identical event times under the same seed.
    CounterRng rng_effects(seed, system_index ^ 0x8000000000000000ULL);

    const double v = spec.frailty_variance();
    double frailty = 1.0;
    if (v > 0) frailty = FrailtyDistribution::gamma(v).quantile(rng.uniform_open());

    double cov_mult = 1.0;
    if (!spec.covariate_coefficients.empty()) {
        if (!covariates) throw usage_error("simulation: spec has covariate coefficients but no covariate values");
        cov_mult = std::exp(covariate_log_multiplier(spec, h));
    }

    if (const auto* cube = std::get_if<CubeSpec>(&spec.model)) {
        // TRP(F, a*lambda) by inversion of the time transformation.
        double cum = 0; // Lambda(T_last)
        while (true) {
            const double e = -std::log1p(-rng.uniform());
            const double w = cube->renewal.inverse_cumulative_hazard(e / cov_mult) / frailty;
            const double next_cum = cum + w;
            double t;
            try {
                t = cube->trend.inverse_cumulative(next_cum);
            } catch (const Error&) {
                break; // Lambda bounded (decaying log-linear trend): no further events
            }
            if (!(t <= tau)) break; // overshoot discarded
            h.times.push_back(t);
            h.marks.push_back(kDefaultMark);
            cum = next_cum;
            if (h.times.size() > kMaxEventsPerWindow) {
                throw numeric_error("explosive configuration");
            }
        }
    } else if (const auto* va = std::get_if<VirtualAgeSpec>(&spec.model)) {
        const auto& z = va->hazard_dist;
        const double mult = frailty * cov_mult;
        double age = 0;     // v(i-1)
        double t_last = 0;
        while (true) {
            const double e = -std::log1p(-rng.uniform());
            const double x =
                z.inverse_cumulative_hazard(z.cumulative_hazard(age) + e / mult) - age;
            const double t = t_last + x;
            if (!(t <= tau) || !std::isfinite(t)) break;
            h.times.push_back(t);
            double d = 1.0;
            switch (va->policy.kind) {
                case VirtualAgeKind::Perfect:
                    age = 0;
                    h.marks.push_back(kDefaultMark);
                    break;
                case VirtualAgeKind::Minimal:
                    age = age + x;
                    h.marks.push_back(kDefaultMark);
                    break;
                case VirtualAgeKind::AgeReductionFull:
                    age = (1 - va->policy.rho) * (age + x);
                    h.marks.push_back(kDefaultMark);
                    break;
                case VirtualAgeKind::AgeReductionIncrement:
                    age = age + (1 - va->policy.rho) * x;
                    h.marks.push_back(kDefaultMark);
                    break;
                case VirtualAgeKind::KijimaI:
                    d = va->policy.d_law->quantile(rng_effects.uniform());
                    age = age + d * x;
                    h.marks.push_back(format_d_mark(d));
                    break;
                case VirtualAgeKind::BrownProschan:
                case VirtualAgeKind::KijimaII:
                    d = va->policy.d_law->quantile(rng_effects.uniform());
                    age = d * (age + x);
                    h.marks.push_back(format_d_mark(d));
                    break;
            }
            t_last = t;
            if (h.times.size() > kMaxEventsPerWindow) {
                throw numeric_error("explosive configuration");
            }
        }
    } else {
        const auto& m = std::get<ModulatedSpec>(spec.model);
        const double mult = frailty * cov_mult;
        double t_last = 0;
        while (true) {
            const double e = -std::log1p(-rng.uniform());
            double x;
            if (m.g1 == Link::Identity && m.g2 == Link::Identity) {
                const double slope = m.b1 + m.b2;
                const double k = mult * std::exp(m.b0 + m.b1 * t_last);
                if (slope == 0) {
                    x = e / k;
                } else {
                    const double arg = e * slope / k;
                    if (arg <= -1) break; // decaying intensity, no further events
                    x = std::log1p(arg) / slope;
                }
            } else {
                x = invert_interval_integral(m, mult, t_last, e, tau + 1);
            }
            const double t = t_last + x;
            if (!(t <= tau) || !std::isfinite(t)) break;
            h.times.push_back(t);
            h.marks.push_back(kDefaultMark);
            t_last = t;
            if (h.times.size() > kMaxEventsPerWindow) {
                throw numeric_error("explosive configuration");
            }
        }
    }
    return h;
}

EventDataset simulate(const SimulationPlan& plan) {
    if (plan.system_count < 1) throw usage_error("simulation plan: system count must be >= 1");
    EventDataset d;
    int width = 1;
    for (int m = plan.system_count; m >= 10; m /= 10) ++width;
    std::set<std::string> marks;
    for (int i = 0; i < plan.system_count; ++i) {
        SystemHistory h = simulate_system(plan.spec, plan.tau_for(i), plan.seed,
                                          static_cast<std::uint64_t>(i), plan.covariates);
        char id[32];
        std::snprintf(id, sizeof(id), "s%0*d", width, i + 1);
        h.system_id = id;
        for (const auto& mk : h.marks) marks.insert(mk);
        d.systems.push_back(std::move(h));
    }
    d.mark_set.assign(marks.begin(), marks.end());
    if (d.mark_set.empty()) d.mark_set.push_back(kDefaultMark);
    d.validate();
    return d;
}

} // namespace repsys
