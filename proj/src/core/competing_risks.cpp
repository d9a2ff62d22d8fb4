#include "competing_risks.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

#include "common.hpp"
#include "simulation.hpp"
#include "stats.hpp"

namespace repsys {

std::size_t ComponentSet::index_of(const std::string& mark) const {
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == mark) return i;
    throw data_error("component set: unknown mark '" + mark + "'");
}

void ComponentSet::validate() const {
    if (labels.empty()) throw usage_error("component set: needs at least one label");
    std::set<std::string> seen(labels.begin(), labels.end());
    if (seen.size() != labels.size()) {
        throw usage_error("component set: duplicate labels");
    }
}

namespace {

void check_rho(const std::vector<double>& rho) {
    if (rho.empty()) throw usage_error("age-reduction policy: no rho values");
    for (double r : rho) {
        if (!(r > 0 && r < 1)) {
            throw usage_error("age-reduction policy: rho must lie strictly in (0,1)");
        }
    }
}

} // namespace

MultiVirtualAgePolicy MultiVirtualAgePolicy::perfect_all() {
    return {Kind::PerfectAll, {}};
}
MultiVirtualAgePolicy MultiVirtualAgePolicy::minimal_all() {
    return {Kind::MinimalAll, {}};
}
MultiVirtualAgePolicy MultiVirtualAgePolicy::partial_repair() {
    return {Kind::PartialRepair, {}};
}
MultiVirtualAgePolicy MultiVirtualAgePolicy::age_reduction_full(std::vector<double> rho) {
    check_rho(rho);
    return {Kind::AgeReductionFull, std::move(rho)};
}
MultiVirtualAgePolicy MultiVirtualAgePolicy::age_reduction_increment(
    std::vector<double> rho) {
    check_rho(rho);
    return {Kind::AgeReductionIncrement, std::move(rho)};
}
MultiVirtualAgePolicy MultiVirtualAgePolicy::equal_age_two_type(std::vector<double> rho) {
    check_rho(rho);
    return {Kind::EqualAgeTwoType, std::move(rho)};
}

void MultiVirtualAgePolicy::apply_event(std::vector<double>& ages, std::size_t j,
                                        double x) const {
    if (j >= ages.size()) throw data_error("competing risks: mark index out of range");
    if (!rho.empty() && rho.size() != ages.size() && kind != Kind::PerfectAll &&
        kind != Kind::MinimalAll && kind != Kind::PartialRepair) {
        throw usage_error("age-reduction policy: rho list does not match component count");
    }
    switch (kind) {
        case Kind::PerfectAll:
            std::fill(ages.begin(), ages.end(), 0.0);
            break;
        case Kind::MinimalAll:
            for (double& a : ages) a += x;
            break;
        case Kind::PartialRepair:
            for (double& a : ages) a += x;
            ages[j] = 0;
            break;
        case Kind::AgeReductionFull:
            for (double& a : ages) a += x;
            ages[j] *= 1 - rho[j];
            break;
        case Kind::AgeReductionIncrement:
            for (double& a : ages) a += (1 - rho[j]) * x;
            break;
        case Kind::EqualAgeTwoType:
            for (double& a : ages) a = (1 - rho[j]) * (a + x);
            break;
    }
}

IntensityFamily IntensityFamily::independent(std::vector<ScaledDistribution> marginals) {
    IntensityFamily f;
    f.kind = Kind::IndependentSurvival;
    f.marginals = std::move(marginals);
    return f;
}

IntensityFamily IntensityFamily::decomposed(
    std::vector<ScaledDistribution> marginals,
    std::function<double(std::size_t, const std::vector<double>&)> interaction) {
    IntensityFamily f;
    f.kind = Kind::Decomposed;
    f.marginals = std::move(marginals);
    f.interaction = std::move(interaction);
    return f;
}

IntensityFamily IntensityFamily::gumbel(double theta) {
    if (!(theta >= 0 && theta <= 1)) {
        throw usage_error("Gumbel family: theta must lie in [0,1]");
    }
    IntensityFamily f;
    f.kind = Kind::GumbelBivariate;
    f.theta = theta;
    return f;
}

IntensityFamily IntensityFamily::user_survival(
    std::function<double(const std::vector<double>&)> R, std::size_t components) {
    if (components == 0) throw usage_error("survival family: needs at least one component");
    IntensityFamily f;
    f.kind = Kind::UserSurvival;
    f.survival = std::move(R);
    f.user_components = components;
    return f;
}

std::size_t IntensityFamily::components() const {
    switch (kind) {
        case Kind::Decomposed:
        case Kind::IndependentSurvival: return marginals.size();
        case Kind::GumbelBivariate: return 2;
        case Kind::UserSurvival: return user_components;
    }
    return 0;
}

std::vector<double> type_intensity(const IntensityFamily& family,
                                   const std::vector<double>& ages) {
    const std::size_t n = family.components();
    if (ages.size() != n) throw usage_error("type_intensity: age vector length mismatch");
    std::vector<double> nu(n);
    switch (family.kind) {
        case IntensityFamily::Kind::Decomposed:
            for (std::size_t j = 0; j < n; ++j) {
                nu[j] = family.marginals[j].hazard(ages[j]);
                if (family.interaction) nu[j] += family.interaction(j, ages);
            }
            break;
        case IntensityFamily::Kind::IndependentSurvival:
            for (std::size_t j = 0; j < n; ++j) nu[j] = family.marginals[j].hazard(ages[j]);
            break;
        case IntensityFamily::Kind::GumbelBivariate:
            nu[0] = 1 + family.theta * ages[1];
            nu[1] = 1 + family.theta * ages[0];
            break;
        case IntensityFamily::Kind::UserSurvival: {
            const double r = family.survival(ages);
            if (!(r > 0)) throw numeric_error("survival family: R must be positive");
            for (std::size_t j = 0; j < n; ++j) {
                const double step = 1e-6 * (1 + std::fabs(ages[j]));
                std::vector<double> up = ages, dn = ages;
                double dr;
                if (ages[j] >= step) {
                    up[j] += step;
                    dn[j] -= step;
                    dr = (family.survival(up) - family.survival(dn)) / (2 * step);
                } else {
                    // age too close to 0 for a central difference; second-order
                    // one-sided stencil keeps the same accuracy
                    up[j] = ages[j] + step;
                    dn[j] = ages[j] + 2 * step;
                    dr = (-3 * r + 4 * family.survival(up) - family.survival(dn)) /
                         (2 * step);
                }
                nu[j] = -dr / r;
            }
            break;
        }
    }
    for (double v : nu) {
        if (v < 0) throw numeric_error("type intensity evaluated negative");
    }
    return nu;
}

std::vector<double> type_specific_hazard(const IntensityFamily& family, double t) {
    return type_intensity(family, std::vector<double>(family.components(), t));
}

double type_integral(const IntensityFamily& family, std::size_t j,
                     const std::vector<double>& ages, double x) {
    if (x <= 0) return 0;
    switch (family.kind) {
        case IntensityFamily::Kind::Decomposed: {
            double v = family.marginals[j].cumulative_hazard(ages[j] + x) -
                       family.marginals[j].cumulative_hazard(ages[j]);
            if (family.interaction) {
                v += stats::integrate(
                    [&](double u) {
                        std::vector<double> a = ages;
                        for (double& e : a) e += u;
                        return family.interaction(j, a);
                    },
                    0, x, 1e-10);
            }
            return v;
        }
        case IntensityFamily::Kind::IndependentSurvival:
            return family.marginals[j].cumulative_hazard(ages[j] + x) -
                   family.marginals[j].cumulative_hazard(ages[j]);
        case IntensityFamily::Kind::GumbelBivariate: {
            const double other = ages[1 - j];
            return (1 + family.theta * other) * x + 0.5 * family.theta * x * x;
        }
        case IntensityFamily::Kind::UserSurvival:
            return stats::integrate(
                [&](double u) {
                    std::vector<double> a = ages;
                    for (double& e : a) e += u;
                    return type_intensity(family, a)[j];
                },
                0, x, 1e-10);
    }
    return 0;
}

double total_integral(const IntensityFamily& family, const std::vector<double>& ages,
                      double x) {
    if (x <= 0) return 0;
    if (family.kind == IntensityFamily::Kind::UserSurvival) {
        // sum_j nu_j along the diagonal is the derivative of -log R
        std::vector<double> shifted = ages;
        for (double& e : shifted) e += x;
        const double r0 = family.survival(ages), r1 = family.survival(shifted);
        if (!(r0 > 0) || !(r1 > 0)) {
            throw numeric_error("survival family: R must be positive");
        }
        return std::log(r0) - std::log(r1);
    }
    double total = 0;
    for (std::size_t j = 0; j < family.components(); ++j)
        total += type_integral(family, j, ages, x);
    return total;
}

VectorAgeState vector_virtual_age(const MultiVirtualAgePolicy& policy,
                                  const ComponentSet& components, const SystemHistory& h,
                                  double t) {
    components.validate();
    std::vector<double> ages(components.size(), 0.0);
    double t_last = 0;
    for (std::size_t i = 0; i < h.times.size() && h.times[i] < t; ++i) {
        const std::size_t j = components.index_of(h.marks[i]);
        policy.apply_event(ages, j, h.times[i] - t_last);
        t_last = h.times[i];
    }
    VectorAgeState state;
    state.last_event_time = t_last;
    state.ages = std::move(ages);
    for (double& a : state.ages) a += t - t_last;
    return state;
}

SystemHistory simulate_marked(const MultiVirtualAgePolicy& policy,
                              const IntensityFamily& family,
                              const ComponentSet& components, double tau,
                              std::uint64_t seed, std::uint64_t system_index) {
    components.validate();
    if (components.size() != family.components()) {
        throw usage_error("simulate_marked: component labels do not match the family");
    }
    CounterRng rng(seed, system_index);
    SystemHistory h;
    h.system_id = "sim";
    h.censor_time = tau;
    std::vector<double> ages(family.components(), 0.0);
    double t = 0;
    while (true) {
        const double horizon = tau - t;
        if (horizon <= 0) break;
        const double e = -std::log1p(-rng.uniform());
        const double total = total_integral(family, ages, horizon);
        if (total == 0) throw numeric_error("starved process: zero total hazard over the window");
        if (total < e) break;
        // invert the cumulative total hazard along the diagonal path
        double lo = 0, hi = horizon;
        while (hi - lo > 1e-10 * (1 + hi)) {
            const double mid = 0.5 * (lo + hi);
            if (total_integral(family, ages, mid) < e) lo = mid;
            else hi = mid;
        }
        const double x = 0.5 * (lo + hi);
        std::vector<double> at_event = ages;
        for (double& a : at_event) a += x;
        const auto nu = type_intensity(family, at_event);
        double nu_tot = 0;
        for (double v : nu) nu_tot += v;
        if (!(nu_tot > 0)) throw numeric_error("starved process: zero intensity at event");
        const double u = rng.uniform() * nu_tot;
        std::size_t j = 0;
        double acc = 0;
        for (; j + 1 < nu.size(); ++j) {
            acc += nu[j];
            if (u < acc) break;
        }
        t += x;
        h.times.push_back(t);
        h.marks.push_back(components.labels[j]);
        policy.apply_event(ages, j, x);
        if (h.times.size() > 10'000'000) throw numeric_error("explosive configuration");
    }
    return h;
}

namespace {

struct TypeParts {
    std::vector<double> sum_log; // per type
    std::vector<double> integral;
    std::vector<std::size_t> count;
};

TypeParts system_type_parts(const MultiVirtualAgePolicy& policy,
                            const IntensityFamily& family, const ComponentSet& components,
                            const SystemHistory& h) {
    const std::size_t n = family.components();
    TypeParts p{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
                std::vector<std::size_t>(n, 0)};
    std::vector<double> ages(n, 0.0);
    double t_last = 0;
    for (std::size_t i = 0; i < h.times.size(); ++i) {
        const double x = h.times[i] - t_last;
        const std::size_t j = components.index_of(h.marks[i]);
        std::vector<double> at_event = ages;
        for (double& a : at_event) a += x;
        const auto nu = type_intensity(family, at_event);
        if (!(nu[j] > 0)) {
            throw numeric_error("marked likelihood: zero intensity at an observed event");
        }
        p.sum_log[j] += std::log(nu[j]);
        p.count[j] += 1;
        for (std::size_t k = 0; k < n; ++k)
            p.integral[k] += type_integral(family, k, ages, x);
        policy.apply_event(ages, j, x);
        t_last = h.times[i];
    }
    for (std::size_t k = 0; k < n; ++k)
        p.integral[k] += type_integral(family, k, ages, h.censor_time - t_last);
    return p;
}

} // namespace

LogLikReport marked_loglik(const MultiVirtualAgePolicy& policy,
                           const IntensityFamily& family, const ComponentSet& components,
                           const EventDataset& d) {
    components.validate();
    std::vector<double> parts;
    parts.reserve(d.systems.size());
    for (const auto& s : d.systems) {
        const auto p = system_type_parts(policy, family, components, s);
        double ll = 0;
        for (std::size_t j = 0; j < family.components(); ++j)
            ll += p.sum_log[j] - p.integral[j];
        parts.push_back(ll);
    }
    return LogLikReport::from_parts(std::move(parts), "closed-form");
}

LogLikReport marked_loglik_frailty(const MultiVirtualAgePolicy& policy,
                                   const IntensityFamily& family,
                                   const ComponentSet& components, const EventDataset& d,
                                   const std::vector<double>& deltas) {
    components.validate();
    if (deltas.size() != family.components()) {
        throw usage_error("marked frailty likelihood: one variance per component required");
    }
    std::vector<double> parts;
    parts.reserve(d.systems.size());
    for (const auto& s : d.systems) {
        const auto p = system_type_parts(policy, family, components, s);
        double ll = 0;
        for (std::size_t j = 0; j < family.components(); ++j) {
            const double delta = deltas[j];
            if (delta <= 0) {
                ll += p.sum_log[j] - p.integral[j];
                continue;
            }
            // gamma expectation of a^N exp(-a I), per type and system
            const double inv = 1.0 / delta;
            const double nj = static_cast<double>(p.count[j]);
            ll += p.sum_log[j] + std::lgamma(nj + inv) - std::lgamma(inv) -
                  inv * std::log(delta) - (nj + inv) * std::log(inv + p.integral[j]);
        }
        parts.push_back(ll);
    }
    return LogLikReport::from_parts(std::move(parts), "closed-form");
}

// ---- text forms ----------------------------------------------------------

namespace {

std::string trimmed(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_on(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trimmed(s.substr(start, pos - start)));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

double parse_num(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw usage_error(what + ": bad number '" + s + "'");
    }
}

std::vector<double> parse_rho_csv(const std::string& text) {
    std::vector<double> rho;
    for (const auto& piece : split_on(text, ','))
        rho.push_back(parse_num(piece, "repair policy rho"));
    return rho;
}

// "weibull:s=2,scale=1" | "exponential:scale=0.5" | "gamma:g=0.5,scale=1"
ScaledDistribution parse_marginal(const std::string& text) {
    const auto colon = text.find(':');
    const std::string name = trimmed(text.substr(0, colon));
    double s = 1, g = 1, scale = 1;
    bool have_s = false, have_g = false;
    if (colon != std::string::npos) {
        for (const auto& piece : split_on(text.substr(colon + 1), ',')) {
            const auto eq = piece.find('=');
            if (eq == std::string::npos) {
                throw usage_error("marginal hazard: expected key=value, got '" + piece + "'");
            }
            const std::string key = trimmed(piece.substr(0, eq));
            const double val = parse_num(trimmed(piece.substr(eq + 1)), "marginal hazard");
            if (key == "s") { s = val; have_s = true; }
            else if (key == "g") { g = val; have_g = true; }
            else if (key == "scale") scale = val;
            else throw usage_error("marginal hazard: unknown key '" + key + "'");
        }
    }
    RenewalDistribution base = RenewalDistribution::exponential();
    if (name == "exponential") {
        if (have_s || have_g) throw usage_error("marginal hazard: exponential takes only scale");
    } else if (name == "weibull") {
        base = RenewalDistribution::weibull(s);
        if (have_g) throw usage_error("marginal hazard: weibull takes s, not g");
    } else if (name == "gamma") {
        base = RenewalDistribution::gamma(g);
        if (have_s) throw usage_error("marginal hazard: gamma takes g, not s");
    } else {
        throw usage_error("marginal hazard: unknown family '" + name + "'");
    }
    if (!(scale > 0)) throw usage_error("marginal hazard: scale must be positive");
    return ScaledDistribution(base, scale);
}

} // namespace

ComponentSet parse_component_labels(const std::string& csv) {
    ComponentSet set;
    set.labels = split_on(csv, ',');
    for (const auto& l : set.labels)
        if (l.empty()) throw usage_error("component labels: empty label in '" + csv + "'");
    set.validate();
    return set;
}

MultiVirtualAgePolicy parse_multi_policy(const std::string& text) {
    const auto colon = text.find(':');
    const std::string name = trimmed(text.substr(0, colon));
    std::string arg = colon == std::string::npos ? "" : trimmed(text.substr(colon + 1));
    const bool wants_rho =
        name == "agered-full" || name == "agered-incr" || name == "equal-age";
    if (wants_rho) {
        if (arg.rfind("rho=", 0) != 0) {
            throw usage_error("repair policy '" + name + "' needs rho=..., got '" + text + "'");
        }
        const auto rho = parse_rho_csv(arg.substr(4));
        if (name == "agered-full") return MultiVirtualAgePolicy::age_reduction_full(rho);
        if (name == "agered-incr") return MultiVirtualAgePolicy::age_reduction_increment(rho);
        return MultiVirtualAgePolicy::equal_age_two_type(rho);
    }
    if (!arg.empty()) throw usage_error("repair policy '" + name + "' takes no arguments");
    if (name == "perfect-all") return MultiVirtualAgePolicy::perfect_all();
    if (name == "minimal-all") return MultiVirtualAgePolicy::minimal_all();
    if (name == "partial-repair") return MultiVirtualAgePolicy::partial_repair();
    throw usage_error("unknown repair policy '" + name + "'");
}

IntensityFamily parse_intensity_family(const std::string& text) {
    std::string family_name;
    std::string marginals_text;
    double theta = 0;
    bool have_theta = false;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find_first_of(" \t", start);
        const std::string token = text.substr(start, end - start);
        start = end == std::string::npos ? text.size() : end + 1;
        if (token.empty()) continue;
        const auto eq = token.find('=');
        if (eq == std::string::npos) {
            throw usage_error("intensity family: expected key=value, got '" + token + "'");
        }
        const std::string key = token.substr(0, eq);
        const std::string val = token.substr(eq + 1);
        if (key == "family") family_name = val;
        else if (key == "marginals") marginals_text = val;
        else if (key == "theta") { theta = parse_num(val, "intensity family theta"); have_theta = true; }
        else throw usage_error("intensity family: unknown key '" + key + "'");
    }
    if (family_name.empty()) throw usage_error("intensity family: family=... required");
    if (family_name == "gumbel") {
        if (!marginals_text.empty()) {
            throw usage_error("intensity family: gumbel has fixed unit-exponential marginals");
        }
        if (!have_theta) throw usage_error("intensity family: gumbel needs theta=...");
        return IntensityFamily::gumbel(theta);
    }
    if (have_theta) throw usage_error("intensity family: theta only applies to gumbel");
    if (marginals_text.empty()) {
        throw usage_error("intensity family: marginals=... required for '" + family_name + "'");
    }
    std::vector<ScaledDistribution> marginals;
    for (const auto& piece : split_on(marginals_text, ';'))
        marginals.push_back(parse_marginal(piece));
    if (family_name == "independent") return IntensityFamily::independent(std::move(marginals));
    if (family_name == "decomposed") return IntensityFamily::decomposed(std::move(marginals));
    throw usage_error("intensity family: unknown family '" + family_name + "'");
}

} // namespace repsys
