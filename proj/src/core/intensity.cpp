#include "intensity.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <gsl/gsl_cdf.h>

#include "common.hpp"

namespace repsys {

TrendFunction TrendFunction::constant(double rate) {
    if (!(rate > 0)) throw usage_error("invalid parameter: constant trend rate <= 0");
    return TrendFunction(TrendFamily::Constant, rate, 0);
}

TrendFunction TrendFunction::power_law(double c, double b) {
    if (!(c > 0) || !(b > 0)) throw usage_error("invalid parameter: power law needs c > 0, b > 0");
    return TrendFunction(TrendFamily::PowerLaw, c, b);
}

TrendFunction TrendFunction::log_linear(double a0, double a1) {
    return TrendFunction(TrendFamily::LogLinear, a0, a1);
}

double TrendFunction::value(double t) const {
    switch (family_) {
        case TrendFamily::Constant: return p1_;
        case TrendFamily::PowerLaw: return p1_ * p2_ * std::pow(t, p2_ - 1);
        case TrendFamily::LogLinear: return std::exp(p1_ + p2_ * t);
    }
    return 0;
}

double TrendFunction::log_value(double t) const {
    switch (family_) {
        case TrendFamily::Constant: return std::log(p1_);
        case TrendFamily::PowerLaw:
            return std::log(p1_ * p2_) + (p2_ - 1) * std::log(t);
        case TrendFamily::LogLinear: return p1_ + p2_ * t;
    }
    return 0;
}

double TrendFunction::cumulative(double t) const {
    if (t <= 0) return 0;
    switch (family_) {
        case TrendFamily::Constant: return p1_ * t;
        case TrendFamily::PowerLaw: return p1_ * std::pow(t, p2_);
        case TrendFamily::LogLinear:
            if (p2_ == 0) return std::exp(p1_) * t;
            return std::exp(p1_) * std::expm1(p2_ * t) / p2_;
    }
    return 0;
}

double TrendFunction::inverse_cumulative(double u) const {
    if (u < 0) throw numeric_error("inverse cumulative trend: negative argument");
    if (u == 0) return 0;
    switch (family_) {
        case TrendFamily::Constant: return u / p1_;
        case TrendFamily::PowerLaw: return std::pow(u / p1_, 1.0 / p2_);
        case TrendFamily::LogLinear: {
            if (p2_ == 0) return u * std::exp(-p1_);
            const double arg = p2_ * u * std::exp(-p1_);
            if (arg <= -1) {
                throw numeric_error("inverse cumulative trend: argument outside range");
            }
            return std::log1p(arg) / p2_;
        }
    }
    return 0;
}

RepairEffectLaw RepairEffectLaw::point_mass(double value) {
    if (value < 0 || value > 1) throw usage_error("repair effect point mass outside [0,1]");
    return {Kind::PointMass, value, 0};
}
RepairEffectLaw RepairEffectLaw::bernoulli_complement(double p) {
    if (p < 0 || p > 1) throw usage_error("Brown-Proschan p outside [0,1]");
    return {Kind::BernoulliComplement, p, 0};
}
RepairEffectLaw RepairEffectLaw::uniform() { return {Kind::Uniform, 0, 0}; }
RepairEffectLaw RepairEffectLaw::beta(double a, double b) {
    if (!(a > 0) || !(b > 0)) throw usage_error("beta repair-effect law needs a, b > 0");
    return {Kind::Beta, a, b};
}

double RepairEffectLaw::quantile(double u) const {
    switch (kind) {
        case Kind::PointMass: return a;
        case Kind::BernoulliComplement: return u < a ? 0.0 : 1.0;
        case Kind::Uniform: return u;
        case Kind::Beta: return gsl_cdf_beta_Pinv(u, a, b);
    }
    return 0;
}

VirtualAgePolicy VirtualAgePolicy::perfect() { return {VirtualAgeKind::Perfect, {}, 0}; }
VirtualAgePolicy VirtualAgePolicy::minimal() { return {VirtualAgeKind::Minimal, {}, 0}; }
VirtualAgePolicy VirtualAgePolicy::brown_proschan(double p) {
    return {VirtualAgeKind::BrownProschan, RepairEffectLaw::bernoulli_complement(p), 0};
}
VirtualAgePolicy VirtualAgePolicy::kijima1(RepairEffectLaw law) {
    return {VirtualAgeKind::KijimaI, law, 0};
}
VirtualAgePolicy VirtualAgePolicy::kijima2(RepairEffectLaw law) {
    return {VirtualAgeKind::KijimaII, law, 0};
}
VirtualAgePolicy VirtualAgePolicy::age_reduction_full(double rho) {
    if (!(rho > 0) || !(rho < 1)) throw usage_error("age reduction needs 0 < rho < 1");
    return {VirtualAgeKind::AgeReductionFull, {}, rho};
}
VirtualAgePolicy VirtualAgePolicy::age_reduction_increment(double rho) {
    if (!(rho > 0) || !(rho < 1)) throw usage_error("age reduction needs 0 < rho < 1");
    return {VirtualAgeKind::AgeReductionIncrement, {}, rho};
}

std::vector<double> VirtualAgePolicy::post_event_ages(
    const std::vector<double>& interevent, const std::vector<double>& d_draws) const {
    const std::size_t n = interevent.size();
    if (needs_effects() && d_draws.size() < n) {
        throw data_error("missing repair-effect draws D_i; this policy requires the "
                         "type of repair to be reported for each event");
    }
    std::vector<double> v(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = interevent[i];
        switch (kind) {
            case VirtualAgeKind::Perfect:
                v[i + 1] = 0;
                break;
            case VirtualAgeKind::Minimal:
                v[i + 1] = v[i] + x;
                break;
            case VirtualAgeKind::KijimaI:
                v[i + 1] = v[i] + d_draws[i] * x;
                break;
            case VirtualAgeKind::BrownProschan: // Kijima II with Bernoulli draws
            case VirtualAgeKind::KijimaII:
                v[i + 1] = d_draws[i] * (v[i] + x);
                break;
            case VirtualAgeKind::AgeReductionFull:
                v[i + 1] = (1 - rho) * (v[i] + x);
                break;
            case VirtualAgeKind::AgeReductionIncrement:
                v[i + 1] = v[i] + (1 - rho) * x;
                break;
        }
    }
    return v;
}

double virtual_age(const VirtualAgePolicy& policy, const SystemHistory& h, double t) {
    const auto x = interevent_times(h);
    const auto v = policy.post_event_ages(x, policy.needs_effects() ? h.repair_effects()
                                                                    : std::vector<double>{});
    // last event strictly before t
    std::size_t idx = 0;
    double t_last = 0;
    for (std::size_t i = 0; i < h.times.size(); ++i) {
        if (h.times[i] < t) {
            idx = i + 1;
            t_last = h.times[i];
        }
    }
    return v[idx] + t - t_last;
}

double ModelSpec::frailty_variance() const {
    return std::visit([](const auto& m) { return m.frailty_variance; }, model);
}

ModelSpec ModelSpec::with_frailty(double v) const {
    ModelSpec out = *this;
    std::visit([v](auto& m) { m.frailty_variance = v; }, out.model);
    return out;
}

double link_value(Link g, double t) {
    if (g == Link::Identity) return t;
    if (t <= 0) throw numeric_error("undefined link at zero");
    return std::log(t);
}

double covariate_log_multiplier(const ModelSpec& spec, const SystemHistory& h) {
    if (spec.covariate_coefficients.empty()) return 0;
    if (h.covariates.size() != spec.covariate_coefficients.size()) {
        throw data_error("system " + h.system_id +
                         ": covariate vector length does not match coefficients");
    }
    double s = 0;
    for (std::size_t i = 0; i < h.covariates.size(); ++i) {
        s += spec.covariate_coefficients[i] * h.covariates[i];
    }
    return s;
}

double conditional_intensity(const ModelSpec& spec, const SystemHistory& h, double t) {
    if (!(t > 0)) throw usage_error("conditional intensity evaluated at t <= 0");
    double t_last = 0;
    for (double ti : h.times) {
        if (ti < t) t_last = ti;
    }
    double gamma = 0;
    if (const auto* cube = std::get_if<CubeSpec>(&spec.model)) {
        if (cube->renewal.is_exponential()) {
            gamma = cube->trend.value(t);
        } else {
            const double du = cube->trend.cumulative(t) - cube->trend.cumulative(t_last);
            gamma = cube->renewal.hazard(du) * cube->trend.value(t);
        }
    } else if (const auto* va = std::get_if<VirtualAgeSpec>(&spec.model)) {
        gamma = va->hazard_dist.hazard(virtual_age(va->policy, h, t));
    } else {
        const auto& m = std::get<ModulatedSpec>(spec.model);
        gamma = std::exp(m.b0 + m.b1 * link_value(m.g1, t) +
                         m.b2 * link_value(m.g2, t - t_last));
    }
    return gamma * std::exp(covariate_log_multiplier(spec, h));
}

namespace {

std::map<std::string, std::string> parse_kv_list(const std::string& s) {
    std::map<std::string, std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos) throw usage_error("expected key=value in '" + item + "'");
        out[item.substr(0, eq)] = item.substr(eq + 1);
    }
    return out;
}

double get_num(const std::map<std::string, std::string>& kv, const std::string& key,
               const char* ctx) {
    auto it = kv.find(key);
    if (it == kv.end()) {
        throw usage_error(std::string(ctx) + ": missing parameter '" + key + "'");
    }
    return std::stod(it->second);
}

double get_num_or(const std::map<std::string, std::string>& kv, const std::string& key,
                  double dflt) {
    auto it = kv.find(key);
    return it == kv.end() ? dflt : std::stod(it->second);
}

// "family" or "family:key=value,key=value"
std::pair<std::string, std::map<std::string, std::string>> parse_family(
    const std::string& s) {
    auto colon = s.find(':');
    if (colon == std::string::npos) return {s, {}};
    return {s.substr(0, colon), parse_kv_list(s.substr(colon + 1))};
}

RenewalDistribution parse_renewal(const std::string& s) {
    auto [fam, kv] = parse_family(s);
    if (fam == "exponential" || fam == "exp") return RenewalDistribution::exponential();
    if (fam == "weibull") return RenewalDistribution::weibull(get_num(kv, "s", "renewal"));
    if (fam == "gamma") return RenewalDistribution::gamma(get_num(kv, "g", "renewal"));
    throw usage_error("unknown renewal family '" + fam + "'");
}

TrendFunction parse_trend(const std::string& s) {
    auto [fam, kv] = parse_family(s);
    if (fam == "constant") return TrendFunction::constant(get_num(kv, "rate", "trend"));
    if (fam == "power") {
        return TrendFunction::power_law(get_num(kv, "c", "trend"), get_num(kv, "b", "trend"));
    }
    if (fam == "loglinear") {
        return TrendFunction::log_linear(get_num(kv, "a0", "trend"),
                                         get_num(kv, "a1", "trend"));
    }
    throw usage_error("unknown trend family '" + fam + "'");
}

RepairEffectLaw parse_dlaw(const std::map<std::string, std::string>& kv) {
    auto it = kv.find("dlaw");
    if (it == kv.end()) throw usage_error("policy: missing repair-effect law 'dlaw'");
    const std::string& name = it->second;
    if (name == "point") return RepairEffectLaw::point_mass(get_num(kv, "dv", "dlaw"));
    if (name == "uniform") return RepairEffectLaw::uniform();
    if (name == "beta") {
        return RepairEffectLaw::beta(get_num(kv, "da", "dlaw"), get_num(kv, "db", "dlaw"));
    }
    if (name == "bernoulli") {
        return RepairEffectLaw::bernoulli_complement(get_num(kv, "p", "dlaw"));
    }
    throw usage_error("unknown repair-effect law '" + name + "'");
}

VirtualAgePolicy parse_policy(const std::string& s) {
    auto [fam, kv] = parse_family(s);
    if (fam == "perfect") return VirtualAgePolicy::perfect();
    if (fam == "minimal") return VirtualAgePolicy::minimal();
    if (fam == "bp") return VirtualAgePolicy::brown_proschan(get_num(kv, "p", "policy"));
    if (fam == "kijima1") return VirtualAgePolicy::kijima1(parse_dlaw(kv));
    if (fam == "kijima2") return VirtualAgePolicy::kijima2(parse_dlaw(kv));
    if (fam == "agered-full") {
        return VirtualAgePolicy::age_reduction_full(get_num(kv, "rho", "policy"));
    }
    if (fam == "agered-incr") {
        return VirtualAgePolicy::age_reduction_increment(get_num(kv, "rho", "policy"));
    }
    throw usage_error("unknown virtual-age policy '" + fam + "'");
}

Link parse_link(const std::string& s) {
    if (s == "identity") return Link::Identity;
    if (s == "log") return Link::Log;
    throw usage_error("unknown link '" + s + "' (use identity or log)");
}

} // namespace

ModelSpec parse_model_spec(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::stringstream ss(text);
    std::string tok;
    while (ss >> tok) {
        auto eq = tok.find('=');
        if (eq == std::string::npos) {
            throw usage_error("model spec: expected key=value, got '" + tok + "'");
        }
        kv[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    std::string model = kv.count("model") ? kv["model"] : "";
    double frailty_var = 0;
    if (kv.count("frailty")) {
        auto [fam, fkv] = parse_family(kv["frailty"]);
        if (fam == "gamma") {
            frailty_var = get_num(fkv, "v", "frailty");
            if (!(frailty_var >= 0)) throw usage_error("frailty variance must be >= 0");
        } else if (fam != "none") {
            throw usage_error("unknown frailty family '" + fam + "'");
        }
    }

    ModelSpec spec;
    if (model == "virtual-age") {
        if (!kv.count("hazard")) throw usage_error("virtual-age model: missing 'hazard='");
        auto [fam, hkv] = parse_family(kv["hazard"]);
        double scale = get_num_or(hkv, "scale", 1.0);
        RenewalDistribution base = RenewalDistribution::exponential();
        if (fam == "weibull") base = RenewalDistribution::weibull(get_num(hkv, "s", "hazard"));
        else if (fam == "gamma") base = RenewalDistribution::gamma(get_num(hkv, "g", "hazard"));
        else if (fam != "exponential" && fam != "exp") {
            throw usage_error("unknown hazard family '" + fam + "'");
        }
        if (!kv.count("policy")) throw usage_error("virtual-age model: missing 'policy='");
        spec.model = VirtualAgeSpec{ScaledDistribution(base, scale), parse_policy(kv["policy"]),
                                    frailty_var};
    } else if (model == "modulated") {
        ModulatedSpec m;
        m.b0 = kv.count("b0") ? std::stod(kv["b0"]) : 0.0;
        m.b1 = kv.count("b1") ? std::stod(kv["b1"]) : 0.0;
        m.b2 = kv.count("b2") ? std::stod(kv["b2"]) : 0.0;
        m.g1 = kv.count("g1") ? parse_link(kv["g1"]) : Link::Identity;
        m.g2 = kv.count("g2") ? parse_link(kv["g2"]) : Link::Identity;
        m.frailty_variance = frailty_var;
        spec.model = m;
    } else {
        if (model != "hpp" && model != "rp" && model != "nhpp" && model != "trp") {
            throw usage_error("unknown model kind '" + model +
                              "' (hpp|rp|nhpp|trp|virtual-age|modulated)");
        }
        CubeSpec cube;
        if (model == "hpp") {
            cube.renewal = RenewalDistribution::exponential();
            cube.trend = kv.count("trend") ? parse_trend(kv["trend"])
                                           : TrendFunction::constant(1.0);
            if (cube.trend.family() != TrendFamily::Constant) {
                throw usage_error("hpp model requires a constant trend");
            }
        } else {
            if (kv.count("renewal")) cube.renewal = parse_renewal(kv["renewal"]);
            if (kv.count("trend")) cube.trend = parse_trend(kv["trend"]);
            if (model == "rp" && cube.trend.family() != TrendFamily::Constant) {
                throw usage_error("rp model requires a constant trend");
            }
            if (model == "nhpp" && !cube.renewal.is_exponential()) {
                throw usage_error("nhpp model requires an exponential renewal distribution");
            }
        }
        cube.frailty_variance = frailty_var;
        spec.model = cube;
    }

    if (kv.count("beta")) {
        std::stringstream bs(kv["beta"]);
        std::string b;
        while (std::getline(bs, b, ',')) spec.covariate_coefficients.push_back(std::stod(b));
    }
    return spec;
}

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

std::string format_renewal(const RenewalDistribution& r) {
    switch (r.family()) {
        case RenewalFamily::Exponential: return "exponential";
        case RenewalFamily::Weibull: return "weibull:s=" + fmt(r.shape());
        case RenewalFamily::Gamma: return "gamma:g=" + fmt(r.variance_param());
    }
    return "";
}

std::string format_trend(const TrendFunction& t) {
    switch (t.family()) {
        case TrendFamily::Constant: return "constant:rate=" + fmt(t.rate());
        case TrendFamily::PowerLaw: return "power:c=" + fmt(t.c()) + ",b=" + fmt(t.b());
        case TrendFamily::LogLinear:
            return "loglinear:a0=" + fmt(t.a0()) + ",a1=" + fmt(t.a1());
    }
    return "";
}

std::string format_dlaw(const RepairEffectLaw& law) {
    switch (law.kind) {
        case RepairEffectLaw::Kind::PointMass: return "dlaw=point,dv=" + fmt(law.a);
        case RepairEffectLaw::Kind::BernoulliComplement:
            return "dlaw=bernoulli,p=" + fmt(law.a);
        case RepairEffectLaw::Kind::Uniform: return "dlaw=uniform";
        case RepairEffectLaw::Kind::Beta:
            return "dlaw=beta,da=" + fmt(law.a) + ",db=" + fmt(law.b);
    }
    return "";
}

std::string format_policy(const VirtualAgePolicy& p) {
    switch (p.kind) {
        case VirtualAgeKind::Perfect: return "perfect";
        case VirtualAgeKind::Minimal: return "minimal";
        case VirtualAgeKind::BrownProschan: return "bp:p=" + fmt(p.d_law->a);
        case VirtualAgeKind::KijimaI: return "kijima1:" + format_dlaw(*p.d_law);
        case VirtualAgeKind::KijimaII: return "kijima2:" + format_dlaw(*p.d_law);
        case VirtualAgeKind::AgeReductionFull: return "agered-full:rho=" + fmt(p.rho);
        case VirtualAgeKind::AgeReductionIncrement: return "agered-incr:rho=" + fmt(p.rho);
    }
    return "";
}

} // namespace

std::string format_model_spec(const ModelSpec& spec) {
    std::string out;
    if (const auto* cube = std::get_if<CubeSpec>(&spec.model)) {
        const bool exp = cube->renewal.is_exponential();
        const bool constant = cube->trend.family() == TrendFamily::Constant;
        out = "model=";
        out += exp ? (constant ? "hpp" : "nhpp") : (constant ? "rp" : "trp");
        out += " renewal=" + format_renewal(cube->renewal);
        out += " trend=" + format_trend(cube->trend);
        if (cube->frailty_variance > 0) {
            out += " frailty=gamma:v=" + fmt(cube->frailty_variance);
        }
    } else if (const auto* va = std::get_if<VirtualAgeSpec>(&spec.model)) {
        out = "model=virtual-age hazard=" + format_renewal(va->hazard_dist.base());
        const char* sep =
            va->hazard_dist.base().family() == RenewalFamily::Exponential ? ":" : ",";
        out += sep + std::string("scale=") + fmt(va->hazard_dist.scale());
        out += " policy=" + format_policy(va->policy);
        if (va->frailty_variance > 0) out += " frailty=gamma:v=" + fmt(va->frailty_variance);
    } else {
        const auto& m = std::get<ModulatedSpec>(spec.model);
        out = "model=modulated b0=" + fmt(m.b0) + " b1=" + fmt(m.b1) + " b2=" + fmt(m.b2);
        out += std::string(" g1=") + (m.g1 == Link::Log ? "log" : "identity");
        out += std::string(" g2=") + (m.g2 == Link::Log ? "log" : "identity");
        if (m.frailty_variance > 0) out += " frailty=gamma:v=" + fmt(m.frailty_variance);
    }
    if (!spec.covariate_coefficients.empty()) {
        out += " beta=";
        for (std::size_t i = 0; i < spec.covariate_coefficients.size(); ++i) {
            if (i) out += ",";
            out += fmt(spec.covariate_coefficients[i]);
        }
    }
    return out;
}

} // namespace repsys
