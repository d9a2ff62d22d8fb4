#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "distributions.hpp"
#include "event_data.hpp"

namespace repsys {

enum class TrendFamily { Constant, PowerLaw, LogLinear };

// Trend function lambda(t) with closed-form cumulative Lambda and inverse.
class TrendFunction {
  public:
    static TrendFunction constant(double rate);
    static TrendFunction power_law(double c, double b); // lambda(t) = c b t^{b-1}
    static TrendFunction log_linear(double a0, double a1); // lambda(t) = exp(a0 + a1 t)

    TrendFamily family() const { return family_; }
    double rate() const { return p1_; } // Constant
    double c() const { return p1_; }
    double b() const { return p2_; }
    double a0() const { return p1_; }
    double a1() const { return p2_; }

    double value(double t) const;
    double log_value(double t) const;
    double cumulative(double t) const;          // Lambda(t)
    double inverse_cumulative(double u) const;  // Lambda^{-1}(u)

  private:
    TrendFunction(TrendFamily f, double p1, double p2) : family_(f), p1_(p1), p2_(p2) {}
    TrendFamily family_;
    double p1_, p2_;
};

// Distribution on [0,1] for the repair-effect draws D_i.
struct RepairEffectLaw {
    enum class Kind { PointMass, BernoulliComplement, Uniform, Beta } kind;
    double a = 0, b = 0; // PointMass: value; BernoulliComplement: p; Beta: (a,b)

    static RepairEffectLaw point_mass(double value);
    static RepairEffectLaw bernoulli_complement(double p); // D = 0 w.p. p, 1 w.p. 1-p
    static RepairEffectLaw uniform();
    static RepairEffectLaw beta(double a, double b);

    double quantile(double u) const;
};

enum class VirtualAgeKind {
    Perfect,
    Minimal,
    BrownProschan,
    KijimaI,
    KijimaII,
    AgeReductionFull,
    AgeReductionIncrement,
};

struct VirtualAgePolicy {
    VirtualAgeKind kind = VirtualAgeKind::Perfect;
    std::optional<RepairEffectLaw> d_law; // Kijima I/II, BrownProschan
    double rho = 0;                       // age-reduction factor

    static VirtualAgePolicy perfect();
    static VirtualAgePolicy minimal();
    static VirtualAgePolicy brown_proschan(double p);
    static VirtualAgePolicy kijima1(RepairEffectLaw law);
    static VirtualAgePolicy kijima2(RepairEffectLaw law);
    static VirtualAgePolicy age_reduction_full(double rho);
    static VirtualAgePolicy age_reduction_increment(double rho);

    bool needs_effects() const {
        return kind == VirtualAgeKind::BrownProschan || kind == VirtualAgeKind::KijimaI ||
               kind == VirtualAgeKind::KijimaII;
    }
    // Effective D multiplier for deterministic policies (used by the recursions).
    // post-event ages v(0..n) given interevent times and observed/simulated D draws
    std::vector<double> post_event_ages(const std::vector<double>& interevent,
                                        const std::vector<double>& d_draws) const;
};

// Virtual age A(t) = v(N(t-)) + t - T_{N(t-)}.
double virtual_age(const VirtualAgePolicy& policy, const SystemHistory& h, double t);

// Model-cube coordinate: TRP(F, lambda) with optional gamma frailty on the trend.
struct CubeSpec {
    RenewalDistribution renewal = RenewalDistribution::exponential();
    TrendFunction trend = TrendFunction::constant(1.0);
    double frailty_variance = 0;
};

struct VirtualAgeSpec {
    ScaledDistribution hazard_dist;
    VirtualAgePolicy policy;
    double frailty_variance = 0;
};

enum class Link { Identity, Log };

// gamma(t) = exp(b0 + b1 g1(t) + b2 g2(t - T_last))
struct ModulatedSpec {
    double b0 = 0, b1 = 0, b2 = 0;
    Link g1 = Link::Identity;
    Link g2 = Link::Identity;
    double frailty_variance = 0;
};

struct ModelSpec {
    std::variant<CubeSpec, VirtualAgeSpec, ModulatedSpec> model;
    std::vector<double> covariate_coefficients; // beta; multiplier exp(beta'Z)

    double frailty_variance() const;
    ModelSpec with_frailty(double v) const;
};

double link_value(Link g, double t);

// Conditional intensity gamma(t) given the history strictly before t.
// Covariate multiplier exp(beta'Z) applied when h carries covariates.
double conditional_intensity(const ModelSpec& spec, const SystemHistory& h, double t);

double covariate_log_multiplier(const ModelSpec& spec, const SystemHistory& h);

// Compact text form: "model=... renewal=... trend=... frailty=... policy=..."
ModelSpec parse_model_spec(const std::string& text);
std::string format_model_spec(const ModelSpec& spec);

} // namespace repsys
