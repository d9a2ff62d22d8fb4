#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "distributions.hpp"
#include "event_data.hpp"
#include "likelihood.hpp"

namespace repsys {

struct ComponentSet {
    std::vector<std::string> labels; // unique; dataset marks must be a subset

    std::size_t size() const { return labels.size(); }
    std::size_t index_of(const std::string& mark) const; // throws on unknown mark
    void validate() const;
};

struct VectorAgeState {
    std::vector<double> ages;   // A_1..A_n, unit slope between events
    double last_event_time = 0;
};

// Repair rule acting on the whole age vector when a type-j event occurs.
struct MultiVirtualAgePolicy {
    enum class Kind {
        PerfectAll,            // every age reset to 0
        MinimalAll,            // no repair effect, A_j(t) = t
        PartialRepair,         // only the failing component's age resets
        AgeReductionFull,      // failing component's age scaled by 1 - rho_j
        AgeReductionIncrement, // all ages advance by (1 - rho_j) x instead of x
        EqualAgeTwoType,       // one shared age, scaled by 1 - rho_j at events
    };
    Kind kind = Kind::PerfectAll;
    std::vector<double> rho;   // per component, reduction kinds only; 0 < rho_j < 1

    static MultiVirtualAgePolicy perfect_all();
    static MultiVirtualAgePolicy minimal_all();
    static MultiVirtualAgePolicy partial_repair();
    static MultiVirtualAgePolicy age_reduction_full(std::vector<double> rho);
    static MultiVirtualAgePolicy age_reduction_increment(std::vector<double> rho);
    static MultiVirtualAgePolicy equal_age_two_type(std::vector<double> rho);

    // post-event ages from pre-event ages, interevent time x, failing type j
    void apply_event(std::vector<double>& ages, std::size_t j, double x) const;
};

// Type-specific intensities nu_j as functions of the age vector.
struct IntensityFamily {
    enum class Kind {
        Decomposed,           // nu_j = z_j(v_j) + interaction_j(v)
        IndependentSurvival,  // joint survival R = prod R_j, so nu_j = z_j(v_j)
        GumbelBivariate,      // R = exp(-v1 - v2 - theta v1 v2)
        UserSurvival,         // nu_j = -d_j R / R by central finite differences
    };
    Kind kind = Kind::IndependentSurvival;
    std::vector<ScaledDistribution> marginals;
    // optional extra terms for Decomposed; must vanish when all other ages are 0
    std::function<double(std::size_t, const std::vector<double>&)> interaction;
    double theta = 0;
    std::function<double(const std::vector<double>&)> survival;
    std::size_t user_components = 0; // UserSurvival only

    static IntensityFamily independent(std::vector<ScaledDistribution> marginals);
    static IntensityFamily decomposed(
        std::vector<ScaledDistribution> marginals,
        std::function<double(std::size_t, const std::vector<double>&)> interaction = {});
    static IntensityFamily gumbel(double theta);
    static IntensityFamily user_survival(std::function<double(const std::vector<double>&)> R,
                                         std::size_t components);

    std::size_t components() const;
};

// nu_1..nu_n at an age vector; throws on a negative evaluated intensity.
std::vector<double> type_intensity(const IntensityFamily& family,
                                   const std::vector<double>& ages);

// diagonal values nu_j(t, ..., t) = h_j(t)
std::vector<double> type_specific_hazard(const IntensityFamily& family, double t);

// int_0^x nu_j(ages + u 1) du along the diagonal path from `ages`
double type_integral(const IntensityFamily& family, std::size_t j,
                     const std::vector<double>& ages, double x);
double total_integral(const IntensityFamily& family, const std::vector<double>& ages,
                      double x);

// Age vector at time t (left limit convention) from a marked history.
VectorAgeState vector_virtual_age(const MultiVirtualAgePolicy& policy,
                                  const ComponentSet& components,
                                  const SystemHistory& h, double t);

SystemHistory simulate_marked(const MultiVirtualAgePolicy& policy,
                              const IntensityFamily& family,
                              const ComponentSet& components, double tau,
                              std::uint64_t seed, std::uint64_t system_index = 0);

LogLikReport marked_loglik(const MultiVirtualAgePolicy& policy,
                           const IntensityFamily& family, const ComponentSet& components,
                           const EventDataset& d);

// Independent mean-1 gamma frailty a_j per type and system, multiplying nu_j;
// deltas has one variance per component (0 entries mean no frailty for that type).
LogLikReport marked_loglik_frailty(const MultiVirtualAgePolicy& policy,
                                   const IntensityFamily& family,
                                   const ComponentSet& components, const EventDataset& d,
                                   const std::vector<double>& deltas);

// Text forms used by the C API and command line:
//   labels: "1,2" (comma separated, unique)
//   policy: "perfect-all" | "minimal-all" | "partial-repair" |
//           "agered-full:rho=0.3,0.5" | "agered-incr:rho=..." | "equal-age:rho=..."
//   family: "family=independent marginals=weibull:s=2,scale=1;exponential:scale=2"
//           or "family=gumbel theta=0.5"
ComponentSet parse_component_labels(const std::string& csv);
MultiVirtualAgePolicy parse_multi_policy(const std::string& text);
IntensityFamily parse_intensity_family(const std::string& text);

} // namespace repsys
