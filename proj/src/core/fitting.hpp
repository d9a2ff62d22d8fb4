#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "event_data.hpp"
#include "intensity.hpp"

namespace repsys {

struct FitOptions {
    double tol = 1e-8;      // simplex log-likelihood spread
    int max_iter = 2000;
    int restarts = 3;       // deterministic perturbed re-inits, best kept
};

struct FitResult {
    ModelSpec spec;                                      // at the optimum
    std::vector<std::pair<std::string, double>> estimates;
    double loglik = 0;
    bool converged = false;
    int iterations = 0;
    std::vector<std::string> boundary_flags;             // e.g. "v=0"

    std::optional<double> estimate(const std::string& name) const;
};

enum class ParamTransform { Identity, Log, Logit };

// Free parameters of a model family: unconstrained coordinates map to a spec.
struct FitProblem {
    std::vector<std::string> names;
    std::vector<double> init;                 // natural scale
    std::vector<ParamTransform> transforms;   // Log for positive, Logit for (0,1)
    std::function<ModelSpec(const std::vector<double>&)> build;
};

// Problem whose family and initial values are taken from a template spec.
FitProblem problem_from_spec(const ModelSpec& templ);

FitResult fit(const FitProblem& problem, const EventDataset& d,
              const FitOptions& opts = {});
FitResult fit(const ModelSpec& templ, const EventDataset& d,
              const FitOptions& opts = {});

enum class CubeCorner { HPP, RP, NHPP, TRP, HHPP, HRP, HNHPP, HTRP };

constexpr std::array<CubeCorner, 8> kCubeCorners = {
    CubeCorner::HPP,  CubeCorner::RP,  CubeCorner::NHPP,  CubeCorner::TRP,
    CubeCorner::HHPP, CubeCorner::HRP, CubeCorner::HNHPP, CubeCorner::HTRP};

const char* corner_name(CubeCorner c);
bool corner_has_renewal(CubeCorner c);   // non-exponential F
bool corner_has_trend(CubeCorner c);     // non-constant lambda
bool corner_has_frailty(CubeCorner c);

struct LrTestResult {
    double statistic = 0;  // max(0, 2 (l_rich - l_poor))
    int df = 0;
    double p_naive = 1;    // chi-squared_df upper tail
    double p_boundary = 1; // equal mixture of chi2_0 and chi2_{df}
};

LrTestResult lr_test(const FitResult& poorer, const FitResult& richer);

// poorer -> richer pairs; 12 edges of the model cube
std::vector<std::pair<CubeCorner, CubeCorner>> cube_edges();

struct CubeReport {
    std::array<FitResult, 8> corners;   // indexed by static_cast<int>(CubeCorner)
    std::vector<std::tuple<CubeCorner, CubeCorner, LrTestResult>> edges;

    const FitResult& at(CubeCorner c) const { return corners[static_cast<int>(c)]; }
};

// Eight-corner sweep (Weibull renewal, power-law trend, gamma frailty) with
// poorer-to-richer warm starts and monotonicity repair along every edge.
CubeReport fit_cube(const EventDataset& d, const FitOptions& opts = {});

// Fixed-layout drawing: trend to the right, non-Poisson up, heterogeneity back.
std::string render_cube(const CubeReport& report);

} // namespace repsys
