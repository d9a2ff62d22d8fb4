#include "fitting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>

#include "common.hpp"
#include "likelihood.hpp"
#include "stats.hpp"

namespace repsys {

std::optional<double> FitResult::estimate(const std::string& name) const {
    for (const auto& [k, v] : estimates)
        if (k == name) return v;
    return std::nullopt;
}

namespace {

double to_unconstrained(ParamTransform tr, double x) {
    switch (tr) {
        case ParamTransform::Identity: return x;
        case ParamTransform::Log: return std::log(x);
        case ParamTransform::Logit: return std::log(x / (1 - x));
    }
    return x;
}

double to_natural(ParamTransform tr, double y) {
    switch (tr) {
        case ParamTransform::Identity: return y;
        case ParamTransform::Log: return std::exp(y);
        case ParamTransform::Logit: return 1.0 / (1.0 + std::exp(-y));
    }
    return y;
}

constexpr double kBadObjective = 1e100;

struct SimplexOutcome {
    std::vector<double> x;
    double f = kBadObjective;
    bool converged = false;
    int iterations = 0;
};

// Nelder-Mead on an unconstrained coordinate vector. Stops when the spread of
// objective values over the simplex falls below tol.
SimplexOutcome nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                           const std::vector<double>& x0, double step, double tol,
                           int max_iter) {
    const std::size_t dim = x0.size();
    std::vector<std::vector<double>> pts(dim + 1, x0);
    for (std::size_t i = 0; i < dim; ++i) pts[i + 1][i] += step;
    std::vector<double> fv(dim + 1);
    for (std::size_t i = 0; i <= dim; ++i) fv[i] = f(pts[i]);

    SimplexOutcome out;
    int iter = 0;
    std::vector<std::size_t> order(dim + 1);
    while (iter < max_iter) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        const std::size_t best = order[0], worst = order[dim];
        const std::size_t second_worst = order[dim - 1];
        if (fv[worst] - fv[best] < tol && fv[worst] < kBadObjective) {
            out.converged = true;
            break;
        }
        ++iter;

        std::vector<double> centroid(dim, 0.0);
        for (std::size_t k = 0; k <= dim; ++k) {
            if (k == worst) continue;
            for (std::size_t i = 0; i < dim; ++i) centroid[i] += pts[k][i];
        }
        for (double& c : centroid) c /= static_cast<double>(dim);

        auto along = [&](double coef) {
            std::vector<double> p(dim);
            for (std::size_t i = 0; i < dim; ++i)
                p[i] = centroid[i] + coef * (centroid[i] - pts[worst][i]);
            return p;
        };

        auto reflect = along(1.0);
        const double fr = f(reflect);
        if (fr < fv[order[0]]) {
            auto expand = along(2.0);
            const double fe = f(expand);
            if (fe < fr) {
                pts[worst] = std::move(expand);
                fv[worst] = fe;
            } else {
                pts[worst] = std::move(reflect);
                fv[worst] = fr;
            }
        } else if (fr < fv[second_worst]) {
            pts[worst] = std::move(reflect);
            fv[worst] = fr;
        } else {
            // outside contraction when the reflection improved on the worst
            // vertex, inside contraction otherwise
            const bool outside = fr < fv[worst];
            auto contract = along(outside ? 0.5 : -0.5);
            const double fc = f(contract);
            if ((outside && fc <= fr) || (!outside && fc < fv[worst])) {
                pts[worst] = std::move(contract);
                fv[worst] = fc;
            } else {
                // shrink toward the best vertex
                for (std::size_t k = 0; k <= dim; ++k) {
                    if (k == best) continue;
                    for (std::size_t i = 0; i < dim; ++i)
                        pts[k][i] = pts[best][i] + 0.5 * (pts[k][i] - pts[best][i]);
                    fv[k] = f(pts[k]);
                }
            }
        }
    }
    const std::size_t arg =
        static_cast<std::size_t>(std::min_element(fv.begin(), fv.end()) - fv.begin());
    out.x = pts[arg];
    out.f = fv[arg];
    out.iterations = iter;
    return out;
}

} // namespace

FitResult fit(const FitProblem& problem, const EventDataset& d, const FitOptions& opts) {
    const std::size_t dim = problem.names.size();
    if (dim == 0) {
        FitResult r;
        r.spec = problem.build({});
        r.loglik = loglik(r.spec, d).total;
        r.converged = true;
        return r;
    }

    auto objective = [&](const std::vector<double>& y) {
        std::vector<double> x(dim);
        for (std::size_t i = 0; i < dim; ++i) x[i] = to_natural(problem.transforms[i], y[i]);
        try {
            const double ll = loglik_for_fit(problem.build(x), d);
            if (!std::isfinite(ll)) return kBadObjective;
            return -ll;
        } catch (const Error&) {
            return kBadObjective;
        }
    };

    std::vector<double> y0(dim);
    for (std::size_t i = 0; i < dim; ++i)
        y0[i] = to_unconstrained(problem.transforms[i], problem.init[i]);

    SimplexOutcome best;
    int total_iter = 0;
    for (int r = 0; r <= opts.restarts; ++r) {
        std::vector<double> start = r == 0 ? y0 : best.x;
        if (r > 0) {
            // deterministic perturbation pattern, different each restart
            for (std::size_t i = 0; i < dim; ++i)
                start[i] += 0.4 * std::sin(static_cast<double>(r * 37 + 13 * i + 1));
        }
        auto out = nelder_mead(objective, start, 0.25, opts.tol, opts.max_iter);
        total_iter += out.iterations;
        if (r == 0 || out.f < best.f) best = std::move(out);
    }

    FitResult res;
    std::vector<double> x(dim);
    for (std::size_t i = 0; i < dim; ++i) x[i] = to_natural(problem.transforms[i], best.x[i]);
    res.spec = problem.build(x);
    for (std::size_t i = 0; i < dim; ++i) res.estimates.emplace_back(problem.names[i], x[i]);
    res.loglik = -best.f;
    res.converged = best.converged && best.f < kBadObjective;
    res.iterations = total_iter;
    if (!std::isfinite(res.loglik)) throw numeric_error("fit: log-likelihood not finite at optimum");
    return res;
}

FitProblem problem_from_spec(const ModelSpec& templ) {
    FitProblem p;
    auto add = [&](const std::string& name, double init, ParamTransform tr) {
        p.names.push_back(name);
        p.init.push_back(init);
        p.transforms.push_back(tr);
    };

    const double v0 = templ.frailty_variance();
    const bool with_frailty = v0 > 0;
    const std::size_t beta_count = templ.covariate_coefficients.size();

    if (const auto* cube = std::get_if<CubeSpec>(&templ.model)) {
        const auto trend_fam = cube->trend.family();
        const auto ren_fam = cube->renewal.family();
        switch (trend_fam) {
            case TrendFamily::Constant:
                add("lambda", cube->trend.rate() > 0 ? cube->trend.rate() : 1.0,
                    ParamTransform::Log);
                break;
            case TrendFamily::PowerLaw:
                add("c", cube->trend.c() > 0 ? cube->trend.c() : 1.0, ParamTransform::Log);
                add("b", cube->trend.b() > 0 ? cube->trend.b() : 1.0, ParamTransform::Log);
                break;
            case TrendFamily::LogLinear:
                add("a0", cube->trend.a0(), ParamTransform::Identity);
                add("a1", cube->trend.a1(), ParamTransform::Identity);
                break;
        }
        if (ren_fam == RenewalFamily::Weibull)
            add("s", cube->renewal.shape(), ParamTransform::Log);
        else if (ren_fam == RenewalFamily::Gamma)
            add("g", cube->renewal.variance_param(), ParamTransform::Log);
        if (with_frailty) add("v", v0, ParamTransform::Log);
        for (std::size_t i = 0; i < beta_count; ++i)
            add("beta" + std::to_string(i + 1), templ.covariate_coefficients[i],
                ParamTransform::Identity);

        p.build = [trend_fam, ren_fam, with_frailty, beta_count](const std::vector<double>& x) {
            std::size_t k = 0;
            CubeSpec c;
            switch (trend_fam) {
                case TrendFamily::Constant:
                    c.trend = TrendFunction::constant(x[k]);
                    k += 1;
                    break;
                case TrendFamily::PowerLaw:
                    c.trend = TrendFunction::power_law(x[k], x[k + 1]);
                    k += 2;
                    break;
                case TrendFamily::LogLinear:
                    c.trend = TrendFunction::log_linear(x[k], x[k + 1]);
                    k += 2;
                    break;
            }
            if (ren_fam == RenewalFamily::Weibull)
                c.renewal = RenewalDistribution::weibull(x[k++]);
            else if (ren_fam == RenewalFamily::Gamma)
                c.renewal = RenewalDistribution::gamma(x[k++]);
            if (with_frailty) c.frailty_variance = std::max(x[k++], 1e-8);
            ModelSpec m{c, {}};
            for (std::size_t i = 0; i < beta_count; ++i)
                m.covariate_coefficients.push_back(x[k++]);
            return m;
        };
        return p;
    }

    if (const auto* va = std::get_if<VirtualAgeSpec>(&templ.model)) {
        const auto ren_fam = va->hazard_dist.base().family();
        if (ren_fam == RenewalFamily::Weibull)
            add("s", va->hazard_dist.base().shape(), ParamTransform::Log);
        else if (ren_fam == RenewalFamily::Gamma)
            add("g", va->hazard_dist.base().variance_param(), ParamTransform::Log);
        add("scale", va->hazard_dist.scale() > 0 ? va->hazard_dist.scale() : 1.0,
            ParamTransform::Log);
        const auto policy = va->policy;
        const bool fit_rho = policy.kind == VirtualAgeKind::AgeReductionFull ||
                             policy.kind == VirtualAgeKind::AgeReductionIncrement;
        if (fit_rho) {
            const double r0 = policy.rho > 0 && policy.rho < 1 ? policy.rho : 0.5;
            add("rho", r0, ParamTransform::Logit);
        }
        if (with_frailty) add("v", v0, ParamTransform::Log);

        p.build = [ren_fam, policy, fit_rho, with_frailty, beta_count,
                   templ](const std::vector<double>& x) {
            std::size_t k = 0;
            RenewalDistribution base = RenewalDistribution::exponential();
            if (ren_fam == RenewalFamily::Weibull)
                base = RenewalDistribution::weibull(x[k++]);
            else if (ren_fam == RenewalFamily::Gamma)
                base = RenewalDistribution::gamma(x[k++]);
            VirtualAgeSpec s{ScaledDistribution(base, x[k++]), policy, 0};
            if (fit_rho) s.policy.rho = x[k++];
            if (with_frailty) s.frailty_variance = std::max(x[k++], 1e-8);
            ModelSpec m{s, {}};
            for (std::size_t i = 0; i < beta_count; ++i)
                m.covariate_coefficients.push_back(x[k++]);
            return m;
        };
        for (std::size_t i = 0; i < beta_count; ++i)
            add("beta" + std::to_string(i + 1), templ.covariate_coefficients[i],
                ParamTransform::Identity);
        return p;
    }

    const auto& mo = std::get<ModulatedSpec>(templ.model);
    add("b0", mo.b0, ParamTransform::Identity);
    add("b1", mo.b1, ParamTransform::Identity);
    add("b2", mo.b2, ParamTransform::Identity);
    if (with_frailty) add("v", v0, ParamTransform::Log);
    for (std::size_t i = 0; i < beta_count; ++i)
        add("beta" + std::to_string(i + 1), templ.covariate_coefficients[i],
            ParamTransform::Identity);
    p.build = [mo, with_frailty, beta_count](const std::vector<double>& x) {
        ModulatedSpec s = mo;
        std::size_t k = 0;
        s.b0 = x[k++];
        s.b1 = x[k++];
        s.b2 = x[k++];
        s.frailty_variance = 0;
        if (with_frailty) s.frailty_variance = std::max(x[k++], 1e-8);
        ModelSpec m{s, {}};
        for (std::size_t i = 0; i < beta_count; ++i)
            m.covariate_coefficients.push_back(x[k++]);
        return m;
    };
    return p;
}

FitResult fit(const ModelSpec& templ, const EventDataset& d, const FitOptions& opts) {
    if (d.total_events() == 0) {
        const auto* cube = std::get_if<CubeSpec>(&templ.model);
        const bool constant_rate = cube && cube->renewal.is_exponential() &&
                                   cube->trend.family() == TrendFamily::Constant &&
                                   cube->frailty_variance == 0;
        if (!constant_rate) {
            throw data_error("no events observed: only the constant-rate model is estimable");
        }
    }
    return fit(problem_from_spec(templ), d, opts);
}

const char* corner_name(CubeCorner c) {
    switch (c) {
        case CubeCorner::HPP: return "HPP";
        case CubeCorner::RP: return "RP";
        case CubeCorner::NHPP: return "NHPP";
        case CubeCorner::TRP: return "TRP";
        case CubeCorner::HHPP: return "HHPP";
        case CubeCorner::HRP: return "HRP";
        case CubeCorner::HNHPP: return "HNHPP";
        case CubeCorner::HTRP: return "HTRP";
    }
    return "?";
}

bool corner_has_renewal(CubeCorner c) {
    return c == CubeCorner::RP || c == CubeCorner::TRP || c == CubeCorner::HRP ||
           c == CubeCorner::HTRP;
}

bool corner_has_trend(CubeCorner c) {
    return c == CubeCorner::NHPP || c == CubeCorner::TRP || c == CubeCorner::HNHPP ||
           c == CubeCorner::HTRP;
}

bool corner_has_frailty(CubeCorner c) {
    return c == CubeCorner::HHPP || c == CubeCorner::HRP || c == CubeCorner::HNHPP ||
           c == CubeCorner::HTRP;
}

std::vector<std::pair<CubeCorner, CubeCorner>> cube_edges() {
    using C = CubeCorner;
    return {
        {C::HPP, C::RP},     {C::HPP, C::NHPP},   {C::HPP, C::HHPP},
        {C::RP, C::TRP},     {C::RP, C::HRP},     {C::NHPP, C::TRP},
        {C::NHPP, C::HNHPP}, {C::TRP, C::HTRP},   {C::HHPP, C::HRP},
        {C::HHPP, C::HNHPP}, {C::HRP, C::HTRP},   {C::HNHPP, C::HTRP},
    };
}

LrTestResult lr_test(const FitResult& poorer, const FitResult& richer) {
    if (richer.estimates.size() < poorer.estimates.size()) {
        throw usage_error("lr_test: richer model has fewer parameters than poorer");
    }
    LrTestResult r;
    r.df = static_cast<int>(richer.estimates.size() - poorer.estimates.size());
    r.statistic = std::max(0.0, 2.0 * (richer.loglik - poorer.loglik));
    if (r.statistic == 0 || r.df == 0) {
        r.p_naive = r.statistic == 0 ? 1.0 : 0.0;
        r.p_boundary = r.p_naive;
        return r;
    }
    r.p_naive = stats::chisq_sf(r.statistic, r.df);
    r.p_boundary = 0.5 * stats::chisq_sf(r.statistic, r.df);
    return r;
}

namespace {

// Unified natural coordinates of a cube corner: c (or lambda), b, s, v.
struct CornerParams {
    double c = 1, b = 1, s = 1, v = 0;
};

CornerParams corner_params(const FitResult& r) {
    CornerParams p;
    if (auto x = r.estimate("lambda")) p.c = *x;
    if (auto x = r.estimate("c")) p.c = *x;
    if (auto x = r.estimate("b")) p.b = *x;
    if (auto x = r.estimate("s")) p.s = *x;
    if (auto x = r.estimate("v")) p.v = *x;
    return p;
}

FitProblem corner_problem(CubeCorner corner, const CornerParams& init) {
    FitProblem p;
    const bool trend = corner_has_trend(corner);
    const bool renewal = corner_has_renewal(corner);
    const bool frailty = corner_has_frailty(corner);

    p.names.push_back(trend ? "c" : "lambda");
    p.init.push_back(init.c > 0 ? init.c : 1.0);
    p.transforms.push_back(ParamTransform::Log);
    if (trend) {
        p.names.push_back("b");
        p.init.push_back(init.b > 0 ? init.b : 1.0);
        p.transforms.push_back(ParamTransform::Log);
    }
    if (renewal) {
        p.names.push_back("s");
        p.init.push_back(init.s > 0 ? init.s : 1.0);
        p.transforms.push_back(ParamTransform::Log);
    }
    if (frailty) {
        p.names.push_back("v");
        p.init.push_back(init.v > 0 ? init.v : 0.1);
        p.transforms.push_back(ParamTransform::Log);
    }
    p.build = [trend, renewal, frailty](const std::vector<double>& x) {
        std::size_t k = 0;
        CubeSpec c;
        const double scale = x[k++];
        c.trend = trend ? TrendFunction::power_law(scale, x[k++])
                        : TrendFunction::constant(scale);
        if (renewal) c.renewal = RenewalDistribution::weibull(x[k++]);
        if (frailty) c.frailty_variance = std::max(x[k++], 1e-8);
        return ModelSpec{c, {}};
    };
    return p;
}

CubeCorner frailty_free_of(CubeCorner c) {
    switch (c) {
        case CubeCorner::HHPP: return CubeCorner::HPP;
        case CubeCorner::HRP: return CubeCorner::RP;
        case CubeCorner::HNHPP: return CubeCorner::NHPP;
        case CubeCorner::HTRP: return CubeCorner::TRP;
        default: return c;
    }
}

FitResult hpp_closed_form(const EventDataset& d) {
    double n = 0, t = 0;
    for (const auto& s : d.systems) {
        n += static_cast<double>(s.n());
        t += s.censor_time;
    }
    if (n == 0) throw data_error("cube fit: dataset has no events");
    const double lambda = n / t;
    FitResult r;
    r.spec = ModelSpec{CubeSpec{RenewalDistribution::exponential(),
                                TrendFunction::constant(lambda), 0},
                       {}};
    r.estimates.emplace_back("lambda", lambda);
    r.loglik = loglik(r.spec, d).total;
    r.converged = true;
    return r;
}

FitResult fit_corner(CubeCorner corner, const EventDataset& d, const CornerParams& init,
                     const FitOptions& opts) {
    if (corner == CubeCorner::HPP) return hpp_closed_form(d);
    return fit(corner_problem(corner, init), d, opts);
}

// v hugging its optimization floor, or no gain over the frailty-free corner,
// means the heterogeneity variance sits at the 0 boundary.
void apply_boundary(FitResult& h_corner, const FitResult& free_corner) {
    const double vhat = h_corner.estimate("v").value_or(0.0);
    const bool at_floor = vhat <= 1e-5;
    const bool no_gain = h_corner.loglik <= free_corner.loglik + 1e-7;
    if (!at_floor && !no_gain) return;
    FitResult b;
    b.spec = free_corner.spec.with_frailty(0.0);
    b.estimates = free_corner.estimates;
    b.estimates.emplace_back("v", 0.0);
    b.loglik = std::max(h_corner.loglik, free_corner.loglik);
    b.converged = h_corner.converged && free_corner.converged;
    b.iterations = h_corner.iterations;
    b.boundary_flags.push_back("v=0");
    h_corner = std::move(b);
}

} // namespace

CubeReport fit_cube(const EventDataset& d, const FitOptions& opts) {
    CubeReport rep;
    auto& c = rep.corners;
    auto idx = [](CubeCorner k) { return static_cast<int>(k); };

    c[idx(CubeCorner::HPP)] = hpp_closed_form(d);
    const CornerParams hpp = corner_params(c[idx(CubeCorner::HPP)]);

    // pass 1: warm starts along poorer-to-richer edges
    c[idx(CubeCorner::RP)] = fit_corner(CubeCorner::RP, d, hpp, opts);
    c[idx(CubeCorner::NHPP)] = fit_corner(CubeCorner::NHPP, d, hpp, opts);
    {
        CornerParams i = hpp;
        i.v = 0.1;
        c[idx(CubeCorner::HHPP)] = fit_corner(CubeCorner::HHPP, d, i, opts);
        apply_boundary(c[idx(CubeCorner::HHPP)], c[idx(CubeCorner::HPP)]);
    }
    {
        // best of the two poorer neighbors as the start
        const auto& rp = c[idx(CubeCorner::RP)];
        const auto& nhpp = c[idx(CubeCorner::NHPP)];
        CornerParams i = corner_params(rp.loglik >= nhpp.loglik ? rp : nhpp);
        c[idx(CubeCorner::TRP)] = fit_corner(CubeCorner::TRP, d, i, opts);
    }
    for (auto [h, base] : std::initializer_list<std::pair<CubeCorner, CubeCorner>>{
             {CubeCorner::HRP, CubeCorner::RP},
             {CubeCorner::HNHPP, CubeCorner::NHPP},
             {CubeCorner::HTRP, CubeCorner::TRP}}) {
        CornerParams i = corner_params(c[idx(base)]);
        const double vh = c[idx(CubeCorner::HHPP)].estimate("v").value_or(0.1);
        i.v = vh > 1e-5 ? vh : 0.1;
        c[idx(h)] = fit_corner(h, d, i, opts);
        apply_boundary(c[idx(h)], c[idx(base)]);
    }

    // monotonicity repair: refit any richer corner that fell below a poorer one
    const auto edges = cube_edges();
    for (int sweep = 0; sweep < 4; ++sweep) {
        bool dirty = false;
        for (const auto& [lo, hi] : edges) {
            auto& rich = c[idx(hi)];
            const auto& poor = c[idx(lo)];
            if (rich.loglik >= poor.loglik - 1e-9) continue;
            dirty = true;
            CornerParams i = corner_params(poor);
            if (corner_has_frailty(hi) && i.v <= 1e-5) i.v = 1e-4;
            FitResult refit = fit_corner(hi, d, i, opts);
            if (corner_has_frailty(hi) && !corner_has_frailty(lo)) {
                apply_boundary(refit, poor);
            }
            if (refit.loglik > rich.loglik) rich = std::move(refit);
            if (rich.loglik < poor.loglik - 1e-9) {
                // fall back to the poorer optimum embedded in the richer family
                FitResult emb;
                CornerParams pp = corner_params(poor);
                auto prob = corner_problem(hi, pp);
                std::vector<double> x = prob.init;
                emb.spec = prob.build(x);
                for (std::size_t k = 0; k < prob.names.size(); ++k)
                    emb.estimates.emplace_back(prob.names[k], x[k]);
                emb.loglik = loglik(emb.spec, d).total;
                emb.converged = poor.converged;
                if (corner_has_frailty(hi) && pp.v <= 1e-5) {
                    emb.spec = emb.spec.with_frailty(0.0);
                    for (auto& [k, v] : emb.estimates)
                        if (k == "v") v = 0.0;
                    emb.loglik = poor.loglik;
                    emb.boundary_flags.push_back("v=0");
                }
                if (emb.loglik > rich.loglik) rich = std::move(emb);
            }
        }
        if (!dirty) break;
    }

    for (const auto& [lo, hi] : edges) {
        rep.edges.emplace_back(lo, hi, lr_test(c[idx(lo)], c[idx(hi)]));
    }
    return rep;
}

namespace {

std::string corner_label(const CubeReport& rep, CubeCorner c) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s l=%.2f", corner_name(c), rep.at(c).loglik);
    return buf;
}

} // namespace

std::string render_cube(const CubeReport& rep) {
    using C = CubeCorner;
    auto L = [&](C c) { return corner_label(rep, c); };
    char buf[512];
    std::string out;
    // heterogeneity recedes; trend runs right; non-Poisson renewal runs up
    std::snprintf(buf, sizeof(buf),
                  "        %-22s %s\n"
                  "       /|                     /|\n"
                  "  %-22s %s\n"
                  "      | |                    | |\n"
                  "      | %-20s | %s\n"
                  "      |/                     |/\n"
                  "  %-22s %s\n",
                  L(C::HRP).c_str(), L(C::HTRP).c_str(), L(C::RP).c_str(),
                  L(C::TRP).c_str(), L(C::HHPP).c_str(), L(C::HNHPP).c_str(),
                  L(C::HPP).c_str(), L(C::NHPP).c_str());
    out += buf;
    out += "\ncorner estimates\n";
    for (CubeCorner c : kCubeCorners) {
        const auto& r = rep.at(c);
        std::snprintf(buf, sizeof(buf), "  %-6s l=%12.4f ", corner_name(c), r.loglik);
        out += buf;
        for (const auto& [k, v] : r.estimates) {
            std::snprintf(buf, sizeof(buf), " %s=%.4g", k.c_str(), v);
            out += buf;
        }
        for (const auto& f : r.boundary_flags) out += " [boundary " + f + "]";
        if (!r.converged) out += " [not converged]";
        out += "\n";
    }
    out += "\nedge likelihood-ratio tests\n";
    for (const auto& [lo, hi, t] : rep.edges) {
        std::snprintf(buf, sizeof(buf),
                      "  %-5s -> %-5s  2dl=%8.4f df=%d p=%.4f p_boundary=%.4f\n",
                      corner_name(lo), corner_name(hi), t.statistic, t.df, t.p_naive,
                      t.p_boundary);
        out += buf;
    }
    return out;
}

} // namespace repsys
