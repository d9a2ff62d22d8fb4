#include <doctest.h>

#include <cmath>

#include "core/common.hpp"
#include "core/likelihood.hpp"
#include "core/simulation.hpp"

using namespace repsys;

namespace {

constexpr double kPi = 3.14159265358979323846;

SystemHistory history(std::vector<double> times, double tau) {
    SystemHistory h;
    h.system_id = "t";
    h.times = std::move(times);
    h.marks.assign(h.times.size(), kDefaultMark);
    h.censor_time = tau;
    return h;
}

EventDataset dataset(std::vector<SystemHistory> systems) {
    EventDataset d;
    d.systems = std::move(systems);
    d.mark_set = {kDefaultMark};
    return d;
}

ModelSpec cube(RenewalDistribution r, TrendFunction t, double v = 0) {
    ModelSpec s;
    s.model = CubeSpec{std::move(r), std::move(t), v};
    return s;
}

} // namespace

TEST_CASE("hand-computable log-likelihoods") {
    SUBCASE("constant intensity") {
        const auto d = dataset({history({0.5}, 1.0)});
        const auto r =
            loglik(cube(RenewalDistribution::exponential(), TrendFunction::constant(1)), d);
        CHECK(r.total == doctest::Approx(-1.0).epsilon(1e-12));
        CHECK(r.method == "closed-form");
    }

    SUBCASE("exponential renewal with power trend") {
        const auto d = dataset({history({1.0}, 1.0)});
        const auto r = loglik(
            cube(RenewalDistribution::exponential(), TrendFunction::power_law(1, 2)), d);
        CHECK(r.total == doctest::Approx(std::log(2.0) - 1.0).epsilon(1e-12));
    }

    SUBCASE("weibull renewal, constant trend") {
        const auto d = dataset({history({1.0}, 1.0)});
        const auto r =
            loglik(cube(RenewalDistribution::weibull(2), TrendFunction::constant(1)), d);
        CHECK(r.total == doctest::Approx(std::log(kPi / 2) - kPi / 4).epsilon(1e-12));
    }

    SUBCASE("per-system contributions sum to the total") {
        const auto d = dataset({history({0.5, 1.2}, 2.0), history({0.3}, 1.5)});
        const auto r = loglik(
            cube(RenewalDistribution::weibull(2), TrendFunction::power_law(0.8, 1.3)), d);
        double sum = 0;
        for (double v : r.per_system) sum += v;
        CHECK(r.total == doctest::Approx(sum).epsilon(1e-12));
    }
}

TEST_CASE("hazard-route and density-route forms agree on random configurations") {
    // 100 randomized parameter/data draws; the two computational forms of the
    // same likelihood must agree to near machine precision.
    CounterRng rng(12345, 0);
    for (int rep = 0; rep < 100; ++rep) {
        const double s = 0.5 + 2.5 * rng.uniform();
        const double b = 0.5 + 2.0 * rng.uniform();
        const double c = 0.2 + 2.0 * rng.uniform();
        CubeSpec cs{rng.uniform() < 0.5 ? RenewalDistribution::weibull(s)
                                        : RenewalDistribution::gamma(s),
                    TrendFunction::power_law(c, b), 0};
        ModelSpec spec;
        spec.model = cs;
        auto h = simulate_system(spec, 5.0, 777 + rep, 0);
        if (h.times.empty()) continue;
        const auto dens = loglik(spec, dataset({h}));
        const double haz = trp_loglik_intensity_form(cs, h);
        CHECK(dens.total == doctest::Approx(haz).epsilon(1e-10));
    }
}

TEST_CASE("gamma frailty closed form") {
    SUBCASE("two events under a unit-rate constant intensity, variance 1") {
        const auto d = dataset({history({0.2, 0.7}, 1.0)});
        const auto r = loglik_gamma_frailty(
            cube(RenewalDistribution::exponential(), TrendFunction::constant(1)), d, 1.0);
        CHECK(std::exp(r.total) == doctest::Approx(0.25).epsilon(1e-12));
    }

    SUBCASE("empty history gives the survival factor") {
        const auto d = dataset({history({}, 2.0)});
        const double delta = 0.5;
        const auto r = loglik_gamma_frailty(
            cube(RenewalDistribution::exponential(), TrendFunction::constant(1.5)), d, delta);
        CHECK(r.total ==
              doctest::Approx(-std::log(1 + delta * 1.5 * 2.0) / delta).epsilon(1e-12));
    }

    SUBCASE("small variance converges to the frailty-free value") {
        const auto d = dataset({history({0.5, 1.2, 2.6}, 3.0)});
        const auto spec = cube(RenewalDistribution::weibull(2), TrendFunction::constant(1));
        const auto plain = loglik_no_frailty(spec, d);
        const auto tiny = loglik_gamma_frailty(spec, d, 1e-6);
        CHECK(std::abs(tiny.total - plain.total) < 1e-4);
    }

    SUBCASE("non-multiplicative spec is rejected") {
        const auto d = dataset({history({0.5}, 1.0)});
        CHECK_THROWS_AS(
            loglik_gamma_frailty(
                cube(RenewalDistribution::weibull(2), TrendFunction::power_law(1, 2)), d, 0.5),
            Error);
    }
}

TEST_CASE("frailty expectation by quadrature") {
    const auto d = dataset({history({0.4, 1.1, 1.9}, 2.5), history({0.8}, 2.0)});

    SUBCASE("exponential renewal coincides with the multiplicative closed form") {
        const auto trend = TrendFunction::power_law(1.2, 1.4);
        const auto quad = loglik_htrp(RenewalDistribution::exponential(), trend, 0.7, d);
        const auto closed = loglik_gamma_frailty(
            cube(RenewalDistribution::exponential(), trend), d, 0.7);
        CHECK(quad.total == doctest::Approx(closed.total).epsilon(1e-8));
        CHECK(quad.method == "quadrature");
    }

    SUBCASE("small variance converges to the frailty-free value") {
        const auto trend = TrendFunction::power_law(1.0, 1.3);
        const auto quad = loglik_htrp(RenewalDistribution::weibull(2), trend, 1e-6, d);
        const auto plain =
            loglik_no_frailty(cube(RenewalDistribution::weibull(2), trend), d);
        CHECK(std::abs(quad.total - plain.total) < 1e-4);
    }

    SUBCASE("dispatcher routes frailty specs") {
        const auto spec = cube(RenewalDistribution::weibull(2),
                               TrendFunction::power_law(1, 1.3), 0.4);
        const auto via_dispatch = loglik(spec, d);
        const auto direct = loglik_htrp(RenewalDistribution::weibull(2),
                                        TrendFunction::power_law(1, 1.3), 0.4, d);
        CHECK(via_dispatch.total == doctest::Approx(direct.total).epsilon(1e-12));
    }
}

TEST_CASE("closed form for the gamma renewal with frailty at failure truncation") {
    // valid when every tau equals the last event time
    const auto d = dataset({history({0.6, 1.4, 2.0}, 2.0), history({0.9, 1.7}, 1.7)});

    SUBCASE("agrees with 512-node quadrature over a parameter grid") {
        for (double g : {0.5, 1.0, 2.0}) {
            for (double delta : {0.1, 0.6}) {
                for (double b : {0.8, 1.5}) {
                    const auto trend = TrendFunction::power_law(1.0, b);
                    const auto closed = loglik_inhom_gamma_closed(g, trend, delta, d);
                    const auto quad =
                        loglik_htrp(RenewalDistribution::gamma(g), trend, delta, d, 64);
                    CHECK(closed.total ==
                          doctest::Approx(quad.total).epsilon(1e-6));
                }
            }
        }
    }

    SUBCASE("unit shape equals the multiplicative closed form") {
        const auto trend = TrendFunction::power_law(1.0, 1.2);
        const auto closed = loglik_inhom_gamma_closed(1.0, trend, 0.8, d);
        const auto eq11 = loglik_gamma_frailty(
            cube(RenewalDistribution::exponential(), trend), d, 0.8);
        CHECK(closed.total == doctest::Approx(eq11.total).epsilon(1e-10));
    }

    SUBCASE("refused when tau is not the last event time") {
        const auto bad = dataset({history({0.6}, 2.0)});
        CHECK_THROWS_AS(
            loglik_inhom_gamma_closed(2.0, TrendFunction::constant(1), 0.5, bad), Error);
    }
}

TEST_CASE("covariates with zero coefficients change nothing") {
    auto h = history({0.5, 1.2}, 2.0);
    h.covariates = {1.3, -0.4};
    const auto d = dataset({h});
    auto spec = cube(RenewalDistribution::weibull(2), TrendFunction::power_law(1, 1.5));
    const double base = loglik(spec, d).total;
    spec.covariate_coefficients = {0.0, 0.0};
    CHECK(loglik(spec, d).total == base);
}

TEST_CASE("virtual-age likelihood uses observed repair-effect draws") {
    SystemHistory h = history({1.0, 2.5}, 4.0);
    h.marks = {"d=0", "d=0"}; // perfect repairs realized
    ModelSpec kij;
    kij.model = VirtualAgeSpec{ScaledDistribution(RenewalDistribution::weibull(2), 1.0),
                               VirtualAgePolicy::kijima1(RepairEffectLaw::uniform()), 0};
    ModelSpec perfect;
    perfect.model = VirtualAgeSpec{ScaledDistribution(RenewalDistribution::weibull(2), 1.0),
                                   VirtualAgePolicy::perfect(), 0};
    EventDataset dk = dataset({h});
    dk.mark_set = {"d=0"};
    const auto plain = dataset({history({1.0, 2.5}, 4.0)});
    CHECK(loglik(kij, dk).total == doctest::Approx(loglik(perfect, plain).total).epsilon(1e-12));
}

TEST_CASE("integrated intensity matches the likelihood integral") {
    const auto spec = cube(RenewalDistribution::weibull(2), TrendFunction::power_law(1, 1.5));
    const auto h = history({0.5, 1.4}, 2.0);
    const auto parts = intensity_parts(spec, h);
    CHECK(integrated_intensity(spec, h, 2.0) ==
          doctest::Approx(parts.integrated_intensity).epsilon(1e-12));
}
