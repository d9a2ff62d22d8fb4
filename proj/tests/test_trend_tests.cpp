#include <doctest.h>

#include <cmath>

#include "core/common.hpp"
#include "core/simulation.hpp"
#include "core/stats.hpp"
#include "core/trend_tests.hpp"

using namespace repsys;

namespace {

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
    for (std::size_t i = 0; i < systems.size(); ++i) {
        systems[i].system_id = "s" + std::to_string(i + 1);
    }
    d.systems = std::move(systems);
    d.mark_set = {kDefaultMark};
    return d;
}

} // namespace

TEST_CASE("centered-sum statistic") {
    const auto sym = laplace(history({0.25, 0.75}, 1.0));
    CHECK(sym.statistic == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(sym.p_value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sym.null_label == "HPP");

    const auto late = laplace(history({0.9}, 1.0));
    CHECK(late.statistic == doctest::Approx(0.4 * std::sqrt(12.0)).epsilon(1e-12));

    const auto early = laplace(history({0.1}, 1.0));
    CHECK(early.statistic == doctest::Approx(-0.4 * std::sqrt(12.0)).epsilon(1e-12));
    CHECK(early.p_value == doctest::Approx(late.p_value).epsilon(1e-12));

    CHECK_THROWS_AS(laplace(history({}, 1.0)), Error);
}

TEST_CASE("log-sum statistic") {
    const double e = std::exp(1.0);
    const auto one = military_handbook(history({1.0 / e}, 1.0));
    CHECK(one.statistic == doctest::Approx(2.0).epsilon(1e-12));

    const auto two = military_handbook(history({1.0 / e, 1.000001 / e}, 1.0));
    CHECK(two.statistic == doctest::Approx(4.0).epsilon(1e-5));

    // all events near tau: statistic tends to zero (deterioration direction)
    const auto det = military_handbook(history({0.999, 0.9995}, 1.0));
    CHECK(det.statistic < 0.01);
}

TEST_CASE("pooled conditional transform") {
    SUBCASE("single system divides by tau") {
        const auto u = ttt_transform(dataset({history({0.2, 0.6}, 2.0)}));
        REQUIRE(u.size() == 2);
        CHECK(u[0] == doctest::Approx(0.1).epsilon(1e-12));
        CHECK(u[1] == doctest::Approx(0.3).epsilon(1e-12));
    }
    SUBCASE("two equal windows") {
        const auto u = ttt_transform(dataset({history({2.0}, 10.0), history({}, 10.0)}));
        REQUIRE(u.size() == 1);
        CHECK(u[0] == doctest::Approx(0.2).epsilon(1e-12)); // r(2)/r(10) = 4/20
    }
    SUBCASE("no events") {
        CHECK(ttt_transform(dataset({history({}, 1.0), history({}, 2.0)})).empty());
    }
}

TEST_CASE("uniformity statistic against clustered input") {
    const auto mid = anderson_darling_uniform({0.5});
    // A2 for a single central point, direct formula: -1 - 2*(0.5 log 0.5 + 0.5 log 0.5)
    CHECK(mid.statistic == doctest::Approx(-1.0 - (std::log(0.5) + std::log(0.5))).epsilon(1e-12));

    const auto extreme = anderson_darling_uniform({0.985, 0.99, 0.995});
    CHECK(extreme.statistic > 5.0);
    CHECK(extreme.p_value < 0.01);
}

TEST_CASE("combined tests pool per-system conditional uniforms") {
    const auto sym = combined_laplace(
        dataset({history({2.5, 7.5}, 10.0), history({0.5, 1.5}, 2.0)}));
    CHECK(sym.statistic == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(sym.null_label == "HPP-heterogeneous-rates");

    const auto late =
        combined_laplace(dataset({history({0.9}, 1.0), history({9.0}, 10.0)}));
    CHECK(late.statistic == doctest::Approx(0.8 / std::sqrt(2.0 / 12.0)).epsilon(1e-12));
    CHECK(late.statistic == doctest::Approx(1.9596).epsilon(1e-4));

    const double e = std::exp(1.0);
    const auto mh = combined_military_handbook(
        dataset({history({1.0 / e}, 1.0), history({10.0 / e}, 10.0)}));
    CHECK(mh.statistic == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("interevent-ratio statistic needs a dispersion estimate") {
    // exponential-looking spacings: close to the centered-sum statistic
    const auto h = history({0.11, 0.55, 0.63, 1.22, 1.94, 2.85, 3.1, 3.55, 4.3}, 5.0);
    const auto lr = lewis_robinson(h);
    const auto la = laplace(h);
    CHECK(lr.null_label == "RP");
    CHECK(lr.statistic / la.statistic > 0.4);
    CHECK(lr.statistic / la.statistic < 2.5);

    CHECK_THROWS_AS(lewis_robinson(history({0.5, 1.0}, 2.0)), Error);       // n < 3
    CHECK_THROWS_AS(lewis_robinson(history({1.0, 2.0, 3.0}, 4.0)), Error); // degenerate CV
}

TEST_CASE("concordant-pair count with exact moments") {
    const auto r = mann(history({1, 3, 6}, 10.0)); // interevents (1,2,3): all pairs ascending
    CHECK(r.statistic == doctest::Approx(3.0));
    // normal approximation with mean 1.5, variance 11/12
    const double z = (3.0 - 1.5) / std::sqrt(11.0 / 12.0);
    CHECK(r.p_value == doctest::Approx(2 * (1 - stats::normal_cdf(z))).epsilon(1e-10));

    const auto pooled = mann_pooled(dataset({history({1, 3, 6}, 10.0), history({1, 3, 6}, 10.0)}));
    CHECK(pooled.statistic == doctest::Approx(6.0));
}

TEST_CASE("permutation recalibration") {
    const auto h = history({0.11, 0.55, 0.63, 1.22, 1.94, 2.85, 3.1, 3.55, 4.3}, 5.0);
    const auto d = dataset({h});

    SUBCASE("deterministic given the seed") {
        const auto a = resampled_null(laplace, d, 199, 7);
        const auto b = resampled_null(laplace, d, 199, 7);
        CHECK(a.p_value == b.p_value);
        CHECK(a.calibration == "resampled(B=199,seed=7)");
        const auto c = resampled_null(laplace, d, 199, 8);
        CHECK(c.calibration == "resampled(B=199,seed=8)");
    }

    SUBCASE("identical spacings make every permutation identical") {
        // equal interevents: permutations cannot exceed the observed statistic
        const auto r = resampled_null(laplace, history({1, 2, 3, 4}, 4.0), 99, 3);
        CHECK(r.p_value == doctest::Approx(1.0));
    }

    SUBCASE("too few replicates") {
        CHECK_THROWS_AS(resampled_null(laplace, d, 50, 1), Error);
    }

    SUBCASE("counting convention keeps p off zero") {
        const auto r = resampled_null(laplace, d, 99, 11);
        CHECK(r.p_value >= 1.0 / 100.0);
        CHECK(r.p_value <= 1.0);
    }
}

TEST_CASE("time-scale invariance") {
    const auto h = history({0.3, 0.9, 1.1, 2.0, 2.2, 3.7}, 4.0);
    auto hk = h;
    for (auto& t : hk.times) t *= 7.0;
    hk.censor_time *= 7.0;
    CHECK(laplace(h).statistic == doctest::Approx(laplace(hk).statistic).epsilon(1e-12));
    CHECK(military_handbook(h).statistic ==
          doctest::Approx(military_handbook(hk).statistic).epsilon(1e-12));
    CHECK(lewis_robinson(h).statistic ==
          doctest::Approx(lewis_robinson(hk).statistic).epsilon(1e-12));
    CHECK(mann(h).statistic == doctest::Approx(mann(hk).statistic).epsilon(1e-12));
    const auto u = ttt_transform(dataset({h}));
    const auto uk = ttt_transform(dataset({hk}));
    for (std::size_t i = 0; i < u.size(); ++i) {
        CHECK(u[i] == doctest::Approx(uk[i]).epsilon(1e-12));
    }
}

TEST_CASE("power against a growing trend") {
    // strongly deteriorating single system: all tests flag it
    ModelSpec spec;
    spec.model = CubeSpec{RenewalDistribution::exponential(),
                          TrendFunction::power_law(0.3, 2.0), 0};
    const auto h = simulate_system(spec, 10.0, 606, 0);
    REQUIRE(h.n() > 10);
    CHECK(laplace(h).p_value < 0.05);
    CHECK(military_handbook(h).p_value < 0.05);
}
