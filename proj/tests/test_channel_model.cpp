#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "qrdv/channel_model.hpp"

using namespace qrdv;

TEST_CASE("stationary idle probability") {
    CHECK(stationary_idle(5, 5) == doctest::Approx(0.5));
    CHECK(stationary_idle(7.5, 2.5) == doctest::Approx(0.75));
    CHECK_THROWS_AS(stationary_idle(1, 0), std::invalid_argument);
    CHECK_THROWS_AS(stationary_idle(0, 1), std::invalid_argument);
    CHECK_THROWS_AS(stationary_idle(-1, 1), std::invalid_argument);
}

TEST_CASE("from_target_pi construction") {
    RngStream rng(1);
    auto ch = from_target_pi(0.5, 10, rng);
    CHECK(ch.alpha == doctest::Approx(5));
    CHECK(ch.beta == doctest::Approx(5));
    CHECK(stationary_idle(ch.alpha, ch.beta) == doctest::Approx(0.5));

    auto ch9 = from_target_pi(0.9, 10, rng, 3);
    CHECK(ch9.alpha == doctest::Approx(9));
    CHECK(ch9.beta == doctest::Approx(1));
    CHECK(ch9.channel_id == 3);

    CHECK_THROWS_AS(from_target_pi(1.0, 10, rng), std::invalid_argument);
    CHECK_THROWS_AS(from_target_pi(0.0, 10, rng), std::invalid_argument);
    CHECK_THROWS_AS(from_target_pi(-0.2, 10, rng), std::invalid_argument);
    CHECK_THROWS_AS(from_target_pi(0.5, 0, rng), std::invalid_argument);
    // Sub-slot mean sojourn cannot realize the target in slotted time.
    CHECK_THROWS_AS(from_target_pi(0.95, 10, rng), std::invalid_argument);
}

TEST_CASE("alpha=beta=1 alternates deterministically") {
    PuChannel ch{1.0, 1.0, true, 1};
    RngStream rng(42);
    for (int i = 0; i < 10; ++i) {
        bool before = ch.idle;
        step(ch, rng);
        CHECK(ch.idle == !before);
    }
}

TEST_CASE("huge alpha keeps the channel idle at desk scale") {
    PuChannel ch{1e9, 1.0, true, 1};
    RngStream rng(7);
    for (int i = 0; i < 100000; ++i) {
        step(ch, rng);
        REQUIRE(ch.idle);
    }
}

TEST_CASE("long-run idle fraction matches alpha/(alpha+beta)") {
    PuChannel ch{4.0, 1.0, true, 1};
    RngStream rng(11);
    const int steps = 1000000;
    long long idle = 0;
    for (int i = 0; i < steps; ++i) {
        if (ch.idle) ++idle;
        step(ch, rng);
    }
    const double frac = static_cast<double>(idle) / steps;
    CHECK(frac == doctest::Approx(0.8).epsilon(0.0125));  // 0.8 +- 0.01
}

TEST_CASE("mean sojourn lengths match alpha and beta within 5%") {
    PuChannel ch{4.0, 2.0, true, 1};
    RngStream rng(13);
    const int steps = 1200000;
    std::vector<long long> idle_runs, busy_runs;
    long long run = 0;
    bool state = ch.idle;
    for (int i = 0; i < steps; ++i) {
        step(ch, rng);
        ++run;
        if (ch.idle != state) {
            (state ? idle_runs : busy_runs).push_back(run);
            run = 0;
            state = ch.idle;
        }
    }
    // Drop the trailing (truncated) run; the leading one is complete because
    // the chain started fresh.
    auto mean_of = [](const std::vector<long long>& v) {
        double s = 0;
        for (long long x : v) s += static_cast<double>(x);
        return s / static_cast<double>(v.size());
    };
    CHECK(mean_of(idle_runs) == doctest::Approx(4.0).epsilon(0.05));
    CHECK(mean_of(busy_runs) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("channels on independent streams are uncorrelated") {
    RngStream r1(100), r2(200);
    PuChannel a{5.0, 5.0, true, 1}, b{5.0, 5.0, true, 2};
    const int steps = 1000000;
    long long sa = 0, sb = 0, sab = 0;
    for (int i = 0; i < steps; ++i) {
        sa += a.idle;
        sb += b.idle;
        sab += a.idle && b.idle;
        step(a, r1);
        step(b, r2);
    }
    const double ma = static_cast<double>(sa) / steps;
    const double mb = static_cast<double>(sb) / steps;
    const double cov = static_cast<double>(sab) / steps - ma * mb;
    const double corr = cov / std::sqrt(ma * (1 - ma) * mb * (1 - mb));
    CHECK(std::fabs(corr) < 0.01);
}

TEST_CASE("iid mode redraws from the stationary distribution") {
    RngStream rng(3);
    auto ch = from_target_pi(0.7, 10, rng);
    long long idle = 0;
    const int steps = 200000;
    for (int i = 0; i < steps; ++i) {
        if (ch.idle) ++idle;
        step(ch, rng, OccupancyMode::Iid);
    }
    CHECK(static_cast<double>(idle) / steps == doctest::Approx(0.7).epsilon(0.01));
}

TEST_CASE("stepping is deterministic per seed") {
    auto trace = [](std::uint64_t seed) {
        PuChannel ch{3.0, 2.0, true, 1};
        RngStream rng(seed);
        std::vector<bool> t;
        for (int i = 0; i < 1000; ++i) {
            step(ch, rng);
            t.push_back(ch.idle);
        }
        return t;
    };
    CHECK(trace(9) == trace(9));
    CHECK(trace(9) != trace(10));
}
