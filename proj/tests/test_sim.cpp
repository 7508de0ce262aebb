#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sle83/sim.hpp"

using namespace sle83;

TEST_CASE("SimConfig validation") {
    SimConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.dt = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::domain_error);
    cfg = SimConfig{};
    cfg.ratio_threshold = 5.0;
    CHECK_THROWS_AS(cfg.validate(), std::domain_error);
    cfg = SimConfig{};
    cfg.y_escape = 0.5;
    CHECK_THROWS_AS(cfg.validate(), std::domain_error);
}

TEST_CASE("sample_driver determinism and distribution") {
    SimConfig cfg;
    cfg.seed = 123;
    cfg.t_max = 2.0;
    cfg.dt = 1e-3;
    const DriverPath a = sample_driver(cfg, 5);
    const DriverPath b = sample_driver(cfg, 5);
    CHECK(a.increments == b.increments);
    CHECK(a.dts == b.dts);
    const DriverPath c = sample_driver(cfg, 6);
    CHECK(a.increments != c.increments);

    // grid covers [0, t_max] exactly
    double total = 0.0;
    for (double dt : a.dts) {
        CHECK(dt > 0.0);
        total += dt;
    }
    CHECK(total == Catch::Approx(cfg.t_max).margin(1e-9));

    // increment variance ~ kappa dt, mean ~ 0
    double sum = 0.0, sum2 = 0.0, evar = 0.0;
    std::size_t n = 0;
    for (std::uint64_t s = 0; s < 400; ++s) {
        const DriverPath d = sample_driver(cfg, s);
        for (std::size_t k = 0; k < d.n_steps(); ++k) {
            sum += d.increments[k];
            sum2 += d.increments[k] * d.increments[k];
            evar += cfg.kappa * d.dts[k];
            ++n;
        }
    }
    CHECK(std::abs(sum / n) < 3.0 * std::sqrt(evar / n / static_cast<double>(n)));
    CHECK(sum2 / evar == Catch::Approx(1.0).margin(0.05));
}

TEST_CASE("flow_step exact slit values") {
    // z = i, zero driving, dt = 0.01: z' = sqrt(-1 + 0.04)
    const FlowState s{0.0, 1.0, 0.0, false};
    const FlowState out = flow_step(s, 0.0, 0.01);
    CHECK(out.x == Catch::Approx(0.0).margin(1e-15));
    CHECK(out.y == Catch::Approx(std::sqrt(0.96)).margin(1e-14));
    CHECK(out.t == Catch::Approx(0.01));
    CHECK_FALSE(out.blown_up);

    // capacity additivity
    const FlowState one = flow_step(s, 0.0, 0.01);
    const FlowState two = flow_step(flow_step(s, 0.0, 0.005), 0.0, 0.005);
    CHECK(one.x == Catch::Approx(two.x).margin(1e-12));
    CHECK(one.y == Catch::Approx(two.y).margin(1e-12));

    // the pure slit update decreases y; a pure driving shift keeps it
    FlowState cur{0.4, 0.7, 0.0, false};
    for (int k = 0; k < 100; ++k) {
        const FlowState nxt = flow_step(cur, 0.02 * (k % 5 - 2), 1e-3);
        CHECK(nxt.y < cur.y);
        cur = nxt;
    }

    FlowState dead{0.0, 0.0, 0.0, true};
    CHECK_THROWS_AS(flow_step(dead, 0.0, 0.01), std::logic_error);
}

TEST_CASE("classify_passage extremes and symmetry") {
    SimConfig cfg;
    cfg.seed = 7;
    cfg.t_max = 50.0;
    cfg.dt = 1e-3;

    // far-left point ends Right essentially always
    int right = 0, n = 200;
    for (int s = 0; s < n; ++s) {
        const auto out =
            classify_passage({{-1e6, 1.0}}, sample_driver(cfg, static_cast<std::uint64_t>(s)), cfg);
        if (out[0] == PassageOutcome::Right) ++right;
    }
    CHECK(right == n);

    // z = i splits about evenly
    int left = 0, undecided = 0;
    n = 2000;
    for (int s = 0; s < n; ++s) {
        const auto out =
            classify_passage({{0.0, 1.0}}, sample_driver(cfg, static_cast<std::uint64_t>(s)), cfg);
        if (out[0] == PassageOutcome::Left) ++left;
        if (out[0] == PassageOutcome::Undecided) ++undecided;
    }
    const double phat = (left + 0.5 * undecided) / n;
    CHECK(std::abs(phat - 0.5) < 3.0 * std::sqrt(0.25 / n) + 0.5 * undecided / double(n));

    // identical config reproduces identical outcomes
    const DriverPath d = sample_driver(cfg, 42);
    CHECK(classify_passage({{0.2, 0.8}}, d, cfg) == classify_passage({{0.2, 0.8}}, d, cfg));
}

TEST_CASE("flow_trajectory snapshots") {
    SimConfig cfg;
    cfg.seed = 3;
    cfg.t_max = 2.0;
    const HalfPlanePoint z{0.3, 1.1};
    const DriverPath d = sample_driver(cfg, 1);

    const auto at0 = flow_trajectory(z, d, cfg, {0.0});
    REQUIRE(at0.size() == 1);
    CHECK(at0[0].x == z.x);
    CHECK(at0[0].y == z.y);
    CHECK(at0[0].t == 0.0);

    const auto snaps = flow_trajectory(z, d, cfg, {0.0, 0.5, 1.0, 2.0});
    REQUIRE(snaps.size() == 4);
    for (std::size_t i = 0; i < snaps.size(); ++i)
        CHECK(std::abs(snaps[i].t - std::vector<double>{0.0, 0.5, 1.0, 2.0}[i]) < 0.01);
    // Im z_t decreases monotonically
    for (std::size_t i = 1; i < snaps.size(); ++i) CHECK(snaps[i].y < snaps[i - 1].y);

    CHECK_THROWS_AS(flow_trajectory(z, d, cfg, {1.0, 0.5}), std::domain_error);
    CHECK_THROWS_AS(flow_trajectory(z, d, cfg, {3.0}), std::domain_error);
}

TEST_CASE("x-ordering preserved near the axis") {
    SimConfig cfg;
    cfg.seed = 5;
    cfg.t_max = 0.5;
    for (std::uint64_t s = 0; s < 200; ++s) {
        const DriverPath d = sample_driver(cfg, s);
        FlowState a{-0.4, 0.01, 0.0, false}, b{0.4, 0.01, 0.0, false};
        for (std::size_t k = 0; k < d.n_steps(); ++k) {
            if (a.blown_up || b.blown_up) break;
            a = flow_step(a, d.increments[k], d.dts[k]);
            b = flow_step(b, d.increments[k], d.dts[k]);
            REQUIRE(a.x <= b.x + 1e-9);
        }
    }
}

TEST_CASE("undecided fraction shrinks as the horizon grows") {
    std::vector<double> fracs;
    for (double horizon : {1.0, 10.0, 100.0}) {
        SimConfig cfg;
        cfg.seed = 11;
        cfg.t_max = horizon;
        cfg.dt = 1e-3;
        int undecided = 0;
        const int n = 500;
        for (int s = 0; s < n; ++s) {
            const auto out = classify_passage({{0.0, 1.0}},
                                              sample_driver(cfg, static_cast<std::uint64_t>(s)),
                                              cfg);
            if (out[0] == PassageOutcome::Undecided) ++undecided;
        }
        fracs.push_back(undecided / static_cast<double>(n));
    }
    CHECK(fracs[0] >= fracs[1]);
    CHECK(fracs[1] >= fracs[2]);
}
