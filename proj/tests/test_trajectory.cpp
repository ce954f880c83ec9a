#include <cmath>
#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "rtd/io.hpp"
#include "rtd/trajectory.hpp"
#include "support/oracles.hpp"

using namespace rtd;

namespace {

constexpr double kPi = 3.141592653589793;

/// Direct plan construction from local endpoint data (no orientation search);
/// the random suites use this to pin every quantity exactly.
DeploymentPlan direct_plan(const std::vector<LocalCoord>& local_s,
                           const std::vector<LocalCoord>& local_f, FrameAngles as,
                           FrameAngles af, double delta = 1e-3, double epsilon = 1e-3) {
    DeploymentPlan p;
    p.angles_s = as;
    p.angles_f = af;
    p.local_s = local_s;
    p.local_f = local_f;
    std::vector<double> u_s, u_f;
    for (const auto& c : local_s) u_s.push_back(c.u);
    for (const auto& c : local_f) u_f.push_back(c.u);
    p.ordering = order_agents(u_s);
    p.weights = reference_weights(u_s, u_f, p.ordering);
    p.certificate = certify(u_s, u_f, p.weights, delta, epsilon);
    p.delta = delta;
    p.epsilon = epsilon;
    return p;
}

DeploymentPlan random_plan(std::mt19937& rng, int n) {
    std::uniform_real_distribution<double> gap(0.4, 1.5);
    std::uniform_real_distribution<double> lat(-1.2, 1.2);
    std::uniform_real_distribution<double> ang(0.0, kPi);
    std::vector<LocalCoord> ls(n), lf(n);
    double us = 0.0, uf = lat(rng);
    for (int i = 0; i < n; ++i) {
        us += gap(rng);
        uf += gap(rng);
        ls[i] = {us, lat(rng), lat(rng)};
        lf[i] = {uf, lat(rng), lat(rng)};
    }
    return direct_plan(ls, lf, {ang(rng), ang(rng)}, {ang(rng), ang(rng)});
}

} // namespace

TEST_CASE("sigma boundary values") {
    const TimeWindow w{2.0, 7.0};
    const Jet4 s0 = sigma_jet(2.0, w);
    CHECK(s0.c[0] == 0.0);
    CHECK(s0.c[1] == 0.0);
    CHECK(s0.c[2] == 0.0);
    const Jet4 s1 = sigma_jet(7.0, w);
    CHECK(s1.c[0] == 1.0);
    CHECK(s1.c[1] == 0.0);
    CHECK(s1.c[2] == 0.0);
    const Jet4 sm = sigma_jet(4.5, w);
    CHECK(sm.c[0] == Catch::Approx(0.5).margin(1e-15));
    CHECK(sm.c[1] > 0.0);
    CHECK_THROWS_AS(sigma_jet(1.999, w), OutOfWindow);
    CHECK_THROWS_AS(sigma_jet(7.001, w), OutOfWindow);
}

TEST_CASE("sigma is strictly increasing inside the window") {
    const TimeWindow w{0.0, 1.0};
    double prev = 0.0;
    for (int i = 1; i <= 1000; ++i) {
        const double v = sigma_value(i * 1e-3, w);
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("angle schedule hits the endpoints with zero rates") {
    std::vector<LocalCoord> ls{{0, 0, 0}, {1, 0, 0}, {2.5, 0, 0}};
    const DeploymentPlan p = direct_plan(ls, ls, {0.2, 1.0}, {0.4, 2.2});
    const TimeWindow w{0.0, 10.0};
    const auto [g0, m0] = angle_schedule(0.0, w, p);
    CHECK(g0.c[0] == Catch::Approx(0.2));
    CHECK(m0.c[0] == Catch::Approx(1.0));
    CHECK(g0.c[1] == 0.0);
    CHECK(m0.c[1] == 0.0);
    const auto [g1, m1] = angle_schedule(10.0, w, p);
    CHECK(g1.c[0] == Catch::Approx(0.4));
    CHECK(m1.c[0] == Catch::Approx(2.2));
}

TEST_CASE("constant angles have vanishing derivatives") {
    std::vector<LocalCoord> ls{{0, 0, 0}, {1, 0, 0}, {2.5, 0, 0}};
    const DeploymentPlan p = direct_plan(ls, ls, {0.7, 1.3}, {0.7, 1.3});
    const auto [g, m] = angle_schedule(3.7, TimeWindow{0.0, 10.0}, p);
    CHECK(g.c[0] == Catch::Approx(0.7));
    for (int k = 1; k <= 4; ++k) {
        CHECK(g.c[k] == 0.0);
        CHECK(m.c[k] == 0.0);
    }
}

TEST_CASE("letter scenario midpoint blends mu to 100.8 degrees") {
    const Scenario s = parse_scenario(std::string(RTD_SCENARIO_DIR) + "/letter_a_to_i_20.json");
    const DeploymentPlan plan = build_plan(s);
    const auto [g, m] = angle_schedule(0.5 * (s.window.t_s + s.window.t_f), s.window, plan);
    CHECK(m.c[0] == Catch::Approx(100.8 * kPi / 180.0).margin(1e-5));
}

TEST_CASE("local schedule endpoints are exact") {
    std::mt19937 rng(61);
    const DeploymentPlan p = random_plan(rng, 9);
    const TimeWindow w{1.0, 6.0};
    for (int i = 0; i < 9; ++i) {
        const LocalSchedule at_s = local_schedule(1.0, w, p, i);
        const LocalSchedule at_f = local_schedule(6.0, w, p, i);
        CHECK(at_s.u.c[0] == Catch::Approx(p.local_s[i].u).margin(1e-12));
        CHECK(at_s.v.c[0] == Catch::Approx(p.local_s[i].v).margin(1e-12));
        CHECK(at_s.w.c[0] == Catch::Approx(p.local_s[i].w).margin(1e-12));
        CHECK(at_f.u.c[0] == Catch::Approx(p.local_f[i].u).margin(1e-12));
        CHECK(at_f.v.c[0] == Catch::Approx(p.local_f[i].v).margin(1e-12));
        CHECK(at_f.w.c[0] == Catch::Approx(p.local_f[i].w).margin(1e-12));
        for (int k = 1; k <= 2; ++k) {
            CHECK(std::abs(at_s.u.c[k]) < 1e-9);
            CHECK(std::abs(at_f.u.c[k]) < 1e-9);
        }
    }
}

TEST_CASE("follower u tracks the blended weight applied to the leaders") {
    std::vector<LocalCoord> ls{{0, 0, 0}, {2.5, 0, 0}, {10, 0, 0}};
    std::vector<LocalCoord> lf{{0, 0, 0}, {5, 0, 0}, {10, 0, 0}};
    const DeploymentPlan p = direct_plan(ls, lf, {0, 0}, {0, 0});
    const TimeWindow w{0.0, 4.0};
    for (double t : {0.3, 1.1, 2.9, 3.6}) {
        const double s = sigma_value(t, w);
        const double beta = (1.0 - s) * 0.25 + s * 0.5;
        const LocalSchedule mid = local_schedule(t, w, p, 1);
        CHECK(mid.u.c[0] == Catch::Approx(beta * 10.0).margin(1e-12));
    }
    CHECK_THROWS_AS(local_schedule(1.0, w, p, 3), UnknownAgent);
}

TEST_CASE("constant-velocity translation") {
    RigidTranslation tr;
    tr.v0 = {10.0, 0.0, 0.0};
    const Jet4Vec3 d = translation_schedule(3.0, tr, TimeWindow{0.0, 10.0});
    CHECK(coeff(d, 0).x == Catch::Approx(30.0));
    CHECK(coeff(d, 1).x == Catch::Approx(10.0));
    CHECK(coeff(d, 2).x == 0.0);
    CHECK(coeff(d, 1).y == 0.0);

    RigidTranslation still;
    const Jet4Vec3 d2 = translation_schedule(123.0, still, TimeWindow{0.0, 10.0});
    CHECK(norm(coeff(d2, 0)) == 0.0);
    CHECK(norm(coeff(d2, 1)) == 0.0);
}

TEST_CASE("degenerate blended translation equals constant velocity") {
    RigidTranslation tr;
    tr.d0 = {1.0, -2.0, 0.5};
    tr.v0 = {3.0, 0.4, -0.2};
    RigidTranslation blended = tr;
    blended.blended = true;
    blended.v_f = tr.v0;
    const TimeWindow w{2.0, 9.0};
    for (double t : {0.0, 2.0, 4.7, 9.0, 12.0}) {
        const Jet4Vec3 a = translation_schedule(t, tr, w);
        const Jet4Vec3 b = translation_schedule(t, blended, w);
        for (int k = 0; k <= 4; ++k)
            CHECK(norm(coeff(a, k) - coeff(b, k)) == Catch::Approx(0.0).margin(1e-12));
    }
}

TEST_CASE("blended translation matches its endpoints and stays smooth") {
    RigidTranslation tr;
    tr.v0 = {2.0, 0.0, 0.0};
    tr.blended = true;
    tr.v_f = {0.0, 1.0, 0.0};
    const TimeWindow w{0.0, 8.0};
    CHECK(coeff(translation_schedule(0.0, tr, w), 1).x == Catch::Approx(2.0));
    CHECK(coeff(translation_schedule(8.0, tr, w), 1).y == Catch::Approx(1.0).margin(1e-12));
    // derivative continuity across t_s via finite differences of the value
    auto dx = [&](double t) { return coeff(translation_schedule(t, tr, w), 0).x; };
    const double v_mid = coeff(translation_schedule(1.7, tr, w), 1).x;
    CHECK(oracles::derivative_richardson(dx, 1.7, 1e-4) == Catch::Approx(v_mid).margin(1e-7));
}

TEST_CASE("desired state at rest start equals the rotated local position") {
    std::mt19937 rng(67);
    const DeploymentPlan p = random_plan(rng, 5);
    const TimeWindow w{0.0, 5.0};
    const RigidTranslation tr;  // zero
    for (int i = 0; i < 5; ++i) {
        const DesiredState d = desired_state(0.0, p, w, tr, i);
        const Basis<double> b = local_basis(p.angles_s);
        const Vec3d expect = p.local_s[i].u * b.c1 + p.local_s[i].v * b.c2 + p.local_s[i].w * b.c3;
        CHECK(norm(coeff(d.p, 0) - expect) == Catch::Approx(0.0).margin(1e-12));
        CHECK(norm(coeff(d.p, 1)) == Catch::Approx(0.0).margin(1e-12));
        CHECK(norm(coeff(d.p, 2)) == Catch::Approx(0.0).margin(1e-12));
    }
}

TEST_CASE("frozen local frame rides the translation") {
    std::vector<LocalCoord> ls{{0, 1, 0}, {2, -1, 3}, {5, 0, 1}};
    const DeploymentPlan p = direct_plan(ls, ls, {0.3, 0.9}, {0.3, 0.9});
    RigidTranslation tr;
    tr.v0 = {1.5, -0.5, 0.2};
    const TimeWindow w{0.0, 6.0};
    for (double t : {0.0, 2.2, 6.0, 9.0}) {
        const DesiredState d = desired_state(t, p, w, tr, 1);
        CHECK(norm(coeff(d.p, 1) - tr.v0) == Catch::Approx(0.0).margin(1e-12));
        for (int k = 2; k <= 4; ++k)
            CHECK(norm(coeff(d.p, k)) == Catch::Approx(0.0).margin(1e-12));
    }
}

TEST_CASE("desired-state jets match finite differences of the value") {
    // short windows, small extents and guaranteed endpoint deltas keep the
    // 4th-derivative magnitude far above the h^-4 roundoff floor of the
    // stencil; the error is measured against the derivative order's
    // magnitude across the axes
    std::mt19937 rng(71);
    RigidTranslation tr;
    tr.v0 = {0.3, -0.2, 0.1};
    const TimeWindow w{0.0, 0.6};
    std::uniform_real_distribution<double> gap(0.25, 0.6);
    std::uniform_real_distribution<double> lat(-1.2, 1.2);
    std::uniform_real_distribution<double> ang(0.0, kPi);
    for (int trial = 0; trial < 6; ++trial) {
        std::vector<LocalCoord> ls(6), lf(6);
        double us = 0.0;
        for (int i = 0; i < 6; ++i) {
            us += gap(rng);
            ls[i] = {us, lat(rng), lat(rng)};
            lf[i] = {us + 2.0 + 0.05 * lat(rng), ls[i].v + ((i % 2) ? 2.0 : -2.0),
                     ls[i].w + ((i % 3) ? -2.0 : 2.0)};
        }
        const DeploymentPlan p =
            direct_plan(ls, lf, {ang(rng), ang(rng)}, {ang(rng), ang(rng)});
        for (double t : {0.05, 0.12, 0.52}) {
            for (int agent : {0, 3}) {
                const DesiredState d = desired_state(t, p, w, tr, agent);
                for (int k = 1; k <= 4; ++k) {
                    const double scale =
                        std::max({1.0, std::abs(coeff(d.p, k).x), std::abs(coeff(d.p, k).y),
                                  std::abs(coeff(d.p, k).z)});
                    for (int axis = 0; axis < 3; ++axis) {
                        auto value = [&](double tt) {
                            return coeff(desired_state(tt, p, w, tr, agent).p, 0)[axis];
                        };
                        const double fd = oracles::derivative(value, t, k, 1e-3);
                        const double jet = coeff(d.p, k)[axis];
                        CHECK(std::abs(fd - jet) / scale < 1e-5);
                    }
                }
            }
        }
    }
}

TEST_CASE("separation lower bound and ordering hold along the schedule") {
    std::mt19937 rng(73);
    for (int trial = 0; trial < 5; ++trial) {
        const DeploymentPlan p = random_plan(rng, 12);
        const TimeWindow w{0.0, 7.0};
        const double bound = p.certificate.d_min * p.certificate.beta_star;
        for (int step = 0; step <= 10000; ++step) {
            const double s = sigma_value(w.t_s + step * 7e-4, w);
            double prev = -1e300;
            double min_gap = 1e300;
            for (int k = 0; k < 12; ++k) {
                const double u = local_u_value(p, s, p.ordering.b[k]);
                min_gap = std::min(min_gap, u - prev);
                prev = u;
            }
            REQUIRE(min_gap >= bound - 1e-9);
        }
    }
}
