#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "rtd/errors.hpp"
#include "rtd/geom.hpp"
#include "rtd/quadrotor.hpp"
#include "rtd/spatial_planner.hpp"
#include "rtd/trajectory.hpp"

namespace rtd {

struct ControllerPoles {
    std::array<double, 4> pos{-2.0, -2.4, -2.8, -3.2};
    std::array<double, 2> yaw{-3.0, -3.5};
};

struct SimConfig {
    double dt = 1e-3;      // s
    double t_start = 0.0;  // s
    double t_end = 0.0;    // s
    int record_stride = 1;
};

struct PlannerConfig {
    int grid_n = 721;
};

/// The single input artifact: fleet, formations, safety limits and timing.
/// Positions are inertial; the planner derives everything else.
struct Scenario {
    std::string name;
    int agents = 0;
    QuadParams quad;
    double delta = 0.0;    // m, tracking-error budget
    double epsilon = 0.0;  // m, vehicle radius
    TimeWindow window;
    RigidTranslation translation;
    std::vector<Vec3d> initial_positions;
    std::vector<Vec3d> final_positions;
    double psi_d_deg = 0.0;  // authored in degrees, converted at the plan boundary
    ControllerPoles poles;
    SimConfig sim;
    PlannerConfig planner;
};

inline void validate_scenario(const Scenario& s) {
    auto fail = [](const std::string& msg) { throw ValidationError(msg); };
    if (s.agents < 3) fail("agents must be >= 3");
    if (static_cast<int>(s.initial_positions.size()) != s.agents)
        fail("initial_positions must list exactly `agents` entries");
    if (static_cast<int>(s.final_positions.size()) != s.agents)
        fail("final_positions must list exactly `agents` entries");
    if (!(s.window.t_f > s.window.t_s)) fail("time window empty: t_f must exceed t_s");
    if (!(s.delta > 0.0)) fail("delta must be positive");
    if (!(s.epsilon > 0.0)) fail("epsilon must be positive");
    if (!(s.quad.m > 0.0 && s.quad.g > 0.0 && s.quad.l > 0.0 && s.quad.jx > 0.0 &&
          s.quad.jy > 0.0 && s.quad.jz > 0.0 && s.quad.jr > 0.0 && s.quad.b > 0.0 &&
          s.quad.k > 0.0 && s.quad.varpi_max > 0.0))
        fail("quad parameters must all be positive");
    if (!(s.sim.dt > 0.0)) fail("sim.dt must be positive");
    if (s.sim.record_stride < 1) fail("sim.record_stride must be >= 1");
    if (s.planner.grid_n < 8) fail("planner.grid_n must be >= 8");
    auto check_finite = [&](const std::vector<Vec3d>& pts, const char* which) {
        for (const Vec3d& p : pts)
            if (!isfinite(p)) fail(std::string(which) + " contains a non-finite coordinate");
    };
    check_finite(s.initial_positions, "initial_positions");
    check_finite(s.final_positions, "final_positions");
    for (int i = 0; i < s.agents; ++i)
        for (int j = i + 1; j < s.agents; ++j) {
            if (norm(s.initial_positions[i] - s.initial_positions[j]) == 0.0)
                fail("initial_positions " + std::to_string(i) + " and " + std::to_string(j) +
                     " coincide");
            if (norm(s.final_positions[i] - s.final_positions[j]) == 0.0)
                fail("final_positions " + std::to_string(i) + " and " + std::to_string(j) +
                     " coincide");
        }
    if (!isfinite(s.translation.d0) || !isfinite(s.translation.v0) ||
        (s.translation.blended && !isfinite(s.translation.v_f)))
        fail("translation vectors must be finite");
    if (!std::isfinite(s.psi_d_deg)) fail("psi_d_deg must be finite");
}

/// Stable FNV-1a fingerprint over the scenario's numeric content; guards
/// plan-file replay against a mismatched scenario.
inline std::string scenario_fingerprint(const Scenario& s) {
    std::uint64_t h = 1469598103934665603ull;
    auto eat = [&h](const char* buf, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ull;
        }
    };
    auto num = [&](double v) {
        char buf[32];
        const int n = std::snprintf(buf, sizeof buf, "%.17g;", v);
        eat(buf, static_cast<std::size_t>(n));
    };
    num(s.agents);
    num(s.quad.m); num(s.quad.g); num(s.quad.l);
    num(s.quad.jx); num(s.quad.jy); num(s.quad.jz); num(s.quad.jr);
    num(s.quad.b); num(s.quad.k); num(s.quad.varpi_max);
    num(s.delta); num(s.epsilon);
    num(s.window.t_s); num(s.window.t_f);
    for (int a = 0; a < 3; ++a) num(s.translation.d0[a]);
    for (int a = 0; a < 3; ++a) num(s.translation.v0[a]);
    num(s.translation.blended ? 1.0 : 0.0);
    if (s.translation.blended)
        for (int a = 0; a < 3; ++a) num(s.translation.v_f[a]);
    for (const Vec3d& p : s.initial_positions) { num(p.x); num(p.y); num(p.z); }
    for (const Vec3d& p : s.final_positions) { num(p.x); num(p.y); num(p.z); }
    num(s.psi_d_deg);
    char out[17];
    std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
    return out;
}

/// Full spatial planning pass over a validated scenario. Fails closed on an
/// infeasible certificate unless allow_uncertified is set.
inline DeploymentPlan build_plan(const Scenario& s, bool allow_uncertified = false) {
    validate_scenario(s);
    const Vec3d d_s = coeff(translation_schedule(s.window.t_s, s.translation, s.window), 0);
    const Vec3d d_f = coeff(translation_schedule(s.window.t_f, s.translation, s.window), 0);
    DeploymentPlan plan =
        plan_formations(s.initial_positions, s.final_positions, d_s, d_f, s.delta, s.epsilon,
                        s.planner.grid_n, allow_uncertified);
    plan.psi_d = s.psi_d_deg * 3.141592653589793 / 180.0;
    plan.scenario_hash = scenario_fingerprint(s);
    return plan;
}

} // namespace rtd
