#pragma once

#include <algorithm>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "rtd/scenario.hpp"

namespace rtd {

namespace detail {

inline Scenario draw_scenario(int agents, unsigned seed, int grid_n) {
    std::mt19937 rng(seed);
    auto uni = [&rng](double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    };
    constexpr double pi = 3.141592653589793;

    Scenario s;
    s.agents = agents;
    s.planner.grid_n = grid_n;
    s.window = {0.0, uni(8.0, 20.0)};
    s.translation.d0 = {uni(-5.0, 5.0), uni(-5.0, 5.0), uni(10.0, 30.0)};
    s.translation.v0 = {uni(-3.0, 3.0), uni(-3.0, 3.0), uni(-0.5, 0.5)};

    const FrameAngles fs{uni(0.0, pi), uni(0.0, pi)};
    const FrameAngles ff{uni(0.0, pi), uni(0.0, pi)};
    const Basis<double> bs = local_basis(fs);
    const Basis<double> bf = local_basis(ff);

    // one permutation serves both endpoints (the ordering requirement)
    std::vector<int> perm(agents);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);

    std::vector<double> u_s(agents), u_f(agents);
    double acc_s = 0.0, acc_f = uni(-20.0, 20.0);
    for (int k = 0; k < agents; ++k) {
        acc_s += uni(0.8, 2.0);
        acc_f += uni(0.8, 2.0);
        u_s[perm[k]] = acc_s;
        u_f[perm[k]] = acc_f;
    }

    const Vec3d d_s = s.translation.d0 + s.window.t_s * s.translation.v0;
    const Vec3d d_f = s.translation.d0 + s.window.t_f * s.translation.v0;
    s.initial_positions.resize(agents);
    s.final_positions.resize(agents);
    for (int i = 0; i < agents; ++i) {
        const LocalCoord ls{u_s[i], uni(-4.0, 4.0), uni(-4.0, 4.0)};
        const LocalCoord lf{u_f[i], uni(-4.0, 4.0), uni(-4.0, 4.0)};
        s.initial_positions[i] = from_local(ls, d_s, bs);
        s.final_positions[i] = from_local(lf, d_f, bf);
    }
    s.delta = 1e-6;
    s.epsilon = 1e-6;
    return s;
}

} // namespace detail

/// Deterministic random certified scenario: agents drawn with well-separated
/// u-coordinates in a random deployment frame at both endpoints. The planner
/// re-optimizes the frame, so a draw is kept only if its own optimal
/// directions sort both formations consistently; delta and epsilon are then
/// sized off the achieved certificate so the plan is feasible by
/// construction. Used by the randomized test suites and `rtd random`.
inline Scenario random_certified_scenario(int agents, unsigned seed, int grid_n = 181) {
    for (unsigned attempt = 0; attempt < 64; ++attempt) {
        Scenario s = detail::draw_scenario(agents, seed * 1000003u + attempt, grid_n);
        try {
            const DeploymentPlan probe = build_plan(s, /*allow_uncertified=*/true);
            const double product = probe.certificate.d_min * probe.certificate.beta_star;
            s.delta = product / 8.0;
            s.epsilon = product / 8.0;
            s.name = "random-" + std::to_string(agents) + "-" + std::to_string(seed);
            return s;
        } catch (const OrderingMismatch&) {
        } catch (const TieError&) {
        }
    }
    throw DegenerateFormation("no orderable random draw in 64 attempts (seed " +
                              std::to_string(seed) + ")");
}

} // namespace rtd
