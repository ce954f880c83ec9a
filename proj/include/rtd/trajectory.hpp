#pragma once

#include <cmath>
#include <string>

#include "rtd/errors.hpp"
#include "rtd/geom.hpp"
#include "rtd/jet.hpp"
#include "rtd/spatial_planner.hpp"

namespace rtd {

struct TimeWindow {
    double t_s = 0.0;
    double t_f = 0.0;
    double duration() const { return t_f - t_s; }
};

/// Rigid translation of the deployment frame. Default mode is constant
/// velocity throughout, d(t) = d0 + v0 t. If v_f is set, the velocity blends
/// from v0 to v_f across the deployment window.
struct RigidTranslation {
    Vec3d d0{};
    Vec3d v0{};
    bool blended = false;
    Vec3d v_f{};
};

/// Desired trajectory sample: position and yaw with derivatives.
struct DesiredState {
    Jet4Vec3 p;
    Jet4 psi_d;
};

/// Quintic blend 6 s^5 - 15 s^4 + 10 s^3 on s = (t - t_s)/(t_f - t_s), with
/// derivatives. Zero value/rate/acceleration at t_s, unit value with zero
/// rate/acceleration at t_f, strictly increasing between.
inline Jet4 sigma_jet(double t, const TimeWindow& w) {
    if (!(t >= w.t_s && t <= w.t_f))
        throw OutOfWindow("t = " + std::to_string(t) + " outside [" + std::to_string(w.t_s) +
                          ", " + std::to_string(w.t_f) + "]");
    const double T = w.duration();
    const double s = (t - w.t_s) / T;
    const double sd = 1.0 / T;
    const double sd2 = sd * sd;
    // factored closed forms keep the endpoint derivatives exactly zero
    Jet4 out;
    out.c[0] = s * s * s * (s * (s * 6.0 - 15.0) + 10.0);
    out.c[1] = 30.0 * s * s * (s - 1.0) * (s - 1.0) * sd;
    out.c[2] = 60.0 * s * (2.0 * s - 1.0) * (s - 1.0) * sd2;
    out.c[3] = 60.0 * (6.0 * s * (s - 1.0) + 1.0) * sd2 * sd;
    out.c[4] = 360.0 * (2.0 * s - 1.0) * sd2 * sd2;
    return out;
}

namespace detail {

/// sigma clamped to the window: exact 0 before t_s, exact 1 after t_f, all
/// derivatives zero outside.
inline Jet4 sigma_clamped(double t, const TimeWindow& w) {
    if (t < w.t_s) return Jet4::constant(0.0);
    if (t > w.t_f) return Jet4::constant(1.0);
    return sigma_jet(t, w);
}

inline Jet4 blend(const Jet4& sigma, double a, double b) {
    return (1.0 - sigma) * a + sigma * b;
}

} // namespace detail

/// Frame-angle schedules gamma(t), mu(t): linear blend of the endpoint angles.
inline std::pair<Jet4, Jet4> angle_schedule(double t, const TimeWindow& w,
                                            const DeploymentPlan& plan) {
    const Jet4 sigma = detail::sigma_clamped(t, w);
    return {detail::blend(sigma, plan.angles_s.gamma, plan.angles_f.gamma),
            detail::blend(sigma, plan.angles_s.mu, plan.angles_f.mu)};
}

struct LocalSchedule {
    Jet4 u, v, w;
};

/// Local coordinates of agent i at time t. Leaders blend their endpoint
/// u-coordinates directly; followers track the blended reference weight
/// applied to the leaders' current u. v and w blend independently.
inline LocalSchedule local_schedule(double t, const TimeWindow& w, const DeploymentPlan& plan,
                                    int agent) {
    if (agent < 0 || agent >= plan.agent_count())
        throw UnknownAgent("agent id " + std::to_string(agent) + " out of range");
    const Jet4 sigma = detail::sigma_clamped(t, w);
    const LocalCoord& as = plan.local_s[agent];
    const LocalCoord& af = plan.local_f[agent];

    LocalSchedule out;
    out.v = detail::blend(sigma, as.v, af.v);
    out.w = detail::blend(sigma, as.w, af.w);
    if (plan.ordering.is_leader(agent)) {
        out.u = detail::blend(sigma, as.u, af.u);
    } else {
        const int b1 = plan.ordering.leader_low();
        const int bN = plan.ordering.leader_high();
        const Jet4 u_lo = detail::blend(sigma, plan.local_s[b1].u, plan.local_f[b1].u);
        const Jet4 u_hi = detail::blend(sigma, plan.local_s[bN].u, plan.local_f[bN].u);
        const Jet4 beta =
            detail::blend(sigma, plan.weights.beta_s[agent], plan.weights.beta_f[agent]);
        out.u = (1.0 - beta) * u_lo + beta * u_hi;
    }
    return out;
}

/// Clamped blend value alone, for dense sampling sweeps.
inline double sigma_value(double t, const TimeWindow& w) {
    if (t <= w.t_s) return 0.0;
    if (t >= w.t_f) return 1.0;
    const double s = (t - w.t_s) / w.duration();
    return s * s * s * (s * (s * 6.0 - 15.0) + 10.0);
}

/// u-coordinate value of agent i at blend value sigma.
inline double local_u_value(const DeploymentPlan& plan, double sigma, int agent) {
    const double us = plan.local_s[agent].u, uf = plan.local_f[agent].u;
    if (plan.ordering.is_leader(agent)) return (1.0 - sigma) * us + sigma * uf;
    const int b1 = plan.ordering.leader_low();
    const int bN = plan.ordering.leader_high();
    const double u_lo = (1.0 - sigma) * plan.local_s[b1].u + sigma * plan.local_f[b1].u;
    const double u_hi = (1.0 - sigma) * plan.local_s[bN].u + sigma * plan.local_f[bN].u;
    const double beta =
        (1.0 - sigma) * plan.weights.beta_s[agent] + sigma * plan.weights.beta_f[agent];
    return (1.0 - beta) * u_lo + beta * u_hi;
}

/// Frame-origin trajectory d(t) with derivatives.
inline Jet4Vec3 translation_schedule(double t, const RigidTranslation& tr,
                                     const TimeWindow& w) {
    if (!tr.blended) {
        const Jet4 tj = Jet4::variable(t);
        return {tr.d0.x + tr.v0.x * tj, tr.d0.y + tr.v0.y * tj, tr.d0.z + tr.v0.z * tj};
    }
    // velocity v0 before t_s, blended through the window, v_f after t_f
    auto axis = [&](double d0, double vs, double vf) -> Jet4 {
        const double T = w.duration();
        const double d_ts = d0 + vs * w.t_s;
        if (t <= w.t_s) return d0 + vs * Jet4::variable(t);
        if (t >= w.t_f) {
            const double d_tf = d_ts + 0.5 * T * (vs + vf);
            return d_tf + vf * (Jet4::variable(t) - w.t_f);
        }
        // integral of the quintic blend: I(s) = s^6 - 3 s^5 + 2.5 s^4
        const Jet4 s = Jet4::affine((t - w.t_s) / T, 1.0 / T);
        const Jet4 s2 = s * s;
        const Jet4 s4 = s2 * s2;
        const Jet4 integral = s4 * (s2 - 3.0 * s + Jet4::constant(2.5));
        return d_ts + vs * (Jet4::variable(t) - w.t_s) + (vf - vs) * T * integral;
    };
    return {axis(tr.d0.x, tr.v0.x, tr.v_f.x), axis(tr.d0.y, tr.v0.y, tr.v_f.y),
            axis(tr.d0.z, tr.v0.z, tr.v_f.z)};
}

/// Local desired position a_i(t) in inertial coordinates, with derivatives.
inline Jet4Vec3 local_desired_inertial(double t, const TimeWindow& w,
                                       const DeploymentPlan& plan, int agent) {
    const auto [gamma, mu] = angle_schedule(t, w, plan);
    const Basis<Jet4> basis = local_basis(gamma, mu);
    const LocalSchedule loc = local_schedule(t, w, plan, agent);
    return loc.u * basis.c1 + loc.v * basis.c2 + loc.w * basis.c3;
}

/// Full desired state p_i(t) = d(t) + a_i(t), all derivatives through order 4,
/// plus the (constant) desired yaw. Outside the window the local coordinates
/// freeze at the nearer endpoint, so p follows the rigid translation alone.
inline DesiredState desired_state(double t, const DeploymentPlan& plan, const TimeWindow& w,
                                  const RigidTranslation& tr, int agent) {
    DesiredState out;
    out.p = translation_schedule(t, tr, w) + local_desired_inertial(t, w, plan, agent);
    out.psi_d = Jet4::constant(plan.psi_d);
    return out;
}

} // namespace rtd
