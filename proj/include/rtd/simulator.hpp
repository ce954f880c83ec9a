#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "rtd/controller.hpp"
#include "rtd/errors.hpp"
#include "rtd/quadrotor.hpp"
#include "rtd/scenario.hpp"
#include "rtd/trajectory.hpp"

namespace rtd {

namespace detail {

using State14 = std::array<double, 14>;

inline State14 pack(const QuadState& x) {
    return {x.r.x, x.r.y, x.r.z, x.v.x, x.v.y, x.v.z,
            x.att.phi, x.att.theta, x.att.psi,
            x.rates.phi_dot, x.rates.theta_dot, x.rates.psi_dot,
            x.p, x.p_dot};
}

inline QuadState unpack(const State14& a) {
    QuadState x;
    x.r = {a[0], a[1], a[2]};
    x.v = {a[3], a[4], a[5]};
    x.att = {a[6], a[7], a[8]};
    x.rates = {a[9], a[10], a[11]};
    x.p = a[12];
    x.p_dot = a[13];
    return x;
}

} // namespace detail

/// One classical RK4 step of the vehicle dynamics under zero-order-hold input.
inline QuadState rk4_step(const QuadState& x, const ControlInput& u, double dt,
                          const QuadParams& par) {
    auto rhs = [&](const detail::State14& s) {
        return detail::pack(dynamics_rhs(detail::unpack(s), u, par));
    };
    const detail::State14 s0 = detail::pack(x);
    const detail::State14 k1 = rhs(s0);
    detail::State14 tmp;
    for (int i = 0; i < 14; ++i) tmp[i] = s0[i] + 0.5 * dt * k1[i];
    const detail::State14 k2 = rhs(tmp);
    for (int i = 0; i < 14; ++i) tmp[i] = s0[i] + 0.5 * dt * k2[i];
    const detail::State14 k3 = rhs(tmp);
    for (int i = 0; i < 14; ++i) tmp[i] = s0[i] + dt * k3[i];
    const detail::State14 k4 = rhs(tmp);
    detail::State14 s1;
    for (int i = 0; i < 14; ++i)
        s1[i] = s0[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    const QuadState next = detail::unpack(s1);
    if (!isfinite(next)) throw NonFiniteState("state became non-finite during integration");
    return next;
}

struct SafetyLimits {
    double varpi_max = 0.0;  // rad/s, condition on rotor speeds
    double delta = 0.0;      // m, tracking-error bound
    double epsilon = 0.0;    // m, vehicle radius (separation needs 2 epsilon)
};

struct Extremum {
    double value = 0.0;
    double t = 0.0;
    int agent = -1;
    int other = -1;  // rotor index or second agent, depending on the extremum
};

/// Running extrema of the three safety conditions plus pass flags.
struct SafetyReport {
    SafetyLimits limits;
    Extremum max_rotor_speed;       // other = rotor index
    Extremum max_tracking_error;
    Extremum min_pairwise_distance; // agent/other = the closest pair
    bool pass_rotor = false;     // |w_ij| <= varpi_max throughout
    bool pass_distance = false;  // ||r_i - r_j|| >= 2 epsilon throughout
    bool pass_tracking = false;  // ||r_i - p_i|| <= delta throughout
    double rotor_margin = 0.0;
    double distance_margin = 0.0;
    double tracking_margin = 0.0;
    bool all_pass() const { return pass_rotor && pass_distance && pass_tracking; }
};

/// Incremental evaluator of the safety conditions; feed it every step, read
/// the report at the end. All comparisons are non-strict at the limits.
class SafetyMonitor {
  public:
    explicit SafetyMonitor(const SafetyLimits& limits) : limits_(limits) {
        report_.limits = limits;
        report_.max_rotor_speed.value = 0.0;
        report_.max_tracking_error.value = 0.0;
        report_.min_pairwise_distance.value = std::numeric_limits<double>::infinity();
    }

    void update(double t, const std::vector<QuadState>& states,
                const std::vector<RotorSpeeds>& rotors, const std::vector<Vec3d>& desired) {
        const int n = static_cast<int>(states.size());
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < 4; ++j) {
                const double w = std::abs(rotors[i].w[j]);
                if (w > report_.max_rotor_speed.value)
                    report_.max_rotor_speed = {w, t, i, j};
            }
            const double err = norm(states[i].r - desired[i]);
            if (err > report_.max_tracking_error.value)
                report_.max_tracking_error = {err, t, i, -1};
        }
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                const double d = norm(states[i].r - states[j].r);
                if (d < report_.min_pairwise_distance.value)
                    report_.min_pairwise_distance = {d, t, i, j};
            }
    }

    SafetyReport report() const {
        SafetyReport r = report_;
        r.rotor_margin = limits_.varpi_max - r.max_rotor_speed.value;
        r.tracking_margin = limits_.delta - r.max_tracking_error.value;
        r.distance_margin = r.min_pairwise_distance.value - 2.0 * limits_.epsilon;
        r.pass_rotor = r.rotor_margin >= 0.0;
        r.pass_tracking = r.tracking_margin >= 0.0;
        r.pass_distance = r.distance_margin >= 0.0;
        return r;
    }

  private:
    SafetyLimits limits_;
    SafetyReport report_;
};

struct AgentRecord {
    QuadState state;
    ControlInput input;
    RotorSpeeds rotors;
    Vec3d desired;
};

struct LogRecord {
    double t = 0.0;
    std::vector<AgentRecord> agents;
};

struct TrajectoryLog {
    std::vector<LogRecord> records;
    bool empty() const { return records.empty(); }
};

struct SimResult {
    TrajectoryLog log;
    SafetyReport report;
    bool failed = false;          // numerical failure mid-run (safety violations
    std::string failure;          // are monitor-only and do not abort)
    double failure_time = 0.0;
};

/// Closed-loop fleet simulation: per step and agent, desired state -> control
/// -> rotor solve -> RK4. The monitor runs every step; records honor the
/// configured stride (the final step is always recorded).
inline SimResult run_closed_loop(const Scenario& scenario, const DeploymentPlan& plan,
                                 const SimConfig& sim) {
    const QuadParams& par = scenario.quad;
    const GainMatrix gains = design_gains(scenario.poles.pos, scenario.poles.yaw);
    const int n = plan.agent_count();
    const double t0 = sim.t_start;
    const double t1 = sim.t_end;
    const double dt = sim.dt;
    const long n_steps = std::lround((t1 - t0) / dt);

    SimResult out;
    SafetyMonitor monitor({par.varpi_max, scenario.delta, scenario.epsilon});

    // start on the desired trajectory: level attitude, hover-consistent thrust
    std::vector<QuadState> states(n);
    std::vector<RotorSpeeds> rotors(n);
    for (int i = 0; i < n; ++i) {
        const DesiredState d = desired_state(t0, plan, scenario.window, scenario.translation, i);
        QuadState& x = states[i];
        x.r = coeff(d.p, 0);
        x.v = coeff(d.p, 1);
        x.att = {0.0, 0.0, plan.psi_d};
        x.rates = {};
        x.p = par.hover_thrust();
        x.p_dot = 0.0;
        rotors[i].w.fill(par.hover_rotor_speed());
    }

    std::vector<ControlInput> inputs(n);
    std::vector<Vec3d> desired(n);
    out.log.records.reserve(static_cast<std::size_t>(n_steps / sim.record_stride + 2));

    for (long step = 0; step <= n_steps; ++step) {
        const double t = t0 + step * dt;
        try {
            for (int i = 0; i < n; ++i) {
                const DesiredState d =
                    desired_state(t, plan, scenario.window, scenario.translation, i);
                desired[i] = coeff(d.p, 0);
                inputs[i] = control(states[i], desired_flat_state(d), gains, par);
                rotors[i] = rotor_speeds_from_control(states[i], inputs[i], par, rotors[i]);
            }
        } catch (const Error& e) {
            out.failed = true;
            out.failure = e.what();
            out.failure_time = t;
            break;
        }

        monitor.update(t, states, rotors, desired);
        if (step % sim.record_stride == 0 || step == n_steps) {
            LogRecord rec;
            rec.t = t;
            rec.agents.resize(n);
            for (int i = 0; i < n; ++i) rec.agents[i] = {states[i], inputs[i], rotors[i], desired[i]};
            out.log.records.push_back(std::move(rec));
        }
        if (step == n_steps) break;

        try {
            for (int i = 0; i < n; ++i) states[i] = rk4_step(states[i], inputs[i], dt, par);
        } catch (const Error& e) {
            out.failed = true;
            out.failure = e.what();
            out.failure_time = t;
            break;
        }
    }

    out.report = monitor.report();
    return out;
}

inline SimConfig sim_config_for(const Scenario& s) {
    SimConfig c = s.sim;
    if (c.t_end <= c.t_start) {
        c.t_start = s.window.t_s;
        c.t_end = s.window.t_f;
    }
    return c;
}

} // namespace rtd
