#pragma once

#include <array>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "rtd/attitude.hpp"
#include "rtd/errors.hpp"
#include "rtd/geom.hpp"

namespace rtd {

/// Vehicle parameters (Table I defaults are applied at the scenario boundary).
struct QuadParams {
    double m = 0.5;          // kg
    double g = 9.81;         // m/s^2
    double l = 0.25;         // m, arm length
    double jx = 0.0196;      // kg m^2
    double jy = 0.0196;      // kg m^2
    double jz = 0.0264;      // kg m^2
    double jr = 3.357e-5;    // kg m^2, rotor inertia
    double b = 3e-5;         // N s^2/rad^2, thrust coefficient
    double k = 1.1e-6;       // N s^2/rad^2, drag-torque coefficient
    double varpi_max = 215;  // rad/s

    double hover_thrust() const { return m * g; }
    double hover_rotor_speed() const { return std::sqrt(m * g / (4.0 * b)); }
};

/// 14-dimensional vehicle state.
struct QuadState {
    Vec3d r{};        // position, m
    Vec3d v{};        // velocity, m/s
    BodyAngles att{};   // roll, pitch, yaw
    BodyRates rates{};  // Euler-angle rates
    double p = 0.0;     // thrust magnitude, N
    double p_dot = 0.0; // N/s
};

/// Control input: thrust acceleration and Euler-angle accelerations.
struct ControlInput {
    double u_p = 0.0;      // N/s^2
    double u_phi = 0.0;    // rad/s^2
    double u_theta = 0.0;  // rad/s^2
    double u_psi = 0.0;    // rad/s^2
};

struct RotorSpeeds {
    std::array<double, 4> w{};  // rad/s, each >= 0

    double max_abs() const {
        return std::max(std::max(std::abs(w[0]), std::abs(w[1])),
                        std::max(std::abs(w[2]), std::abs(w[3])));
    }
    /// Residual speed driving the gyroscopic term: -w1 + w2 - w3 + w4.
    double residual_speed() const { return -w[0] + w[1] - w[2] + w[3]; }
};

inline bool isfinite(const QuadState& x) {
    return isfinite(x.r) && isfinite(x.v) && std::isfinite(x.att.phi) &&
           std::isfinite(x.att.theta) && std::isfinite(x.att.psi) &&
           std::isfinite(x.rates.phi_dot) && std::isfinite(x.rates.theta_dot) &&
           std::isfinite(x.rates.psi_dot) && std::isfinite(x.p) && std::isfinite(x.p_dot);
}

/// State derivative of the 14-state model: double-integrator attitude and
/// thrust channels, translational acceleration (p/m) k_b - g e3.
inline QuadState dynamics_rhs(const QuadState& x, const ControlInput& u, const QuadParams& par) {
    const BodyAxes ax = body_axes(x.att);
    QuadState dx;
    dx.r = x.v;
    dx.v = (x.p / par.m) * ax.kb - Vec3d{0.0, 0.0, par.g};
    dx.att = {x.rates.phi_dot, x.rates.theta_dot, x.rates.psi_dot};
    dx.rates = {u.u_phi, u.u_theta, u.u_psi};
    dx.p = x.p_dot;
    dx.p_dot = u.u_p;
    return dx;
}

/// Angular acceleration decomposition: omega_dot = B1 (u_phi, u_theta, u_psi) + B2,
/// with B1 = [i_b j2 k1] (inertial columns, det = cos theta) and B2 collecting
/// the rate products from the rotating intermediate axes.
struct AngularAccel {
    Vec3d omega_dot;
    Mat3d b1;
    Vec3d b2;
};

namespace detail {

inline Mat3d b1_matrix(const BodyAxes& ax) {
    Mat3d b1;
    for (int r = 0; r < 3; ++r) {
        b1(r, 0) = ax.ib[r];
        b1(r, 1) = ax.j2[r];
        b1(r, 2) = ax.k1[r];
    }
    return b1;
}

inline Vec3d b2_vector(const BodyAxes& ax, const BodyRates& rt) {
    const Vec3d omega12 = rt.psi_dot * ax.k1 + rt.theta_dot * ax.j2;
    return rt.theta_dot * rt.psi_dot * cross(ax.k1, ax.j1) +
           rt.phi_dot * cross(omega12, ax.i2);
}

} // namespace detail

inline AngularAccel angular_accel(const QuadState& x, const ControlInput& u) {
    if (std::abs(std::cos(x.att.theta)) < 1e-6)
        throw NearSingularAttitude("pitch within 1e-6 of +/-90 deg, B1 not invertible");
    const BodyAxes ax = body_axes(x.att);
    AngularAccel out;
    out.b1 = detail::b1_matrix(ax);
    out.b2 = detail::b2_vector(ax, x.rates);
    out.omega_dot = out.b1 * Vec3d{u.u_phi, u.u_theta, u.u_psi} + out.b2;
    return out;
}

/// Thrust and torques from squared rotor speeds (the printed mixing matrix).
struct ThrustTorque {
    double p = 0.0;
    double tau_phi = 0.0, tau_theta = 0.0, tau_psi = 0.0;
};

inline ThrustTorque mixer_forward(const RotorSpeeds& s, const QuadParams& par) {
    std::array<double, 4> q{};
    for (int j = 0; j < 4; ++j) q[j] = s.w[j] * s.w[j];
    ThrustTorque out;
    out.p = par.b * (q[0] + q[1] + q[2] + q[3]);
    out.tau_phi = par.b * par.l * (q[3] - q[1]);
    out.tau_theta = par.b * par.l * (q[2] - q[0]);
    out.tau_psi = par.k * (-q[0] + q[1] - q[2] + q[3]);
    return out;
}

/// Squared speeds from thrust and torques (inverse of the mixing matrix).
inline std::array<double, 4> mixer_inverse_squares(const ThrustTorque& tt,
                                                   const QuadParams& par) {
    const double p4 = tt.p / (4.0 * par.b);
    const double fphi = tt.tau_phi / (2.0 * par.b * par.l);
    const double ftheta = tt.tau_theta / (2.0 * par.b * par.l);
    const double fpsi = tt.tau_psi / (4.0 * par.k);
    return {p4 - ftheta - fpsi, p4 - fphi + fpsi, p4 + ftheta - fpsi, p4 + fphi + fpsi};
}

namespace detail {

inline Eigen::Matrix4d h1_matrix(const Mat3d& b1, const QuadParams& par) {
    Eigen::Matrix4d mix;
    mix << par.b, par.b, par.b, par.b,
           0.0, -par.b * par.l, 0.0, par.b * par.l,
           -par.b * par.l, 0.0, par.b * par.l, 0.0,
           -par.k, par.k, -par.k, par.k;
    Eigen::Matrix4d blk = Eigen::Matrix4d::Zero();
    blk(0, 0) = 1.0;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) blk(r + 1, c + 1) = b1(r, c);
    return blk * mix;
}

} // namespace detail

/// Recover non-negative rotor speeds satisfying the quadratic system
/// H1 w^2 + H2 w + H3 = 0 (thrust row uses the current thrust state; the
/// gyroscopic coupling enters through H2). Damped fixed point seeded by the
/// gyroscopic-free solve, Newton fallback; the iteration targets a 1e-12
/// normalized residual, comfortably inside the 1e-9 contract.
inline RotorSpeeds rotor_speeds_from_control(const QuadState& x, const ControlInput& u,
                                             const QuadParams& par, const RotorSpeeds& prev) {
    if (x.p < 0.0)
        throw InfeasibleThrust("commanded thrust state is negative: p = " + std::to_string(x.p));
    if (std::abs(std::cos(x.att.theta)) < 1e-6)
        throw NearSingularAttitude("pitch within 1e-6 of +/-90 deg, B1 not invertible");

    const BodyAxes ax = body_axes(x.att);
    const Mat3d b1 = detail::b1_matrix(ax);
    const Vec3d b2 = detail::b2_vector(ax, x.rates);
    const Vec3d omega = angular_velocity_inertial(ax, x.rates);
    const Vec3d j_omega{par.jx * omega.x, par.jy * omega.y, par.jz * omega.z};
    const Vec3d coriolis = cross(omega, j_omega);
    const Vec3d gyro_axis = cross(omega, ax.kb);  // omega x k_b

    // -H3 = [p; J B1 u_bar + J B2 + omega x (J omega)]
    const Vec3d b1u = b1 * Vec3d{u.u_phi, u.u_theta, u.u_psi};
    const Vec3d rot_rhs{par.jx * (b1u.x + b2.x) + coriolis.x,
                        par.jy * (b1u.y + b2.y) + coriolis.y,
                        par.jz * (b1u.z + b2.z) + coriolis.z};
    Eigen::Vector4d rhs0;
    rhs0 << x.p, rot_rhs.x, rot_rhs.y, rot_rhs.z;

    const Eigen::Matrix4d h1 = detail::h1_matrix(b1, par);
    Eigen::Matrix4d h2 = Eigen::Matrix4d::Zero();
    for (int c = 0; c < 4; ++c) {
        const double sgn = (c % 2 == 0) ? 1.0 : -1.0;
        h2(1, c) = par.jr * sgn * gyro_axis.x;
        h2(2, c) = par.jr * sgn * gyro_axis.y;
        h2(3, c) = par.jr * sgn * gyro_axis.z;
    }
    const Eigen::Vector4d h3 = -rhs0;
    const double h3_scale = std::max(1.0, h3.norm());

    const Eigen::PartialPivLU<Eigen::Matrix4d> h1_lu(h1);

    auto clamp_squares = [](Eigen::Vector4d& y) {
        for (int j = 0; j < 4; ++j) {
            if (y[j] < 0.0 && y[j] >= -1e-9) y[j] = 0.0;
        }
        return y.minCoeff() >= 0.0;
    };
    auto residual_ok = [&](const Eigen::Vector4d& w) {
        Eigen::Vector4d sq = w.array().square();
        const Eigen::Vector4d res = h1 * sq + h2 * w + h3;
        return (res.cwiseAbs().maxCoeff() / h3_scale) <= 1e-12;
    };

    // gyroscopic-free seed
    Eigen::Vector4d y = h1_lu.solve(rhs0);
    const bool seed_ok = clamp_squares(y);
    Eigen::Vector4d w;
    if (seed_ok) {
        w = y.array().sqrt();
    } else {
        w << prev.w[0], prev.w[1], prev.w[2], prev.w[3];
    }

    // fixed point: w^2 <- H1^{-1} (rhs0 - H2 w)
    for (int it = 0; it < 12; ++it) {
        Eigen::Vector4d y_next = h1_lu.solve(rhs0 - h2 * w);
        if (!clamp_squares(y_next)) break;
        w = y_next.array().sqrt();
        if (residual_ok(w)) return {{w[0], w[1], w[2], w[3]}};
    }

    // Newton on F(w) = H1 (w . w) + H2 w + H3
    if (!seed_ok) {
        // restart from the magnitude of the unconstrained seed
        for (int j = 0; j < 4; ++j) w[j] = std::sqrt(std::abs(y[j]));
    }
    for (int it = 0; it < 50; ++it) {
        const Eigen::Vector4d sq = w.array().square();
        const Eigen::Vector4d res = h1 * sq + h2 * w + h3;
        if ((res.cwiseAbs().maxCoeff() / h3_scale) <= 1e-12) {
            if (w.minCoeff() < -1e-9)
                throw InfeasibleThrust("rotor-speed solution has negative components");
            for (int j = 0; j < 4; ++j) w[j] = std::max(w[j], 0.0);
            return {{w[0], w[1], w[2], w[3]}};
        }
        Eigen::Matrix4d jac = 2.0 * h1 * w.asDiagonal();
        jac += h2;
        const Eigen::Vector4d step = jac.partialPivLu().solve(res);
        if (!step.allFinite()) break;
        w -= step;
    }
    if (!seed_ok)
        throw InfeasibleThrust("gyroscopic-free solve yields negative squared speeds");
    throw NoConvergence("rotor-speed iteration stalled above the residual target");
}

/// Torque consistent with the rotor solve: T = B1 (tau_phi, tau_theta, tau_psi).
inline Vec3d torque_inertial(const RotorSpeeds& s, const QuadState& x, const QuadParams& par) {
    const ThrustTorque tt = mixer_forward(s, par);
    const Mat3d b1 = detail::b1_matrix(body_axes(x.att));
    return b1 * Vec3d{tt.tau_phi, tt.tau_theta, tt.tau_psi};
}

} // namespace rtd
