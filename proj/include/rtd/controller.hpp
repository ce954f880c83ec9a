#pragma once

#include <array>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "rtd/attitude.hpp"
#include "rtd/errors.hpp"
#include "rtd/geom.hpp"
#include "rtd/quadrotor.hpp"
#include "rtd/trajectory.hpp"

namespace rtd {

/// Flat state z = (r, r_dot, r_ddot, r_dddot, psi, psi_dot).
struct FlatState {
    Vec3d r, r_dot, r_ddot, r_dddot;
    double psi = 0.0, psi_dot = 0.0;
};

/// Ackermann gains for the per-axis integrator chains; the same 4-gain row
/// serves all three position axes, the 2-gain row serves yaw.
struct GainMatrix {
    std::array<double, 4> pos{};  // k0..k3 multiplying (e, e_dot, e_ddot, e_dddot)
    std::array<double, 2> yaw{};  // k0, k1

    Eigen::Matrix<double, 4, 14> full() const {
        Eigen::Matrix<double, 4, 14> k = Eigen::Matrix<double, 4, 14>::Zero();
        for (int axis = 0; axis < 3; ++axis)
            for (int d = 0; d < 4; ++d) k(axis, 3 * d + axis) = pos[d];
        k(3, 12) = yaw[0];
        k(3, 13) = yaw[1];
        return k;
    }
};

/// Input-to-snap decoupling: M1 u + M2 = (r_ddddot, psi_ddot).
struct DecouplingPair {
    Eigen::Matrix4d m1;
    Eigen::Vector4d m2;
    double det_m1 = 0.0;
};

/// Flat-state transform of the 14-state vehicle model.
inline FlatState flat_state(const QuadState& x, const QuadParams& par) {
    const BodyAxes ax = body_axes(x.att);
    const Vec3d omega = angular_velocity_inertial(ax, x.rates);
    FlatState z;
    z.r = x.r;
    z.r_dot = x.v;
    z.r_ddot = (x.p / par.m) * ax.kb - Vec3d{0.0, 0.0, par.g};
    z.r_dddot = (1.0 / par.m) * (x.p_dot * ax.kb + x.p * cross(omega, ax.kb));
    z.psi = x.att.psi;
    z.psi_dot = x.rates.psi_dot;
    return z;
}

inline FlatState desired_flat_state(const DesiredState& d) {
    FlatState z;
    z.r = coeff(d.p, 0);
    z.r_dot = coeff(d.p, 1);
    z.r_ddot = coeff(d.p, 2);
    z.r_dddot = coeff(d.p, 3);
    z.psi = d.psi_d.deriv(0);
    z.psi_dot = d.psi_d.deriv(1);
    return z;
}

/// Closed-form Lie-derivative decoupling, from
///   r_ddddot = (u_p k_b + 2 p_dot (omega x k_b) + p (omega_dot x k_b)
///               + p omega x (omega x k_b)) / m,   omega_dot = B1 u_bar + B2.
/// Singular at zero thrust or +/-90 deg pitch; thrust below 5% of hover is
/// rejected rather than regularized.
inline DecouplingPair decoupling(const QuadState& x, const QuadParams& par) {
    if (std::abs(std::cos(x.att.theta)) < 1e-6)
        throw SingularDecoupling("pitch within 1e-6 of +/-90 deg");
    const double p_min = 0.05 * par.m * par.g;
    if (x.p < p_min)
        throw SingularDecoupling("thrust " + std::to_string(x.p) + " N below floor " +
                                 std::to_string(p_min) + " N");

    const BodyAxes ax = body_axes(x.att);
    const Mat3d b1 = detail::b1_matrix(ax);
    const Vec3d b2 = detail::b2_vector(ax, x.rates);
    const Vec3d omega = angular_velocity_inertial(ax, x.rates);

    DecouplingPair out;
    out.m1.setZero();
    out.m2.setZero();
    const double inv_m = 1.0 / par.m;
    // column 0: d r_ddddot / d u_p
    for (int r = 0; r < 3; ++r) out.m1(r, 0) = ax.kb[r] * inv_m;
    // columns 1..3: (p/m) (B1 col) x k_b
    for (int c = 0; c < 3; ++c) {
        const Vec3d col = cross(b1.col(c), ax.kb) * (x.p * inv_m);
        for (int r = 0; r < 3; ++r) out.m1(r, c + 1) = col[r];
    }
    out.m1(3, 3) = 1.0;  // psi_ddot = u_psi

    const Vec3d drift = (2.0 * x.p_dot) * cross(omega, ax.kb) + x.p * cross(b2, ax.kb) +
                        x.p * cross(omega, cross(omega, ax.kb));
    for (int r = 0; r < 3; ++r) out.m2(r) = drift[r] * inv_m;

    out.det_m1 = out.m1.determinant();
    if (std::abs(out.det_m1) < 1e-9)
        throw SingularDecoupling("det M1 = " + std::to_string(out.det_m1));
    return out;
}

namespace detail {

/// Ascending coefficients a_0..a_{n-1} of prod (s - pole_i) = s^n + a_{n-1} s^{n-1} + ... + a_0.
template <std::size_t N>
std::array<double, N> characteristic_gains(const std::array<double, N>& poles) {
    std::array<double, N + 1> asc{};
    asc[0] = 1.0;
    std::size_t n = 0;
    for (double pole : poles) {
        std::array<double, N + 1> next{};
        for (std::size_t i = 0; i <= n; ++i) {
            next[i + 1] += asc[i];      // s * asc
            next[i] += -pole * asc[i];  // -pole * asc
        }
        asc = next;
        ++n;
    }
    std::array<double, N> gains{};
    for (std::size_t i = 0; i < N; ++i) gains[i] = asc[i];
    return gains;
}

} // namespace detail

/// State-space matrices of the linearized chains, z = (r, r', r'', r''', psi, psi').
inline Eigen::Matrix<double, 14, 14> flat_system_matrix() {
    Eigen::Matrix<double, 14, 14> a = Eigen::Matrix<double, 14, 14>::Zero();
    for (int blk = 0; blk < 3; ++blk)
        for (int axis = 0; axis < 3; ++axis) a(3 * blk + axis, 3 * (blk + 1) + axis) = 1.0;
    a(12, 13) = 1.0;
    return a;
}

inline Eigen::Matrix<double, 14, 4> flat_input_matrix() {
    Eigen::Matrix<double, 14, 4> b = Eigen::Matrix<double, 14, 4>::Zero();
    for (int axis = 0; axis < 3; ++axis) b(9 + axis, axis) = 1.0;
    b(13, 3) = 1.0;
    return b;
}

/// Pole placement on the position 4-chain and yaw 2-chain. The closed loop
/// A - B K is verified Hurwitz by an eigenvalue check at construction.
inline GainMatrix design_gains(const std::array<double, 4>& poles_pos,
                               const std::array<double, 2>& poles_yaw) {
    for (double p : poles_pos)
        if (!(p < 0.0)) throw UnstableRequest("position pole " + std::to_string(p) + " not negative");
    for (double p : poles_yaw)
        if (!(p < 0.0)) throw UnstableRequest("yaw pole " + std::to_string(p) + " not negative");

    GainMatrix k;
    k.pos = detail::characteristic_gains(poles_pos);
    k.yaw = detail::characteristic_gains(poles_yaw);

    const Eigen::Matrix<double, 14, 14> acl =
        flat_system_matrix() - flat_input_matrix() * k.full();
    const Eigen::EigenSolver<Eigen::MatrixXd> eig(acl, false);
    for (int i = 0; i < 14; ++i)
        if (!(eig.eigenvalues()[i].real() < 0.0))
            throw UnstableRequest("closed-loop eigenvalue with non-negative real part");
    return k;
}

/// Feedback-linearizing tracking law: u = M1^{-1} (K (z_d - z) - M2).
inline ControlInput control(const QuadState& x, const FlatState& z_d, const GainMatrix& k,
                            const QuadParams& par) {
    const FlatState z = flat_state(x, par);
    Eigen::Vector4d v;
    for (int axis = 0; axis < 3; ++axis) {
        v[axis] = k.pos[0] * (z_d.r[axis] - z.r[axis]) +
                  k.pos[1] * (z_d.r_dot[axis] - z.r_dot[axis]) +
                  k.pos[2] * (z_d.r_ddot[axis] - z.r_ddot[axis]) +
                  k.pos[3] * (z_d.r_dddot[axis] - z.r_dddot[axis]);
    }
    v[3] = k.yaw[0] * (z_d.psi - z.psi) + k.yaw[1] * (z_d.psi_dot - z.psi_dot);

    const DecouplingPair dec = decoupling(x, par);
    const Eigen::Vector4d u = dec.m1.partialPivLu().solve(v - dec.m2);
    return {u[0], u[1], u[2], u[3]};
}

} // namespace rtd
