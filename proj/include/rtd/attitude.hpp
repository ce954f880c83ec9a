#pragma once

#include <cmath>

#include "rtd/errors.hpp"
#include "rtd/geom.hpp"
#include "rtd/jet.hpp"

namespace rtd {

/// Direction-cosine matrix (orthonormal, det +1).
using Dcm = Mat3d;

/// Deployment-frame Euler angles (first Euler angle identically zero).
struct FrameAngles {
    double gamma = 0.0;
    double mu = 0.0;
};

/// Vehicle 3-2-1 Euler angles.
struct BodyAngles {
    double phi = 0.0;
    double theta = 0.0;
    double psi = 0.0;
};

namespace detail {
template <typename T> inline T sin_of(const T& x) { return sin(x); }
template <typename T> inline T cos_of(const T& x) { return cos(x); }
template <> inline double sin_of<double>(const double& x) { return std::sin(x); }
template <> inline double cos_of<double>(const double& x) { return std::cos(x); }
} // namespace detail

/// 3-2-1 Euler rotation matrix; rows are the rotated frame's axes expressed
/// in the base frame.
template <typename T>
Mat3<T> euler_dcm(const T& x1, const T& x2, const T& x3) {
    const T s1 = detail::sin_of(x1), c1 = detail::cos_of(x1);
    const T s2 = detail::sin_of(x2), c2 = detail::cos_of(x2);
    const T s3 = detail::sin_of(x3), c3 = detail::cos_of(x3);
    Mat3<T> L;
    L(0, 0) = c2 * c3;
    L(0, 1) = c2 * s3;
    L(0, 2) = -s2;
    L(1, 0) = s1 * s2 * c3 - c1 * s3;
    L(1, 1) = s1 * s2 * s3 + c1 * c3;
    L(1, 2) = s1 * c2;
    L(2, 0) = c1 * s2 * c3 + s1 * s3;
    L(2, 1) = c1 * s2 * s3 - s1 * c3;
    L(2, 2) = c1 * c2;
    return L;
}

inline Dcm euler_dcm(const BodyAngles& a) { return euler_dcm(a.phi, a.theta, a.psi); }

/// Deployment-frame rotation matrix for angles (gamma, mu).
template <typename T>
Mat3<T> deployment_rotation(const T& gamma, const T& mu) {
    return euler_dcm(T(0.0), gamma, mu);
}

template <typename T>
struct Basis {
    Vec3<T> c1, c2, c3;
};

/// Deployment-frame basis vectors c1, c2, c3 in inertial coordinates
/// (rows of the deployment rotation matrix).
template <typename T>
Basis<T> local_basis(const T& gamma, const T& mu) {
    const Mat3<T> rd = deployment_rotation(gamma, mu);
    return {rd.row(0), rd.row(1), rd.row(2)};
}

inline Basis<double> local_basis(const FrameAngles& a) { return local_basis(a.gamma, a.mu); }

/// The three intermediate triads of the vehicle's 3-2-1 rotation chain, all
/// in inertial coordinates. Triad 1 is yaw only, triad 2 yaw+pitch, triad b
/// the full body frame; k_b is the thrust direction.
struct BodyAxes {
    Vec3d i1, j1, k1;
    Vec3d i2, j2, k2;
    Vec3d ib, jb, kb;
};

inline BodyAxes body_axes(const BodyAngles& a) {
    const Dcm L1 = euler_dcm(0.0, 0.0, a.psi);
    const Dcm L2 = euler_dcm(0.0, a.theta, a.psi);
    const Dcm Lb = euler_dcm(a.phi, a.theta, a.psi);
    return {L1.row(0), L1.row(1), L1.row(2),
            L2.row(0), L2.row(1), L2.row(2),
            Lb.row(0), Lb.row(1), Lb.row(2)};
}

struct BodyRates {
    double phi_dot = 0.0;
    double theta_dot = 0.0;
    double psi_dot = 0.0;
};

struct EulerRateMap {
    Vec3d omega;  // body-frame angular velocity
    Mat3d gamma;  // maps (phi_dot, theta_dot, psi_dot) to omega; det = cos(theta)
};

/// Euler-rate to body-rate map. omega = Gamma * (phi_dot, theta_dot, psi_dot),
/// equivalently psi_dot*k1 + theta_dot*j2 + phi_dot*ib with the axes expressed
/// in body coordinates. Near-singular as |theta| -> pi/2 (det Gamma = cos theta).
inline EulerRateMap euler_rate_map(const BodyAngles& a, const BodyRates& r) {
    const double sphi = std::sin(a.phi), cphi = std::cos(a.phi);
    const double stheta = std::sin(a.theta), ctheta = std::cos(a.theta);
    Mat3d g;
    g(0, 0) = 1.0; g(0, 1) = 0.0;   g(0, 2) = -stheta;
    g(1, 0) = 0.0; g(1, 1) = cphi;  g(1, 2) = ctheta * sphi;
    g(2, 0) = 0.0; g(2, 1) = -sphi; g(2, 2) = cphi * ctheta;
    const Vec3d rates{r.phi_dot, r.theta_dot, r.psi_dot};
    return {g * rates, g};
}

/// Angular velocity in inertial coordinates: psi_dot*k1 + theta_dot*j2 + phi_dot*ib
/// with the printed inertial triads; this is the frame the rotational-dynamics
/// algebra (B1/B2, torque, rotor solve) lives in.
inline Vec3d angular_velocity_inertial(const BodyAxes& ax, const BodyRates& r) {
    return r.phi_dot * ax.ib + r.theta_dot * ax.j2 + r.psi_dot * ax.k1;
}

} // namespace rtd
