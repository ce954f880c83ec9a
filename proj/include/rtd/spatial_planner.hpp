#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "rtd/attitude.hpp"
#include "rtd/errors.hpp"
#include "rtd/geom.hpp"

namespace rtd {

enum class FrameTag { InertialGlobal, Local };

/// A set of agent positions, all in one frame.
struct Formation {
    std::vector<Vec3d> positions;
    FrameTag frame = FrameTag::InertialGlobal;
};

/// Agents sorted by their u-coordinate along c1. b[k] is the id of the agent
/// with order number k; b.front() and b.back() are the leaders.
struct Ordering {
    std::vector<int> b;
    int leader_low() const { return b.front(); }
    int leader_high() const { return b.back(); }
    bool is_leader(int id) const { return id == b.front() || id == b.back(); }
};

/// Normalized station of each agent along the leader axis, at both endpoints.
struct WeightTable {
    std::vector<double> beta_s;
    std::vector<double> beta_f;
};

/// Separation certificate for the homogeneous coordination axis.
struct Certificate {
    double d_min = 0.0;
    double beta_star = 0.0;
    double margin = 0.0;  // d_min * beta_star - 2 (delta + epsilon)
    bool feasible = false;
};

struct LocalCoord {
    double u = 0.0, v = 0.0, w = 0.0;
};

struct OrientationResult {
    FrameAngles angles;
    double objective = 0.0;  // attained min separation along c1
};

/// Certified deployment plan: frame angle endpoints, local coordinates of
/// both formations, agent ordering, reference weights, and the certificate.
struct DeploymentPlan {
    FrameAngles angles_s, angles_f;
    double objective_s = 0.0, objective_f = 0.0;
    std::vector<LocalCoord> local_s, local_f;
    Ordering ordering;
    WeightTable weights;
    Certificate certificate;
    double delta = 0.0, epsilon = 0.0;
    double psi_d = 0.0;  // constant desired yaw
    std::string scenario_hash;

    int agent_count() const { return static_cast<int>(local_s.size()); }
};

namespace detail {

inline Vec3d c1_direction(double gamma, double mu) {
    const double cg = std::cos(gamma), sg = std::sin(gamma);
    return {cg * std::cos(mu), cg * std::sin(mu), -sg};
}

/// min_{i != h} |(p_i - p_h) . c1|, computed as the min adjacent gap of the
/// sorted projections.
inline double min_gap_along(const std::vector<Vec3d>& pts, const Vec3d& c1,
                            std::vector<double>& buf) {
    buf.clear();
    for (const Vec3d& p : pts) buf.push_back(dot(p, c1));
    std::sort(buf.begin(), buf.end());
    double g = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < buf.size(); ++i) g = std::min(g, buf[i] - buf[i - 1]);
    return g;
}

/// Map an arbitrary (gamma, mu) to the canonical representative in [0, pi)^2
/// carrying the same +/- c1 direction line. Directions within 1e-6 of the
/// horizontal plane or of the vertical axis snap onto them; the objective is
/// flat there at double precision and the snap keeps equivalent formations
/// on one representative.
inline FrameAngles canonicalize(double gamma, double mu) {
    Vec3d v = c1_direction(gamma, mu);
    constexpr double half_pi = 1.5707963267948966;
    constexpr double pi = 3.141592653589793;
    const double rho = std::hypot(v.x, v.y);
    if (rho < 1e-6) return {half_pi, 0.0};  // vertical axis: mu immaterial
    if (std::abs(v.z) < 1e-6) v.z = 0.0;    // in-plane direction
    if (v.z > 0.0 || (v.z == 0.0 && (v.y < 0.0 || (v.y == 0.0 && v.x < 0.0)))) v = -v;
    const double sg = std::clamp(-v.z, 0.0, 1.0);
    const double gamma_acute = std::asin(sg);
    // Pick the sign of cos(gamma) so that sin(mu) >= 0, keeping mu in [0, pi).
    const bool cos_gamma_pos = v.y > 0.0 || (v.y == 0.0 && v.x > 0.0);
    const double g = cos_gamma_pos ? gamma_acute : pi - gamma_acute;
    double m = cos_gamma_pos ? std::atan2(v.y, v.x) : std::atan2(-v.y, -v.x);
    if (m < 0.0) m = 0.0;
    return {g + 0.0, m + 0.0};  // normalize negative zeros
}

/// Deterministic Nelder-Mead on f (to be maximized), seeded around x0.
template <typename F>
inline void nelder_mead_max(const F& f, double x0, double y0, double step,
                            double& best_x, double& best_y, double& best_val) {
    struct P {
        double x, y, v;
    };
    std::array<P, 3> s{{{x0, y0, f(x0, y0)},
                        {x0 + step, y0, f(x0 + step, y0)},
                        {x0, y0 + step, f(x0, y0 + step)}}};
    auto order = [&s] {
        std::sort(s.begin(), s.end(), [](const P& a, const P& b) { return a.v > b.v; });
    };
    order();
    for (int it = 0; it < 400; ++it) {
        const double diam = std::max({std::abs(s[0].x - s[1].x), std::abs(s[0].x - s[2].x),
                                      std::abs(s[0].y - s[1].y), std::abs(s[0].y - s[2].y)});
        if (diam < 1e-12) break;
        const double cx = 0.5 * (s[0].x + s[1].x), cy = 0.5 * (s[0].y + s[1].y);
        const double rx = cx + (cx - s[2].x), ry = cy + (cy - s[2].y);
        const double rv = f(rx, ry);
        if (rv > s[0].v) {
            const double ex = cx + 2.0 * (cx - s[2].x), ey = cy + 2.0 * (cy - s[2].y);
            const double ev = f(ex, ey);
            s[2] = ev > rv ? P{ex, ey, ev} : P{rx, ry, rv};
        } else if (rv > s[1].v) {
            s[2] = {rx, ry, rv};
        } else {
            const double kx = cx + 0.5 * (s[2].x - cx), ky = cy + 0.5 * (s[2].y - cy);
            const double kv = f(kx, ky);
            if (kv > s[2].v) {
                s[2] = {kx, ky, kv};
            } else {
                for (int i = 1; i < 3; ++i) {
                    s[i].x = s[0].x + 0.5 * (s[i].x - s[0].x);
                    s[i].y = s[0].y + 0.5 * (s[i].y - s[0].y);
                    s[i].v = f(s[i].x, s[i].y);
                }
            }
        }
        order();
    }
    best_x = s[0].x;
    best_y = s[0].y;
    best_val = s[0].v;
}

} // namespace detail

/// Frame-angle optimization (the minimum separation distance along c1 is
/// maximized over (gamma, mu) in [0, pi)^2): dense grid scan followed by
/// Nelder-Mead polish from the best cell. Deterministic; ties between grid
/// cells within 1e-9 of the best objective break toward the lexicographically
/// smallest (gamma, mu).
inline OrientationResult optimize_orientation(const Formation& formation, int grid_n = 721) {
    const std::vector<Vec3d>& pts = formation.positions;
    if (pts.size() < 2) throw DegenerateFormation("orientation optimization needs at least 2 agents");
    constexpr double pi = 3.141592653589793;
    const int n = std::max(grid_n, 8);
    const double step = pi / n;

    std::vector<double> buf;
    buf.reserve(pts.size());
    auto objective = [&](double gamma, double mu) {
        return detail::min_gap_along(pts, detail::c1_direction(gamma, mu), buf);
    };

    // Full scan; objectives kept so that the tie-break can run against the
    // true maximum afterwards.
    std::vector<double> vals(static_cast<std::size_t>(n) * n);
    double vmax = -1.0;
    for (int i = 0; i < n; ++i) {
        const double gamma = i * step;
        const double cg = std::cos(gamma), sg = std::sin(gamma);
        for (int j = 0; j < n; ++j) {
            const double mu = j * step;
            const Vec3d c1{cg * std::cos(mu), cg * std::sin(mu), -sg};
            const double v = detail::min_gap_along(pts, c1, buf);
            vals[static_cast<std::size_t>(i) * n + j] = v;
            vmax = std::max(vmax, v);
        }
    }
    int bi = 0, bj = 0;
    [&] {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (vals[static_cast<std::size_t>(i) * n + j] >= vmax - 1e-9) {
                    bi = i;
                    bj = j;
                    return;
                }
    }();

    double gx, gy, gv;
    detail::nelder_mead_max(objective, bi * step, bj * step, step, gx, gy, gv);

    OrientationResult out;
    if (gv >= vmax) {
        out.angles = detail::canonicalize(gx, gy);
        out.objective = objective(out.angles.gamma, out.angles.mu);
    } else {  // polish regressed (flat plateau); keep the grid cell
        out.angles = detail::canonicalize(bi * step, bj * step);
        out.objective = objective(out.angles.gamma, out.angles.mu);
    }
    if (!(out.objective > 1e-9))
        throw DegenerateFormation("separation objective vanishes at the optimum");
    return out;
}

/// Sort agents by u-coordinate. Rejects near-ties (gap < 1e-9 m), where the
/// ordering is undefined and the certificate margin would be zero anyway.
inline Ordering order_agents(const std::vector<double>& u) {
    if (u.size() < 2) throw DegenerateFormation("ordering needs at least 2 agents");
    Ordering ord;
    ord.b.resize(u.size());
    std::iota(ord.b.begin(), ord.b.end(), 0);
    std::sort(ord.b.begin(), ord.b.end(), [&u](int a, int b) { return u[a] < u[b]; });
    for (std::size_t k = 1; k < ord.b.size(); ++k) {
        const double gap = u[ord.b[k]] - u[ord.b[k - 1]];
        if (gap < 1e-9)
            throw TieError("u-coordinates of agents " + std::to_string(ord.b[k - 1]) + " and " +
                           std::to_string(ord.b[k]) + " differ by less than 1e-9 m");
    }
    return ord;
}

/// Reference weights: beta = (u - u_b1) / (u_bN - u_b1) at each endpoint.
/// The same permutation must sort both endpoint configurations.
inline WeightTable reference_weights(const std::vector<double>& u_s,
                                     const std::vector<double>& u_f, const Ordering& ordering) {
    const std::size_t n = u_s.size();
    if (u_f.size() != n || ordering.b.size() != n)
        throw OrderingMismatch("u_s, u_f and ordering sizes disagree");
    for (std::size_t k = 1; k < n; ++k) {
        if (!(u_s[ordering.b[k]] > u_s[ordering.b[k - 1]]))
            throw OrderingMismatch("ordering does not sort the initial configuration");
        if (!(u_f[ordering.b[k]] > u_f[ordering.b[k - 1]]))
            throw OrderingMismatch("final configuration is not sorted by the initial ordering");
    }
    const int b1 = ordering.leader_low(), bN = ordering.leader_high();
    WeightTable w;
    w.beta_s.resize(n);
    w.beta_f.resize(n);
    const double span_s = u_s[bN] - u_s[b1];
    const double span_f = u_f[bN] - u_f[b1];
    for (std::size_t i = 0; i < n; ++i) {
        w.beta_s[i] = (u_s[i] - u_s[b1]) / span_s;
        w.beta_f[i] = (u_f[i] - u_f[b1]) / span_f;
    }
    return w;
}

/// Separation certificate: d_min = min of the two leader spans, beta* the
/// smallest pairwise reference-weight gap at either endpoint; feasible iff
/// d_min * beta* >= 2 (delta + epsilon).
inline Certificate certify(const std::vector<double>& u_s, const std::vector<double>& u_f,
                           const WeightTable& weights, double delta, double epsilon) {
    const auto [lo_s, hi_s] = std::minmax_element(u_s.begin(), u_s.end());
    const auto [lo_f, hi_f] = std::minmax_element(u_f.begin(), u_f.end());
    Certificate c;
    c.d_min = std::min(*hi_s - *lo_s, *hi_f - *lo_f);

    auto min_adjacent_gap = [](std::vector<double> b) {
        std::sort(b.begin(), b.end());
        double g = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < b.size(); ++i) g = std::min(g, b[i] - b[i - 1]);
        return g;
    };
    c.beta_star =
        std::min(min_adjacent_gap(weights.beta_s), min_adjacent_gap(weights.beta_f));
    c.margin = c.d_min * c.beta_star - 2.0 * (delta + epsilon);
    c.feasible = c.margin >= 0.0;
    return c;
}

/// Local coordinates of an inertial position relative to the frame origin d:
/// (u, v, w) = rows of R_D applied to (p - d).
inline LocalCoord to_local(const Vec3d& p, const Vec3d& d, const Basis<double>& basis) {
    const Vec3d q = p - d;
    return {dot(q, basis.c1), dot(q, basis.c2), dot(q, basis.c3)};
}

inline Vec3d from_local(const LocalCoord& a, const Vec3d& d, const Basis<double>& basis) {
    return d + a.u * basis.c1 + a.v * basis.c2 + a.w * basis.c3;
}

/// Assemble a plan from inertial endpoint formations and the frame origins at
/// t_s and t_f. Throws InfeasiblePlan when the certificate fails, unless
/// allow_uncertified is set.
inline DeploymentPlan plan_formations(const std::vector<Vec3d>& initial,
                                      const std::vector<Vec3d>& final_, const Vec3d& d_s,
                                      const Vec3d& d_f, double delta, double epsilon,
                                      int grid_n = 721, bool allow_uncertified = false) {
    DeploymentPlan plan;
    const OrientationResult os = optimize_orientation({initial, FrameTag::InertialGlobal}, grid_n);
    const OrientationResult of = optimize_orientation({final_, FrameTag::InertialGlobal}, grid_n);
    plan.angles_s = os.angles;
    plan.angles_f = of.angles;
    plan.objective_s = os.objective;
    plan.objective_f = of.objective;

    const Basis<double> bs = local_basis(plan.angles_s);
    const Basis<double> bf = local_basis(plan.angles_f);
    const std::size_t n = initial.size();
    plan.local_s.resize(n);
    plan.local_f.resize(n);
    std::vector<double> u_s(n), u_f(n);
    for (std::size_t i = 0; i < n; ++i) {
        plan.local_s[i] = to_local(initial[i], d_s, bs);
        plan.local_f[i] = to_local(final_[i], d_f, bf);
        u_s[i] = plan.local_s[i].u;
        u_f[i] = plan.local_f[i].u;
    }
    plan.ordering = order_agents(u_s);
    plan.weights = reference_weights(u_s, u_f, plan.ordering);
    plan.certificate = certify(u_s, u_f, plan.weights, delta, epsilon);
    plan.delta = delta;
    plan.epsilon = epsilon;
    if (!plan.certificate.feasible && !allow_uncertified)
        throw InfeasiblePlan("separation certificate infeasible: margin = " +
                             std::to_string(plan.certificate.margin) + " m");
    return plan;
}

} // namespace rtd
