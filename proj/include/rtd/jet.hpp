#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace rtd {

/// Value together with its time derivatives up to order 4.
///
/// c[k] holds d^k f / dt^k (derivative values, not Taylor coefficients).
/// Arithmetic propagates derivatives exactly by the Leibniz rule, so any
/// quantity assembled from Jet4s carries machine-precision derivatives.
struct Jet4 {
    static constexpr int order = 4;
    std::array<double, 5> c{};

    constexpr Jet4() = default;
    constexpr explicit Jet4(double value) : c{value, 0.0, 0.0, 0.0, 0.0} {}
    constexpr Jet4(double c0, double c1, double c2, double c3, double c4)
        : c{c0, c1, c2, c3, c4} {}

    static constexpr Jet4 constant(double v) { return Jet4{v}; }

    /// The running time variable: value t, unit rate.
    static constexpr Jet4 variable(double t) { return Jet4{t, 1.0, 0.0, 0.0, 0.0}; }

    /// Affine function of time, value v with constant rate dv (e.g. the
    /// normalized blend argument s = (t - t_s)/(t_f - t_s) has dv = 1/T).
    static constexpr Jet4 affine(double v, double dv) { return Jet4{v, dv, 0.0, 0.0, 0.0}; }

    constexpr double value() const { return c[0]; }
    constexpr double deriv(int k) const { return c[static_cast<std::size_t>(k)]; }

    constexpr Jet4 operator-() const { return {-c[0], -c[1], -c[2], -c[3], -c[4]}; }

    constexpr Jet4& operator+=(const Jet4& o) {
        for (int k = 0; k <= order; ++k) c[k] += o.c[k];
        return *this;
    }
    constexpr Jet4& operator-=(const Jet4& o) {
        for (int k = 0; k <= order; ++k) c[k] -= o.c[k];
        return *this;
    }
    constexpr Jet4& operator*=(double s) {
        for (double& x : c) x *= s;
        return *this;
    }

    friend constexpr Jet4 operator+(Jet4 a, const Jet4& b) { return a += b; }
    friend constexpr Jet4 operator-(Jet4 a, const Jet4& b) { return a -= b; }
    friend constexpr Jet4 operator+(Jet4 a, double b) { a.c[0] += b; return a; }
    friend constexpr Jet4 operator+(double a, Jet4 b) { b.c[0] += a; return b; }
    friend constexpr Jet4 operator-(Jet4 a, double b) { a.c[0] -= b; return a; }
    friend constexpr Jet4 operator-(double a, const Jet4& b) { return Jet4{a} - b; }
    friend constexpr Jet4 operator*(Jet4 a, double s) { return a *= s; }
    friend constexpr Jet4 operator*(double s, Jet4 a) { return a *= s; }

    // Leibniz: (fg)^(k) = sum_j C(k,j) f^(j) g^(k-j)
    friend constexpr Jet4 operator*(const Jet4& a, const Jet4& b) {
        constexpr int binom[5][5] = {{1, 0, 0, 0, 0},
                                     {1, 1, 0, 0, 0},
                                     {1, 2, 1, 0, 0},
                                     {1, 3, 3, 1, 0},
                                     {1, 4, 6, 4, 1}};
        Jet4 r;
        for (int k = 0; k <= order; ++k) {
            double s = 0.0;
            for (int j = 0; j <= k; ++j) s += binom[k][j] * a.c[j] * b.c[k - j];
            r.c[k] = s;
        }
        return r;
    }
    constexpr Jet4& operator*=(const Jet4& o) { return *this = *this * o; }
};

namespace detail {

// s^(k+1) = (c f')^(k), c^(k+1) = -(s f')^(k), expanded by Leibniz order by order.
inline void sin_cos_jet(const Jet4& f, Jet4& s, Jet4& c) {
    constexpr int binom[4][4] = {{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};
    s.c[0] = std::sin(f.c[0]);
    c.c[0] = std::cos(f.c[0]);
    for (int k = 0; k < Jet4::order; ++k) {
        double ds = 0.0, dc = 0.0;
        for (int j = 0; j <= k; ++j) {
            ds += binom[k][j] * c.c[j] * f.c[k + 1 - j];
            dc -= binom[k][j] * s.c[j] * f.c[k + 1 - j];
        }
        s.c[k + 1] = ds;
        c.c[k + 1] = dc;
    }
}

} // namespace detail

inline Jet4 sin(const Jet4& f) {
    Jet4 s, c;
    detail::sin_cos_jet(f, s, c);
    return s;
}

inline Jet4 cos(const Jet4& f) {
    Jet4 s, c;
    detail::sin_cos_jet(f, s, c);
    return c;
}

inline bool isfinite(const Jet4& j) {
    for (double x : j.c)
        if (!std::isfinite(x)) return false;
    return true;
}

} // namespace rtd
