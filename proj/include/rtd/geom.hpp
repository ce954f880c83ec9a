#pragma once

#include <array>
#include <cmath>

#include "rtd/jet.hpp"

namespace rtd {

/// 3-vector over double or Jet4.
template <typename T>
struct Vec3 {
    T x{}, y{}, z{};

    constexpr Vec3() = default;
    constexpr Vec3(T x_, T y_, T z_) : x(x_), y(y_), z(z_) {}

    constexpr T& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
    constexpr const T& operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

    friend constexpr Vec3 operator+(const Vec3& a, const Vec3& b) {
        return {a.x + b.x, a.y + b.y, a.z + b.z};
    }
    friend constexpr Vec3 operator-(const Vec3& a, const Vec3& b) {
        return {a.x - b.x, a.y - b.y, a.z - b.z};
    }
    constexpr Vec3 operator-() const { return {-x, -y, -z}; }

    template <typename S>
    friend constexpr auto operator*(const S& s, const Vec3& v) {
        using R = decltype(s * v.x);
        return Vec3<R>{s * v.x, s * v.y, s * v.z};
    }
    template <typename S>
    friend constexpr auto operator*(const Vec3& v, const S& s) {
        return s * v;
    }

    constexpr Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    constexpr Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
};

using Vec3d = Vec3<double>;
using Jet4Vec3 = Vec3<Jet4>;

template <typename T>
constexpr T dot(const Vec3<T>& a, const Vec3<T>& b) {
    return a.x * b.x + a.y * b.y + a.z * b.z;
}

template <typename T>
constexpr Vec3<T> cross(const Vec3<T>& a, const Vec3<T>& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3d& v) { return std::sqrt(dot(v, v)); }

inline bool isfinite(const Vec3d& v) {
    return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}
inline bool isfinite(const Jet4Vec3& v) {
    return isfinite(v.x) && isfinite(v.y) && isfinite(v.z);
}

/// Value and rate-0..4 views of a jet-valued vector.
inline Vec3d coeff(const Jet4Vec3& v, int k) {
    return {v.x.deriv(k), v.y.deriv(k), v.z.deriv(k)};
}

inline Jet4Vec3 to_jets(const Vec3d& v) {
    return {Jet4::constant(v.x), Jet4::constant(v.y), Jet4::constant(v.z)};
}

/// Row-major 3x3 matrix over double or Jet4.
template <typename T>
struct Mat3 {
    std::array<T, 9> m{};

    constexpr T& operator()(int r, int c) { return m[3 * r + c]; }
    constexpr const T& operator()(int r, int c) const { return m[3 * r + c]; }

    static constexpr Mat3 identity() {
        Mat3 I;
        I(0, 0) = T(1.0); I(1, 1) = T(1.0); I(2, 2) = T(1.0);
        return I;
    }

    constexpr Vec3<T> row(int r) const { return {(*this)(r, 0), (*this)(r, 1), (*this)(r, 2)}; }
    constexpr Vec3<T> col(int c) const { return {(*this)(0, c), (*this)(1, c), (*this)(2, c)}; }

    friend constexpr Mat3 operator*(const Mat3& a, const Mat3& b) {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                r(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j) + a(i, 2) * b(2, j);
        return r;
    }
    friend constexpr Vec3<T> operator*(const Mat3& a, const Vec3<T>& v) {
        return {dot(a.row(0), v), dot(a.row(1), v), dot(a.row(2), v)};
    }

    constexpr Mat3 transposed() const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r(i, j) = (*this)(j, i);
        return r;
    }

    constexpr T det() const {
        return (*this)(0, 0) * ((*this)(1, 1) * (*this)(2, 2) - (*this)(1, 2) * (*this)(2, 1)) -
               (*this)(0, 1) * ((*this)(1, 0) * (*this)(2, 2) - (*this)(1, 2) * (*this)(2, 0)) +
               (*this)(0, 2) * ((*this)(1, 0) * (*this)(2, 1) - (*this)(1, 1) * (*this)(2, 0));
    }
};

using Mat3d = Mat3<double>;

} // namespace rtd
