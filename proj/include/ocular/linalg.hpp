#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace ocular {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
    friend constexpr bool operator==(Vec2, Vec2) = default;

    double norm() const { return std::hypot(x, y); }
};

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend constexpr Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend constexpr Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend constexpr Vec3 operator-(Vec3 a) { return {-a.x, -a.y, -a.z}; }
    friend constexpr Vec3 operator*(double s, Vec3 v) { return {s * v.x, s * v.y, s * v.z}; }
    friend constexpr bool operator==(Vec3, Vec3) = default;

    constexpr double dot(Vec3 o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const { return std::sqrt(dot(*this)); }
};

struct Vec4 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    double w = 1.0;

    static constexpr Vec4 point(Vec3 p) { return {p.x, p.y, p.z, 1.0}; }
    /// Homogeneous point at infinity in direction `d`.
    static constexpr Vec4 direction(Vec3 d) { return {d.x, d.y, d.z, 0.0}; }
};

/// Row-major 4x4 homogeneous transform.
struct Mat4 {
    std::array<double, 16> m{};

    static constexpr Mat4 identity() {
        Mat4 r;
        r.m[0] = r.m[5] = r.m[10] = r.m[15] = 1.0;
        return r;
    }

    static constexpr Mat4 translation(Vec3 t) {
        Mat4 r = identity();
        r.m[3] = t.x;
        r.m[7] = t.y;
        r.m[11] = t.z;
        return r;
    }

    /// Zero-based (row, col) access.
    constexpr double& operator()(std::size_t row, std::size_t col) { return m[row * 4 + col]; }
    constexpr double operator()(std::size_t row, std::size_t col) const { return m[row * 4 + col]; }

    friend constexpr Mat4 operator*(const Mat4& a, const Mat4& b) {
        Mat4 r;
        for (std::size_t i = 0; i < 4; ++i) {
            for (std::size_t j = 0; j < 4; ++j) {
                double s = 0.0;
                for (std::size_t k = 0; k < 4; ++k) {
                    s += a(i, k) * b(k, j);
                }
                r(i, j) = s;
            }
        }
        return r;
    }

    friend constexpr Vec4 operator*(const Mat4& a, Vec4 v) {
        return {a(0, 0) * v.x + a(0, 1) * v.y + a(0, 2) * v.z + a(0, 3) * v.w,
                a(1, 0) * v.x + a(1, 1) * v.y + a(1, 2) * v.z + a(1, 3) * v.w,
                a(2, 0) * v.x + a(2, 1) * v.y + a(2, 2) * v.z + a(2, 3) * v.w,
                a(3, 0) * v.x + a(3, 1) * v.y + a(3, 2) * v.z + a(3, 3) * v.w};
    }

    friend constexpr bool operator==(const Mat4&, const Mat4&) = default;
};

inline constexpr double kPi = 3.14159265358979323846;

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Largest absolute entry-wise difference.
inline double max_abs_diff(const Mat4& a, const Mat4& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < 16; ++i) {
        worst = std::fmax(worst, std::fabs(a.m[i] - b.m[i]));
    }
    return worst;
}

}  // namespace ocular
