#pragma once

#include <cmath>
#include <stdexcept>

namespace ontics {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3() = default;
    Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const { return std::sqrt(dot(*this)); }

    Vec3 normalized() const {
        double n = norm();
        if (n == 0.0) throw std::invalid_argument("cannot normalize the zero vector");
        return {x / n, y / n, z / n};
    }

    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline bool approx_equal(const Vec3& a, const Vec3& b, double tol = 1e-12) {
    return std::abs(a.x - b.x) <= tol && std::abs(a.y - b.y) <= tol && std::abs(a.z - b.z) <= tol;
}

// Any unit vector orthogonal to v, chosen deterministically.
inline Vec3 orthogonal_unit(const Vec3& v) {
    Vec3 axis = std::abs(v.x) <= std::abs(v.y) && std::abs(v.x) <= std::abs(v.z)
                    ? Vec3{1, 0, 0}
                    : (std::abs(v.y) <= std::abs(v.z) ? Vec3{0, 1, 0} : Vec3{0, 0, 1});
    return v.cross(axis).normalized();
}

// Heaviside step with the convention theta(0) = 1.
inline double heaviside(double x) { return x >= 0.0 ? 1.0 : 0.0; }

}  // namespace ontics
