#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace rotforch {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm2() const { return dot(*this); }
    double norm() const { return std::sqrt(norm2()); }
    bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

struct Mat3 {
    // Row-major: a[r][c].
    std::array<std::array<double, 3>, 3> a{};

    static Mat3 identity() {
        Mat3 m;
        m.a[0][0] = m.a[1][1] = m.a[2][2] = 1.0;
        return m;
    }
    static Mat3 outer(const Vec3& u, const Vec3& v) {
        Mat3 m;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) m.a[r][c] = u[r] * v[c];
        return m;
    }

    double& operator()(int r, int c) { return a[r][c]; }
    double operator()(int r, int c) const { return a[r][c]; }

    Mat3 operator+(const Mat3& o) const {
        Mat3 m;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) m.a[r][c] = a[r][c] + o.a[r][c];
        return m;
    }
    Mat3 operator-(const Mat3& o) const {
        Mat3 m;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) m.a[r][c] = a[r][c] - o.a[r][c];
        return m;
    }
    Mat3 operator*(double s) const {
        Mat3 m;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) m.a[r][c] = a[r][c] * s;
        return m;
    }
    Vec3 operator*(const Vec3& v) const {
        return {a[0][0] * v.x + a[0][1] * v.y + a[0][2] * v.z,
                a[1][0] * v.x + a[1][1] * v.y + a[1][2] * v.z,
                a[2][0] * v.x + a[2][1] * v.y + a[2][2] * v.z};
    }
    Mat3 operator*(const Mat3& o) const {
        Mat3 m;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
                m.a[r][c] = a[r][0] * o.a[0][c] + a[r][1] * o.a[1][c] + a[r][2] * o.a[2][c];
        return m;
    }

    Mat3 transpose() const {
        Mat3 m;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) m.a[r][c] = a[c][r];
        return m;
    }
    Mat3 sym() const {
        Mat3 m;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) m.a[r][c] = 0.5 * (a[r][c] + a[c][r]);
        return m;
    }
    double trace() const { return a[0][0] + a[1][1] + a[2][2]; }
    double frobenius2() const {
        double s = 0.0;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) s += a[r][c] * a[r][c];
        return s;
    }
    double frobenius() const { return std::sqrt(frobenius2()); }
    // trace(A B^T) = sum_ij A_ij B_ij
    double ddot(const Mat3& o) const {
        double s = 0.0;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) s += a[r][c] * o.a[r][c];
        return s;
    }

    double det() const {
        return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
               a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
               a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    }
    // Adjugate-based inverse; callers guarantee nonsingularity.
    Mat3 inverse() const {
        const double inv_d = 1.0 / det();
        Mat3 m;
        m.a[0][0] = (a[1][1] * a[2][2] - a[1][2] * a[2][1]) * inv_d;
        m.a[0][1] = (a[0][2] * a[2][1] - a[0][1] * a[2][2]) * inv_d;
        m.a[0][2] = (a[0][1] * a[1][2] - a[0][2] * a[1][1]) * inv_d;
        m.a[1][0] = (a[1][2] * a[2][0] - a[1][0] * a[2][2]) * inv_d;
        m.a[1][1] = (a[0][0] * a[2][2] - a[0][2] * a[2][0]) * inv_d;
        m.a[1][2] = (a[0][2] * a[1][0] - a[0][0] * a[1][2]) * inv_d;
        m.a[2][0] = (a[1][0] * a[2][1] - a[1][1] * a[2][0]) * inv_d;
        m.a[2][1] = (a[0][1] * a[2][0] - a[0][0] * a[2][1]) * inv_d;
        m.a[2][2] = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) * inv_d;
        return m;
    }
};

/// Neumaier-compensated accumulator for balance sums that must resolve
/// cancellations far below the gross magnitude of the terms.
struct NeumaierSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

/// Deterministic pseudo-random sampler (splitmix64 core). The bit stream is
/// fixed by the seed alone, independent of platform/library versions.
class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    /// Uniform in [0,1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    Vec3 unit_vector() {
        const double z = 1.0 - 2.0 * uniform();
        const double phi = 2.0 * 3.14159265358979323846 * uniform();
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        return {r * std::cos(phi), r * std::sin(phi), z};
    }
    /// Uniform in the closed ball of the given radius.
    Vec3 in_ball(double radius) {
        const Vec3 d = unit_vector();
        const double r = radius * std::cbrt(uniform());
        return d * r;
    }

private:
    std::uint64_t state_;
};

/// s^p for s >= 0 with fast paths for the common small-integer and
/// half-integer exponents of constitutive laws.
inline double pow_nonneg(double s, double p) {
    if (p == 0.0) return 1.0;
    if (p == 1.0) return s;
    if (p == 2.0) return s * s;
    if (p == 3.0) return s * s * s;
    if (p == 0.5) return std::sqrt(s);
    if (p == 1.5) return s * std::sqrt(s);
    return std::pow(s, p);
}

}  // namespace rotforch
