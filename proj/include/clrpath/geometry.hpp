#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace clrpath {

inline constexpr double kPi = std::numbers::pi;

// Tolerances are relative to the bounding-box scale.
inline constexpr double kGeoTol = 1e-9;
inline constexpr double kChainTol = 1e-7;

enum class ErrorKind { validation, degenerate, precondition, unreachable, construction, quadrature };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

struct Vec2 {
    double x = 0, y = 0;

    constexpr Vec2() = default;
    constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

    constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    constexpr Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
    constexpr bool operator==(const Vec2&) const = default;
};

using Point = Vec2;

constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }
constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
constexpr Vec2 perp(Vec2 a) { return {-a.y, a.x}; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double dist(Point a, Point b) { return norm(a - b); }
inline Vec2 normalized(Vec2 a) {
    double n = norm(a);
    return n > 0 ? a / n : Vec2{};
}

// Wrap to (-pi, pi].
inline double wrap_angle(double a) {
    a = std::remainder(a, 2 * kPi);
    if (a <= -kPi) a += 2 * kPi;
    return a;
}

// Parameter of the projection of p on line ab (0 at a, 1 at b).
inline double project_param(Point p, Point a, Point b) {
    Vec2 d = b - a;
    double l2 = dot(d, d);
    return l2 > 0 ? dot(p - a, d) / l2 : 0.0;
}

inline Point closest_on_segment(Point p, Point a, Point b) {
    double t = std::clamp(project_param(p, a, b), 0.0, 1.0);
    return a + (b - a) * t;
}

inline double dist_to_segment(Point p, Point a, Point b) { return dist(p, closest_on_segment(p, a, b)); }

inline double dist_to_line(Point p, Point a, Point b) {
    Vec2 d = b - a;
    return std::abs(cross(d, p - a)) / norm(d);
}

inline Point foot_on_line(Point p, Point a, Point b) { return a + (b - a) * project_param(p, a, b); }

inline int orient_sign(Point a, Point b, Point c) {
    double v = cross(b - a, c - a);
    return (v > 0) - (v < 0);
}

inline bool on_segment(Point p, Point a, Point b) {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
           p.y <= std::max(a.y, b.y);
}

// Closed segments intersect (including touching).
inline bool segments_intersect(Point a, Point b, Point c, Point d) {
    int o1 = orient_sign(a, b, c), o2 = orient_sign(a, b, d);
    int o3 = orient_sign(c, d, a), o4 = orient_sign(c, d, b);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(c, a, b)) return true;
    if (o2 == 0 && on_segment(d, a, b)) return true;
    if (o3 == 0 && on_segment(a, c, d)) return true;
    if (o4 == 0 && on_segment(b, c, d)) return true;
    return false;
}

inline double segment_distance(Point a, Point b, Point c, Point d) {
    if (segments_intersect(a, b, c, d)) return 0.0;
    return std::min({dist_to_segment(a, c, d), dist_to_segment(b, c, d), dist_to_segment(c, a, b),
                     dist_to_segment(d, a, b)});
}

// Crossing-number test; boundary points count as inside.
inline bool point_in_polygon(Point p, std::span<const Point> ring) {
    size_t n = ring.size();
    if (n < 3) return false;
    bool inside = false;
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        Point a = ring[j], b = ring[i];
        if (orient_sign(a, b, p) == 0 && on_segment(p, a, b)) return true;
        if ((b.y > p.y) != (a.y > p.y)) {
            double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < x) inside = !inside;
        }
    }
    return inside;
}

inline double signed_area(std::span<const Point> ring) {
    double s = 0;
    for (size_t i = 0, n = ring.size(); i < n; ++i) s += cross(ring[i], ring[(i + 1) % n]);
    return s / 2;
}

// Real roots of a*x^2 + b*x + c = 0 (linear when a is ~0).
inline std::vector<double> solve_quadratic(double a, double b, double c) {
    std::vector<double> r;
    double scale = std::max({std::abs(a), std::abs(b), std::abs(c)});
    if (scale == 0) return r;
    if (std::abs(a) <= 1e-14 * scale) {
        if (b != 0) r.push_back(-c / b);
        return r;
    }
    double disc = b * b - 4 * a * c;
    if (disc < 0) {
        if (disc > -1e-12 * b * b) disc = 0;
        else return r;
    }
    double sq = std::sqrt(disc);
    double qq = -0.5 * (b + (b >= 0 ? sq : -sq));
    if (qq != 0) {
        r.push_back(qq / a);
        r.push_back(c / qq);
    } else {
        r.push_back(-b / (2 * a));
    }
    std::sort(r.begin(), r.end());
    return r;
}

// Bisection for a sign change of f on [lo, hi].
template <class F>
double bisect_root(F&& f, double lo, double hi, int iters = 100) {
    double flo = f(lo);
    for (int i = 0; i < iters; ++i) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        double fm = f(mid);
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace clrpath
