#pragma once

#include <functional>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "path.hpp"
#include "scene.hpp"

namespace clrpath {

// Geodesic about a vertex feature: Euclidean distance in the (theta, ln r) plane.
inline double spiral_cost_polar(double r_p, double th_p, double r_q, double th_q) {
    return std::hypot(th_q - th_p, std::log(r_q / r_p));
}

inline double spiral_cost(Point o, Point p, Point q) {
    double rp = dist(p, o), rq = dist(q, o);
    if (rp == 0 || rq == 0) throw Error(ErrorKind::degenerate, "spiral_cost: point coincides with the vertex feature");
    double dth = wrap_angle(std::atan2(q.y - o.y, q.x - o.x) - std::atan2(p.y - o.y, p.x - o.x));
    return std::hypot(dth, std::log(rq / rp));
}

inline double spiral_cost(const Feature& o, Point p, Point q) { return spiral_cost(o.a, p, q); }

// Equal-clearance arc about an edge feature, angles of the radii from the common center.
inline double arc_cost(double theta_p, double theta_q) {
    return std::abs(std::log(std::tan(theta_q / 2)) - std::log(std::tan(theta_p / 2)));
}

// Arc about `center` on the feature's supporting line; p and q must share the radius.
inline double arc_cost(const Feature& o, Point center, Point p, Point q, double tol = 1e-7) {
    double rp = dist(p, center), rq = dist(q, center);
    double scale = std::max(1.0, std::max(rp, rq));
    if (dist_to_line(center, o.a, o.b) > tol * scale)
        throw Error(ErrorKind::precondition, "arc_cost: center is not on the feature line");
    if (std::abs(rp - rq) > tol * scale) throw Error(ErrorKind::precondition, "arc_cost: radii differ");
    Vec2 d = normalized(o.b - o.a);
    Vec2 n = perp(d);
    double yp = dot(p - center, n), yq = dot(q - center, n);
    if (yp * yq <= 0) throw Error(ErrorKind::degenerate, "arc_cost: endpoint on the feature line");
    double tp = std::atan2(std::abs(yp), dot(p - center, d)), tq = std::atan2(std::abs(yq), dot(q - center, d));
    return arc_cost(tp, tq);
}

// Same, with the center taken where the bisector of pq meets the feature line.
inline double arc_cost(const Feature& o, Point p, Point q, double tol = 1e-7) {
    Vec2 d = normalized(o.b - o.a);
    double xp = dot(p - o.a, d), xq = dot(q - o.a, d);
    if (std::abs(xp - xq) <= tol * std::max(1.0, dist(p, q)))
        throw Error(ErrorKind::precondition, "arc_cost: no arc centered on the feature line joins the points");
    Vec2 n = perp(d);
    double yp = dot(p - o.a, n), yq = dot(q - o.a, n);
    double c = (xq * xq + yq * yq - xp * xp - yp * yp) / (2 * (xq - xp));
    return arc_cost(o, o.a + d * c, p, q, tol);
}

inline double radial_cost(double clr_p, double clr_q) { return std::abs(std::log(clr_q / clr_p)); }

inline double radial_cost(const Scene& scene, Point p, Point q) {
    auto cp = scene.clearance(p), cq = scene.clearance(q);
    double tol = scene.chain_tol();
    // The lower point must lie on the segment from the higher one to its foot.
    const ClearanceResult& hi = cq.value >= cp.value ? cq : cp;
    Point hi_pt = cq.value >= cp.value ? q : p, lo_pt = cq.value >= cp.value ? p : q;
    if (dist_to_segment(lo_pt, hi.foot, hi_pt) > tol)
        throw Error(ErrorKind::precondition, "radial_cost: points are not on a common radial segment");
    if (cp.value <= 0 || cq.value <= 0) throw Error(ErrorKind::precondition, "radial_cost: zero clearance");
    return radial_cost(cp.value, cq.value);
}

// Hyperbolic distance in the half plane above the supporting line of an edge feature.
inline double half_plane_cost(double x_p, double y_p, double x_q, double y_q) {
    double d2 = (x_p - x_q) * (x_p - x_q) + (y_p - y_q) * (y_p - y_q);
    double x = d2 / (2 * y_p * y_q);
    return std::log1p(x + std::sqrt(x * (x + 2)));
}

inline double single_feature_cost(const Feature& o, Point p, Point q) {
    if (o.is_vertex()) return spiral_cost(o.a, p, q);
    Vec2 d = normalized(o.b - o.a);
    Vec2 n = perp(d);
    double yp = dot(p - o.a, n), yq = dot(q - o.a, n);
    if (yp * yq <= 0) throw Error(ErrorKind::degenerate, "single_feature_cost: point on the feature line");
    return half_plane_cost(dot(p - o.a, d), std::abs(yp), dot(q - o.a, d), std::abs(yq));
}

// Minimal-cost path relative to feature `o` alone (1 primitive, or none when p == q).
inline Path feature_geodesic(const Feature& o, int fi, Point p, Point q, double tol) {
    Path path;
    if (dist(p, q) <= tol) return path;
    if (o.is_vertex()) {
        if (dist(p, o.a) == 0 || dist(q, o.a) == 0)
            throw Error(ErrorKind::degenerate, "single_feature_geodesic: endpoint on the feature");
        double dth = wrap_angle(std::atan2(q.y - o.a.y, q.x - o.a.x) - std::atan2(p.y - o.a.y, p.x - o.a.x));
        double cost = std::hypot(dth, std::log(dist(q, o.a) / dist(p, o.a)));
        path.append(make_polar(PrimitiveKind::log_spiral, o.a, p, q, dth, cost, fi));
        return path;
    }
    Vec2 d = normalized(o.b - o.a);
    Vec2 n = perp(d);
    double xp = dot(p - o.a, d), yp = dot(p - o.a, n), xq = dot(q - o.a, d), yq = dot(q - o.a, n);
    if (yp * yq <= 0) throw Error(ErrorKind::degenerate, "single_feature_geodesic: endpoint on the feature line");
    double cost = half_plane_cost(xp, std::abs(yp), xq, std::abs(yq));
    if (std::abs(xp - xq) <= tol) {
        path.append(make_straight(PrimitiveKind::radial_segment, p, q, cost, fi));
        return path;
    }
    double c = (xq * xq + yq * yq - xp * xp - yp * yp) / (2 * (xq - xp));
    Point center = o.a + d * c;
    double dphi = wrap_angle(std::atan2(q.y - center.y, q.x - center.x) - std::atan2(p.y - center.y, p.x - center.x));
    path.append(make_polar(PrimitiveKind::circular_arc, center, p, q, dphi, cost, fi));
    return path;
}

inline Path single_feature_geodesic(const Scene& scene, int fi, Point p, Point q) {
    return feature_geodesic(scene.feature(fi), fi, p, q, scene.tol());
}

using ClearanceFn = std::function<double(Point)>;

inline constexpr double kQuadratureFloor = 1e-12;

struct QuadratureOptions {
    double rel_tol = 1e-8;
    unsigned max_depth = 18;
};

// Adaptive Gauss-Kronrod integration of 1/clr along one primitive.
inline double primitive_cost_numeric(const AnalyticPrimitive& a, const ClearanceFn& clr, QuadratureOptions opt = {}) {
    if (dist(a.start, a.end) == 0 && !(a.polar && a.dphi != 0)) return 0.0;
    auto f = [&](double u) {
        double c = clr(a.at(u));
        if (!(c > kQuadratureFloor)) throw Error(ErrorKind::quadrature, "quadrature: clearance below floor");
        return a.speed(u) / c;
    };
    double err = 0;
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, 1.0, opt.max_depth, opt.rel_tol, &err);
}

inline double path_cost_numeric(const Path& path, const ClearanceFn& clr, QuadratureOptions opt = {}) {
    double s = 0;
    for (auto& a : path.primitives) s += primitive_cost_numeric(a, clr, opt);
    return s;
}

inline double path_cost_numeric(const Scene& scene, const Path& path, QuadratureOptions opt = {}) {
    return path_cost_numeric(path, [&](Point p) { return scene.clr(p); }, opt);
}

inline double path_cost_numeric(const Scene& scene, const AnalyticPrimitive& a, QuadratureOptions opt = {}) {
    return primitive_cost_numeric(a, [&](Point p) { return scene.clr(p); }, opt);
}

inline double polyline_cost_numeric(const std::vector<Point>& pts, const ClearanceFn& clr, QuadratureOptions opt = {}) {
    double s = 0;
    for (size_t i = 1; i < pts.size(); ++i)
        s += primitive_cost_numeric(make_straight(PrimitiveKind::line_segment, pts[i - 1], pts[i], 0), clr, opt);
    return s;
}

inline double polyline_cost_numeric(const Scene& scene, const std::vector<Point>& pts, QuadratureOptions opt = {}) {
    return polyline_cost_numeric(pts, [&](Point p) { return scene.clr(p); }, opt);
}

inline ClearanceFn feature_clearance(const Feature& o) {
    if (o.is_vertex()) return [a = o.a](Point p) { return dist(p, a); };
    return [a = o.a, b = o.b](Point p) { return dist_to_line(p, a, b); };
}

}  // namespace clrpath
