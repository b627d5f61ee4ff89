#pragma once

#include <utility>
#include <vector>

#include "geometry.hpp"

namespace clrpath {

// Every edge of the refined diagram is one of these five parametric curves.
//   point_point: bisector of two points, a = half their distance, t = offset from the midpoint.
//   point_line:  parabola y = x^2/(4a) + a over the directrix, `normal` points toward the focus.
//   line_line:   angle bisector ray from the apex, a = sin of the half angle, t = distance from apex.
//   parallel:    mid-line between parallel lines, a = constant clearance.
//   radial:      segment from a feature foot along `dir`, t = clearance.
enum class CurveKind { point_point, point_line, line_line, parallel, radial };

struct CurveGeometry {
    CurveKind kind = CurveKind::radial;
    Point origin;
    Vec2 dir{1, 0};
    Vec2 normal{0, 1};
    double a = 1;

    Point point(double t) const {
        if (kind == CurveKind::point_line) return origin + dir * t + normal * (t * t / (4 * a) + a);
        return origin + dir * t;
    }

    Vec2 derivative(double t) const {
        if (kind == CurveKind::point_line) return dir + normal * (t / (2 * a));
        return dir;
    }

    double clearance(double t) const {
        switch (kind) {
            case CurveKind::point_point: return std::hypot(t, a);
            case CurveKind::point_line: return t * t / (4 * a) + a;
            case CurveKind::line_line: return t * a;
            case CurveKind::parallel: return a;
            case CurveKind::radial: return t;
        }
        return 0;
    }

    // Antiderivative of the cost along the curve; strictly increasing in t.
    double potential(double t) const {
        switch (kind) {
            case CurveKind::point_point: return std::asinh(t / a);
            case CurveKind::point_line: return 2 * std::asinh(t / (2 * a));
            case CurveKind::line_line: return std::log(t) / a;
            case CurveKind::parallel: return t / a;
            case CurveKind::radial: return std::log(t);
        }
        return 0;
    }

    double inverse_potential(double f) const {
        switch (kind) {
            case CurveKind::point_point: return a * std::sinh(f);
            case CurveKind::point_line: return 2 * a * std::sinh(f / 2);
            case CurveKind::line_line: return std::exp(f * a);
            case CurveKind::parallel: return f * a;
            case CurveKind::radial: return std::exp(f);
        }
        return 0;
    }

    double cost(double t0, double t1) const { return std::abs(potential(t1) - potential(t0)); }

    // Parameter reached after spending cost d from t0 in direction sign(direction).
    double advance(double t0, double d, int direction) const {
        return inverse_potential(potential(t0) + (direction >= 0 ? d : -d));
    }

    double param_of(Point p) const { return dot(p - origin, dir); }

    // Parameter of minimum clearance (the apex or foot for rays, where clearance vanishes).
    double min_clearance_param() const { return 0.0; }

    bool has_interior_minimum() const {
        return kind == CurveKind::point_point || kind == CurveKind::point_line;
    }

    // Intersections with the segment A + lambda*(B-A), lambda in [0,1], restricted to t in [tlo, thi].
    std::vector<std::pair<double, double>> intersect_segment(Point A, Point B, double tlo, double thi,
                                                             double tol) const {
        std::vector<std::pair<double, double>> out;
        Vec2 D = B - A;
        double len = norm(D);
        if (len == 0) return out;
        auto accept = [&](double t) {
            if (t < tlo - tol || t > thi + tol) return;
            t = std::clamp(t, tlo, thi);
            Point p = point(t);
            double lam = dot(p - A, D) / (len * len);
            if (lam < -tol / len || lam > 1 + tol / len) return;
            if (std::abs(cross(D, p - A)) / len > 10 * tol) return;
            out.emplace_back(std::clamp(lam, 0.0, 1.0), t);
        };
        if (kind == CurveKind::point_line) {
            double c2 = cross(normal, D) / (4 * a);
            double c1 = cross(dir, D);
            double c0 = cross(origin - A, D) + a * cross(normal, D);
            for (double t : solve_quadratic(c2, c1, c0)) accept(t);
        } else {
            double den = cross(dir, D);
            if (std::abs(den) <= 1e-14 * len) return out;  // parallel: treat as no crossing
            double t = cross(A - origin, D) / den;
            accept(t);
        }
        return out;
    }
};

inline CurveGeometry make_radial(Point foot, Vec2 dir) {
    CurveGeometry c;
    c.kind = CurveKind::radial;
    c.origin = foot;
    c.dir = normalized(dir);
    c.normal = perp(c.dir);
    c.a = 1;
    return c;
}

}  // namespace clrpath
