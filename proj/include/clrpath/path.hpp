#pragma once

#include <string_view>
#include <vector>

#include "curve.hpp"

namespace clrpath {

enum class PrimitiveKind { log_spiral, clearance_arc, circular_arc, radial_segment, voronoi_edge_portion, line_segment };

inline std::string_view to_string(PrimitiveKind k) {
    switch (k) {
        case PrimitiveKind::log_spiral: return "log_spiral";
        case PrimitiveKind::clearance_arc: return "clearance_arc";
        case PrimitiveKind::circular_arc: return "circular_arc";
        case PrimitiveKind::radial_segment: return "radial_segment";
        case PrimitiveKind::voronoi_edge_portion: return "voronoi_edge_portion";
        case PrimitiveKind::line_segment: return "line_segment";
    }
    return "?";
}

// One analytic piece of a path, parameterized by u in [0,1].
// Polar kinds (spiral, vertex clearance arc, circular arc) use center/r0/r1/phi0/dphi;
// straight kinds interpolate start->end; curve portions evaluate `curve` on [t0, t1].
struct AnalyticPrimitive {
    PrimitiveKind kind = PrimitiveKind::line_segment;
    int feature = -1;
    int diagram_edge = -1;
    Point start, end;
    bool polar = false;
    Point center;
    double r0 = 0, r1 = 0, phi0 = 0, dphi = 0;
    CurveGeometry curve;
    double t0 = 0, t1 = 0;
    double cost = 0;

    Point at(double u) const {
        if (kind == PrimitiveKind::voronoi_edge_portion) return curve.point(t0 + u * (t1 - t0));
        if (polar) {
            double r = r0 * std::pow(r1 / r0, u);
            double phi = phi0 + u * dphi;
            return center + Vec2{std::cos(phi), std::sin(phi)} * r;
        }
        return start + (end - start) * u;
    }

    double speed(double u) const {
        if (kind == PrimitiveKind::voronoi_edge_portion) return norm(curve.derivative(t0 + u * (t1 - t0))) * std::abs(t1 - t0);
        if (polar) {
            double L = std::log(r1 / r0);
            double r = r0 * std::exp(u * L);
            return r * std::hypot(L, dphi);
        }
        return dist(start, end);
    }

    AnalyticPrimitive reversed() const {
        AnalyticPrimitive r = *this;
        std::swap(r.start, r.end);
        std::swap(r.t0, r.t1);
        if (polar) {
            std::swap(r.r0, r.r1);
            r.phi0 = phi0 + dphi;
            r.dphi = -dphi;
        }
        return r;
    }
};

inline AnalyticPrimitive make_straight(PrimitiveKind kind, Point p, Point q, double cost, int feature = -1) {
    AnalyticPrimitive a;
    a.kind = kind;
    a.feature = feature;
    a.start = p;
    a.end = q;
    a.cost = cost;
    return a;
}

inline AnalyticPrimitive make_polar(PrimitiveKind kind, Point center, Point p, Point q, double dphi, double cost,
                                    int feature = -1) {
    AnalyticPrimitive a;
    a.kind = kind;
    a.feature = feature;
    a.start = p;
    a.end = q;
    a.polar = true;
    a.center = center;
    a.r0 = dist(p, center);
    a.r1 = dist(q, center);
    a.phi0 = std::atan2(p.y - center.y, p.x - center.x);
    a.dphi = dphi;
    a.cost = cost;
    return a;
}

inline AnalyticPrimitive make_curve_portion(const CurveGeometry& c, double t0, double t1, int edge_id = -1) {
    AnalyticPrimitive a;
    a.kind = c.kind == CurveKind::radial ? PrimitiveKind::radial_segment : PrimitiveKind::voronoi_edge_portion;
    a.diagram_edge = edge_id;
    a.curve = c;
    a.t0 = t0;
    a.t1 = t1;
    a.start = c.point(t0);
    a.end = c.point(t1);
    a.cost = c.cost(t0, t1);
    return a;
}

struct Path {
    std::vector<AnalyticPrimitive> primitives;
    double total_cost = 0;

    bool empty() const { return primitives.empty(); }
    Point front() const { return primitives.front().start; }
    Point back() const { return primitives.back().end; }

    void append(const AnalyticPrimitive& a) {
        primitives.push_back(a);
        total_cost += a.cost;
    }
    void append(const Path& p) {
        for (auto& a : p.primitives) append(a);
    }

    Path reversed() const {
        Path r;
        for (auto it = primitives.rbegin(); it != primitives.rend(); ++it) r.append(it->reversed());
        return r;
    }

    double max_gap() const {
        double g = 0;
        for (size_t i = 1; i < primitives.size(); ++i) g = std::max(g, dist(primitives[i - 1].end, primitives[i].start));
        return g;
    }

    // Sampled polyline, `per` nodes per primitive.
    std::vector<Point> polyline(int per = 64) const {
        std::vector<Point> pts;
        for (auto& a : primitives)
            for (int i = pts.empty() ? 0 : 1; i <= per; ++i) pts.push_back(a.at(static_cast<double>(i) / per));
        return pts;
    }
};

}  // namespace clrpath
