#pragma once

#include <cstdint>
#include <map>
#include <numeric>
#include <unordered_map>

#include <boost/polygon/voronoi.hpp>

#include "costs.hpp"

namespace clrpath::detail {
struct IPoint {
    int32_t x, y;
};
struct ISegment {
    IPoint p0, p1;
};
}  // namespace clrpath::detail

namespace boost::polygon {
template <>
struct geometry_concept<clrpath::detail::IPoint> {
    using type = point_concept;
};
template <>
struct point_traits<clrpath::detail::IPoint> {
    using coordinate_type = int32_t;
    static coordinate_type get(const clrpath::detail::IPoint& p, orientation_2d o) { return o == HORIZONTAL ? p.x : p.y; }
};
template <>
struct geometry_concept<clrpath::detail::ISegment> {
    using type = segment_concept;
};
template <>
struct segment_traits<clrpath::detail::ISegment> {
    using coordinate_type = int32_t;
    using point_type = clrpath::detail::IPoint;
    static point_type get(const clrpath::detail::ISegment& s, direction_1d d) { return d.to_int() ? s.p1 : s.p0; }
};
}  // namespace boost::polygon

namespace clrpath {

struct VoronoiVertex {
    Point p;
    double clearance = 0;
};

struct VoronoiEdge {
    CurveGeometry geometry;
    double t0 = 0, t1 = 0;  // t0 < t1
    int v0 = -1, v1 = -1;   // vertices at t0 and t1
    int left_feature = -1, right_feature = -1;
    bool secondary = false;  // radial edge between a vertex and an incident edge

    double min_param() const { return std::clamp(geometry.min_clearance_param(), t0, t1); }
    Point clearance_min_point() const { return geometry.point(min_param()); }
    bool has_site(int f) const { return left_feature == f || right_feature == f; }
    int other_site(int f) const { return left_feature == f ? right_feature : left_feature; }
};

struct VoronoiDiagram {
    std::vector<VoronoiVertex> vertices;
    std::vector<VoronoiEdge> edges;
    std::vector<std::vector<int>> cells;  // per feature: incident edge ids
};

// Bisector curve between two features; `hint` is a point near the wanted branch.
inline CurveGeometry bisector_curve(const Feature& f, const Feature& g, Point hint) {
    CurveGeometry c;
    if (f.is_vertex() && g.is_vertex()) {
        c.kind = CurveKind::point_point;
        c.origin = (f.a + g.a) / 2;
        c.dir = normalized(perp(g.a - f.a));
        c.normal = perp(c.dir);
        c.a = dist(f.a, g.a) / 2;
        return c;
    }
    if (f.is_vertex() != g.is_vertex()) {
        const Feature& pt = f.is_vertex() ? f : g;
        const Feature& ln = f.is_vertex() ? g : f;
        Point foot = foot_on_line(pt.a, ln.a, ln.b);
        c.kind = CurveKind::point_line;
        c.origin = foot;
        c.normal = normalized(pt.a - foot);
        c.dir = perp(c.normal);
        c.a = dist(pt.a, foot) / 2;
        return c;
    }
    Vec2 d1 = normalized(f.b - f.a), d2 = normalized(g.b - g.a);
    double s = cross(d1, d2);
    if (std::abs(s) < 1e-10) {
        Point foot = foot_on_line(f.a, g.a, g.b);
        c.kind = CurveKind::parallel;
        c.origin = (f.a + foot) / 2;
        c.dir = d1;
        c.normal = perp(d1);
        c.a = dist(f.a, foot) / 2;
        return c;
    }
    // Apex of the two supporting lines.
    double lam = cross(g.a - f.a, d2) / s;
    Point apex = f.a + d1 * lam;
    c.kind = CurveKind::line_line;
    c.origin = apex;
    Vec2 h = hint - apex;
    // Choose the angle bisector whose direction is closest to the hint.
    Vec2 b1 = normalized(d1 + d2), b2 = normalized(d1 - d2);
    Vec2 cand[4] = {b1, -b1, b2, -b2};
    double best = -2;
    for (Vec2 v : cand) {
        double sc = dot(v, normalized(h));
        if (sc > best) {
            best = sc;
            c.dir = v;
        }
    }
    c.normal = perp(c.dir);
    c.a = dist_to_line(apex + c.dir, f.a, f.b);
    return c;
}

namespace detail {

inline double site_distance(const Feature& f, Point p) { return feature_line_distance(f, p); }

// Gauss-Newton polish of a diagram vertex against its incident features.
inline Point polish_vertex(Point x, const std::vector<int>& feats, const Scene& scene) {
    struct Row {
        int i, j;
        bool linear;
    };
    std::vector<Row> rows;
    for (size_t a = 0; a < feats.size(); ++a)
        for (size_t b = a + 1; b < feats.size(); ++b) {
            const Feature &fa = scene.feature(feats[a]), &fb = scene.feature(feats[b]);
            bool incident = false;
            if (fa.is_vertex() != fb.is_vertex()) {
                const Feature& v = fa.is_vertex() ? fa : fb;
                const Feature& e = fa.is_vertex() ? fb : fa;
                incident = v.polygon == e.polygon && (v.a == e.a || v.a == e.b);
            }
            rows.push_back({feats[a], feats[b], incident});
        }
    if (rows.size() < 2) return x;
    auto residual = [&](Point p, const Row& r) {
        const Feature &fa = scene.feature(r.i), &fb = scene.feature(r.j);
        if (r.linear) {
            const Feature& v = fa.is_vertex() ? fa : fb;
            const Feature& e = fa.is_vertex() ? fb : fa;
            return dot(p - v.a, normalized(e.b - e.a));
        }
        return site_distance(fa, p) - site_distance(fb, p);
    };
    auto max_res = [&](Point p) {
        double m = 0;
        for (auto& r : rows) m = std::max(m, std::abs(residual(p, r)));
        return m;
    };
    double cur = max_res(x);
    for (int it = 0; it < 8 && cur > 0; ++it) {
        double a11 = 0, a12 = 0, a22 = 0, b1 = 0, b2 = 0;
        double h = 1e-7 * scene.scale();
        for (auto& r : rows) {
            double f0 = residual(x, r);
            double gx = (residual(x + Vec2{h, 0}, r) - residual(x - Vec2{h, 0}, r)) / (2 * h);
            double gy = (residual(x + Vec2{0, h}, r) - residual(x - Vec2{0, h}, r)) / (2 * h);
            a11 += gx * gx;
            a12 += gx * gy;
            a22 += gy * gy;
            b1 -= gx * f0;
            b2 -= gy * f0;
        }
        double det = a11 * a22 - a12 * a12;
        if (std::abs(det) < 1e-14 * (a11 * a22 + 1e-300)) break;
        Point nx = x + Vec2{(b1 * a22 - b2 * a12) / det, (a11 * b2 - a12 * b1) / det};
        double nr = max_res(nx);
        if (!(nr < cur) || dist(nx, x) > 1e-6 * scene.scale()) break;
        x = nx;
        cur = nr;
    }
    return x;
}

}  // namespace detail

// Voronoi diagram of all vertex and open-edge features (box included), restricted to free space.
inline VoronoiDiagram build_voronoi(const Scene& scene) {
    using namespace boost::polygon;
    const Box& box = scene.box();
    Point center{(box.xmin + box.xmax) / 2, (box.ymin + box.ymax) / 2};
    double half = scene.scale() / 2;
    double unit = std::ldexp(1.0, std::ilogb(half) + 1 - 30);  // 2^30 units cover at least half the box
    auto snap = [&](Point p) {
        return detail::IPoint{static_cast<int32_t>(std::llround((p.x - center.x) / unit)),
                              static_cast<int32_t>(std::llround((p.y - center.y) / unit))};
    };

    std::vector<detail::IPoint> points;
    std::vector<int> point_feature;
    std::vector<detail::ISegment> segments;
    std::vector<int> seg_feature, seg_start, seg_end;
    for (int i = 0; i < static_cast<int>(scene.features().size()); ++i) {
        const Feature& f = scene.feature(i);
        if (f.is_edge()) {
            segments.push_back({snap(f.a), snap(f.b)});
            seg_feature.push_back(i);
            int n = f.polygon == kBoxPolygon ? 4 : static_cast<int>(scene.obstacles()[f.polygon].size());
            seg_start.push_back(scene.vertex_feature(f.polygon, f.index));
            seg_end.push_back(scene.vertex_feature(f.polygon, (f.index + 1) % n));
        } else if (f.polygon != kBoxPolygon && scene.obstacles()[f.polygon].size() == 1) {
            points.push_back(snap(f.a));
            point_feature.push_back(i);
        }
    }

    voronoi_diagram<double> vd;
    construct_voronoi(points.begin(), points.end(), segments.begin(), segments.end(), &vd);

    auto site_feature = [&](const voronoi_diagram<double>::cell_type& c) {
        size_t idx = c.source_index();
        if (idx < points.size()) return point_feature[idx];
        size_t j = idx - points.size();
        switch (c.source_category()) {
            case SOURCE_CATEGORY_SEGMENT_START_POINT: return seg_start[j];
            case SOURCE_CATEGORY_SEGMENT_END_POINT: return seg_end[j];
            default: return seg_feature[j];
        }
    };
    auto to_world = [&](const voronoi_diagram<double>::vertex_type& v) {
        return Point{center.x + v.x() * unit, center.y + v.y() * unit};
    };

    VoronoiDiagram out;
    out.cells.assign(scene.features().size(), {});
    std::unordered_map<const void*, int> vid;
    std::map<std::pair<long long, long long>, std::vector<int>> grid;
    double tol = scene.tol();

    auto vertex_id = [&](const voronoi_diagram<double>::vertex_type* v) {
        auto it = vid.find(v);
        if (it != vid.end()) return it->second;
        std::vector<int> feats;
        const auto* e = v->incident_edge();
        do {
            int f = site_feature(*e->cell());
            if (std::find(feats.begin(), feats.end(), f) == feats.end()) feats.push_back(f);
            e = e->rot_next();
        } while (e != v->incident_edge());
        Point p = detail::polish_vertex(to_world(*v), feats, scene);
        double c = std::numeric_limits<double>::infinity();
        for (int f : feats) c = std::min(c, detail::site_distance(scene.feature(f), p));
        // Boost may emit distinct vertices at one location; merge them.
        auto key = std::pair{std::llround(p.x / (8 * tol)), std::llround(p.y / (8 * tol))};
        for (long long dx = -1; dx <= 1; ++dx)
            for (long long dy = -1; dy <= 1; ++dy) {
                auto g = grid.find({key.first + dx, key.second + dy});
                if (g == grid.end()) continue;
                for (int other : g->second)
                    if (dist(out.vertices[other].p, p) <= tol) {
                        vid.emplace(v, other);
                        return other;
                    }
            }
        int id = static_cast<int>(out.vertices.size());
        out.vertices.push_back({p, c});
        grid[key].push_back(id);
        vid.emplace(v, id);
        return id;
    };

    auto is_free = [&](Point p) {
        if (!box.contains(p, tol)) return false;
        return scene.containing_polygon(p) < 0;
    };

    for (auto it = vd.edges().begin(); it != vd.edges().end(); ++it) {
        const auto& e = *it;
        if (&e > e.twin()) continue;
        if (!e.vertex0() || !e.vertex1()) continue;
        int fa = site_feature(*e.cell()), fb = site_feature(*e.twin()->cell());
        if (fa == fb) continue;
        Point p0 = to_world(*e.vertex0()), p1 = to_world(*e.vertex1());
        const Feature &A = scene.feature(fa), &B = scene.feature(fb);
        VoronoiEdge ve;
        ve.left_feature = fa;
        ve.right_feature = fb;
        if (e.is_secondary()) {
            const Feature& v = A.is_vertex() ? A : B;
            Point far = dist(p0, v.a) > dist(p1, v.a) ? p0 : p1;
            const Feature& ed = A.is_vertex() ? B : A;
            Vec2 n = normalized(perp(ed.b - ed.a));
            if (dot(n, far - v.a) < 0) n = -n;
            ve.geometry = make_radial(v.a, n);
            ve.secondary = true;
        } else {
            ve.geometry = bisector_curve(A, B, dist(p0, p1) > 0 ? (p0 + p1) / 2 : p0);
            if (ve.geometry.kind == CurveKind::line_line) {
                Point far = dist(p0, ve.geometry.origin) > dist(p1, ve.geometry.origin) ? p0 : p1;
                ve.geometry = bisector_curve(A, B, far);
            }
        }
        double t0 = ve.geometry.param_of(p0), t1 = ve.geometry.param_of(p1);
        double tm = 0.5 * (t0 + t1);
        if (!is_free(ve.geometry.point(tm))) continue;
        if (dist(p0, p1) <= tol && std::abs(t1 - t0) * (1 + std::abs(tm)) <= tol) continue;
        int i0 = vertex_id(e.vertex0()), i1 = vertex_id(e.vertex1());
        t0 = ve.geometry.param_of(out.vertices[i0].p);
        t1 = ve.geometry.param_of(out.vertices[i1].p);
        if (ve.secondary) {
            t0 = std::max(0.0, t0);
            t1 = std::max(0.0, t1);
        }
        if (t0 > t1) {
            std::swap(t0, t1);
            std::swap(i0, i1);
        }
        if (dist(out.vertices[i0].p, out.vertices[i1].p) <= tol) continue;
        ve.t0 = t0;
        ve.t1 = t1;
        ve.v0 = i0;
        ve.v1 = i1;
        int id = static_cast<int>(out.edges.size());
        out.edges.push_back(ve);
        out.cells[fa].push_back(id);
        out.cells[fb].push_back(id);
    }
    return out;
}

}  // namespace clrpath
