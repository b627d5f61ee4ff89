#pragma once

#include <optional>

#include "voronoi.hpp"

namespace clrpath {

enum class KappaShape { segment, parabola, horizontal };
enum class RadialKind { none, type_i, type_ii, connector };

// An edge of the refined diagram: either a Voronoi edge (external) or a radial segment (internal).
struct DiagramEdge {
    CurveGeometry curve;
    double t_lo = 0, t_hi = 0;
    bool internal = false;
    RadialKind radial_kind = RadialKind::none;
    int voronoi_edge = -1;
    int feature_a = -1, feature_b = -1;
    std::vector<std::pair<double, int>> nodes;  // (param, node) sorted by param
    std::vector<int> cells;

    Point point(double t) const { return curve.point(t); }
    double clearance(double t) const { return curve.clearance(t); }
};

// Cell T with its feature o and boundary: kappa (external), alpha and beta (radial).
// Frame: world = origin + X*ex + Y*ey. Vertex feature: o at origin, theta from ex toward the
// kappa clearance minimum. Edge feature: o on Y = 0, cell at Y > 0, x_alpha <= x_beta.
struct RefinedCell {
    int id = -1;
    int feature = -1;
    Feature feat;
    KappaShape shape = KappaShape::segment;
    Point origin;
    Vec2 ex{1, 0}, ey{0, 1};
    double a = 0;      // parabola parameter, or distance to the bisected line (vertex, segment kappa)
    double slope = 0;  // tan(theta) of kappa (edge feature, segment kappa)
    double height = 0; // horizontal kappa
    double theta_alpha = 0, theta_beta = 0;
    double x_alpha = 0, x_beta = 0;
    Point u, v;
    double clr_u = 0, clr_v = 0;
    int node_u = -1, node_v = -1;
    int kappa_edge = -1;
    double kappa_tu = 0, kappa_tv = 0;
    int alpha_edge = -1, beta_edge = -1;

    bool vertex_feature() const { return feat.is_vertex(); }

    Vec2 local(Point p) const { return {dot(p - origin, ex), dot(p - origin, ey)}; }
    Point world(double X, double Y) const { return origin + ex * X + ey * Y; }

    // Frame parameter along kappa: theta (vertex) or X (edge).
    double param(Point p) const {
        Vec2 l = local(p);
        return vertex_feature() ? std::atan2(l.y, l.x) : l.x;
    }
    double s_alpha() const { return vertex_feature() ? theta_alpha : x_alpha; }
    double s_beta() const { return vertex_feature() ? theta_beta : x_beta; }

    double kappa_clearance(double s) const {
        if (vertex_feature()) return shape == KappaShape::segment ? a / std::cos(s) : 2 * a / (1 + std::cos(s));
        switch (shape) {
            case KappaShape::segment: return slope * s;
            case KappaShape::parabola: return s * s / (4 * a) + a;
            case KappaShape::horizontal: return height;
        }
        return 0;
    }

    Point at_param(double s, double c) const {
        if (vertex_feature()) return world(c * std::cos(s), c * std::sin(s));
        return world(s, c);
    }
    Point kappa_point(double s) const { return at_param(s, kappa_clearance(s)); }

    double kappa_param_at_clearance(double c) const {
        if (vertex_feature()) {
            double ct = shape == KappaShape::segment ? a / c : 2 * a / c - 1;
            return std::acos(std::clamp(ct, -1.0, 1.0));
        }
        switch (shape) {
            case KappaShape::segment: return c / slope;
            case KappaShape::parabola: return 2 * std::sqrt(std::max(0.0, a * (c - a)));
            case KappaShape::horizontal: return x_alpha;
        }
        return 0;
    }

    Point alpha_point(double c) const { return at_param(s_alpha(), c); }
    Point beta_point(double c) const { return at_param(s_beta(), c); }

    // Distance to the feature (equals clearance inside the cell).
    double feature_distance(Point p) const {
        Vec2 l = local(p);
        return vertex_feature() ? norm(l) : l.y;
    }

    bool contains(Point p, double tol) const {
        Vec2 l = local(p);
        if (vertex_feature()) {
            double r = norm(l);
            if (r <= 0) return false;
            double th = std::atan2(l.y, l.x);
            double slack = tol / r;
            if (th < theta_alpha - slack || th > theta_beta + slack) return false;
            th = std::clamp(th, theta_alpha, theta_beta);
            return r <= kappa_clearance(th) + tol;
        }
        if (l.x < x_alpha - tol || l.x > x_beta + tol || l.y <= 0) return false;
        return l.y <= kappa_clearance(std::clamp(l.x, x_alpha, x_beta)) + tol;
    }

    // kappa as a parametric curve derived from the frame, and the frame-to-curve parameter map.
    CurveGeometry kappa_curve() const {
        CurveGeometry c;
        if (vertex_feature()) {
            if (shape == KappaShape::segment) {
                c.kind = CurveKind::point_point;
                c.origin = world(a, 0);
            } else {
                c.kind = CurveKind::point_line;
                c.origin = world(2 * a, 0);
            }
            c.dir = ey;
            c.normal = -ex;
            c.a = a;
            return c;
        }
        switch (shape) {
            case KappaShape::segment: {
                double h = std::hypot(1.0, slope);
                c.kind = CurveKind::line_line;
                c.origin = origin;
                c.dir = normalized(ex + ey * slope);
                c.a = slope / h;
                break;
            }
            case KappaShape::horizontal:
                c.kind = CurveKind::parallel;
                c.origin = world(0, height);
                c.dir = ex;
                c.a = height;
                break;
            case KappaShape::parabola:
                c.kind = CurveKind::point_line;
                c.origin = origin;
                c.dir = ex;
                c.a = a;
                break;
        }
        c.normal = ey;
        return c;
    }

    double kappa_curve_param(double s) const {
        if (vertex_feature()) return shape == KappaShape::segment ? a * std::tan(s) : 2 * a * std::tan(s / 2);
        return shape == KappaShape::segment ? s * std::hypot(1.0, slope) : s;
    }

    double kappa_cost(double s0, double s1) const {
        return kappa_curve().cost(kappa_curve_param(s0), kappa_curve_param(s1));
    }

    // World angle sign: +1 when the frame is right-handed.
    double handedness() const { return cross(ex, ey) > 0 ? 1.0 : -1.0; }
};

// Synthetic cells in canonical frames; used by tests and diagnostics.
inline RefinedCell make_vertex_cell(KappaShape shape, double a, double theta_alpha, double theta_beta) {
    RefinedCell T;
    T.feat = Feature{FeatureKind::vertex, {0, 0}, {0, 0}, 0, 0};
    T.shape = shape;
    T.a = a;
    T.theta_alpha = theta_alpha;
    T.theta_beta = theta_beta;
    T.u = T.kappa_point(theta_alpha);
    T.v = T.kappa_point(theta_beta);
    T.clr_u = T.kappa_clearance(theta_alpha);
    T.clr_v = T.kappa_clearance(theta_beta);
    return T;
}

// `param` is slope (segment), a (parabola) or height (horizontal).
inline RefinedCell make_edge_cell(KappaShape shape, double param, double x_alpha, double x_beta) {
    RefinedCell T;
    T.feat = Feature{FeatureKind::edge, {-1e6, 0}, {1e6, 0}, 0, 0};
    T.shape = shape;
    if (shape == KappaShape::segment) T.slope = param;
    if (shape == KappaShape::parabola) T.a = param;
    if (shape == KappaShape::horizontal) T.height = param;
    T.x_alpha = x_alpha;
    T.x_beta = x_beta;
    T.u = T.kappa_point(x_alpha);
    T.v = T.kappa_point(x_beta);
    T.clr_u = T.kappa_clearance(x_alpha);
    T.clr_v = T.kappa_clearance(x_beta);
    return T;
}

struct ConstClearanceArc {
    Point w, w_bar;
    double clearance = 0;
    bool on_alpha = false;
    double s_bar = 0;  // frame parameter of w_bar
    double cost = 0;
};

inline ConstClearanceArc constant_clearance_arc(const RefinedCell& T, double c) {
    if (!(c > 0) || c > T.clr_v * (1 + 1e-12) + 1e-300)
        throw Error(ErrorKind::precondition, "constant_clearance_arc: clearance out of range");
    ConstClearanceArc arc;
    arc.clearance = c;
    arc.w = T.beta_point(c);
    // At the top of beta the arc is the single point v, also when kappa has constant clearance.
    bool top = c >= T.clr_v * (1 - 1e-12);
    arc.on_alpha = !top && c <= T.clr_u;
    arc.s_bar = top ? T.s_beta()
                : arc.on_alpha ? T.s_alpha()
                               : std::clamp(T.kappa_param_at_clearance(c), T.s_alpha(), T.s_beta());
    arc.w_bar = T.at_param(arc.s_bar, c);
    double span = T.s_beta() - arc.s_bar;
    arc.cost = T.vertex_feature() ? span : span / c;
    return arc;
}

inline ConstClearanceArc constant_clearance_arc(const RefinedCell& T, Point w) {
    return constant_clearance_arc(T, T.feature_distance(w));
}

// eta_w as a primitive, oriented from w to w_bar (or reversed).
inline AnalyticPrimitive arc_primitive(const RefinedCell& T, const ConstClearanceArc& arc, bool reverse = false) {
    AnalyticPrimitive p;
    if (T.vertex_feature()) {
        double dphi = (arc.s_bar - T.s_beta()) * T.handedness();
        p = make_polar(PrimitiveKind::clearance_arc, T.origin, arc.w, arc.w_bar, dphi, arc.cost, T.feature);
    } else {
        p = make_straight(PrimitiveKind::clearance_arc, arc.w, arc.w_bar, arc.cost, T.feature);
    }
    return reverse ? p.reversed() : p;
}

struct Connector {
    Point p;
    int node = -1;
    int feature = -1;
    int radial_edge = -1;  // -1 when snapped onto an existing node or Voronoi edge
    bool snapped = false;
};

struct RefinedDiagram {
    Scene scene;  // endpoints ordered so that clr(source) <= clr(target)
    bool swapped = false;
    VoronoiDiagram voronoi;
    std::vector<DiagramEdge> edges;
    std::vector<RefinedCell> cells;
    std::vector<Point> nodes;
    std::vector<double> node_clr;
    std::vector<std::vector<std::pair<int, double>>> node_edges;  // node -> (edge, param)
    Connector s, t;
    int s_cell = -1, t_cell = -1;
    int n = 0;

    int complexity() const { return n; }
};

namespace detail {

struct RefineBuilder {
    const Scene& scene;
    RefinedDiagram& out;
    double tol;
    std::vector<std::vector<double>> splits_a, splits_b;  // per external edge
    std::vector<std::vector<std::pair<Point, int>>> radial_at;  // node -> (foot, radial edge)
    std::vector<int> type_ii;

    int add_node(Point p, double c) {
        out.nodes.push_back(p);
        out.node_clr.push_back(c);
        radial_at.emplace_back();
        return static_cast<int>(out.nodes.size()) - 1;
    }

    // Node on edge e at param t; reuses an existing node within tolerance.
    int node_on_edge(int e, double t) {
        DiagramEdge& E = out.edges[e];
        Point p = E.point(t);
        for (auto& [tp, id] : E.nodes)
            if (dist(out.nodes[id], p) <= tol) return id;
        int id = add_node(p, E.clearance(t));
        E.nodes.emplace_back(t, id);
        std::sort(E.nodes.begin(), E.nodes.end());
        return id;
    }

    void add_split(int e, int feature, double t) {
        DiagramEdge& E = out.edges[e];
        auto& v = E.feature_a == feature ? splits_a[e] : splits_b[e];
        v.push_back(t);
    }

    int radial(int node, int feature, RadialKind kind) {
        Point x = out.nodes[node];
        const Feature& f = scene.feature(feature);
        Point foot = feature_foot(f, x);
        for (auto& [fp, id] : radial_at[node])
            if (dist(fp, foot) <= tol) {
                if (out.edges[id].feature_a != feature && out.edges[id].feature_b < 0) out.edges[id].feature_b = feature;
                return id;
            }
        if (dist(x, foot) <= tol) return -1;
        DiagramEdge E;
        E.internal = true;
        E.radial_kind = kind;
        if (kind == RadialKind::type_i && std::find(type_ii.begin(), type_ii.end(), node) != type_ii.end())
            E.radial_kind = RadialKind::type_ii;
        E.curve = make_radial(foot, x - foot);
        E.t_lo = 0;
        E.t_hi = dist(x, foot);
        E.feature_a = feature;
        E.nodes.emplace_back(E.t_hi, node);
        int id = static_cast<int>(out.edges.size());
        out.edges.push_back(E);
        radial_at[node].emplace_back(foot, id);
        return id;
    }

    Connector locate(Point p) {
        Connector c;
        c.p = p;
        for (int i = 0; i < static_cast<int>(out.nodes.size()); ++i)
            if (dist(out.nodes[i], p) <= tol) {
                c.node = i;
                c.snapped = true;
                return c;
            }
        auto cr = scene.clearance(p);
        int f = cr.feature;
        c.feature = f;
        int n_ext = static_cast<int>(splits_a.size());
        for (int e = 0; e < n_ext; ++e) {
            DiagramEdge& E = out.edges[e];
            if (E.feature_a != f && E.feature_b != f) continue;
            double t = std::clamp(E.curve.param_of(p), E.t_lo, E.t_hi);
            if (dist(E.point(t), p) <= tol) {
                c.node = node_on_edge(e, t);
                c.snapped = true;
                return c;
            }
        }
        Point foot = feature_foot(scene.feature(f), p);
        Vec2 D = normalized(p - foot);
        double L = 4 * scene.box().diagonal();
        double lam_s = dist(p, foot) / L;
        int best_e = -1;
        double best_lam = std::numeric_limits<double>::infinity(), best_t = 0;
        for (int e = 0; e < n_ext; ++e) {
            DiagramEdge& E = out.edges[e];
            if (E.feature_a != f && E.feature_b != f) continue;
            for (auto [lam, t] : E.curve.intersect_segment(foot, foot + D * L, E.t_lo, E.t_hi, tol))
                if (lam >= lam_s - tol / L && lam < best_lam) {
                    best_lam = lam;
                    best_t = t;
                    best_e = e;
                }
        }
        if (best_e < 0) throw Error(ErrorKind::construction, "refine: connector ray hits no Voronoi edge");
        int hit = node_on_edge(best_e, best_t);
        add_split(best_e, f, out.edges[best_e].curve.param_of(out.nodes[hit]));
        c.node = add_node(p, cr.value);
        c.radial_edge = hit;  // temporarily the hit node; resolved after cells exist
        return c;
    }

    void frame(RefinedCell& T, const Feature& o, const Feature& other) {
        T.feat = o;
        if (o.is_vertex()) {
            T.origin = o.a;
            if (other.is_vertex()) {
                T.shape = KappaShape::segment;
                T.ex = normalized(other.a - o.a);
                T.a = dist(other.a, o.a) / 2;
            } else {
                T.shape = KappaShape::parabola;
                Point foot = foot_on_line(o.a, other.a, other.b);
                T.ex = normalized(foot - o.a);
                T.a = dist(foot, o.a) / 2;
            }
            T.ey = perp(T.ex);
            double yu = dot(T.u - T.origin, T.ey), yv = dot(T.v - T.origin, T.ey);
            if ((std::abs(yv) >= std::abs(yu) ? yv : yu) < 0) T.ey = -T.ey;
            T.theta_alpha = std::max(0.0, T.param(T.u));
            T.theta_beta = std::max(T.theta_alpha, T.param(T.v));
            return;
        }
        Vec2 d = normalized(o.b - o.a);
        T.ey = perp(d);
        if (dot(T.v - o.a, T.ey) < 0) T.ey = -T.ey;
        if (other.is_vertex()) {
            T.shape = KappaShape::parabola;
            T.origin = foot_on_line(other.a, o.a, o.b);
            T.a = dist(other.a, T.origin) / 2;
        } else {
            Vec2 d2 = normalized(other.b - other.a);
            double s = cross(d, d2);
            if (std::abs(s) < 1e-10) {
                T.shape = KappaShape::horizontal;
                T.origin = foot_on_line(T.u, o.a, o.b);
                T.height = T.clr_u;
            } else {
                T.shape = KappaShape::segment;
                double lam = cross(other.a - o.a, d2) / s;
                T.origin = o.a + d * lam;
            }
        }
        T.ex = d;
        if (dot(T.v - T.origin, T.ex) < 0) T.ex = -T.ex;
        T.x_alpha = dot(T.u - T.origin, T.ex);
        T.x_beta = dot(T.v - T.origin, T.ex);
        if (T.shape == KappaShape::segment) T.slope = dot(T.v - T.origin, T.ey) / T.x_beta;
        if (T.shape == KappaShape::horizontal) T.x_alpha = 0;
        if (T.shape == KappaShape::parabola) T.x_alpha = std::max(0.0, T.x_alpha);
        T.x_alpha = std::min(T.x_alpha, T.x_beta);
    }

    void build_cells() {
        int n_ext = static_cast<int>(splits_a.size());
        for (int e = 0; e < n_ext; ++e) {
            for (int side = 0; side < 2; ++side) {
                int f = side == 0 ? out.edges[e].feature_a : out.edges[e].feature_b;
                int other = side == 0 ? out.edges[e].feature_b : out.edges[e].feature_a;
                std::vector<double> ts = side == 0 ? splits_a[e] : splits_b[e];
                const DiagramEdge& E0 = out.edges[e];
                ts.push_back(E0.t_lo);
                ts.push_back(E0.t_hi);
                std::sort(ts.begin(), ts.end());
                for (size_t i = 0; i + 1 < ts.size(); ++i) {
                    double t0 = ts[i], t1 = ts[i + 1];
                    if (dist(out.edges[e].point(t0), out.edges[e].point(t1)) <= tol) continue;
                    int n0 = node_on_edge(e, t0), n1 = node_on_edge(e, t1);
                    const DiagramEdge& E = out.edges[e];
                    double c0 = E.clearance(t0), c1 = E.clearance(t1);
                    RefinedCell T;
                    T.id = static_cast<int>(out.cells.size());
                    T.feature = f;
                    T.kappa_edge = e;
                    bool fwd = c0 <= c1;
                    T.kappa_tu = fwd ? t0 : t1;
                    T.kappa_tv = fwd ? t1 : t0;
                    T.node_u = fwd ? n0 : n1;
                    T.node_v = fwd ? n1 : n0;
                    T.u = out.nodes[T.node_u];
                    T.v = out.nodes[T.node_v];
                    T.clr_u = std::min(c0, c1);
                    T.clr_v = std::max(c0, c1);
                    frame(T, scene.feature(f), scene.feature(other));
                    T.alpha_edge = radial(T.node_u, f, RadialKind::type_i);
                    T.beta_edge = radial(T.node_v, f, RadialKind::type_i);
                    out.edges[e].cells.push_back(T.id);
                    if (T.alpha_edge >= 0) out.edges[T.alpha_edge].cells.push_back(T.id);
                    if (T.beta_edge >= 0) out.edges[T.beta_edge].cells.push_back(T.id);
                    out.cells.push_back(T);
                }
            }
        }
    }

    void attach_connector(Connector& c) {
        if (c.snapped) return;
        int hit = c.radial_edge;
        c.radial_edge = radial(hit, c.feature, RadialKind::connector);
        if (c.radial_edge < 0) throw Error(ErrorKind::construction, "refine: degenerate connector");
        DiagramEdge& R = out.edges[c.radial_edge];
        if (R.radial_kind == RadialKind::type_i) R.radial_kind = RadialKind::connector;
        double t = R.curve.param_of(c.p);
        R.nodes.emplace_back(t, c.node);
        std::sort(R.nodes.begin(), R.nodes.end());
    }
};

}  // namespace detail

inline RefinedDiagram refine(const VoronoiDiagram& vd, const Scene& scene) {
    RefinedDiagram out;
    out.scene = scene;
    out.voronoi = vd;
    out.n = scene.complexity();
    detail::RefineBuilder b{out.scene, out, scene.tol(), {}, {}, {}, {}};

    for (auto& v : vd.vertices) b.add_node(v.p, v.clearance);
    for (int i = 0; i < static_cast<int>(vd.edges.size()); ++i) {
        const VoronoiEdge& ve = vd.edges[i];
        if (ve.secondary) continue;
        DiagramEdge E;
        E.curve = ve.geometry;
        E.t_lo = ve.t0;
        E.t_hi = ve.t1;
        E.voronoi_edge = i;
        E.feature_a = ve.left_feature;
        E.feature_b = ve.right_feature;
        E.nodes = {{ve.t0, ve.v0}, {ve.t1, ve.v1}};
        out.edges.push_back(E);
    }
    size_t n_ext = out.edges.size();
    b.splits_a.assign(n_ext, {});
    b.splits_b.assign(n_ext, {});

    // Type (ii): clearance minimum in the interior of a Voronoi edge.
    for (size_t e = 0; e < n_ext; ++e) {
        DiagramEdge& E = out.edges[e];
        if (!E.curve.has_interior_minimum()) continue;
        double tm = E.curve.min_clearance_param();
        if (tm <= E.t_lo || tm >= E.t_hi) continue;
        Point pm = E.point(tm);
        if (dist(pm, E.point(E.t_lo)) <= b.tol || dist(pm, E.point(E.t_hi)) <= b.tol) continue;
        b.type_ii.push_back(b.node_on_edge(static_cast<int>(e), tm));
        b.splits_a[e].push_back(tm);
        b.splits_b[e].push_back(tm);
    }

    out.s = b.locate(scene.source());
    out.t = b.locate(scene.target());
    b.build_cells();
    b.attach_connector(out.s);
    b.attach_connector(out.t);

    out.node_edges.assign(out.nodes.size(), {});
    for (int e = 0; e < static_cast<int>(out.edges.size()); ++e)
        for (auto& [t, id] : out.edges[e].nodes) out.node_edges[id].emplace_back(e, t);

    auto cell_of = [&](int node) {
        for (auto& [e, t] : out.node_edges[node])
            if (!out.edges[e].cells.empty()) return out.edges[e].cells.front();
        return -1;
    };
    out.s_cell = cell_of(out.s.node);
    out.t_cell = cell_of(out.t.node);
    return out;
}

// Builds the diagram with endpoints ordered so that clr(source) <= clr(target).
inline RefinedDiagram build_refined(const Scene& scene) {
    bool swap = scene.clr(scene.source()) > scene.clr(scene.target());
    Scene sc = swap ? scene.with_endpoints(scene.target(), scene.source()) : scene;
    VoronoiDiagram vd = build_voronoi(sc);
    RefinedDiagram rd = refine(vd, sc);
    rd.swapped = swap;
    return rd;
}

inline Point point_at_clearance(const DiagramEdge& radial, double c) {
    if (!radial.internal) throw Error(ErrorKind::precondition, "point_at_clearance: not a radial edge");
    if (!(c > 0) || c > radial.t_hi * (1 + 1e-12))
        throw Error(ErrorKind::precondition, "point_at_clearance: clearance out of range");
    return radial.point(c);
}

struct AlongResult {
    Point p;
    double t = 0;
    bool clamped = false;
};

inline AlongResult point_at_cost_along(const DiagramEdge& e, Point p, double d, int direction) {
    double t0 = e.curve.param_of(p);
    if (d <= 0) return {p, t0, false};
    double t = e.curve.advance(t0, d, direction);
    AlongResult r;
    if (t > e.t_hi || t < e.t_lo) {
        r.clamped = true;
        t = std::clamp(t, e.t_lo, e.t_hi);
    }
    r.t = t;
    r.p = e.point(t);
    return r;
}

inline double edge_cost(const DiagramEdge& e, Point p, Point q) {
    return e.curve.cost(e.curve.param_of(p), e.curve.param_of(q));
}

}  // namespace clrpath
