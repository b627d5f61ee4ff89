#include <gtest/gtest.h>

#include "support.hpp"

using namespace clrtest;

namespace {

Scene square_in_box() { return Scene({{{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}}, {-5, -5, 5, 5}, {-3, 0}, {3, 0.5}); }

Scene single_vertex() { return Scene({{{0, 0}}}, {-5, -5, 5, 5}, {1, 1}, {-2, 3}); }

Scene two_points_small() { return Scene({{{0, -1}}, {{0, 1}}}, {-60, -60, 60, 60}, {-50, 0}, {50, 0}); }

CurveKind expected_kind(const Feature& a, const Feature& b, bool secondary) {
    if (secondary) return CurveKind::radial;
    if (a.is_vertex() && b.is_vertex()) return CurveKind::point_point;
    if (a.is_vertex() || b.is_vertex()) return CurveKind::point_line;
    return CurveKind::line_line;
}

// Sampled points of every diagram edge have the clearance the curve claims.
void expect_clearance_consistent(const RefinedDiagram& rd, const char* name) {
    const Scene& s = rd.scene;
    double tol = s.chain_tol();
    for (size_t i = 0; i < rd.edges.size(); ++i) {
        const DiagramEdge& e = rd.edges[i];
        for (int k = 0; k <= 8; ++k) {
            double t = e.t_lo + (e.t_hi - e.t_lo) * k / 8;
            Point p = e.point(t);
            EXPECT_NEAR(s.clr(p), e.clearance(t), tol) << name << " edge " << i << " k " << k;
            if (!e.internal && e.feature_a >= 0 && e.feature_b >= 0) {
                double da = feature_line_distance(s.feature(e.feature_a), p);
                double db = feature_line_distance(s.feature(e.feature_b), p);
                EXPECT_NEAR(da, db, tol) << name << " edge " << i;
            }
        }
    }
    for (size_t i = 0; i < rd.nodes.size(); ++i) EXPECT_NEAR(s.clr(rd.nodes[i]), rd.node_clr[i], tol) << name << " node " << i;
}

void expect_cells_consistent(const RefinedDiagram& rd, const char* name) {
    double tol = rd.scene.chain_tol();
    for (const RefinedCell& T : rd.cells) {
        EXPECT_LE(T.s_alpha(), T.s_beta() + 1e-12) << name << " cell " << T.id;
        EXPECT_LE(T.clr_u, T.clr_v + tol) << name << " cell " << T.id;
        EXPECT_NEAR(T.feature_distance(T.u), T.clr_u, tol);
        EXPECT_NEAR(T.feature_distance(T.v), T.clr_v, tol);
        ASSERT_GE(T.kappa_edge, 0);
        const DiagramEdge& E = rd.edges[T.kappa_edge];
        EXPECT_FALSE(E.internal);
        for (int k = 0; k <= 10; ++k) {
            double t = T.kappa_tu + (T.kappa_tv - T.kappa_tu) * k / 10;
            Point p = E.point(t);
            EXPECT_NEAR(dist(T.kappa_point(T.param(p)), p), 0, tol) << name << " cell " << T.id;
            EXPECT_NEAR(T.feature_distance(p), E.clearance(t), tol);
        }
        if (T.beta_edge >= 0) {
            EXPECT_TRUE(rd.edges[T.beta_edge].internal);
        }
        if (T.alpha_edge >= 0) {
            EXPECT_TRUE(rd.edges[T.alpha_edge].internal);
        }
        if (T.vertex_feature() && T.shape == KappaShape::segment) {
            EXPECT_LE(T.theta_beta, kPi / 2 + 1e-9);
        }
    }
}

const DiagramEdge* find_edge(const RefinedDiagram& rd, auto&& pred) {
    for (auto& e : rd.edges)
        if (pred(e)) return &e;
    return nullptr;
}

}  // namespace

TEST(Voronoi, TwoPointsBisectY0) {
    Scene s = two_points_small();
    VoronoiDiagram vd = build_voronoi(s);
    int found = 0;
    for (const VoronoiEdge& e : vd.edges) {
        if (!(e.has_site(0) && e.has_site(1))) continue;
        ++found;
        EXPECT_EQ(e.geometry.kind, CurveKind::point_point);
        for (int k = 0; k <= 10; ++k) EXPECT_NEAR(e.geometry.point(e.t0 + (e.t1 - e.t0) * k / 10).y, 0, 1e-9);
        Point m = e.clearance_min_point();
        EXPECT_NEAR(m.x, 0, 1e-9);
        EXPECT_NEAR(s.clr(m), 1, 1e-9);
    }
    EXPECT_EQ(found, 1);
}

TEST(Voronoi, SquareInBoxStructure) {
    Scene s = square_in_box();
    VoronoiDiagram vd = build_voronoi(s);
    int secondary = 0, parallel_or_angle = 0;
    for (const VoronoiEdge& e : vd.edges) {
        const Feature &a = s.feature(e.left_feature), &b = s.feature(e.right_feature);
        CurveKind want = expected_kind(a, b, e.secondary);
        if (want == CurveKind::line_line)
            EXPECT_TRUE(e.geometry.kind == CurveKind::line_line || e.geometry.kind == CurveKind::parallel);
        else EXPECT_EQ(e.geometry.kind, want);
        EXPECT_LT(e.t0, e.t1);
        if (e.secondary) ++secondary;
        if (!a.is_vertex() && !b.is_vertex()) ++parallel_or_angle;
    }
    // Each square corner bounds two secondary edges toward its incident edges.
    EXPECT_EQ(secondary, 8);
    EXPECT_GT(parallel_or_angle, 0);
    for (const VoronoiVertex& v : vd.vertices) EXPECT_NEAR(s.clr(v.p), v.clearance, 1e-9);
}

TEST(Voronoi, SingleVertexHasFourParabolas) {
    Scene s = single_vertex();
    VoronoiDiagram vd = build_voronoi(s);
    int vertex_feature = -1;
    for (size_t i = 0; i < s.features().size(); ++i)
        if (s.feature(static_cast<int>(i)).polygon == 0) vertex_feature = static_cast<int>(i);
    ASSERT_GE(vertex_feature, 0);
    int arcs = 0;
    for (const VoronoiEdge& e : vd.edges)
        if (e.has_site(vertex_feature)) {
            EXPECT_EQ(e.geometry.kind, CurveKind::point_line);
            ++arcs;
        }
    EXPECT_EQ(arcs, 4);
}

TEST(Voronoi, BisectorCurveEquidistant) {
    Gen g(5);
    for (int i = 0; i < 50; ++i) {
        Feature f{FeatureKind::vertex, {g.uniform(-3, 3), g.uniform(-3, 3)}, {}, 0, 0};
        f.b = f.a;
        Feature h{FeatureKind::edge, {-10, g.uniform(-8, -5)}, {10, g.uniform(-8, -5)}, 1, 0};
        CurveGeometry c = bisector_curve(f, h, f.a);
        for (double t : {-2.0, -0.5, 0.0, 0.7, 3.0}) {
            Point p = c.point(t);
            EXPECT_NEAR(dist(p, f.a), dist_to_line(p, h.a, h.b), 1e-9);
            EXPECT_NEAR(c.clearance(t), dist(p, f.a), 1e-9);
        }
    }
}

TEST(Refined, TypeIiSplitAtMidpoint) {
    RefinedDiagram rd = build_refined(two_points_small());
    const DiagramEdge* bis = find_edge(rd, [](const DiagramEdge& e) { return e.curve.kind == CurveKind::point_point; });
    ASSERT_NE(bis, nullptr);
    bool split = false;
    for (auto [t, node] : bis->nodes)
        if (std::abs(t) < 1e-9) {
            split = true;
            EXPECT_NEAR(rd.node_clr[node], 1, 1e-9);
            EXPECT_NEAR(dist(rd.nodes[node], Point{0, 0}), 0, 1e-9);
        }
    EXPECT_TRUE(split);
    int type_ii = 0;
    for (auto& e : rd.edges)
        if (e.radial_kind == RadialKind::type_ii && dist(e.point(e.t_hi), Point{0, 0}) < 1e-9) {
            ++type_ii;
            EXPECT_TRUE(e.internal);
            EXPECT_NEAR(e.t_hi, 1, 1e-9);  // foot distance
        }
    EXPECT_EQ(type_ii, 2);  // one toward each point
}

TEST(Refined, SourceConnector) {
    Scene s = square_in_box();
    RefinedDiagram rd = build_refined(s);
    EXPECT_EQ(rd.s.p.x, s.source().x);
    EXPECT_EQ(rd.s.p.y, s.source().y);
    ASSERT_GE(rd.s.node, 0);
    EXPECT_NEAR(dist(rd.nodes[rd.s.node], s.source()), 0, s.tol());
    if (rd.s.radial_edge >= 0) {
        const DiagramEdge& e = rd.edges[rd.s.radial_edge];
        EXPECT_EQ(e.radial_kind, RadialKind::connector);
        EXPECT_NEAR(e.clearance(e.curve.param_of(s.source())), s.clr(s.source()), s.chain_tol());
    }
    EXPECT_GE(rd.s_cell, 0);
    EXPECT_GE(rd.t_cell, 0);
}

TEST(Refined, EndpointsOrderedByClearance) {
    Scene s({{{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}}, {-5, -5, 5, 5}, {-3, 0}, {3.5, 0.5});
    RefinedDiagram rd = build_refined(s);
    EXPECT_TRUE(rd.swapped);
    EXPECT_LE(rd.scene.clr(rd.scene.source()), rd.scene.clr(rd.scene.target()));
}

TEST(Refined, ExamplesConsistent) {
    const std::pair<const char*, Scene> scenes[] = {{"square", square_in_box()},
                                                    {"vertex", single_vertex()},
                                                    {"two points", two_points_small()},
                                                    {"mixed", load_scene(scene_path("mixed.scene"))}};
    for (auto& [name, s] : scenes) {
        RefinedDiagram rd = build_refined(s);
        expect_clearance_consistent(rd, name);
        expect_cells_consistent(rd, name);
    }
}

TEST(Refined, CorpusConsistent) {
    for (uint64_t seed = 1; seed <= 6; ++seed) {
        RefinedDiagram rd = build_refined(random_scene(seed));
        std::string name = "seed " + std::to_string(seed);
        expect_clearance_consistent(rd, name.c_str());
        expect_cells_consistent(rd, name.c_str());
    }
}

TEST(EdgeWalk, PointAtCostAlongBisector) {
    RefinedDiagram rd = build_refined(two_points_small());
    const DiagramEdge* bis = find_edge(rd, [](const DiagramEdge& e) { return e.curve.kind == CurveKind::point_point; });
    ASSERT_NE(bis, nullptr);
    Point mid = bis->point(0);
    AlongResult r = point_at_cost_along(*bis, mid, 1.0, +1);
    EXPECT_NEAR(std::abs(r.t), std::sinh(1.0), 1e-12);
    EXPECT_NEAR(std::abs(r.t), 1.1752, 1e-4);
    EXPECT_FALSE(r.clamped);
    AlongResult z = point_at_cost_along(*bis, mid, 0.0, +1);
    EXPECT_EQ(z.p.x, mid.x);
    EXPECT_EQ(z.p.y, mid.y);
    AlongResult far = point_at_cost_along(*bis, mid, 100.0, +1);
    EXPECT_TRUE(far.clamped);
    EXPECT_NEAR(edge_cost(*bis, mid, r.p), 1.0, 1e-12);
    EXPECT_EQ(edge_cost(*bis, mid, mid), 0.0);
}

TEST(EdgeWalk, RadialDoublesClearance) {
    RefinedDiagram rd = build_refined(square_in_box());
    const DiagramEdge* rad = find_edge(rd, [](const DiagramEdge& e) { return e.internal && e.t_lo <= 1 && e.t_hi >= 2.2; });
    ASSERT_NE(rad, nullptr);
    Point p = point_at_clearance(*rad, 1.0);
    AlongResult r = point_at_cost_along(*rad, p, std::log(2.0), +1);
    EXPECT_NEAR(rd.scene.clr(r.p), 2.0, 1e-9);
    EXPECT_THROW(point_at_clearance(*rad, rad->t_hi * 2), Error);
}

// Closed-form edge costs against quadrature of 1/clr along random diagram edge portions.
TEST(EdgeWalk, EdgeCostMatchesQuadrature) {
    Gen g(17);
    int parabolas = 0;
    for (uint64_t seed = 1; seed <= 4; ++seed) {
        RefinedDiagram rd = build_refined(random_scene(seed));
        for (int k = 0; k < 60; ++k) {
            int i = g.integer(0, static_cast<int>(rd.edges.size()) - 1);
            const DiagramEdge& e = rd.edges[i];
            double t0 = g.uniform(e.t_lo, e.t_hi), t1 = g.uniform(e.t_lo, e.t_hi);
            if (e.clearance(t0) < 1e-3 || e.clearance(t1) < 1e-3) continue;
            AnalyticPrimitive a = make_curve_portion(e.curve, t0, t1, i);
            double cf = edge_cost(e, e.point(t0), e.point(t1));
            EXPECT_NEAR(cf, a.cost, 1e-9 * (1 + cf));
            double q = path_cost_numeric(rd.scene, a);
            EXPECT_NEAR(q, cf, 1e-6 * (1 + cf)) << "seed " << seed << " edge " << i;
            if (e.curve.kind == CurveKind::point_line) ++parabolas;
        }
    }
    EXPECT_GT(parabolas, 0);
}

TEST(EdgeWalk, AdvanceInvertsCost) {
    Gen g(23);
    RefinedDiagram rd = build_refined(random_scene(3));
    for (int k = 0; k < 200; ++k) {
        const DiagramEdge& e = rd.edges[g.integer(0, static_cast<int>(rd.edges.size()) - 1)];
        double t0 = g.uniform(e.t_lo, e.t_hi);
        if (e.clearance(t0) < 1e-3) continue;
        double d = g.uniform(0, 2);
        int dir = g.coin() ? 1 : -1;
        AlongResult r = point_at_cost_along(e, e.point(t0), d, dir);
        if (r.clamped) continue;
        EXPECT_NEAR(edge_cost(e, e.point(t0), r.p), d, 1e-8 * (1 + d));
    }
}
