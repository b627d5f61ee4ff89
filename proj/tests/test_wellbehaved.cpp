#include <gtest/gtest.h>

#include "checks.hpp"

using namespace clrtest;

namespace {

// Edge cell over [1, 3] with kappa of slope 3: alpha is tall enough to carry the alpha anchor.
RefinedCell case2_cell() { return make_edge_cell(KappaShape::segment, 3, 1, 3); }

ClearanceFn cell_clearance(const RefinedCell& T) {
    return [&T](Point p) { return T.feature_distance(p); };
}

}  // namespace

TEST(Lambda, VertexQuarterTurn) {
    RefinedCell T = make_vertex_cell(KappaShape::parabola, 3, 0, kPi / 2);
    EXPECT_NEAR(lambda_cost(T, 1, std::exp(1.0)), 1 + kPi / 2, 1e-12);
    LambdaPath lp = lambda_path(T, T.beta_point(1), std::exp(1.0));
    EXPECT_NEAR(lp.path.total_cost, 1 + kPi / 2, 1e-12);
    EXPECT_TRUE(lp.arc.on_alpha);
    EXPECT_NEAR(path_cost_numeric(lp.path, cell_clearance(T)), 1 + kPi / 2, 1e-8);
}

TEST(Lambda, EdgeCase2Alpha) {
    RefinedCell T = case2_cell();
    AnchorPair A = anchor_points(T);
    ASSERT_TRUE(A.w_alpha.has_value());
    EXPECT_NEAR(*A.w_alpha, 2, 1e-12);
    EXPECT_EQ(A.alpha_case, AnchorCase::case2_alpha);
    EXPECT_NEAR(lambda_cost(T, 1, 2), std::log(2.0) + 1, 1e-12);
}

TEST(Lambda, RejectsLowerAnchor) {
    RefinedCell T = case2_cell();
    EXPECT_THROW(lambda_path(T, T.beta_point(2), 1), Error);
}

TEST(Anchors, VertexTargets) {
    RefinedCell seg = make_vertex_cell(KappaShape::segment, 1, 0, 1.2);
    AnchorPair A = anchor_points(seg);
    EXPECT_NEAR(A.t_star, kPi / 4, 1e-15);
    ASSERT_TRUE(A.w_kappa.has_value());
    EXPECT_NEAR(*A.w_kappa, std::sqrt(2.0), 1e-12);
    EXPECT_FALSE(A.w_alpha.has_value());
    RefinedCell par = make_vertex_cell(KappaShape::parabola, 1, 0, 2);
    EXPECT_NEAR(anchor_points(par).t_star, kPi / 2, 1e-15);
    EXPECT_NEAR(*anchor_points(par).w_kappa, 2, 1e-12);
    // Clamped into the cell.
    RefinedCell narrow = make_vertex_cell(KappaShape::segment, 1, 0, 0.5);
    EXPECT_NEAR(*anchor_points(narrow).w_kappa, narrow.clr_v, 1e-12);
}

TEST(Anchors, CubicRoot) {
    double t = anchor_cubic_root(1, 4);
    EXPECT_NEAR(t, 2.962389, 1e-6);
    EXPECT_NEAR(2 * t * t * t + 4 * t * t + 8 * (1 - 4) * t - 16, 0, 1e-9);
    RefinedCell T = make_edge_cell(KappaShape::parabola, 1, 0, 4);
    AnchorPair A = anchor_points(T);
    EXPECT_EQ(A.kappa_case, AnchorCase::case2_parabola);
    EXPECT_NEAR(A.t_star, t, 1e-9);
    EXPECT_NEAR(*A.w_kappa, t * t / 4 + 1, 1e-9);
}

TEST(Anchors, SegmentAndHorizontal) {
    RefinedCell T = make_edge_cell(KappaShape::segment, 2, 1, 3);
    AnchorPair A = anchor_points(T);
    EXPECT_NEAR(A.t_star, 1.5, 1e-15);
    EXPECT_NEAR(*A.w_kappa, 3, 1e-12);
    RefinedCell H = make_edge_cell(KappaShape::horizontal, 1, 0, 5);
    AnchorPair B = anchor_points(H);
    ASSERT_TRUE(B.w_kappa.has_value());
    EXPECT_EQ(*B.w_kappa, H.clr_v);
    EXPECT_FALSE(B.w_alpha.has_value());  // span exceeds the height
}

TEST(Anchors, BestAnchorPicksAlpha) {
    RefinedCell T = case2_cell();
    BestAnchor b = best_anchor(T, 0.5, anchor_points(T));
    EXPECT_EQ(b.which, AnchorUsed::w_alpha);
    EXPECT_NEAR(b.clearance, 2, 1e-12);
    EXPECT_NEAR(b.cost, std::log(4.0) + 1, 1e-12);
    EXPECT_NEAR(b.cost, 2.386, 1e-3);
}

TEST(Anchors, AboveAnchorsUsesP) {
    RefinedCell T = case2_cell();
    BestAnchor b = best_anchor(T, T.clr_v, anchor_points(T));
    EXPECT_EQ(b.which, AnchorUsed::p);
    EXPECT_EQ(b.cost, 0);
}

TEST(ConstantArc, TopOfBetaIsTrivial) {
    for (RefinedCell T : {case2_cell(), make_edge_cell(KappaShape::horizontal, 1, 0, 5),
                          make_vertex_cell(KappaShape::segment, 1, 0.2, 1.1)}) {
        ConstClearanceArc arc = constant_clearance_arc(T, T.clr_v);
        EXPECT_EQ(arc.cost, 0);
        EXPECT_NEAR(dist(arc.w_bar, T.v), 0, 1e-12);
    }
    EXPECT_THROW(constant_clearance_arc(case2_cell(), 100), Error);
    EXPECT_THROW(constant_clearance_arc(case2_cell(), 0), Error);
}

TEST(ConstantArc, LandsOnBoundary) {
    Gen g(3);
    for (int i = 0; i < 300; ++i) {
        RefinedCell T = random_cell(g);
        double c = T.clr_v * g.uniform(0.01, 0.999);
        ConstClearanceArc arc = constant_clearance_arc(T, c);
        unsigned m = side_mask(T, arc.w_bar, 1e-7);
        EXPECT_TRUE(on_side(m, arc.on_alpha ? Side::alpha : Side::kappa)) << "cell " << i;
        EXPECT_NEAR(T.feature_distance(arc.w_bar), c, 1e-9 * (1 + c));
        AnalyticPrimitive p = arc_primitive(T, arc);
        if (arc.cost > 0) {
            EXPECT_NEAR(primitive_cost_numeric(p, cell_clearance(T)), arc.cost, 1e-7 * (1 + arc.cost));
        }
    }
}

TEST(SideMask, Corners) {
    RefinedCell T = case2_cell();
    EXPECT_EQ(side_mask(T, T.u), static_cast<unsigned>(Side::alpha) | static_cast<unsigned>(Side::kappa));
    EXPECT_EQ(side_mask(T, T.v), static_cast<unsigned>(Side::beta) | static_cast<unsigned>(Side::kappa));
    EXPECT_EQ(side_mask(T, T.beta_point(1)), static_cast<unsigned>(Side::beta));
    EXPECT_EQ(side_mask(T, T.kappa_point(2)), static_cast<unsigned>(Side::kappa));
    EXPECT_EQ(side_mask(T, T.at_param(2, 1)), 0u);
}

TEST(WellBehaved, ExampleUsesAnchor) {
    RefinedCell T = case2_cell();
    WellBehavedPath wb = well_behaved_path(T, T.beta_point(0.5), T.alpha_point(0.5));
    EXPECT_EQ(wb.anchor_used, AnchorUsed::w_alpha);
    // Up beta to 2, across to alpha, down alpha to 0.5.
    EXPECT_NEAR(wb.cost, std::log(4.0) + 1 + std::log(4.0), 1e-12);
    EXPECT_THROW(well_behaved_path(T, T.at_param(2, 1), T.alpha_point(1)), Error);
}

// Paths join their endpoints, stay in the cell, and their recorded cost matches quadrature.
TEST(WellBehaved, PathsAreSound) {
    Gen g(29);
    for (int i = 0; i < 300; ++i) {
        RefinedCell T = random_cell(g);
        Point p = random_on_side(g, T, random_side(g)), q = random_on_side(g, T, random_side(g));
        WellBehavedPath wb = well_behaved_path(T, p, q);
        double scale = 1 + T.clr_v + std::abs(T.s_beta());
        if (wb.path.empty()) {
            EXPECT_LT(dist(p, q), 1e-9 * scale);
            continue;
        }
        EXPECT_LT(dist(wb.path.front(), p), 1e-9 * scale) << "cell " << i;
        EXPECT_LT(dist(wb.path.back(), q), 1e-9 * scale) << "cell " << i;
        EXPECT_LT(wb.path.max_gap(), 1e-9 * scale) << "cell " << i;
        for (Point x : wb.path.polyline(16)) EXPECT_TRUE(T.contains(x, 1e-7 * scale)) << "cell " << i;
        double q_cost = path_cost_numeric(wb.path, cell_clearance(T));
        EXPECT_NEAR(q_cost, wb.cost, 1e-6 * (1 + wb.cost)) << "cell " << i;
    }
}

TEST(WellBehaved, AnchorIsOptimalOnBeta) {
    Report r = anchor_optimality(41, 60, 10, 400);
    EXPECT_TRUE(r.ok()) << r.summary();
}

TEST(WellBehaved, WithinConstantOfCellOptimum) {
    Report r = wellbehaved_bounds(43, 12, 4, 64);
    EXPECT_TRUE(r.ok()) << r.summary();
}
