#include <gtest/gtest.h>

#include "checks.hpp"

using namespace clrtest;

TEST(Transform, RoundTrip) {
    Gen g(1);
    for (int i = 0; i < 200; ++i) {
        RefinedCell T = random_vertex_cell(g);
        Point p = random_interior(g, T);
        TransformedPoint t = transform(T, p);
        EXPECT_NEAR(t.log_r, std::log(T.feature_distance(p)), 1e-12);
        EXPECT_NEAR(dist(inverse_transform(T, t), p), 0, 1e-9 * (1 + norm(p)));
    }
    EXPECT_THROW(transform(make_edge_cell(KappaShape::segment, 1, 1, 2), {1, 0.5}), Error);
}

TEST(LocallyReachable, Examples) {
    RefinedCell V = make_vertex_cell(KappaShape::segment, 1, 0, 1.2);
    // Two points on the straight kappa: the spiral between them bulges past the line.
    EXPECT_FALSE(locally_reachable(V, V.kappa_point(0.2), V.kappa_point(1.0)));
    EXPECT_TRUE(locally_reachable(V, V.alpha_point(0.3), V.beta_point(0.3)));
    EXPECT_TRUE(locally_reachable(V, V.beta_point(0.2), V.beta_point(V.clr_v)));

    RefinedCell E = make_edge_cell(KappaShape::horizontal, 1, 0, 4);
    // The half-circle through both points rises above height 1.
    EXPECT_FALSE(locally_reachable(E, E.alpha_point(0.9), E.beta_point(0.9)));
    EXPECT_TRUE(locally_reachable(E, E.alpha_point(0.1), E.kappa_point(0.2)));
    EXPECT_TRUE(locally_reachable(E, E.alpha_point(0.2), E.alpha_point(0.9)));
}

// The closed-form margin agrees with a dense scan of the geodesic away from the boundary case.
TEST(LocallyReachable, AgreesWithDenseScan) {
    Gen g(2);
    int yes = 0, no = 0;
    for (int i = 0; i < 1500; ++i) {
        RefinedCell T = random_cell(g);
        Point p = g.coin() ? random_interior(g, T) : random_on_side(g, T, random_side(g));
        Point q = g.coin() ? random_interior(g, T) : random_on_side(g, T, random_side(g));
        double m = reachability_margin(T, p, q);
        if (std::abs(m) < 1e-4) continue;
        bool r = locally_reachable(T, p, q);
        EXPECT_EQ(r, locally_reachable_dense(T, p, q, 512, 1e-7)) << "pair " << i << " margin " << m;
        (r ? yes : no)++;
        EXPECT_EQ(r, locally_reachable(T, q, p));
    }
    EXPECT_GT(yes, 100);
    EXPECT_GT(no, 100);
}

TEST(TangentWitness, TouchesKappa) {
    Gen g(3);
    int found = 0;
    for (int i = 0; i < 300; ++i) {
        RefinedCell T = random_cell(g);
        Point p = random_on_side(g, T, g.coin() ? Side::alpha : Side::beta);
        int dir = on_side(side_mask(T, p), Side::alpha) ? +1 : -1;
        TangentWitness w = tangent_witness(T, p, dir);
        if (!w.exists) continue;
        ++found;
        EXPECT_NEAR(dist(w.touch, T.kappa_point(w.touch_param)), 0, 1e-9 * (1 + T.clr_v));
        EXPECT_NEAR(reachability_margin(T, p, w.touch), 0, 1e-6) << "cell " << i;
        // Kappa past the tangency point is not reachable.
        double past = w.touch_param + dir * 0.05 * (T.s_beta() - T.s_alpha());
        if (past > T.s_alpha() && past < T.s_beta()) {
            EXPECT_FALSE(locally_reachable(T, p, T.kappa_point(past), 1e-12));
        }
    }
    EXPECT_GT(found, 30);
}

TEST(ReachablePortion, BetaFromAlphaExample) {
    RefinedCell E = make_edge_cell(KappaShape::horizontal, 1, 0, 1.5);
    ParamInterval iv = reachable_portion(E, E.alpha_point(0.5), Side::beta);
    ASSERT_FALSE(iv.empty);
    EXPECT_LT(iv.lo, 1e-6);
    // The circle through (0, 0.5) and (1.5, y) centered on the axis just reaches height 1.
    double y = iv.hi;
    double c = (2.25 + y * y - 0.25) / 3;
    EXPECT_NEAR(std::hypot(c, 0.5), 1.0, 1e-6);
    EXPECT_NEAR(y, std::sqrt(3 * std::sqrt(0.75) - 2), 1e-6);
}

TEST(ReachablePortion, DenseScanIsOneRun) {
    Report r = reachable_connectivity(5, 60, 400);
    EXPECT_TRUE(r.ok()) << r.summary();
}

TEST(ReachablePortion, ConsistentWithPredicate) {
    Report r = reachability_consistency(6, 600);
    EXPECT_TRUE(r.ok()) << r.summary();
}

TEST(LocalOptimal, NoWorseThanWellBehaved) {
    Gen g(7);
    int checked = 0;
    for (int i = 0; i < 400; ++i) {
        RefinedCell T = random_cell(g);
        Point p = random_on_side(g, T, random_side(g)), q = random_on_side(g, T, random_side(g));
        if (!locally_reachable(T, p, q)) {
            EXPECT_THROW(local_optimal_path(T, p, q), Error);
            continue;
        }
        Path lo = local_optimal_path(T, p, q);
        WellBehavedPath wb = well_behaved_path(T, p, q);
        EXPECT_LE(lo.total_cost, wb.cost * (1 + 1e-9) + 1e-12) << "cell " << i;
        double scale = 1 + T.clr_v + std::abs(T.s_beta());
        for (Point x : lo.polyline(32)) EXPECT_TRUE(T.contains(x, 1e-6 * scale)) << "cell " << i;
        ++checked;
    }
    EXPECT_GT(checked, 100);
}
