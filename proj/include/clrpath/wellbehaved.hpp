#pragma once

#include "refined.hpp"

namespace clrpath {

enum class Side : unsigned { alpha = 1, beta = 2, kappa = 4 };

inline unsigned side_mask(const RefinedCell& T, Point p, double tol = 1e-9) {
    unsigned m = 0;
    Vec2 l = T.local(p);
    double s = T.param(p);
    double r = T.feature_distance(p);
    double scale = std::max({1.0, T.clr_v, std::abs(l.x), std::abs(l.y)});
    double ds = T.vertex_feature() ? tol * scale / std::max(r, 1e-300) : tol * scale;
    if (std::abs(s - T.s_alpha()) <= ds) m |= static_cast<unsigned>(Side::alpha);
    if (std::abs(s - T.s_beta()) <= ds) m |= static_cast<unsigned>(Side::beta);
    double sc = std::clamp(s, T.s_alpha(), T.s_beta());
    if (std::abs(r - T.kappa_clearance(sc)) <= tol * scale && s >= T.s_alpha() - ds && s <= T.s_beta() + ds)
        m |= static_cast<unsigned>(Side::kappa);
    return m;
}

inline bool on_side(unsigned mask, Side s) { return (mask & static_cast<unsigned>(s)) != 0; }

enum class AnchorCase { unset, case1_segment, case1_parabola, case2_alpha, case2_segment, case2_parabola };

struct AnchorPair {
    std::optional<double> w_alpha, w_kappa;  // clearances of the anchors on beta
    AnchorCase alpha_case = AnchorCase::unset, kappa_case = AnchorCase::unset;
    double t_star = 0;  // unclamped stationary parameter of the kappa case
};

// Positive root of 2t^3 + 4a t^2 + 8a(a - xb) t - 16a^3 by bisection on (0, xb + 4a].
inline double anchor_cubic_root(double a, double xb) {
    auto f = [&](double t) { return 2 * t * t * t + 4 * a * t * t + 8 * a * (a - xb) * t - 16 * a * a * a; };
    double hi = std::max(xb, 0.0) + 4 * a;
    if (f(hi) <= 0) throw Error(ErrorKind::construction, "anchor cubic: no sign change");
    return bisect_root(f, 0.0, hi, 200);
}

inline AnchorPair anchor_points(const RefinedCell& T) {
    AnchorPair A;
    if (T.vertex_feature()) {
        double target = T.shape == KappaShape::segment ? kPi / 4 : kPi / 2;
        A.t_star = target;
        double th = std::clamp(target, T.theta_alpha, T.theta_beta);
        A.w_kappa = T.kappa_clearance(th);
        A.kappa_case = T.shape == KappaShape::segment ? AnchorCase::case1_segment : AnchorCase::case1_parabola;
        return A;
    }
    double span = T.x_beta - T.x_alpha;
    if (span > 0 && span <= T.clr_u) {
        A.w_alpha = span;
        A.alpha_case = AnchorCase::case2_alpha;
    }
    if (T.shape == KappaShape::segment) {
        A.t_star = T.x_beta / T.slope;
        double t = std::clamp(A.t_star, T.x_alpha, T.x_beta);
        A.w_kappa = T.slope * t;
        A.kappa_case = AnchorCase::case2_segment;
    } else if (T.shape == KappaShape::horizontal) {
        // Slope-zero limit of the segment case: the stationary point recedes past x_beta.
        A.t_star = std::numeric_limits<double>::infinity();
        A.w_kappa = T.clr_v;
        A.kappa_case = AnchorCase::case2_segment;
    } else if (T.shape == KappaShape::parabola) {
        A.t_star = anchor_cubic_root(T.a, T.x_beta);
        double t = std::clamp(A.t_star, T.x_alpha, T.x_beta);
        A.w_kappa = T.kappa_clearance(t);
        A.kappa_case = AnchorCase::case2_parabola;
    }
    if (A.w_kappa && !(*A.w_kappa > 0)) A.w_kappa.reset();
    return A;
}

// Cost of lambda(p; w) = radial p->w then eta_w.
inline double lambda_cost(const RefinedCell& T, double clr_p, double clr_w) {
    return std::log(clr_w / clr_p) + constant_clearance_arc(T, clr_w).cost;
}

struct LambdaPath {
    Path path;
    ConstClearanceArc arc;
};

inline LambdaPath lambda_path(const RefinedCell& T, Point p, double clr_w) {
    double cp = T.feature_distance(p);
    if (clr_w < cp * (1 - 1e-9)) throw Error(ErrorKind::precondition, "lambda_path: clr(w) < clr(p)");
    clr_w = std::max(clr_w, cp);
    LambdaPath out;
    out.arc = constant_clearance_arc(T, clr_w);
    if (clr_w > cp) out.path.append(make_straight(PrimitiveKind::radial_segment, p, out.arc.w, std::log(clr_w / cp), T.feature));
    if (out.arc.cost > 0) out.path.append(arc_primitive(T, out.arc));
    return out;
}

enum class AnchorUsed { none, p, w_alpha, w_kappa };

struct BestAnchor {
    AnchorUsed which = AnchorUsed::p;
    double clearance = 0;
    double cost = 0;
};

inline BestAnchor best_anchor(const RefinedCell& T, double clr_p, const AnchorPair& A) {
    BestAnchor best{AnchorUsed::p, clr_p, lambda_cost(T, clr_p, clr_p)};
    auto consider = [&](const std::optional<double>& w, AnchorUsed which) {
        if (!w || *w < clr_p) return;
        double c = lambda_cost(T, clr_p, *w);
        if (c < best.cost || (c == best.cost && *w < best.clearance)) best = {which, *w, c};
    };
    consider(A.w_alpha, AnchorUsed::w_alpha);
    consider(A.w_kappa, AnchorUsed::w_kappa);
    return best;
}

inline BestAnchor best_anchor(const RefinedCell& T, Point p) { return best_anchor(T, T.feature_distance(p), anchor_points(T)); }

// Pieces of the boundary chain alpha -> kappa -> beta (never through the feature).
inline AnalyticPrimitive radial_piece(const RefinedCell& T, Point p, Point q) {
    return make_straight(PrimitiveKind::radial_segment, p, q,
                         std::abs(std::log(T.feature_distance(q) / T.feature_distance(p))), T.feature);
}

inline AnalyticPrimitive kappa_piece(const RefinedCell& T, double s0, double s1) {
    CurveGeometry c = T.kappa_curve();
    AnalyticPrimitive a = make_curve_portion(c, T.kappa_curve_param(s0), T.kappa_curve_param(s1), T.kappa_edge);
    a.feature = T.feature;
    return a;
}

inline Path boundary_walk(const RefinedCell& T, Point p, unsigned mp, Point q, unsigned mq) {
    Path path;
    auto add_radial = [&](Point a, Point b) {
        if (dist(a, b) > 0) path.append(radial_piece(T, a, b));
    };
    auto add_kappa = [&](double s0, double s1) {
        if (s0 != s1) path.append(kappa_piece(T, s0, s1));
    };
    auto rank = [](unsigned m) { return on_side(m, Side::alpha) ? 0 : on_side(m, Side::kappa) ? 1 : 2; };
    // Shared side: a single piece.
    if (unsigned common = mp & mq) {
        if (on_side(common, Side::alpha) || on_side(common, Side::beta)) add_radial(p, q);
        else add_kappa(T.param(p), T.param(q));
        return path;
    }
    bool flip = rank(mp) > rank(mq);
    Point a = flip ? q : p, b = flip ? p : q;
    unsigned ma = flip ? mq : mp, mb = flip ? mp : mq;
    // a is on alpha or kappa, b on a later side.
    double sa = T.param(a);
    if (on_side(ma, Side::alpha)) {
        add_radial(a, T.u);
        sa = T.s_alpha();
    }
    if (on_side(mb, Side::kappa)) {
        add_kappa(sa, T.param(b));
    } else {
        add_kappa(sa, T.s_beta());
        add_radial(T.v, b);
    }
    return flip ? path.reversed() : path;
}

struct WellBehavedPath {
    Path path;
    AnchorUsed anchor_used = AnchorUsed::none;
    double cost = 0;
};

inline WellBehavedPath well_behaved_path(const RefinedCell& T, Point p, Point q, double tol = 1e-9) {
    unsigned mp = side_mask(T, p, tol), mq = side_mask(T, q, tol);
    if (!mp || !mq) throw Error(ErrorKind::precondition, "well_behaved_path: point not on the cell boundary");
    WellBehavedPath out;
    bool pb = on_side(mp, Side::beta), qb = on_side(mq, Side::beta);
    if ((mp & mq) != 0 || pb == qb) {
        out.path = boundary_walk(T, p, mp, q, mq);
    } else {
        bool flip = qb;
        Point b = flip ? q : p, o = flip ? p : q;
        unsigned mo = flip ? mp : mq;
        BestAnchor w = best_anchor(T, b);
        out.anchor_used = w.which;
        LambdaPath lam = lambda_path(T, b, w.clearance);
        Path rest;
        if (lam.arc.cost > 0 || w.clearance > T.feature_distance(b)) {
            unsigned mbar = lam.arc.on_alpha ? static_cast<unsigned>(Side::alpha) : static_cast<unsigned>(Side::kappa);
            if (lam.arc.on_alpha && std::abs(lam.arc.clearance - T.clr_u) <= tol * std::max(1.0, T.clr_u))
                mbar |= static_cast<unsigned>(Side::kappa);
            rest = boundary_walk(T, lam.arc.w_bar, mbar, o, mo);
        } else {
            rest = boundary_walk(T, b, side_mask(T, b, tol), o, mo);
        }
        Path full = lam.path;
        full.append(rest);
        out.path = flip ? full.reversed() : full;
    }
    out.cost = out.path.total_cost;
    return out;
}

}  // namespace clrpath
