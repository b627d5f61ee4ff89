#pragma once

#include "wellbehaved.hpp"

namespace clrpath {

struct TransformedPoint {
    double theta = 0;
    double log_r = 0;
};

inline TransformedPoint transform(const RefinedCell& T, Point p) {
    if (!T.vertex_feature()) throw Error(ErrorKind::precondition, "transform: edge-feature cell");
    Vec2 l = T.local(p);
    double r = norm(l);
    if (r == 0) throw Error(ErrorKind::degenerate, "transform: point coincides with the feature");
    return {std::atan2(l.y, l.x), std::log(r)};
}

inline Point inverse_transform(const RefinedCell& T, TransformedPoint t) {
    return T.at_param(t.theta, std::exp(t.log_r));
}

namespace detail {

// ln of kappa's radius and its derivative in the transformed plane (convex in theta).
inline double kappa_star(const RefinedCell& T, double th) { return std::log(T.kappa_clearance(th)); }
inline double kappa_star_d(const RefinedCell& T, double th) {
    return T.shape == KappaShape::segment ? std::tan(th) : std::tan(th / 2);
}
inline double kappa_star_dd(const RefinedCell& T, double th) {
    if (T.shape == KappaShape::segment) return 1 / (std::cos(th) * std::cos(th));
    double c = std::cos(th / 2);
    return 0.5 / (c * c);
}

// Real root of x^3 + 12 a^2 x - 8 a^2 c = 0 (monotone).
inline double parabola_tangent_root(double a, double c) {
    double P = 12 * a * a, Q = -8 * a * a * c;
    double disc = std::sqrt(Q * Q / 4 + P * P * P / 27);
    double x = std::cbrt(-Q / 2 + disc) + std::cbrt(-Q / 2 - disc);
    for (int i = 0; i < 2; ++i) {
        double f = x * x * x + P * x + Q, fp = 3 * x * x + P;
        x -= f / fp;
    }
    return x;
}

}  // namespace detail

// Minimum over the chord of (kappa - geodesic); >= 0 iff the geodesic stays in the cell.
inline double reachability_margin(const RefinedCell& T, Point p, Point q) {
    if (T.vertex_feature()) {
        Vec2 lp = T.local(p), lq = T.local(q);
        double tp = std::atan2(lp.y, lp.x), tq = std::atan2(lq.y, lq.x);
        double yp = std::log(norm(lp)), yq = std::log(norm(lq));
        if (std::abs(tq - tp) <= 1e-12) return 0.0;
        double m = (yq - yp) / (tq - tp);
        double t0 = T.shape == KappaShape::segment ? std::atan(m) : 2 * std::atan(m);
        double tc = std::clamp(t0, std::min(tp, tq), std::max(tp, tq));
        double line = yp + m * (tc - tp);
        return detail::kappa_star(T, tc) - line;
    }
    Vec2 lp = T.local(p), lq = T.local(q);
    double D = lq.x - lp.x;
    double scale = std::max({std::abs(lp.x), std::abs(lq.x), lp.y, lq.y, 1e-300});
    if (std::abs(D) <= 1e-12 * scale) return 0.0;
    double c2 = (lp.x + lq.x) + (lq.y * lq.y - lp.y * lp.y) / D;  // twice the circle center
    double x0;
    switch (T.shape) {
        case KappaShape::segment: x0 = c2 / (2 * (1 + T.slope * T.slope)); break;
        case KappaShape::horizontal: x0 = c2 / 2; break;
        default: x0 = detail::parabola_tangent_root(T.a, c2 / 2); break;
    }
    double x = std::clamp(x0, std::min(lp.x, lq.x), std::max(lp.x, lq.x));
    double lam = (x - lp.x) / D;
    double yc2 = (1 - lam) * lp.y * lp.y + lam * lq.y * lq.y + (x - lp.x) * (lq.x - x);
    double k = T.kappa_clearance(x);
    // Relative margin so the tolerance is scale free.
    return (k * k - yc2) / std::max(k * k + std::max(yc2, 0.0), 1e-300);
}

inline bool locally_reachable(const RefinedCell& T, Point p, Point q, double tol = 1e-9) {
    return reachability_margin(T, p, q) >= -tol;
}

// Dense check: sample the single-feature geodesic and test containment in the closed cell.
inline bool locally_reachable_dense(const RefinedCell& T, Point p, Point q, int nodes = 256, double tol = 1e-9) {
    Path g = feature_geodesic(T.feat, T.feature, p, q, 0);
    if (g.empty()) return true;
    const AnalyticPrimitive& a = g.primitives.front();
    for (int i = 1; i < nodes; ++i) {
        Point x = a.at(static_cast<double>(i) / nodes);
        double s = std::clamp(T.param(x), T.s_alpha(), T.s_beta());
        double k = T.kappa_clearance(s);
        if (T.feature_distance(x) > k * (1 + tol) + tol) return false;
    }
    return true;
}

struct TangentWitness {
    enum class Kind { line_tangent, circle_tangent } kind = Kind::line_tangent;
    bool exists = false;
    double touch_param = 0;  // frame parameter of the tangency point on kappa
    Point touch;
    double slope = 0;        // line case: slope of l_p in the transformed plane
    double center = 0;       // circle case: abscissa of the tangent circle's center
    double radius = 0;
};

// Tangent from p to kappa on the side `direction` (+1 toward beta, -1 toward alpha).
inline TangentWitness tangent_witness(const RefinedCell& T, Point p, int direction) {
    TangentWitness w;
    double sp = T.param(p);
    double bound = direction > 0 ? T.s_beta() : T.s_alpha();
    if (T.vertex_feature()) {
        w.kind = TangentWitness::Kind::line_tangent;
        TransformedPoint tp = transform(T, p);
        auto phi = [&](double th) {
            return detail::kappa_star(T, th) + detail::kappa_star_d(T, th) * (tp.theta - th) - tp.log_r;
        };
        if ((bound - sp) * direction <= 0 || phi(bound) >= 0 || phi(sp) < 0) return w;
        double th = bisect_root(phi, std::min(sp, bound), std::max(sp, bound), 200);
        w.exists = true;
        w.touch_param = th;
        w.touch = T.kappa_point(th);
        w.slope = detail::kappa_star_d(T, th);
        return w;
    }
    w.kind = TangentWitness::Kind::circle_tangent;
    Vec2 lp = T.local(p);
    // Gap between kappa and the circle through p centered at (t, 0), minimized over kappa.
    auto gap = [&](double t) {
        double r2 = (lp.x - t) * (lp.x - t) + lp.y * lp.y;
        double lo = direction > 0 ? lp.x : T.x_alpha, hi = direction > 0 ? T.x_beta : lp.x;
        double best = std::numeric_limits<double>::infinity();
        // Convex in x: ternary search.
        for (int it = 0; it < 200 && hi - lo > 1e-15 * (1 + std::abs(hi)); ++it) {
            double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
            auto g = [&](double x) {
                double k = T.kappa_clearance(x);
                return (x - t) * (x - t) + k * k - r2;
            };
            if (g(m1) < g(m2)) hi = m2;
            else lo = m1;
        }
        double x = 0.5 * (lo + hi), k = T.kappa_clearance(x);
        best = (x - t) * (x - t) + k * k - r2;
        return std::pair{best, x};
    };
    if ((bound - sp) * direction <= 0) return w;
    double span = std::max(1.0, std::abs(T.x_beta) + T.clr_v) * 1e6;
    double t_far = lp.x - direction * span;
    double t_near = lp.x + direction * span;
    if (gap(t_far).first >= 0 || gap(t_near).first < 0) return w;
    double t = bisect_root([&](double c) { return gap(c).first; }, std::min(t_far, t_near), std::max(t_far, t_near), 200);
    auto [g, x] = gap(t);
    (void)g;
    w.exists = true;
    w.center = t;
    w.radius = std::hypot(lp.x - t, lp.y);
    w.touch_param = x;
    w.touch = T.kappa_point(x);
    return w;
}

struct ParamInterval {
    bool empty = true;
    double lo = 0, hi = 0;  // clearance on alpha/beta, frame parameter on kappa
};

inline Point side_point(const RefinedCell& T, Side e, double x) {
    switch (e) {
        case Side::alpha: return T.alpha_point(x);
        case Side::beta: return T.beta_point(x);
        default: return T.kappa_point(x);
    }
}

inline std::pair<double, double> side_range(const RefinedCell& T, Side e) {
    switch (e) {
        case Side::alpha: return {T.clr_u * 1e-12, T.clr_u};
        case Side::beta: return {T.clr_v * 1e-12, T.clr_v};
        default: return {T.s_alpha(), T.s_beta()};
    }
}

// Points of side e locally reachable from p: a connected run containing an endpoint of e.
inline ParamInterval reachable_portion(const RefinedCell& T, Point p, Side e) {
    ParamInterval out;
    auto [lo, hi] = side_range(T, e);
    if (!(hi > lo)) return out;
    auto R = [&](double x) { return locally_reachable(T, p, side_point(T, e, x)); };
    bool rl = R(lo), rh = R(hi);
    if (rl && rh) return {false, lo, hi};
    if (!rl && !rh) return out;
    double a = lo, b = hi;  // R(a) != R(b)
    for (int i = 0; i < 80; ++i) {
        double m = 0.5 * (a + b);
        if (R(m) == rl) a = m;
        else b = m;
    }
    return rl ? ParamInterval{false, lo, a} : ParamInterval{false, b, hi};
}

inline Path local_optimal_path(const RefinedCell& T, Point p, Point q, double tol = 1e-9) {
    if (!locally_reachable(T, p, q, tol)) throw Error(ErrorKind::precondition, "local_optimal_path: not locally reachable");
    return feature_geodesic(T.feat, T.feature, p, q, 0);
}

}  // namespace clrpath
