#pragma once

#include <queue>

#include "refined.hpp"

namespace clrpath {

struct OracleConfig {
    int resolution = 512;           // lattice cells per side of the domain
    double clearance_floor = -1;    // < 0: domain diagonal * 1e-4
    bool sixteen = true;            // 16-connectivity (else 8)
    const RefinedCell* restrict_to_cell = nullptr;
    double connect_radius = -1;     // < 0: max(side / 64, 1.5 cells)
};

struct OracleResult {
    double cost = std::numeric_limits<double>::infinity();
    bool found = false;
    std::vector<Point> polyline;  // p ... q
    size_t settled = 0;
};

namespace detail {

inline constexpr int kOracleReference = 1024;

// Free-space queries the lattice search needs; scene-wide or restricted to one cell.
struct OracleDomain {
    Box box;
    std::function<double(Point)> clr;            // 0 outside the domain
    std::function<bool(Point, Point)> seg_free;  // exact straight-segment admissibility
};

inline bool segment_free(const Scene& scene, Point a, Point b) {
    const Box& bx = scene.box();
    if (!bx.contains(a, 0) || !bx.contains(b, 0)) return false;
    for (auto& ring : scene.obstacles()) {
        size_t k = ring.size();
        if (k == 1) {
            if (dist_to_segment(ring[0], a, b) <= scene.tol()) return false;
            continue;
        }
        for (size_t i = 0; i < k; ++i)
            if (segments_intersect(a, b, ring[i], ring[(i + 1) % k])) return false;
        if (k >= 3 && point_in_polygon((a + b) / 2, ring)) return false;
    }
    return true;
}

inline OracleDomain scene_domain(const Scene& scene) {
    return {scene.box(), [&scene](Point p) { return scene.clr(p); },
            [&scene](Point a, Point b) { return segment_free(scene, a, b); }};
}

inline OracleDomain cell_domain(const RefinedCell& T, double tol) {
    Box b{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
          -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    auto grow = [&](Point p) {
        b.xmin = std::min(b.xmin, p.x), b.ymin = std::min(b.ymin, p.y);
        b.xmax = std::max(b.xmax, p.x), b.ymax = std::max(b.ymax, p.y);
    };
    for (int i = 0; i <= 64; ++i) grow(T.kappa_point(T.s_alpha() + (T.s_beta() - T.s_alpha()) * i / 64.0));
    grow(T.vertex_feature() ? T.origin : T.world(T.x_alpha, 0));
    grow(T.vertex_feature() ? T.origin : T.world(T.x_beta, 0));
    double pad = 1e-9 * std::max(b.xmax - b.xmin, b.ymax - b.ymin);
    b.xmin -= pad, b.ymin -= pad, b.xmax += pad, b.ymax += pad;
    return {b,
            [T, tol](Point p) { return T.contains(p, tol) ? std::max(T.feature_distance(p), 0.0) : 0.0; },
            [T, tol](Point a, Point c) {
                for (int i = 0; i <= 16; ++i)
                    if (!T.contains(a + (c - a) * (i / 16.0), tol)) return false;
                return true;
            }};
}

class LatticeOracle {
public:
    LatticeOracle(OracleDomain dom, const OracleConfig& cfg) : dom_(std::move(dom)), R_(cfg.resolution) {
        if (R_ < 16) throw Error(ErrorKind::precondition, "oracle: resolution must be at least 16");
        sub_ = kOracleReference % R_ == 0 ? kOracleReference / R_ : 1;
        hx_ = dom_.box.width() / R_;
        hy_ = dom_.box.height() / R_;
        double diag = dom_.box.diagonal();
        floor_ = cfg.clearance_floor > 0 ? cfg.clearance_floor : diag * 1e-4;
        radius_ = cfg.connect_radius > 0 ? cfg.connect_radius
                                         : std::max(std::max(dom_.box.width(), dom_.box.height()) / 64, 1.5 * std::max(hx_, hy_));
        F_ = 2 * sub_ * R_ + 1;
        cache_.assign(static_cast<size_t>(F_) * F_, -1.0);
        if (cfg.sixteen) moves_ = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}, {1, 1}, {-1, 1}, {1, -1}, {-1, -1},
                                   {1, 2}, {2, 1}, {-1, 2}, {-2, 1}, {1, -2}, {2, -1}, {-1, -2}, {-2, -1}};
        else moves_ = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}, {1, 1}, {-1, 1}, {1, -1}, {-1, -1}};
    }

    OracleResult run(Point p, Point q) {
        OracleResult out;
        if (dom_.clr(p) < floor_ || dom_.clr(q) < floor_)
            throw Error(ErrorKind::precondition, "oracle: endpoint below the clearance floor");
        if (dist(p, q) == 0) {
            out.cost = 0;
            out.found = true;
            out.polyline = {p};
            return out;
        }
        int N = (R_ + 1) * (R_ + 1);
        int S = N, T = N + 1;
        std::vector<double> d(N + 2, std::numeric_limits<double>::infinity());
        std::vector<int> parent(N + 2, -1);
        // Connections of q, looked up when a lattice node near q is settled.
        std::vector<std::pair<int, double>> to_t = connections(q);
        std::vector<double> t_link(N, -1);
        for (auto [v, c] : to_t) t_link[v] = c;
        using Item = std::pair<double, int>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
        d[S] = 0;
        pq.push({0, S});
        if (dom_.seg_free(p, q) && dist(p, q) <= radius_) {
            double c = straight_cost(p, q);
            if (std::isfinite(c)) d[T] = c, parent[T] = S, pq.push({c, T});
        }
        auto relax = [&](int from, int to, double c) {
            double nd = d[from] + c;
            if (nd < d[to]) {
                d[to] = nd;
                parent[to] = from;
                pq.push({nd, to});
            }
        };
        std::vector<char> done(N + 2, 0);
        while (!pq.empty()) {
            auto [dist_u, u] = pq.top();
            pq.pop();
            if (done[u]) continue;
            done[u] = 1;
            ++out.settled;
            if (u == T) break;
            if (u == S) {
                for (auto [v, c] : connections(p)) relax(S, v, c);
                continue;
            }
            if (t_link[u] >= 0) relax(u, T, t_link[u]);
            int i = u % (R_ + 1), j = u / (R_ + 1);
            for (auto [di, dj] : moves_) {
                int i2 = i + di, j2 = j + dj;
                if (i2 < 0 || j2 < 0 || i2 > R_ || j2 > R_) continue;
                int v = j2 * (R_ + 1) + i2;
                if (done[v]) continue;
                double c = lattice_cost(i, j, di, dj);
                if (std::isfinite(c)) relax(u, v, c);
            }
        }
        if (!done[T]) return out;
        out.found = true;
        out.cost = d[T];
        for (int x = T; x >= 0; x = parent[x]) {
            out.polyline.push_back(x == T ? q : x == S ? p : node_point(x % (R_ + 1), x / (R_ + 1)));
            if (x == S) break;
        }
        std::reverse(out.polyline.begin(), out.polyline.end());
        return out;
    }

private:
    OracleDomain dom_;
    int R_, sub_, F_;
    double hx_, hy_, floor_, radius_;
    std::vector<double> cache_;
    std::vector<std::pair<int, int>> moves_;

    Point node_point(int i, int j) const { return {dom_.box.xmin + i * hx_, dom_.box.ymin + j * hy_}; }

    // Clearance at half-reference-lattice index (I, J).
    double clr_at(int I, int J) {
        double& c = cache_[static_cast<size_t>(J) * F_ + I];
        if (c < 0) {
            double s = 2.0 * sub_;
            c = dom_.clr({dom_.box.xmin + I * hx_ / s, dom_.box.ymin + J * hy_ / s});
        }
        return c;
    }

    // Sum over reference sub-edges of length * (1/c0 + 2/cm + 1/c1) / 4.
    double lattice_cost(int i, int j, int di, int dj) {
        int I = 2 * sub_ * i, J = 2 * sub_ * j;
        double L = std::hypot(di * hx_, dj * hy_) / sub_;
        double total = 0;
        bool certified = true;
        double c0 = clr_at(I, J);
        if (c0 < floor_) return std::numeric_limits<double>::infinity();
        for (int k = 0; k < sub_; ++k) {
            int Im = I + di, Jm = J + dj, I1 = I + 2 * di, J1 = J + 2 * dj;
            double cm = clr_at(Im, Jm), c1 = clr_at(I1, J1);
            if (cm < floor_ || c1 < floor_) return std::numeric_limits<double>::infinity();
            if (c0 + cm <= L / 2 || cm + c1 <= L / 2) certified = false;
            total += L * (1 / c0 + 2 / cm + 1 / c1) / 4;
            I = I1, J = J1, c0 = c1;
        }
        if (!certified && !dom_.seg_free(node_point(i, j), node_point(i + di, j + dj)))
            return std::numeric_limits<double>::infinity();
        return total;
    }

    double straight_cost(Point a, Point b) {
        AnalyticPrimitive seg = make_straight(PrimitiveKind::line_segment, a, b, 0);
        try {
            return primitive_cost_numeric(seg, [&](Point x) {
                double c = dom_.clr(x);
                return c < floor_ ? 0.0 : c;
            });
        } catch (const Error&) {
            return std::numeric_limits<double>::infinity();
        }
    }

    std::vector<std::pair<int, double>> connections(Point p) {
        std::vector<std::pair<int, double>> out;
        int i0 = static_cast<int>(std::floor((p.x - radius_ - dom_.box.xmin) / hx_));
        int i1 = static_cast<int>(std::ceil((p.x + radius_ - dom_.box.xmin) / hx_));
        int j0 = static_cast<int>(std::floor((p.y - radius_ - dom_.box.ymin) / hy_));
        int j1 = static_cast<int>(std::ceil((p.y + radius_ - dom_.box.ymin) / hy_));
        for (int j = std::max(j0, 0); j <= std::min(j1, R_); ++j)
            for (int i = std::max(i0, 0); i <= std::min(i1, R_); ++i) {
                Point x = node_point(i, j);
                if (dist(x, p) > radius_ || clr_at(2 * sub_ * i, 2 * sub_ * j) < floor_) continue;
                if (!dom_.seg_free(p, x)) continue;
                double c = straight_cost(p, x);
                if (std::isfinite(c)) out.emplace_back(j * (R_ + 1) + i, c);
            }
        return out;
    }
};

}  // namespace detail

inline OracleResult grid_oracle_run(const Scene& scene, Point p, Point q, const OracleConfig& cfg = {}) {
    if (cfg.restrict_to_cell) {
        detail::LatticeOracle o(detail::cell_domain(*cfg.restrict_to_cell, scene.tol()), cfg);
        return o.run(p, q);
    }
    detail::LatticeOracle o(detail::scene_domain(scene), cfg);
    return o.run(p, q);
}

// Upper bound on the minimal cost between p and q (infinite when the lattice does not connect them).
inline double grid_oracle(const Scene& scene, Point p, Point q, const OracleConfig& cfg = {}) {
    return grid_oracle_run(scene, p, q, cfg).cost;
}

// Same bound restricted to one cell, where clearance is the distance to the cell's feature.
inline double cell_oracle(const RefinedCell& T, Point p, Point q, OracleConfig cfg = {}) {
    cfg.restrict_to_cell = nullptr;
    double span = 0;
    detail::OracleDomain dom = detail::cell_domain(T, 0);
    span = std::max(dom.box.width(), dom.box.height());
    double tol = 1e-9 * span;
    if (cfg.clearance_floor < 0) cfg.clearance_floor = dom.box.diagonal() * 1e-6;
    detail::LatticeOracle o(detail::cell_domain(T, tol), cfg);
    return o.run(p, q).cost;
}

}  // namespace clrpath
