#pragma once

#include <array>
#include <limits>
#include <optional>
#include <sstream>
#include <utility>
#include <vector>

#include "geometry.hpp"

namespace clrpath {

struct Box {
    double xmin = 0, ymin = 0, xmax = 1, ymax = 1;

    double width() const { return xmax - xmin; }
    double height() const { return ymax - ymin; }
    double diagonal() const { return std::hypot(width(), height()); }
    bool contains(Point p, double margin = 0) const {
        return p.x > xmin + margin && p.x < xmax - margin && p.y > ymin + margin && p.y < ymax - margin;
    }
    std::array<Point, 4> corners() const { return {Point{xmin, ymin}, {xmax, ymin}, {xmax, ymax}, {xmin, ymax}}; }
};

enum class FeatureKind { vertex, edge };

inline constexpr int kBoxPolygon = -1;

// A vertex feature uses only `a`; an edge feature is the open segment (a, b).
struct Feature {
    FeatureKind kind = FeatureKind::vertex;
    Point a, b;
    int polygon = kBoxPolygon;
    int index = 0;

    bool is_vertex() const { return kind == FeatureKind::vertex; }
    bool is_edge() const { return kind == FeatureKind::edge; }
};

// Distance from p to f, with the foot. Edge features only count when the foot is interior.
inline std::optional<std::pair<double, Point>> feature_distance(const Feature& f, Point p) {
    if (f.is_vertex()) return std::pair{dist(p, f.a), f.a};
    double t = project_param(p, f.a, f.b);
    if (t <= 0 || t >= 1) return std::nullopt;
    Point foot = f.a + (f.b - f.a) * t;
    return std::pair{dist(p, foot), foot};
}

// Foot point psi_o(p); for edges this is the projection on the supporting line.
inline Point feature_foot(const Feature& f, Point p) {
    return f.is_vertex() ? f.a : foot_on_line(p, f.a, f.b);
}

inline double feature_line_distance(const Feature& f, Point p) {
    return f.is_vertex() ? dist(p, f.a) : dist_to_line(p, f.a, f.b);
}

struct ClearanceResult {
    double value = 0;
    int feature = -1;
    Point foot;
    int inside_polygon = -1;  // set when p is inside (or on) an obstacle
};

using Ring = std::vector<Point>;

class Scene {
public:
    Scene() = default;

    // Validates and normalizes: CCW orientation, collinear vertex merge. Throws Error(validation).
    Scene(std::vector<Ring> obstacles, Box box, Point source, Point target) :
        obstacles_(std::move(obstacles)), box_(box), source_(source), target_(target) {
        normalize_and_validate();
        build_features();
        build_index();
        check_endpoint("source", source_);
        check_endpoint("target", target_);
    }

    const std::vector<Ring>& obstacles() const { return obstacles_; }
    const Box& box() const { return box_; }
    Point source() const { return source_; }
    Point target() const { return target_; }
    double scale() const { return std::max(box_.width(), box_.height()); }
    double tol() const { return kGeoTol * scale(); }
    double chain_tol() const { return kChainTol * scale(); }

    const std::vector<Feature>& features() const { return features_; }
    const Feature& feature(int i) const { return features_[i]; }
    int vertex_feature(int polygon, int i) const { return vertex_ids_[slot(polygon)][i]; }
    int edge_feature(int polygon, int i) const { return edge_ids_[slot(polygon)][i]; }
    int polygon_count() const { return static_cast<int>(obstacles_.size()); }

    // Obstacle vertices plus the four box corners.
    int complexity() const {
        int n = 4;
        for (auto& r : obstacles_) n += static_cast<int>(r.size());
        return n;
    }

    Scene with_endpoints(Point s, Point t) const {
        Scene c = *this;
        c.source_ = s;
        c.target_ = t;
        c.check_endpoint("source", s);
        c.check_endpoint("target", t);
        return c;
    }

    int containing_polygon(Point p) const {
        for (int i = 0; i < polygon_count(); ++i) {
            auto& bb = bboxes_[i];
            if (p.x < bb.xmin || p.x > bb.xmax || p.y < bb.ymin || p.y > bb.ymax) continue;
            if (point_in_polygon(p, obstacles_[i])) return i;
        }
        return -1;
    }

    ClearanceResult clearance(Point p) const {
        ClearanceResult r;
        int inside = containing_polygon(p);
        if (inside >= 0 || !box_.contains(p, -tol())) {
            r.value = 0;
            r.inside_polygon = inside >= 0 ? inside : kBoxPolygon;
            r.foot = p;
            auto near = nearest(p);
            r.feature = near.feature;
            return r;
        }
        return nearest(p);
    }

    double clr(Point p) const { return clearance(p).value; }

    ClearanceResult clearance_brute(Point p) const {
        ClearanceResult best;
        best.value = std::numeric_limits<double>::infinity();
        for (int i = 0; i < static_cast<int>(features_.size()); ++i) consider(i, p, best);
        int inside = containing_polygon(p);
        if (inside >= 0) {
            best.value = 0;
            best.inside_polygon = inside;
        }
        return best;
    }

private:
    struct BBox { double xmin, ymin, xmax, ymax; };

    int slot(int polygon) const { return polygon == kBoxPolygon ? polygon_count() : polygon; }

    [[noreturn]] static void fail(const std::string& msg) { throw Error(ErrorKind::validation, msg); }

    void normalize_and_validate() {
        if (!(box_.xmax > box_.xmin) || !(box_.ymax > box_.ymin) || !std::isfinite(box_.width()) ||
            !std::isfinite(box_.height()))
            fail("bounding_box: empty or non-finite");
        double tl = tol();
        for (size_t pi = 0; pi < obstacles_.size(); ++pi) {
            Ring& r = obstacles_[pi];
            std::string name = "obstacle " + std::to_string(pi);
            if (r.empty()) fail(name + ": ring has no vertices");
            for (auto& v : r)
                if (!std::isfinite(v.x) || !std::isfinite(v.y)) fail(name + ": non-finite coordinate");
            r = merge_ring(r, tl);
            if (r.size() >= 3) {
                double area = signed_area(r);
                if (std::abs(area) <= tl * scale()) fail(name + ": zero area");
                if (area < 0) std::reverse(r.begin(), r.end());
            }
            for (auto& v : r)
                if (!box_.contains(v, tl)) fail(name + ": vertex outside bounding_box");
            if (!ring_is_simple(r)) fail(name + ": ring is not simple");
        }
        for (size_t i = 0; i < obstacles_.size(); ++i)
            for (size_t j = i + 1; j < obstacles_.size(); ++j)
                if (!rings_disjoint(obstacles_[i], obstacles_[j]))
                    fail("obstacles " + std::to_string(i) + " and " + std::to_string(j) + " intersect");
        bboxes_.clear();
        for (auto& r : obstacles_) {
            BBox b{r[0].x, r[0].y, r[0].x, r[0].y};
            for (auto& v : r) {
                b.xmin = std::min(b.xmin, v.x);
                b.ymin = std::min(b.ymin, v.y);
                b.xmax = std::max(b.xmax, v.x);
                b.ymax = std::max(b.ymax, v.y);
            }
            bboxes_.push_back(b);
        }
    }

    static Ring merge_ring(const Ring& in, double tl) {
        Ring r;
        for (auto& v : in)
            if (r.empty() || dist(r.back(), v) > tl) r.push_back(v);
        while (r.size() > 1 && dist(r.front(), r.back()) <= tl) r.pop_back();
        if (r.size() < 3) return r;
        bool changed = true;
        while (changed && r.size() >= 3) {
            changed = false;
            for (size_t i = 0; i < r.size() && r.size() >= 3; ++i) {
                Point a = r[(i + r.size() - 1) % r.size()], b = r[i], c = r[(i + 1) % r.size()];
                double c2 = cross(b - a, c - b);
                if (std::abs(c2) <= tl * norm(c - a) && dot(b - a, c - b) > 0) {
                    r.erase(r.begin() + static_cast<long>(i));
                    changed = true;
                    break;
                }
            }
        }
        return r;
    }

    static bool ring_is_simple(const Ring& r) {
        size_t n = r.size();
        if (n < 3) return true;
        for (size_t i = 0; i < n; ++i) {
            Point a = r[i], b = r[(i + 1) % n];
            for (size_t j = i + 1; j < n; ++j) {
                Point c = r[j], d = r[(j + 1) % n];
                bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if (adjacent) {
                    // Adjacent edges may only share their common vertex (no fold-back).
                    Point shared = j == i + 1 ? b : a;
                    Point other1 = j == i + 1 ? a : b, other2 = j == i + 1 ? d : c;
                    if (orient_sign(other1, shared, other2) == 0 && dot(other1 - shared, other2 - shared) > 0)
                        return false;
                    continue;
                }
                if (segments_intersect(a, b, c, d)) return false;
            }
        }
        return true;
    }

    static bool rings_disjoint(const Ring& p, const Ring& q) {
        auto edges = [](const Ring& r) {
            std::vector<std::pair<Point, Point>> e;
            if (r.size() == 1) e.emplace_back(r[0], r[0]);
            else if (r.size() == 2) e.emplace_back(r[0], r[1]);
            else
                for (size_t i = 0; i < r.size(); ++i) e.emplace_back(r[i], r[(i + 1) % r.size()]);
            return e;
        };
        for (auto& [a, b] : edges(p))
            for (auto& [c, d] : edges(q))
                if (segments_intersect(a, b, c, d)) return false;
        if (point_in_polygon(p[0], q) || point_in_polygon(q[0], p)) return false;
        return true;
    }

    void build_features() {
        features_.clear();
        vertex_ids_.assign(obstacles_.size() + 1, {});
        edge_ids_.assign(obstacles_.size() + 1, {});
        auto add_ring = [&](const Ring& r, int poly) {
            auto& vid = vertex_ids_[slot(poly)];
            auto& eid = edge_ids_[slot(poly)];
            for (size_t i = 0; i < r.size(); ++i) {
                vid.push_back(static_cast<int>(features_.size()));
                features_.push_back({FeatureKind::vertex, r[i], r[i], poly, static_cast<int>(i)});
            }
            size_t ne = r.size() == 1 ? 0 : (r.size() == 2 ? 1 : r.size());
            for (size_t i = 0; i < ne; ++i) {
                eid.push_back(static_cast<int>(features_.size()));
                features_.push_back({FeatureKind::edge, r[i], r[(i + 1) % r.size()], poly, static_cast<int>(i)});
            }
        };
        for (size_t i = 0; i < obstacles_.size(); ++i) add_ring(obstacles_[i], static_cast<int>(i));
        auto c = box_.corners();
        add_ring(Ring(c.begin(), c.end()), kBoxPolygon);
    }

    void consider(int i, Point p, ClearanceResult& best) const {
        auto d = feature_distance(features_[i], p);
        if (!d) return;
        // Ties prefer vertex features (their index is lower within a ring).
        if (d->first < best.value) {
            best.value = d->first;
            best.feature = i;
            best.foot = d->second;
        }
    }

    void build_index() {
        int nf = static_cast<int>(features_.size());
        grid_ = std::clamp(static_cast<int>(std::sqrt(static_cast<double>(nf)) * 2), 4, 128);
        cw_ = box_.width() / grid_;
        ch_ = box_.height() / grid_;
        buckets_.assign(static_cast<size_t>(grid_) * grid_, {});
        double half_diag = 0.5 * std::hypot(cw_, ch_);
        for (int i = 0; i < nf; ++i) {
            const Feature& f = features_[i];
            Point a = f.a, b = f.is_edge() ? f.b : f.a;
            int x0 = cell_x(std::min(a.x, b.x)), x1 = cell_x(std::max(a.x, b.x));
            int y0 = cell_y(std::min(a.y, b.y)), y1 = cell_y(std::max(a.y, b.y));
            for (int gx = x0; gx <= x1; ++gx)
                for (int gy = y0; gy <= y1; ++gy) {
                    Point c{box_.xmin + (gx + 0.5) * cw_, box_.ymin + (gy + 0.5) * ch_};
                    if (dist_to_segment(c, a, b) <= half_diag * 1.0001)
                        buckets_[static_cast<size_t>(gy) * grid_ + gx].push_back(i);
                }
        }
    }

    int cell_x(double x) const { return std::clamp(static_cast<int>((x - box_.xmin) / cw_), 0, grid_ - 1); }
    int cell_y(double y) const { return std::clamp(static_cast<int>((y - box_.ymin) / ch_), 0, grid_ - 1); }

    ClearanceResult nearest(Point p) const {
        ClearanceResult best;
        best.value = std::numeric_limits<double>::infinity();
        int cx = cell_x(p.x), cy = cell_y(p.y);
        double step = std::min(cw_, ch_);
        for (int k = 0; k < grid_; ++k) {
            for (int gx = cx - k; gx <= cx + k; ++gx)
                for (int gy = cy - k; gy <= cy + k; ++gy) {
                    if (std::max(std::abs(gx - cx), std::abs(gy - cy)) != k) continue;
                    if (gx < 0 || gy < 0 || gx >= grid_ || gy >= grid_) continue;
                    for (int i : buckets_[static_cast<size_t>(gy) * grid_ + gx]) consider(i, p, best);
                }
            if (best.value <= k * step) break;
        }
        if (!std::isfinite(best.value)) return clearance_brute(p);
        return best;
    }

    void check_endpoint(const char* name, Point p) const {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) fail(std::string(name) + ": non-finite coordinate");
        if (!box_.contains(p, tol())) fail(std::string(name) + ": outside bounding_box");
        if (containing_polygon(p) >= 0) fail(std::string(name) + ": inside an obstacle");
        if (nearest(p).value <= tol()) fail(std::string(name) + ": on an obstacle boundary");
    }

    std::vector<Ring> obstacles_;
    Box box_;
    Point source_, target_;
    std::vector<Feature> features_;
    std::vector<std::vector<int>> vertex_ids_, edge_ids_;
    std::vector<BBox> bboxes_;
    int grid_ = 1;
    double cw_ = 1, ch_ = 1;
    std::vector<std::vector<int>> buckets_;
};

inline ClearanceResult clearance(const Scene& scene, Point p) { return scene.clearance(p); }

}  // namespace clrpath
