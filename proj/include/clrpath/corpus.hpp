#pragma once

#include <random>

#include "scene.hpp"

namespace clrpath {

struct CorpusOptions {
    int max_vertices = 40;  // obstacle vertices
    double box = 100;
    double min_radius = 4, max_radius = 12;
    double gap = 2;         // minimum distance between obstacle discs
    double min_endpoint_clearance = 0.5;
};

// Seeded random scene: disjoint convex polygons and point obstacles in a square box.
inline Scene random_scene(uint64_t seed, CorpusOptions opt = {}) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0, 1);
    struct Disc {
        Point c;
        double r;
    };
    std::vector<Disc> discs;
    std::vector<Ring> rings;
    int budget = opt.max_vertices;
    for (int attempt = 0; attempt < 2000 && budget > 0; ++attempt) {
        double r = opt.min_radius + (opt.max_radius - opt.min_radius) * U(rng);
        Point c{r + opt.gap + (opt.box - 2 * (r + opt.gap)) * U(rng), r + opt.gap + (opt.box - 2 * (r + opt.gap)) * U(rng)};
        bool ok = true;
        for (auto& d : discs)
            if (dist(d.c, c) < d.r + r + opt.gap) ok = false;
        if (!ok) continue;
        int k = U(rng) < 0.15 ? 1 : 3 + static_cast<int>(U(rng) * 4);
        k = std::min(k, budget);
        if (k == 2) k = 1;
        Ring ring;
        if (k == 1) {
            ring.push_back(c);
            r = 0.5;
        } else {
            std::vector<double> ang;
            for (int i = 0; i < k; ++i) ang.push_back(2 * kPi * U(rng));
            std::sort(ang.begin(), ang.end());
            // Reject slivers: every gap below pi keeps the disc center inside the polygon.
            bool fat = true;
            for (int i = 0; i < k; ++i) {
                double g = (i + 1 < k ? ang[i + 1] : ang[0] + 2 * kPi) - ang[i];
                if (g >= kPi * 0.95 || g < 0.2) fat = false;
            }
            if (!fat) continue;
            for (double a : ang) ring.push_back({c.x + r * std::cos(a), c.y + r * std::sin(a)});
        }
        discs.push_back({c, r});
        rings.push_back(ring);
        budget -= k;
    }
    Box box{0, 0, opt.box, opt.box};
    auto clr = [&](Point p) {
        double c = std::min({p.x, p.y, opt.box - p.x, opt.box - p.y});
        for (auto& ring : rings) {
            if (ring.size() >= 3 && point_in_polygon(p, ring)) return 0.0;
            for (size_t i = 0; i < ring.size(); ++i) c = std::min(c, dist_to_segment(p, ring[i], ring[(i + 1) % ring.size()]));
        }
        return c;
    };
    auto free_point = [&]() {
        for (;;) {
            Point p{opt.box * U(rng), opt.box * U(rng)};
            if (clr(p) >= opt.min_endpoint_clearance) return p;
        }
    };
    Point s = free_point(), t = free_point();
    return Scene(rings, box, s, t);
}

}  // namespace clrpath
