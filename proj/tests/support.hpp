#pragma once

#include <random>
#include <string>

#include "clrpath/clrpath.hpp"

namespace clrtest {

using namespace clrpath;

// Seeded generator with the few draws the suites need.
class Gen {
public:
    explicit Gen(uint64_t seed) : rng_(seed) {}
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    bool coin(double p = 0.5) { return uniform(0, 1) < p; }
    double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }

private:
    std::mt19937_64 rng_;
};

inline std::string scene_path(const std::string& name) { return std::string(CLRPATH_SCENE_DIR) + "/" + name; }

// Vertex obstacle at the origin, quarter turn with clearance ratio e.
inline Scene spiral_scene() { return Scene({{{0, 0}}}, {-50, -50, 50, 50}, {1, 0}, {0, std::exp(1.0)}); }

inline Scene two_point_scene() {
    return Scene({{{0, -1}}, {{0, 1}}}, {-200, -200, 200, 200}, {-50, 0}, {50, 0});
}

// Synthetic cells in canonical frames, covering every kappa shape. Clearance grows from alpha to beta.
inline RefinedCell random_vertex_cell(Gen& g) {
    bool seg = g.coin();
    double a = g.log_uniform(0.2, 5);
    double top = seg ? 1.35 : 2.6;
    double ta = g.coin(0.3) ? 0.0 : g.uniform(0, top * 0.6);
    double tb = g.uniform(ta + 0.05, top);
    return make_vertex_cell(seg ? KappaShape::segment : KappaShape::parabola, a, ta, tb);
}

inline RefinedCell random_edge_cell(Gen& g) {
    int k = g.integer(0, 2);
    if (k == 0) {
        double xa = g.uniform(0.05, 3);
        return make_edge_cell(KappaShape::segment, g.log_uniform(0.2, 4), xa, xa + g.uniform(0.1, 5));
    }
    if (k == 1) {
        double a = g.log_uniform(0.2, 4);
        double xa = g.coin(0.3) ? 0.0 : g.uniform(0, 4 * a);
        return make_edge_cell(KappaShape::parabola, a, xa, xa + g.uniform(0.1, 6 * a));
    }
    double xa = g.uniform(-3, 3);
    return make_edge_cell(KappaShape::horizontal, g.log_uniform(0.2, 4), xa, xa + g.uniform(0.1, 6));
}

inline RefinedCell random_cell(Gen& g) { return g.coin() ? random_vertex_cell(g) : random_edge_cell(g); }

// Random point on one side of a cell, away from the feature.
inline Point random_on_side(Gen& g, const RefinedCell& T, Side s) {
    switch (s) {
        case Side::alpha: return T.alpha_point(T.clr_u * g.uniform(0.02, 1));
        case Side::beta: return T.beta_point(T.clr_v * g.uniform(0.02, 1));
        default: return T.kappa_point(g.uniform(T.s_alpha(), T.s_beta()));
    }
}

inline Side random_side(Gen& g) {
    int k = g.integer(0, 2);
    return k == 0 ? Side::alpha : k == 1 ? Side::beta : Side::kappa;
}

// Random point strictly inside a cell.
inline Point random_interior(Gen& g, const RefinedCell& T) {
    double s = g.uniform(T.s_alpha(), T.s_beta());
    s = T.s_alpha() + (s - T.s_alpha()) * 0.98 + (T.s_beta() - T.s_alpha()) * 0.01;
    return T.at_param(s, T.kappa_clearance(s) * g.uniform(0.05, 0.98));
}

// Scene family for size scaling: `count` rotated squares on a jittered grid with constant density.
inline Scene square_grid_scene(int count) {
    int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(count))));
    int rows = (count + cols - 1) / cols;
    double pitch = 20, side = 6;
    double W = cols * pitch, H = rows * pitch;
    std::vector<Ring> rings;
    for (int i = 0; i < count; ++i) {
        int r = i / cols, c = i % cols;
        Point ctr{pitch * (c + 0.5) + 2.1 * std::sin(1.7 * i + 0.3), pitch * (r + 0.5) + 2.3 * std::cos(2.3 * i + 0.1)};
        double rot = 0.13 + 0.61 * i;
        Ring ring;
        for (int k = 0; k < 4; ++k) {
            double a = rot + k * kPi / 2;
            ring.push_back({ctr.x + side / std::sqrt(2.0) * std::cos(a), ctr.y + side / std::sqrt(2.0) * std::sin(a)});
        }
        rings.push_back(ring);
    }
    return Scene(rings, {0, 0, W, H}, {1.3, 1.7}, {W - 1.9, H - 1.1});
}

}  // namespace clrtest
