#pragma once

#include <array>
#include <chrono>
#include <span>

#include "graph.hpp"

namespace clrpath {

inline constexpr double kOvershoot = 23.0;
inline constexpr double kDefaultCScale = 1.0;

struct StageStats {
    long long vertices = 0;
    long long edges = 0;  // -1 when the graph is explored lazily and not counted
    size_t expanded = 0;
    int graphs = 1;
    double seconds = 0;
};

struct StageResult {
    int stage = 0;
    bool found = false;
    Path path;
    double cost = std::numeric_limits<double>::infinity();  // best so far, including earlier stages
    double graph_cost = std::numeric_limits<double>::infinity();  // this stage's own graph search
    std::optional<double> search_param;
    StageStats stats;
};

// ---- vertex tables -------------------------------------------------------------------------

struct RawSample {
    int edge = -1;
    double param = 0;
};

// Vertices of a sample graph: all nodes of positive clearance plus requested samples, merged per
// diagram edge within the scene tolerance.
struct SampleTable {
    std::vector<GraphVertex> vertices;
    std::vector<std::vector<std::pair<double, int>>> on_edge;  // edge -> (param, vertex), sorted
    std::vector<int> node_vertex;                             // node -> vertex or -1
    std::vector<int> raw_vertex;                              // raw sample -> vertex or -1
};

inline double min_vertex_clearance(const RefinedDiagram& rd) { return rd.scene.tol() * 1e-3; }

inline SampleTable build_sample_table(const RefinedDiagram& rd, const std::vector<RawSample>& raw) {
    SampleTable tab;
    double tol = rd.scene.tol(), floor = min_vertex_clearance(rd);
    tab.node_vertex.assign(rd.nodes.size(), -1);
    for (size_t i = 0; i < rd.nodes.size(); ++i) {
        if (!(rd.node_clr[i] > floor)) continue;
        tab.node_vertex[i] = static_cast<int>(tab.vertices.size());
        tab.vertices.push_back({rd.nodes[i], rd.node_clr[i], -1, 0, static_cast<int>(i)});
    }
    struct Entry {
        double param;
        int node;  // node id or -1
        int raw;   // raw index or -1
    };
    std::vector<std::vector<Entry>> per_edge(rd.edges.size());
    for (size_t e = 0; e < rd.edges.size(); ++e)
        for (auto& [t, id] : rd.edges[e].nodes)
            if (tab.node_vertex[id] >= 0) per_edge[e].push_back({t, id, -1});
    for (size_t i = 0; i < raw.size(); ++i)
        if (raw[i].edge >= 0) per_edge[raw[i].edge].push_back({raw[i].param, -1, static_cast<int>(i)});
    tab.raw_vertex.assign(raw.size(), -1);
    tab.on_edge.assign(rd.edges.size(), {});
    for (size_t e = 0; e < rd.edges.size(); ++e) {
        auto& list = per_edge[e];
        std::sort(list.begin(), list.end(), [](const Entry& a, const Entry& b) {
            return a.param < b.param || (a.param == b.param && a.node > b.node);
        });
        const DiagramEdge& E = rd.edges[e];
        size_t i = 0;
        while (i < list.size()) {
            size_t j = i;
            Point head = E.point(list[i].param);
            int node = -1;
            while (j < list.size() && dist(E.point(list[j].param), head) <= tol) {
                if (list[j].node >= 0 && node < 0) node = list[j].node;
                ++j;
            }
            int vid;
            double param = list[i].param;
            if (node >= 0) {
                vid = tab.node_vertex[node];
                for (size_t k = i; k < j; ++k)
                    if (list[k].node == node) param = list[k].param;
            } else {
                double c = E.clearance(param);
                if (!(c > floor)) {
                    i = j;
                    continue;
                }
                vid = static_cast<int>(tab.vertices.size());
                tab.vertices.push_back({E.point(param), c, static_cast<int>(e), param, -1});
            }
            for (size_t k = i; k < j; ++k)
                if (list[k].raw >= 0) tab.raw_vertex[list[k].raw] = vid;
            if (tab.on_edge[e].empty() || tab.on_edge[e].back().second != vid) tab.on_edge[e].emplace_back(param, vid);
            i = j;
        }
    }
    return tab;
}

// Portions of each diagram edge between consecutive vertices.
inline void add_edge_portions(const RefinedDiagram& rd, const SampleTable& tab, SearchGraph& g) {
    for (size_t e = 0; e < rd.edges.size(); ++e) {
        const auto& L = tab.on_edge[e];
        for (size_t i = 1; i < L.size(); ++i) {
            double c = rd.edges[e].curve.cost(L[i - 1].first, L[i].first);
            g.add_edge(L[i - 1].second, L[i].second, c, {PayloadKind::edge_portion, static_cast<int>(e), L[i - 1].first, L[i].first});
        }
    }
}

// ---- path realization -------------------------------------------------------------------

inline AnalyticPrimitive payload_primitive(const RefinedDiagram& rd, const Payload& pl, Point from, Point to) {
    AnalyticPrimitive a;
    switch (pl.kind) {
        case PayloadKind::edge_portion: {
            const DiagramEdge& E = rd.edges[pl.ref];
            a = make_curve_portion(E.curve, pl.t0, pl.t1, pl.ref);
            a.feature = E.feature_a;
            break;
        }
        case PayloadKind::eta: {
            const RefinedCell& T = rd.cells[pl.ref];
            a = arc_primitive(T, constant_clearance_arc(T, pl.t0));
            break;
        }
        case PayloadKind::geodesic: {
            const RefinedCell& T = rd.cells[pl.ref];
            Path g = feature_geodesic(T.feat, T.feature, from, to, 0);
            if (g.empty()) return make_straight(PrimitiveKind::line_segment, from, to, 0, T.feature);
            return g.primitives.front();
        }
    }
    if (dist(a.start, from) + dist(a.end, to) > dist(a.end, from) + dist(a.start, to)) a = a.reversed();
    return a;
}

inline Path realize_path(const RefinedDiagram& rd, const std::vector<GraphVertex>& verts, const SearchResult& r) {
    Path path;
    for (size_t i = 0; i < r.steps.size(); ++i) {
        Point a = verts[r.vertices[i]].p, b = verts[r.vertices[i + 1]].p;
        path.append(payload_primitive(rd, r.steps[i], a, b));
    }
    return path;
}

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Samples w on beta plus their arc partners, and the arcs as graph edges.
struct EtaBuilder {
    const RefinedDiagram& rd;
    std::vector<RawSample> raw;
    struct Arc {
        int cell;
        double c;
        int w, wbar;  // raw indices
        double cost;
    };
    std::vector<Arc> arcs;

    void add(const RefinedCell& T, double c) {
        if (T.beta_edge < 0 || !(c > min_vertex_clearance(rd))) return;
        c = std::min(c, T.clr_v);
        ConstClearanceArc arc = constant_clearance_arc(T, c);
        int w = static_cast<int>(raw.size());
        raw.push_back({T.beta_edge, c});
        if (!(arc.cost > 0)) return;
        int wb = static_cast<int>(raw.size());
        if (arc.on_alpha) {
            if (T.alpha_edge < 0) return;
            raw.push_back({T.alpha_edge, c});
        } else {
            raw.push_back({T.kappa_edge, rd.edges[T.kappa_edge].curve.param_of(arc.w_bar)});
        }
        arcs.push_back({T.id, c, w, wb, arc.cost});
    }

    SearchGraph finish(int stage) {
        SampleTable tab = build_sample_table(rd, raw);
        SearchGraph g;
        g.stage = stage;
        for (auto& v : tab.vertices) g.add_vertex(v);
        add_edge_portions(rd, tab, g);
        for (auto& a : arcs) {
            int u = tab.raw_vertex[a.w], v = tab.raw_vertex[a.wbar];
            if (u >= 0 && v >= 0) g.add_edge(u, v, a.cost, {PayloadKind::eta, a.cell, a.c, 0});
        }
        g.s = tab.node_vertex[rd.s.node];
        g.t = tab.node_vertex[rd.t.node];
        return g;
    }
};

inline StageResult run_search(const RefinedDiagram& rd, const SearchGraph& g, int stage) {
    StageResult r;
    r.stage = stage;
    r.stats.vertices = g.vertex_count();
    r.stats.edges = g.edge_count();
    if (g.s < 0 || g.t < 0) throw Error(ErrorKind::unreachable, "search: endpoint missing from graph");
    SearchResult sr = dijkstra(g, g.s, g.t);
    r.stats.expanded = sr.expanded;
    if (!sr.found) return r;
    r.found = true;
    r.path = realize_path(rd, g.vertices, sr);
    r.cost = r.path.total_cost;
    return r;
}

inline bool same_endpoints(const RefinedDiagram& rd) { return rd.s.node == rd.t.node; }

inline StageResult trivial_result(int stage) {
    StageResult r;
    r.stage = stage;
    r.found = true;
    r.cost = 0;
    return r;
}

}  // namespace detail

// ---- stage 1 ------------------------------------------------------------------------------

inline SearchGraph build_G1(const RefinedDiagram& rd) {
    detail::EtaBuilder b{rd, {}, {}};
    double clr_s = rd.scene.clr(rd.scene.source());
    for (const RefinedCell& T : rd.cells) {
        AnchorPair A = anchor_points(T);
        if (A.w_alpha) b.add(T, *A.w_alpha);
        if (A.w_kappa) b.add(T, *A.w_kappa);
        b.add(T, std::min(T.clr_v, clr_s));
    }
    return b.finish(1);
}

inline StageResult stage1(const RefinedDiagram& rd) {
    auto t0 = std::chrono::steady_clock::now();
    if (detail::same_endpoints(rd)) return detail::trivial_result(1);
    SearchGraph g = build_G1(rd);
    StageResult r = detail::run_search(rd, g, 1);
    if (!r.found) throw Error(ErrorKind::unreachable, "stage 1: target not reachable");
    r.stats.seconds = detail::seconds_since(t0);
    return r;
}

// ---- stage 2 ------------------------------------------------------------------------------

// Clearances of the samples on the marked portion of beta: geometric with ratio e^(d/n).
inline std::vector<double> beta_samples(const RefinedCell& T, double d, double clr_s, double clr_t, int n, double floor) {
    double lo = std::max(std::min(T.clr_v, clr_t / std::exp(d)), floor);
    double hi = std::min(T.clr_v, clr_s * std::exp(d));
    std::vector<double> out;
    if (lo > hi) return out;
    double step = d / n;
    double L = std::log(hi / lo);
    long long k = static_cast<long long>(std::ceil(L / step - 1e-12));
    for (long long i = 0; i < k; ++i) out.push_back(lo * std::exp(i * step));
    out.push_back(hi);
    return out;
}

inline SearchGraph build_G2(const RefinedDiagram& rd, double d, double clr_s, double clr_t) {
    if (!(d > 0)) throw Error(ErrorKind::precondition, "build_G2: d must be positive");
    detail::EtaBuilder b{rd, {}, {}};
    double floor = rd.scene.tol();
    for (const RefinedCell& T : rd.cells) {
        for (double c : beta_samples(T, d, clr_s, clr_t, rd.n, floor)) b.add(T, c);
        AnchorPair A = anchor_points(T);
        if (A.w_alpha) b.add(T, *A.w_alpha);
        if (A.w_kappa) b.add(T, *A.w_kappa);
    }
    return b.finish(2);
}

inline int exponential_search_steps(int n, double overshoot = kOvershoot) {
    return static_cast<int>(std::ceil(std::log2(overshoot * n)));
}

inline StageResult stage2(const RefinedDiagram& rd, const StageResult& s1) {
    auto t0 = std::chrono::steady_clock::now();
    if (detail::same_endpoints(rd) || s1.cost == 0) return detail::trivial_result(2);
    double clr_s = rd.scene.clr(rd.scene.source()), clr_t = rd.scene.clr(rd.scene.target());
    StageResult best;
    best.stage = 2;
    best.stats.graphs = 0;
    int steps = exponential_search_steps(rd.n);
    for (int i = 0; i <= steps; ++i) {
        double d = s1.cost / std::ldexp(1.0, i);
        SearchGraph g = build_G2(rd, d, clr_s, clr_t);
        StageResult r = detail::run_search(rd, g, 2);
        best.stats.vertices = std::max(best.stats.vertices, r.stats.vertices);
        best.stats.edges = std::max(best.stats.edges, r.stats.edges);
        best.stats.expanded += r.stats.expanded;
        ++best.stats.graphs;
        if (r.found && r.cost < best.cost) {
            best.found = true;
            best.cost = r.cost;
            best.path = std::move(r.path);
            best.search_param = d;
        }
    }
    best.stats.seconds = detail::seconds_since(t0);
    return best;
}

// ---- edgelets -----------------------------------------------------------------------------

enum class EdgeletRole { alpha_marked, beta_marked, kappa_low, kappa_high, kappa_whole };

inline std::string_view to_string(EdgeletRole r) {
    switch (r) {
        case EdgeletRole::alpha_marked: return "alpha_marked";
        case EdgeletRole::beta_marked: return "beta_marked";
        case EdgeletRole::kappa_low: return "kappa_low";
        case EdgeletRole::kappa_high: return "kappa_high";
        case EdgeletRole::kappa_whole: return "kappa_whole";
    }
    return "?";
}

// Marked portion of one side of a cell: [lo, hi] in clearance (alpha, beta) or frame parameter (kappa).
struct Edgelet {
    int cell = -1;
    Side side = Side::alpha;
    EdgeletRole role = EdgeletRole::alpha_marked;
    int edge = -1;
    double lo = 0, hi = 0;
    bool v_prime_clamped = false;
};

inline double kappa_frame_param(const RefinedCell& T, double tc) {
    if (T.vertex_feature()) return T.shape == KappaShape::segment ? std::atan(tc / T.a) : 2 * std::atan(tc / (2 * T.a));
    return T.shape == KappaShape::segment ? tc / std::hypot(1.0, T.slope) : tc;
}

// Frame parameter reached after spending cost d along kappa from s (direction +1 raises clearance).
inline double kappa_advance(const RefinedCell& T, double s, double d, int direction) {
    CurveGeometry c = T.kappa_curve();
    return kappa_frame_param(T, c.advance(T.kappa_curve_param(s), d, direction));
}

inline double edgelet_cost(const RefinedCell& T, const Edgelet& e) {
    if (e.side == Side::kappa) return T.kappa_cost(e.lo, e.hi);
    return std::log(e.hi / e.lo);
}

inline std::vector<Edgelet> mark_edgelets(const RefinedCell& T, double d, double clr_s, double clr_t) {
    if (!(d > 0)) throw Error(ErrorKind::precondition, "mark_edgelets: d must be positive");
    double c_lo = clr_t / std::exp(d), c_hi = clr_s * std::exp(d);
    std::vector<Edgelet> out;
    auto radial = [&](Side side, int edge, double top, EdgeletRole role) {
        if (edge < 0) return;
        double lo = std::min(top, c_lo), hi = std::min(top, c_hi);
        if (lo > hi || !(lo > 0)) return;
        out.push_back({T.id, side, role, edge, lo, hi});
    };
    radial(Side::alpha, T.alpha_edge, T.clr_u, EdgeletRole::alpha_marked);
    radial(Side::beta, T.beta_edge, T.clr_v, EdgeletRole::beta_marked);

    double sa = T.s_alpha(), sb = T.s_beta();
    Edgelet k{T.id, Side::kappa, EdgeletRole::kappa_whole, T.kappa_edge, sa, sb};
    if (T.kappa_cost(sa, sb) <= 2 * d) {
        out.push_back(k);
        return out;
    }
    double s_u1 = std::min(kappa_advance(T, sa, 2 * d, +1), sb);
    double c_vp = std::min(T.clr_v, c_hi);
    double s_v1 = sb;
    bool clamped = false;
    if (T.shape != KappaShape::horizontal && c_vp < T.clr_v) {
        if (c_vp >= T.clr_u) s_v1 = std::clamp(T.kappa_param_at_clearance(c_vp), sa, sb);
        else clamped = true;  // kappa never attains that clearance
    }
    if (T.kappa_cost(std::min(s_u1, s_v1), std::max(s_u1, s_v1)) <= 4 * d) {
        k.role = EdgeletRole::kappa_low;
        k.hi = std::max(s_u1, s_v1);
        k.v_prime_clamped = clamped;
        out.push_back(k);
        return out;
    }
    double s_v2 = std::max(kappa_advance(T, s_v1, 4 * d, -1), sa);
    out.push_back({T.id, Side::kappa, EdgeletRole::kappa_low, T.kappa_edge, sa, s_u1, clamped});
    out.push_back({T.id, Side::kappa, EdgeletRole::kappa_high, T.kappa_edge, s_v2, s_v1, clamped});
    return out;
}

// Sample parameters on an edgelet at cost spacing `step`, endpoints included.
inline std::vector<double> sample_edgelet(const RefinedCell& T, const Edgelet& e, double step) {
    std::vector<double> out;
    if (e.hi <= e.lo) return {e.lo};
    if (e.side != Side::kappa) {
        double L = std::log(e.hi / e.lo);
        long long k = static_cast<long long>(std::ceil(L / step - 1e-12));
        for (long long i = 0; i < k; ++i) out.push_back(e.lo * std::exp(i * step));
        out.push_back(e.hi);
        return out;
    }
    CurveGeometry c = T.kappa_curve();
    double p0 = c.potential(T.kappa_curve_param(e.lo)), p1 = c.potential(T.kappa_curve_param(e.hi));
    long long k = static_cast<long long>(std::ceil((p1 - p0) / step - 1e-12));
    out.push_back(e.lo);
    for (long long i = 1; i < k; ++i) out.push_back(kappa_frame_param(T, c.inverse_potential(p0 + i * step)));
    out.push_back(e.hi);
    return out;
}

// Walk offsets: distinct values of floor((1+eps)^i) up to `limit`.
inline std::vector<int> walk_offsets(double eps, int limit) {
    std::vector<int> out;
    for (double x = 1; x <= limit; x *= 1 + eps) {
        int o = static_cast<int>(std::floor(x));
        if (out.empty() || out.back() != o) out.push_back(o);
    }
    return out;
}

// Indices into an edgelet's clearance-sorted samples forming S(p) for a shadow clearance.
inline std::vector<int> candidate_indices(const std::vector<double>& clr, double shadow_clr, const std::vector<int>& offsets) {
    int m = static_cast<int>(clr.size());
    std::vector<int> out;
    if (m == 0) return out;
    int jl = static_cast<int>(std::lower_bound(clr.begin(), clr.end(), shadow_clr) - clr.begin()) - 1;
    int jr = static_cast<int>(std::upper_bound(clr.begin(), clr.end(), shadow_clr) - clr.begin());
    out.push_back(0);
    out.push_back(m - 1);
    if (jl >= 0) {
        out.push_back(jl);
        for (int o : offsets) {
            if (jl - o < 0) break;
            out.push_back(jl - o);
        }
    }
    if (jr < m) {
        out.push_back(jr);
        for (int o : offsets) {
            if (jr + o >= m) break;
            out.push_back(jr + o);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// Clearance of the shadow point of p (on sides `mask` of T) for an edgelet on side `target`.
inline double shadow_clearance(const RefinedCell& T, const AnchorPair& A, double clr_p, unsigned mask, Side target) {
    bool beta_only = mask == static_cast<unsigned>(Side::beta);
    if (!beta_only) return clr_p;
    if (target == Side::kappa && A.w_kappa) return std::max(clr_p, *A.w_kappa);
    if (target == Side::alpha && A.w_alpha) return std::max(clr_p, *A.w_alpha);
    (void)T;
    return clr_p;
}

inline Point shadow_point(const RefinedCell& T, Point p, const Edgelet& xi, double tol = 1e-9) {
    unsigned m = side_mask(T, p, tol);
    if (on_side(m, xi.side)) throw Error(ErrorKind::precondition, "shadow_point: p lies on the edgelet's side");
    double c = T.feature_distance(p);
    double sc = shadow_clearance(T, anchor_points(T), c, m & 7u, xi.side);
    return sc == c ? p : T.beta_point(sc);
}

// ---- stage 3 ------------------------------------------------------------------------------

// G3 with explicit vertices and lazily generated neighbor lists.
class G3Graph {
public:
    struct EdgeletSamples {
        Edgelet edgelet;
        std::vector<int> vids;
        std::vector<double> key;  // nondecreasing: clearance, or frame parameter on a horizontal kappa
    };

    G3Graph(const RefinedDiagram& rd, double d, double eps) : rd_(rd), d_(d), eps_(eps) {
        if (!(d > 0)) throw Error(ErrorKind::precondition, "build_G3: d must be positive");
        if (!(eps > 0) || eps > 1) throw Error(ErrorKind::precondition, "build_G3: epsilon must be in (0, 1]");
        double clr_s = rd.scene.clr(rd.scene.source()), clr_t = rd.scene.clr(rd.scene.target());
        double step = eps * d / rd.n;
        std::vector<RawSample> raw;
        std::vector<std::pair<int, int>> raw_owner;  // (edgelet, index)
        anchors_.reserve(rd.cells.size());
        cell_edgelets_.assign(rd.cells.size(), {});
        int max_m = 1;
        for (const RefinedCell& T : rd.cells) {
            anchors_.push_back(anchor_points(T));
            for (const Edgelet& e : mark_edgelets(T, d, clr_s, clr_t)) {
                int id = static_cast<int>(edgelets_.size());
                cell_edgelets_[T.id].push_back(id);
                edgelets_.push_back({e, {}, {}});
                if (e.v_prime_clamped) ++v_prime_clamps_;
                std::vector<double> ps = sample_edgelet(T, e, step);
                max_m = std::max(max_m, static_cast<int>(ps.size()));
                for (size_t k = 0; k < ps.size(); ++k) {
                    double t = e.side == Side::kappa ? rd.edges[e.edge].curve.param_of(T.kappa_point(ps[k])) : ps[k];
                    raw.push_back({e.edge, t});
                    raw_owner.emplace_back(id, static_cast<int>(k));
                }
            }
        }
        offsets_ = walk_offsets(eps, max_m);
        is_offset_.assign(max_m + 1, 0);
        is_offset_[0] = 1;
        for (int o : offsets_) is_offset_[o] = 1;

        SampleTable tab = build_sample_table(rd, raw);
        vertices_ = std::move(tab.vertices);
        on_edge_ = std::move(tab.on_edge);
        s_ = tab.node_vertex[rd.s.node];
        t_ = tab.node_vertex[rd.t.node];
        for (size_t i = 0; i < raw.size(); ++i) {
            int v = tab.raw_vertex[i];
            if (v < 0) continue;
            auto& E = edgelets_[raw_owner[i].first];
            if (!E.vids.empty() && E.vids.back() == v) continue;
            E.vids.push_back(v);
            const RefinedCell& T = rd.cells[E.edgelet.cell];
            E.key.push_back(by_param(T, E.edgelet.side) ? T.param(vertices_[v].p) : vertices_[v].clearance);
        }
        for (auto& E : edgelets_)  // keep keys monotone against rounding
            for (size_t k = 1; k < E.key.size(); ++k) E.key[k] = std::max(E.key[k], E.key[k - 1]);

        index_vertices();
    }

    int vertex_count() const { return static_cast<int>(vertices_.size()); }
    const std::vector<GraphVertex>& vertices() const { return vertices_; }
    const std::vector<EdgeletSamples>& edgelets() const { return edgelets_; }
    const std::vector<int>& offsets() const { return offsets_; }
    int s() const { return s_; }
    int t() const { return t_; }
    double d() const { return d_; }
    double epsilon() const { return eps_; }
    int v_prime_clamps() const { return v_prime_clamps_; }

    template <class F>
    void for_each_neighbor(int x, F&& f) const {
        const GraphVertex& P = vertices_[x];
        // Along diagram edges.
        for (auto [e, pos] : edge_slots(x)) {
            const auto& L = on_edge_[e];
            for (int k : {pos - 1, pos + 1}) {
                if (k < 0 || k >= static_cast<int>(L.size())) continue;
                double c = rd_.edges[e].curve.cost(L[pos].first, L[k].first);
                f(L[k].second, c, Payload{PayloadKind::edge_portion, e, L[pos].first, L[k].first});
            }
        }
        auto emit = [&](const RefinedCell& T, int y) {
            if (y == x) return;
            const GraphVertex& Q = vertices_[y];
            if (!locally_reachable(T, P.p, Q.p)) return;
            f(y, single_feature_cost(T.feat, P.p, Q.p), Payload{PayloadKind::geodesic, T.id, 0, 0});
        };
        // Forward: q in S(x).
        for (auto [cell, mask] : cells_of(x)) {
            const RefinedCell& T = rd_.cells[cell];
            for (int id : cell_edgelets_[cell]) {
                const auto& E = edgelets_[id];
                if (mask & static_cast<unsigned>(E.edgelet.side)) continue;
                double sc = shadow_key(T, anchors_[cell], P.clearance, mask, E.edgelet.side);
                for (int k : candidate_indices(E.key, sc, offsets_)) emit(T, E.vids[k]);
            }
        }
        // Reverse: p with x in S(p).
        for (auto [id, j] : memberships(x)) {
            const auto& E = edgelets_[id];
            const RefinedCell& T = rd_.cells[E.edgelet.cell];
            for (int side = 0; side < 3; ++side) {
                Side sd = static_cast<Side>(1u << side);
                if (sd == E.edgelet.side) continue;
                for_each_reverse(T, E, j, sd, [&](int y) { emit(T, y); });
            }
        }
    }

    // |E3|: geodesic edges (each unordered pair once) plus edge portions.
    long long count_edges() const {
        long long count = 0;
        for (auto& L : on_edge_) count += L.empty() ? 0 : static_cast<long long>(L.size()) - 1;
        std::vector<int> qs;
        for (int x = 0; x < vertex_count(); ++x) {
            const GraphVertex& P = vertices_[x];
            for (auto [cell, mask] : cells_of(x)) {
                const RefinedCell& T = rd_.cells[cell];
                qs.clear();
                for (int id : cell_edgelets_[cell]) {
                    const auto& E = edgelets_[id];
                    if (mask & static_cast<unsigned>(E.edgelet.side)) continue;
                    double sc = shadow_key(T, anchors_[cell], P.clearance, mask, E.edgelet.side);
                    for (int k : candidate_indices(E.key, sc, offsets_)) qs.push_back(E.vids[k]);
                }
                std::sort(qs.begin(), qs.end());
                qs.erase(std::unique(qs.begin(), qs.end()), qs.end());
                for (int y : qs) {
                    if (y == x || !locally_reachable(T, P.p, vertices_[y].p)) continue;
                    if (y < x && in_candidates(cell, y, x)) continue;  // counted from y
                    ++count;
                }
            }
        }
        return count;
    }

    // Whether x is in S(y) within cell `cell`.
    bool in_candidates(int cell, int y, int x) const {
        const RefinedCell& T = rd_.cells[cell];
        unsigned my = mask_in(y, cell);
        if (!my) return false;
        for (auto [id, j] : memberships(x)) {
            const auto& E = edgelets_[id];
            if (E.edgelet.cell != cell || (my & static_cast<unsigned>(E.edgelet.side))) continue;
            int m = static_cast<int>(E.key.size());
            if (j == 0 || j == m - 1) return true;
            double sc = shadow_key(T, anchors_[cell], vertices_[y].clearance, my, E.edgelet.side);
            int jl = static_cast<int>(std::lower_bound(E.key.begin(), E.key.end(), sc) - E.key.begin()) - 1;
            int jr = static_cast<int>(std::upper_bound(E.key.begin(), E.key.end(), sc) - E.key.begin());
            if (jl >= 0 && j <= jl && is_offset_[jl - j]) return true;
            if (jr < m && j >= jr && is_offset_[j - jr]) return true;
        }
        return false;
    }

    // Sides of cell `cell` that vertex x lies on (0 if none).
    unsigned mask_in(int x, int cell) const {
        for (auto [c, m] : cells_of(x))
            if (c == cell) return m;
        return 0;
    }

    std::span<const std::pair<int, unsigned>> cells_of(int x) const {
        return {cell_list_.data() + cell_off_[x], cell_list_.data() + cell_off_[x + 1]};
    }
    std::span<const std::pair<int, int>> memberships(int x) const {
        return {memb_list_.data() + memb_off_[x], memb_list_.data() + memb_off_[x + 1]};
    }

private:
    const RefinedDiagram& rd_;
    double d_, eps_;
    std::vector<GraphVertex> vertices_;
    std::vector<std::vector<std::pair<double, int>>> on_edge_;
    std::vector<AnchorPair> anchors_;
    std::vector<EdgeletSamples> edgelets_;
    std::vector<std::vector<int>> cell_edgelets_;
    std::vector<int> offsets_;
    std::vector<char> is_offset_;
    int s_ = -1, t_ = -1;
    int v_prime_clamps_ = 0;
    // CSR tables: vertex -> (edge, slot), (cell, side mask), (edgelet, index).
    std::vector<int> slot_off_, cell_off_, memb_off_;
    std::vector<std::pair<int, int>> slot_list_;
    std::vector<std::pair<int, unsigned>> cell_list_;
    std::vector<std::pair<int, int>> memb_list_;
    // Per cell and side: vertices on that side, sorted by the side's parameter.
    std::vector<std::array<std::vector<int>, 3>> side_vertices_;

    std::span<const std::pair<int, int>> edge_slots(int x) const {
        return {slot_list_.data() + slot_off_[x], slot_list_.data() + slot_off_[x + 1]};
    }

    static int side_index(Side s) { return s == Side::alpha ? 0 : s == Side::beta ? 1 : 2; }

    // A horizontal kappa has constant clearance, so its samples are ordered by frame parameter and
    // the shadow of a radial point sits at that side's end of kappa.
    static bool by_param(const RefinedCell& T, Side side) {
        return side == Side::kappa && T.shape == KappaShape::horizontal;
    }
    static double shadow_key(const RefinedCell& T, const AnchorPair& A, double clr_p, unsigned mask, Side target) {
        if (by_param(T, target)) return on_side(mask, Side::beta) ? T.s_beta() : T.s_alpha();
        return shadow_clearance(T, A, clr_p, mask, target);
    }

    template <class T>
    static void build_csr(int n, const std::vector<std::pair<int, T>>& items, std::vector<int>& off,
                          std::vector<T>& list) {
        off.assign(n + 1, 0);
        for (auto& it : items) ++off[it.first + 1];
        for (int i = 0; i < n; ++i) off[i + 1] += off[i];
        list.resize(items.size());
        std::vector<int> pos(off.begin(), off.end() - 1);
        for (auto& it : items) list[pos[it.first]++] = it.second;
    }

    void index_vertices() {
        int n = vertex_count();
        double tol = rd_.scene.tol();
        std::vector<std::pair<int, std::pair<int, int>>> slots;
        for (size_t e = 0; e < on_edge_.size(); ++e)
            for (size_t k = 0; k < on_edge_[e].size(); ++k)
                slots.push_back({on_edge_[e][k].second, {static_cast<int>(e), static_cast<int>(k)}});
        build_csr(n, slots, slot_off_, slot_list_);

        std::vector<std::pair<int, std::pair<int, unsigned>>> cells;
        std::vector<std::pair<int, unsigned>> acc;
        for (int x = 0; x < n; ++x) {
            acc.clear();
            for (auto [e, k] : edge_slots(x)) {
                const DiagramEdge& E = rd_.edges[e];
                double t = on_edge_[e][k].first;
                for (int c : E.cells) {
                    const RefinedCell& T = rd_.cells[c];
                    unsigned bit = 0;
                    if (T.alpha_edge == e) bit |= static_cast<unsigned>(Side::alpha);
                    if (T.beta_edge == e) bit |= static_cast<unsigned>(Side::beta);
                    if (T.kappa_edge == e) {
                        double lo = std::min(T.kappa_tu, T.kappa_tv), hi = std::max(T.kappa_tu, T.kappa_tv);
                        Point p = E.point(t);
                        bool inside = (t >= lo && t <= hi) || dist(p, T.u) <= tol || dist(p, T.v) <= tol;
                        if (inside) bit |= static_cast<unsigned>(Side::kappa);
                    }
                    if (!bit) continue;
                    auto it = std::find_if(acc.begin(), acc.end(), [&](auto& a) { return a.first == c; });
                    if (it == acc.end()) acc.push_back({c, bit});
                    else it->second |= bit;
                }
            }
            for (auto& a : acc) cells.push_back({x, a});
        }
        build_csr(n, cells, cell_off_, cell_list_);

        std::vector<std::pair<int, std::pair<int, int>>> memb;
        for (size_t id = 0; id < edgelets_.size(); ++id)
            for (size_t k = 0; k < edgelets_[id].vids.size(); ++k)
                memb.push_back({edgelets_[id].vids[k], {static_cast<int>(id), static_cast<int>(k)}});
        build_csr(n, memb, memb_off_, memb_list_);

        side_vertices_.assign(rd_.cells.size(), {});
        for (int x = 0; x < n; ++x)
            for (auto [c, m] : cells_of(x))
                for (int s = 0; s < 3; ++s)
                    if (m & (1u << s)) side_vertices_[c][s].push_back(x);
        for (size_t c = 0; c < rd_.cells.size(); ++c) {
            const RefinedCell& T = rd_.cells[c];
            for (int s = 0; s < 3; ++s) {
                auto& L = side_vertices_[c][s];
                auto key = [&](int v) { return s == 2 ? T.param(vertices_[v].p) : vertices_[v].clearance; };
                std::sort(L.begin(), L.end(), [&](int a, int b) { return key(a) < key(b) || (key(a) == key(b) && a < b); });
            }
        }
    }

    // Vertices p on side `sd` of T (not on E's side) with E's sample j in S(p).
    template <class F>
    void for_each_reverse(const RefinedCell& T, const EdgeletSamples& E, int j, Side sd, F&& f) const {
        const auto& L = side_vertices_[T.id][side_index(sd)];
        if (L.empty()) return;
        int m = static_cast<int>(E.key.size());
        const AnchorPair& A = anchors_[T.id];
        unsigned xi_bit = static_cast<unsigned>(E.edgelet.side);
        auto shadow = [&](int v) {
            unsigned mv = mask_in(v, T.id);
            return shadow_key(T, A, vertices_[v].clearance, mv, E.edgelet.side);
        };
        auto visit = [&](size_t a, size_t b) {
            for (size_t i = a; i < b; ++i)
                if (!(mask_in(L[i], T.id) & xi_bit)) f(L[i]);
        };
        if (j == 0 || j == m - 1) {
            visit(0, L.size());
            return;
        }
        // Shadow clearance is nondecreasing along L; map clearance windows to index ranges.
        auto first_above = [&](double c, bool strict) {
            size_t lo = 0, hi = L.size();
            while (lo < hi) {
                size_t mid = (lo + hi) / 2;
                double s = shadow(L[mid]);
                if (strict ? s > c : s >= c) hi = mid;
                else lo = mid + 1;
            }
            return lo;
        };
        constexpr double inf = std::numeric_limits<double>::infinity();
        auto window = [&](double a, bool a_open, double b, bool b_closed) {
            size_t i0 = a == -inf ? 0 : first_above(a, a_open);
            size_t i1 = b == inf ? L.size() : first_above(b, b_closed);
            if (i0 < i1) visit(i0, i1);
        };
        auto upper = [&](int k) { return k + 1 < m ? E.key[k + 1] : inf; };
        auto lower = [&](int k) { return k - 1 >= 0 ? E.key[k - 1] : -inf; };
        // q = jl - o: shadow in (c_{j+o}, c_{j+o+1}]; q = jr + o: shadow in [c_{j-o-1}, c_{j-o}).
        auto both = [&](int o) {
            if (j + o <= m - 1) window(E.key[j + o], true, upper(j + o), true);
            if (j - o >= 0) window(lower(j - o), false, E.key[j - o], false);
        };
        both(0);
        for (int o : offsets_) {
            if (j + o > m - 1 && j - o < 0) break;
            both(o);
        }
    }
};

inline double g3_heuristic(const GraphVertex& v, const GraphVertex& t) {
    double a = std::abs(std::log(t.clearance / v.clearance));
    double b = std::log1p(dist(v.p, t.p) / t.clearance);
    return std::max(a, b);
}

inline StageResult stage3(const RefinedDiagram& rd, double d, double eps) {
    auto t0 = std::chrono::steady_clock::now();
    if (detail::same_endpoints(rd) || d == 0) return detail::trivial_result(3);
    G3Graph g(rd, d, eps);
    StageResult r;
    r.stage = 3;
    r.search_param = d;
    r.stats.vertices = g.vertex_count();
    r.stats.edges = -1;
    if (g.s() < 0 || g.t() < 0) throw Error(ErrorKind::unreachable, "stage 3: endpoint missing from graph");
    const GraphVertex& tv = g.vertices()[g.t()];
    SearchResult sr = astar(g, g.s(), g.t(), [&](int v) { return g3_heuristic(g.vertices()[v], tv); });
    r.stats.expanded = sr.expanded;
    if (sr.found) {
        r.found = true;
        r.path = realize_path(rd, g.vertices(), sr);
        r.cost = r.path.total_cost;
    }
    r.stats.seconds = detail::seconds_since(t0);
    return r;
}

// ---- driver -------------------------------------------------------------------------------

struct ApproxOptions {
    double c_scale = kDefaultCScale;
    int max_stage = 3;
};

struct ApproxResult {
    StageResult stage1, stage2, stage3;
    StageResult final;  // best of the stages run, oriented from the scene's source to its target
    bool swapped = false;
    double epsilon = 0;
    double epsilon_internal = 0;
    int complexity = 0;
    double seconds_diagram = 0;
};

inline ApproxResult approximate(const RefinedDiagram& rd, double eps, ApproxOptions opt = {}) {
    if (!(eps > 0) || eps > 1) throw Error(ErrorKind::precondition, "approximate: epsilon must be in (0, 1]");
    if (!(opt.c_scale >= 1)) throw Error(ErrorKind::precondition, "approximate: c_scale must be at least 1");
    ApproxResult out;
    out.swapped = rd.swapped;
    out.epsilon = eps;
    out.epsilon_internal = eps / opt.c_scale;
    out.complexity = rd.n;
    out.stage1 = stage1(rd);
    out.stage1.graph_cost = out.stage1.cost;
    out.final = out.stage1;
    // Later stages report the best path found so far, so stage costs never increase.
    auto keep_best = [&](StageResult& r) {
        r.graph_cost = r.found ? r.cost : std::numeric_limits<double>::infinity();
        bool improved = r.graph_cost < out.final.cost;
        int stage = improved ? r.stage : out.final.stage;
        if (!improved) {
            r.found = true;
            r.cost = out.final.cost;
            r.path = out.final.path;
        }
        out.final = r;
        out.final.stage = stage;
    };
    if (opt.max_stage >= 2) {
        out.stage2 = stage2(rd, out.stage1);
        keep_best(out.stage2);
    }
    if (opt.max_stage >= 3) {
        out.stage3 = stage3(rd, out.final.cost, out.epsilon_internal);
        keep_best(out.stage3);
    }
    if (rd.swapped) {
        for (StageResult* r : {&out.stage1, &out.stage2, &out.stage3, &out.final}) r->path = r->path.reversed();
    }
    return out;
}

inline ApproxResult approximate(const Scene& scene, double eps, ApproxOptions opt = {}) {
    auto t0 = std::chrono::steady_clock::now();
    RefinedDiagram rd = build_refined(scene);
    double td = detail::seconds_since(t0);
    ApproxResult r = approximate(rd, eps, opt);
    r.seconds_diagram = td;
    return r;
}

}  // namespace clrpath
