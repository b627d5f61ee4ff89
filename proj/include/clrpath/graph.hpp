#pragma once

#include <queue>

#include "reachability.hpp"

namespace clrpath {

enum class PayloadKind { edge_portion, eta, geodesic };

// What a graph edge stands for. edge_portion: diagram edge `ref` between params t0 and t1.
// eta: constant-clearance arc of cell `ref` at clearance t0. geodesic: single-feature path in cell `ref`.
struct Payload {
    PayloadKind kind = PayloadKind::edge_portion;
    int ref = -1;
    double t0 = 0, t1 = 0;
};

struct GraphVertex {
    Point p;
    double clearance = 0;
    int edge = -1;  // diagram edge the vertex was placed on (-1 for shared nodes)
    double param = 0;
    int node = -1;
};

struct GraphEdge {
    int u = -1, v = -1;
    double cost = 0;
    Payload payload;
};

struct SearchGraph {
    int stage = 1;
    std::vector<GraphVertex> vertices;
    std::vector<GraphEdge> edges;
    std::vector<std::vector<int>> adj;  // vertex -> incident edge ids
    int s = -1, t = -1;

    int vertex_count() const { return static_cast<int>(vertices.size()); }
    int edge_count() const { return static_cast<int>(edges.size()); }

    int add_vertex(const GraphVertex& v) {
        vertices.push_back(v);
        adj.emplace_back();
        return vertex_count() - 1;
    }

    int add_edge(int u, int v, double cost, Payload pl) {
        if (u == v) return -1;
        if (!(cost >= 0) || !std::isfinite(cost)) throw Error(ErrorKind::construction, "graph: invalid edge cost");
        edges.push_back({u, v, cost, pl});
        int id = edge_count() - 1;
        adj[u].push_back(id);
        adj[v].push_back(id);
        return id;
    }

    template <class F>
    void for_each_neighbor(int x, F&& f) const {
        for (int id : adj[x]) {
            const GraphEdge& e = edges[id];
            f(e.u == x ? e.v : e.u, e.cost, e.payload);
        }
    }
};

struct SearchResult {
    bool found = false;
    double cost = std::numeric_limits<double>::infinity();
    std::vector<int> vertices;    // s ... t
    std::vector<Payload> steps;   // steps[i] joins vertices[i] and vertices[i+1]
    size_t expanded = 0;
};

// Best-first search with a consistent heuristic h (h = 0 gives Dijkstra). Ties break by vertex index.
template <class G, class H>
SearchResult astar(const G& g, int s, int t, H&& h) {
    SearchResult r;
    int n = g.vertex_count();
    if (s < 0 || t < 0 || s >= n || t >= n) throw Error(ErrorKind::precondition, "search: endpoint out of range");
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    std::vector<int> parent(n, -1);
    std::vector<Payload> via(n);
    std::vector<char> done(n, 0);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[s] = 0;
    pq.push({h(s), s});
    while (!pq.empty()) {
        auto [f, x] = pq.top();
        pq.pop();
        if (done[x]) continue;
        done[x] = 1;
        ++r.expanded;
        if (x == t) break;
        g.for_each_neighbor(x, [&](int y, double c, const Payload& pl) {
            if (done[y]) return;
            double nd = dist[x] + c;
            if (nd < dist[y] || (nd == dist[y] && parent[y] >= 0 && x < parent[y])) {
                dist[y] = nd;
                parent[y] = x;
                via[y] = pl;
                pq.push({nd + h(y), y});
            }
        });
    }
    if (!done[t]) return r;
    r.found = true;
    r.cost = dist[t];
    for (int x = t; x >= 0; x = parent[x]) {
        r.vertices.push_back(x);
        if (x == s) break;
        r.steps.push_back(via[x]);
    }
    std::reverse(r.vertices.begin(), r.vertices.end());
    std::reverse(r.steps.begin(), r.steps.end());
    return r;
}

template <class G>
SearchResult dijkstra(const G& g, int s, int t) {
    return astar(g, s, t, [](int) { return 0.0; });
}

// Reference single-source costs; quadratic, for tests only.
inline std::vector<double> bellman_ford(const SearchGraph& g, int s) {
    std::vector<double> d(g.vertex_count(), std::numeric_limits<double>::infinity());
    d[s] = 0;
    for (int it = 0; it < g.vertex_count(); ++it) {
        bool changed = false;
        for (auto& e : g.edges) {
            if (d[e.u] + e.cost < d[e.v]) d[e.v] = d[e.u] + e.cost, changed = true;
            if (d[e.v] + e.cost < d[e.u]) d[e.u] = d[e.v] + e.cost, changed = true;
        }
        if (!changed) break;
    }
    return d;
}

}  // namespace clrpath
