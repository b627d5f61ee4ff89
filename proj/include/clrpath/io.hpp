#pragma once

#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "approx.hpp"

namespace clrpath {

// ---- scene files ----------------------------------------------------------------------------
//
// Line format (one record per line, '#' starts a comment):
//   version 1
//   box <xmin> <ymin> <xmax> <ymax>
//   source <x> <y>
//   target <x> <y>
//   obstacle <k>        followed by k lines "<x> <y>"
// A document whose first non-blank character is '{' is read as JSON with the keys
// version, bounding_box, source, target, obstacles.

inline constexpr int kSceneVersion = 1;

namespace detail {

inline Error parse_error(int line, const std::string& what) {
    return Error(ErrorKind::validation, "line " + std::to_string(line) + ": " + what);
}

inline double finite_or_throw(double v, int line, const char* field) {
    if (!std::isfinite(v)) throw parse_error(line, std::string("non-finite ") + field);
    return v;
}

inline Scene parse_scene_text(const std::string& text) {
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    std::optional<int> version;
    std::optional<Box> box;
    std::optional<Point> s, t;
    std::vector<Ring> rings;
    int pending = 0;
    auto numbers = [&](std::istringstream& ls, int count, const char* field) {
        std::vector<double> v(count);
        for (auto& x : v) {
            std::string tok;
            if (!(ls >> tok)) throw parse_error(line, std::string("missing value in ") + field);
            try {
                size_t used = 0;
                x = std::stod(tok, &used);
                if (used != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw parse_error(line, std::string("bad number '") + tok + "' in " + field);
            }
            finite_or_throw(x, line, field);
        }
        std::string extra;
        if (ls >> extra) throw parse_error(line, std::string("trailing token '") + extra + "' in " + field);
        return v;
    };
    while (std::getline(in, raw)) {
        ++line;
        if (auto h = raw.find('#'); h != std::string::npos) raw.erase(h);
        std::istringstream ls(raw);
        std::string key;
        if (!(ls >> key)) continue;
        if (pending > 0) {
            std::istringstream again(raw);
            auto v = numbers(again, 2, "obstacle vertex");
            rings.back().push_back({v[0], v[1]});
            --pending;
            continue;
        }
        if (key == "version") {
            int v = static_cast<int>(numbers(ls, 1, "version")[0]);
            if (v != kSceneVersion) throw parse_error(line, "unsupported version " + std::to_string(v));
            version = v;
        } else if (key == "box") {
            auto v = numbers(ls, 4, "box");
            if (!(v[0] < v[2] && v[1] < v[3])) throw parse_error(line, "box must have xmin < xmax and ymin < ymax");
            box = Box{v[0], v[1], v[2], v[3]};
        } else if (key == "source" || key == "target") {
            auto v = numbers(ls, 2, key.c_str());
            (key == "source" ? s : t) = Point{v[0], v[1]};
        } else if (key == "obstacle") {
            auto v = numbers(ls, 1, "obstacle");
            if (v[0] < 1 || v[0] != std::floor(v[0])) throw parse_error(line, "obstacle needs a positive vertex count");
            pending = static_cast<int>(v[0]);
            rings.emplace_back();
        } else {
            throw parse_error(line, "unknown record '" + key + "'");
        }
    }
    if (pending > 0) throw parse_error(line, "obstacle truncated: " + std::to_string(pending) + " vertices missing");
    if (!version) throw Error(ErrorKind::validation, "missing version record");
    if (!box) throw Error(ErrorKind::validation, "missing box record");
    if (!s) throw Error(ErrorKind::validation, "missing source record");
    if (!t) throw Error(ErrorKind::validation, "missing target record");
    return Scene(rings, *box, *s, *t);
}

inline Point json_point(const nlohmann::json& j, const std::string& field) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw Error(ErrorKind::validation, field + ": expected [x, y]");
    Point p{j[0].get<double>(), j[1].get<double>()};
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw Error(ErrorKind::validation, field + ": non-finite coordinate");
    return p;
}

inline Scene parse_scene_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::validation, std::string("json: ") + e.what());
    }
    if (!j.is_object()) throw Error(ErrorKind::validation, "json: expected an object");
    for (const char* k : {"version", "bounding_box", "source", "target", "obstacles"})
        if (!j.contains(k)) throw Error(ErrorKind::validation, std::string("missing field '") + k + "'");
    if (!j["version"].is_number_integer() || j["version"].get<int>() != kSceneVersion)
        throw Error(ErrorKind::validation, "version: unsupported");
    const auto& b = j["bounding_box"];
    if (!b.is_array() || b.size() != 4) throw Error(ErrorKind::validation, "bounding_box: expected 4 numbers");
    Box box;
    std::array<double, 4> v{};
    for (int i = 0; i < 4; ++i) {
        if (!b[i].is_number()) throw Error(ErrorKind::validation, "bounding_box: expected 4 numbers");
        v[i] = b[i].get<double>();
        if (!std::isfinite(v[i])) throw Error(ErrorKind::validation, "bounding_box: non-finite coordinate");
    }
    box = {v[0], v[1], v[2], v[3]};
    if (!(box.xmin < box.xmax && box.ymin < box.ymax)) throw Error(ErrorKind::validation, "bounding_box: empty");
    std::vector<Ring> rings;
    if (!j["obstacles"].is_array()) throw Error(ErrorKind::validation, "obstacles: expected an array");
    for (size_t i = 0; i < j["obstacles"].size(); ++i) {
        const auto& r = j["obstacles"][i];
        std::string field = "obstacles[" + std::to_string(i) + "]";
        if (!r.is_array() || r.empty()) throw Error(ErrorKind::validation, field + ": expected a non-empty vertex list");
        Ring ring;
        for (size_t k = 0; k < r.size(); ++k) ring.push_back(json_point(r[k], field + "[" + std::to_string(k) + "]"));
        rings.push_back(ring);
    }
    return Scene(rings, box, json_point(j["source"], "source"), json_point(j["target"], "target"));
}

}  // namespace detail

inline Scene parse_scene(const std::string& text) {
    auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') return detail::parse_scene_json(text);
    return detail::parse_scene_text(text);
}

inline std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::validation, "cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

inline Scene load_scene(const std::string& path) { return parse_scene(read_file(path)); }

inline std::string serialize_scene(const Scene& scene) {
    std::ostringstream out;
    out << std::setprecision(17);
    const Box& b = scene.box();
    out << "version " << kSceneVersion << "\n";
    out << "box " << b.xmin << " " << b.ymin << " " << b.xmax << " " << b.ymax << "\n";
    out << "source " << scene.source().x << " " << scene.source().y << "\n";
    out << "target " << scene.target().x << " " << scene.target().y << "\n";
    for (auto& ring : scene.obstacles()) {
        out << "obstacle " << ring.size() << "\n";
        for (auto& p : ring) out << p.x << " " << p.y << "\n";
    }
    return out.str();
}

// ---- results --------------------------------------------------------------------------------

inline nlohmann::json to_json(Point p) { return nlohmann::json::array({p.x, p.y}); }

inline nlohmann::json to_json(const AnalyticPrimitive& a) {
    nlohmann::json j;
    j["kind"] = std::string(to_string(a.kind));
    j["feature"] = a.feature;
    if (a.diagram_edge >= 0) j["diagram_edge"] = a.diagram_edge;
    j["start"] = to_json(a.start);
    j["end"] = to_json(a.end);
    if (a.polar) j["params"] = {{"center", to_json(a.center)}, {"r0", a.r0}, {"r1", a.r1}, {"phi0", a.phi0}, {"dphi", a.dphi}};
    else if (a.kind == PrimitiveKind::voronoi_edge_portion) j["params"] = {{"t0", a.t0}, {"t1", a.t1}, {"curve_a", a.curve.a}};
    j["cost"] = a.cost;
    return j;
}

inline nlohmann::json to_json(const Path& p) {
    nlohmann::json arr = nlohmann::json::array();
    for (auto& a : p.primitives) arr.push_back(to_json(a));
    return arr;
}

inline nlohmann::json stage_json(const StageResult& r) {
    nlohmann::json j;
    j["stage"] = r.stage;
    j["found"] = r.found;
    j["cost"] = r.found ? nlohmann::json(r.cost) : nlohmann::json(nullptr);
    if (std::isfinite(r.graph_cost)) j["graph_cost"] = r.graph_cost;
    if (r.search_param) j["search_param"] = *r.search_param;
    j["vertices"] = r.stats.vertices;
    if (r.stats.edges >= 0) j["edges"] = r.stats.edges;
    j["expanded"] = r.stats.expanded;
    j["graphs"] = r.stats.graphs;
    j["seconds"] = r.stats.seconds;
    return j;
}

inline nlohmann::json result_json(const ApproxResult& r) {
    nlohmann::json j;
    j["cost"] = r.final.cost;
    j["epsilon"] = r.epsilon;
    j["epsilon_internal"] = r.epsilon_internal;
    j["final_stage"] = r.final.stage;
    nlohmann::json costs = nlohmann::json::array();
    for (const StageResult* s : {&r.stage1, &r.stage2, &r.stage3})
        costs.push_back(s->found ? nlohmann::json(s->cost) : nlohmann::json(nullptr));
    j["stage_costs"] = costs;
    j["path"] = to_json(r.final.path);
    j["graph_stats"] = nlohmann::json::array({stage_json(r.stage1), stage_json(r.stage2), stage_json(r.stage3)});
    j["timings"] = {{"diagram", r.seconds_diagram},
                    {"stage1", r.stage1.stats.seconds},
                    {"stage2", r.stage2.stats.seconds},
                    {"stage3", r.stage3.stats.seconds}};
    j["complexity"] = r.complexity;
    return j;
}

// ---- SVG ------------------------------------------------------------------------------------

struct SvgLayers {
    bool obstacles = true;
    bool voronoi = true;
    bool refinement = true;
    bool samples = true;
    bool edgelets = true;
    bool path = true;
};

struct SvgInput {
    const RefinedDiagram* diagram = nullptr;
    std::vector<Point> samples;
    std::vector<std::vector<Point>> edgelets;
    const Path* path = nullptr;
    SvgLayers layers;
    int width = 800;
};

namespace detail {

class SvgWriter {
public:
    SvgWriter(const Box& b, int width) : box_(b) {
        pad_ = 0.02 * std::max(b.width(), b.height());
        scale_ = width / (b.width() + 2 * pad_);
        w_ = width;
        h_ = static_cast<int>(std::ceil((b.height() + 2 * pad_) * scale_));
        out_ << std::setprecision(7);
        out_ << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
        out_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << w_ << "\" height=\"" << h_
             << "\" viewBox=\"0 0 " << w_ << " " << h_ << "\">\n";
        out_ << "<rect x=\"0\" y=\"0\" width=\"" << w_ << "\" height=\"" << h_ << "\" fill=\"white\"/>\n";
    }

    double X(double x) const { return (x - box_.xmin + pad_) * scale_; }
    double Y(double y) const { return (box_.ymax - y + pad_) * scale_; }

    void open(const char* id) { out_ << "<g id=\"" << id << "\">\n"; }
    void close() { out_ << "</g>\n"; }

    void polyline(const std::vector<Point>& pts, const std::string& cls, const std::string& style, bool closed = false) {
        out_ << "<" << (closed ? "polygon" : "polyline") << " class=\"" << cls << "\" points=\"";
        for (auto& p : pts) out_ << X(p.x) << "," << Y(p.y) << " ";
        out_ << "\" " << style << "/>\n";
    }

    void circle(Point p, double r, const std::string& cls, const std::string& fill) {
        out_ << "<circle class=\"" << cls << "\" cx=\"" << X(p.x) << "\" cy=\"" << Y(p.y) << "\" r=\"" << r << "\" fill=\""
             << fill << "\"/>\n";
    }

    std::string finish() {
        out_ << "</svg>\n";
        return out_.str();
    }

private:
    Box box_;
    double pad_, scale_;
    int w_, h_;
    std::ostringstream out_;
};

inline std::vector<Point> sample_edge(const DiagramEdge& e, int per = 32) {
    std::vector<Point> pts;
    for (int i = 0; i <= per; ++i) pts.push_back(e.point(e.t_lo + (e.t_hi - e.t_lo) * i / per));
    return pts;
}

}  // namespace detail

inline std::string render_svg(const Scene& scene, const SvgInput& in = {}) {
    detail::SvgWriter w(scene.box(), in.width);
    const Box& b = scene.box();
    w.open("box");
    w.polyline({{b.xmin, b.ymin}, {b.xmax, b.ymin}, {b.xmax, b.ymax}, {b.xmin, b.ymax}}, "box",
               "fill=\"none\" stroke=\"black\" stroke-width=\"1\"", true);
    w.close();
    if (in.layers.obstacles) {
        w.open("obstacles");
        for (auto& ring : scene.obstacles()) {
            if (ring.size() == 1) w.circle(ring[0], 3, "obstacle", "#444");
            else w.polyline(ring, "obstacle", "fill=\"#bbb\" stroke=\"#444\" stroke-width=\"1\"", ring.size() >= 3);
        }
        w.close();
    }
    if (in.diagram) {
        const RefinedDiagram& rd = *in.diagram;
        if (in.layers.voronoi) {
            w.open("voronoi");
            for (auto& e : rd.edges)
                if (!e.internal)
                    w.polyline(detail::sample_edge(e), "edge voronoi",
                               "fill=\"none\" stroke=\"#d33\" stroke-width=\"1\" stroke-dasharray=\"4,3\"");
            w.close();
        }
        if (in.layers.refinement) {
            w.open("refinement");
            for (auto& e : rd.edges) {
                if (!e.internal) continue;
                std::vector<Point> seg{e.point(e.t_lo), e.point(e.t_hi)};
                if (e.radial_kind == RadialKind::type_ii)
                    w.polyline(seg, "edge type-ii", "fill=\"none\" stroke=\"#24c\" stroke-width=\"1\" stroke-dasharray=\"1,2\"");
                else if (e.radial_kind == RadialKind::connector)
                    w.polyline(seg, "edge connector", "fill=\"none\" stroke=\"#a3a\" stroke-width=\"1\"");
                else w.polyline(seg, "edge type-i", "fill=\"none\" stroke=\"#2a2\" stroke-width=\"1\"");
            }
            w.close();
        }
    }
    if (in.layers.edgelets && !in.edgelets.empty()) {
        w.open("edgelets");
        for (auto& e : in.edgelets) w.polyline(e, "edgelet", "fill=\"none\" stroke=\"#c6f\" stroke-width=\"3\" opacity=\"0.5\"");
        w.close();
    }
    if (in.layers.samples && !in.samples.empty()) {
        w.open("samples");
        for (auto& p : in.samples) w.circle(p, 1.2, "sample", "#630");
        w.close();
    }
    if (in.layers.path && in.path && !in.path->empty()) {
        w.open("path");
        w.polyline(in.path->polyline(64), "path", "fill=\"none\" stroke=\"#06c\" stroke-width=\"2\"");
        w.close();
    }
    w.open("endpoints");
    w.circle(scene.source(), 4, "source", "#0a0");
    w.circle(scene.target(), 4, "target", "#c00");
    w.close();
    return w.finish();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::validation, "cannot write " + path);
    f << content;
}

}  // namespace clrpath
