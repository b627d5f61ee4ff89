#include <cmath>
#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "clrpath/clrpath.hpp"

using namespace clrpath;

namespace {

enum Exit { kOk = 0, kValidation = 2, kUnreachable = 3, kInternal = 4 };

int exit_code(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::validation: return kValidation;
        case ErrorKind::unreachable: return kUnreachable;
        default: return kInternal;
    }
}

void print_stage(const char* name, const StageResult& r) {
    if (!r.found) {
        std::printf("%s: no path\n", name);
        return;
    }
    std::printf("%s: cost %.9f", name, r.cost);
    if (r.graph_cost != r.cost && std::isfinite(r.graph_cost)) std::printf("  (graph %.9f)", r.graph_cost);
    if (r.search_param) std::printf("  d %.6g", *r.search_param);
    std::printf("  vertices %lld", r.stats.vertices);
    if (r.stats.edges >= 0) std::printf("  edges %lld", r.stats.edges);
    std::printf("  %.3fs\n", r.stats.seconds);
}

struct SolveArgs {
    std::string scene, json, svg;
    double epsilon = 0.2;
    int stage = 3;
    double c_scale = kDefaultCScale;
    bool seedless = true;
};

ApproxResult solve(const Scene& scene, const SolveArgs& a, RefinedDiagram& rd) {
    rd = build_refined(scene);
    return approximate(rd, a.epsilon, {a.c_scale, a.stage});
}

int run_solve(const SolveArgs& a) {
    Scene scene = load_scene(a.scene);
    RefinedDiagram rd;
    ApproxResult r = solve(scene, a, rd);
    print_stage("stage1", r.stage1);
    if (a.stage >= 2) print_stage("stage2", r.stage2);
    if (a.stage >= 3) print_stage("stage3", r.stage3);
    std::printf("cost %.9f\n", r.final.cost);
    if (!a.json.empty()) write_file(a.json, result_json(r).dump(2) + "\n");
    if (!a.svg.empty()) {
        SvgInput in;
        in.diagram = &rd;
        in.path = &r.final.path;
        write_file(a.svg, render_svg(scene, in));
    }
    return kOk;
}

int run_oracle(const std::string& file, int resolution, const std::string& json) {
    Scene scene = load_scene(file);
    OracleConfig cfg;
    cfg.resolution = resolution;
    OracleResult o = grid_oracle_run(scene, scene.source(), scene.target(), cfg);
    if (!o.found) throw Error(ErrorKind::unreachable, "oracle: lattice does not connect source and target");
    std::printf("oracle %.9f  resolution %d  settled %zu\n", o.cost, resolution, o.settled);
    if (!json.empty()) {
        nlohmann::json j;
        j["cost"] = o.cost;
        j["resolution"] = resolution;
        nlohmann::json pts = nlohmann::json::array();
        for (auto& p : o.polyline) pts.push_back(to_json(p));
        j["polyline"] = pts;
        write_file(json, j.dump(2) + "\n");
    }
    return kOk;
}

int run_diagram(const std::string& file, const std::string& svg) {
    Scene scene = load_scene(file);
    RefinedDiagram rd = build_refined(scene);
    int external = 0, type_i = 0, type_ii = 0, connector = 0;
    for (auto& e : rd.edges) {
        if (!e.internal) ++external;
        else if (e.radial_kind == RadialKind::type_ii) ++type_ii;
        else if (e.radial_kind == RadialKind::connector) ++connector;
        else ++type_i;
    }
    std::printf("n %d  nodes %zu  edges %zu (voronoi %d, type-i %d, type-ii %d, connector %d)  cells %zu\n", rd.n,
                rd.nodes.size(), rd.edges.size(), external, type_i, type_ii, connector, rd.cells.size());
    if (!svg.empty()) {
        SvgInput in;
        in.diagram = &rd;
        write_file(svg, render_svg(scene, in));
    }
    return kOk;
}

int run_check(const SolveArgs& a, int resolution) {
    Scene scene = load_scene(a.scene);
    RefinedDiagram rd;
    ApproxResult r = solve(scene, a, rd);
    OracleConfig cfg;
    cfg.resolution = resolution;
    double oracle = grid_oracle(scene, scene.source(), scene.target(), cfg);
    double best = std::min({oracle, r.stage1.cost, r.stage2.cost, r.stage3.cost});
    double bound = (1 + a.epsilon) * 1.05 * best;
    bool pass = r.final.cost <= bound;
    std::printf("cost %.9f  oracle %.9f  best_known %.9f  ratio %.6f  bound %.6f  %s\n", r.final.cost, oracle, best,
                best > 0 ? r.final.cost / best : 1.0, (1 + a.epsilon) * 1.05, pass ? "PASS" : "FAIL");
    return pass ? kOk : kInternal;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Approximate minimal-cost paths with clearance-weighted cost"};
    app.require_subcommand(1);

    SolveArgs sa;
    auto* solve_cmd = app.add_subcommand("solve", "Run the approximation stages on a scene");
    solve_cmd->add_option("scene", sa.scene, "Scene file")->required()->check(CLI::ExistingFile);
    solve_cmd->add_option("--epsilon", sa.epsilon, "Approximation parameter in (0, 1]")->check(CLI::Range(1e-6, 1.0));
    solve_cmd->add_option("--stage", sa.stage, "Last stage to run")->check(CLI::Range(1, 3));
    solve_cmd->add_option("--json", sa.json, "Write the result as JSON");
    solve_cmd->add_option("--svg", sa.svg, "Write a diagnostic drawing");
    solve_cmd->add_option("--c-scale", sa.c_scale, "Internal epsilon divisor")->check(CLI::Range(1.0, 1e6));
    solve_cmd->add_flag("--seedless", sa.seedless, "Accepted for compatibility; runs are always deterministic");

    std::string oracle_scene, oracle_json;
    int resolution = 512;
    auto* oracle_cmd = app.add_subcommand("oracle", "Lattice upper bound on the optimal cost");
    oracle_cmd->add_option("scene", oracle_scene, "Scene file")->required()->check(CLI::ExistingFile);
    oracle_cmd->add_option("--resolution", resolution, "Lattice cells per side")->check(CLI::Range(16, 4096));
    oracle_cmd->add_option("--json", oracle_json, "Write the result as JSON");

    std::string diagram_scene, diagram_svg;
    auto* diagram_cmd = app.add_subcommand("diagram", "Build the refined diagram and print its size");
    diagram_cmd->add_option("scene", diagram_scene, "Scene file")->required()->check(CLI::ExistingFile);
    diagram_cmd->add_option("--svg", diagram_svg, "Write a drawing of the diagram");

    SolveArgs ca;
    int check_resolution = 512;
    auto* check_cmd = app.add_subcommand("check", "Solve and compare against the oracle");
    check_cmd->add_option("scene", ca.scene, "Scene file")->required()->check(CLI::ExistingFile);
    check_cmd->add_option("--epsilon", ca.epsilon, "Approximation parameter in (0, 1]")->required()->check(CLI::Range(1e-6, 1.0));
    check_cmd->add_option("--c-scale", ca.c_scale, "Internal epsilon divisor")->check(CLI::Range(1.0, 1e6));
    check_cmd->add_option("--resolution", check_resolution, "Oracle lattice resolution")->check(CLI::Range(16, 4096));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kValidation;
    }

    try {
        if (*solve_cmd) return run_solve(sa);
        if (*oracle_cmd) return run_oracle(oracle_scene, resolution, oracle_json);
        if (*diagram_cmd) return run_diagram(diagram_scene, diagram_svg);
        if (*check_cmd) return run_check(ca, check_resolution);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_code(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return kInternal;
    }
    return kOk;
}
