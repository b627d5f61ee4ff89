#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

#include "support.hpp"

using namespace clrtest;

namespace {

std::string validation_message(const std::string& text) {
    try {
        parse_scene(text);
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::validation);
        return e.what();
    }
    ADD_FAILURE() << "accepted: " << text;
    return {};
}

int count(const std::string& hay, const std::string& needle) {
    int n = 0;
    for (size_t at = hay.find(needle); at != std::string::npos; at = hay.find(needle, at + 1)) ++n;
    return n;
}

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "clrpath_cli_io";
    std::filesystem::create_directories(dir);
    return dir / name;
}

struct CliRun {
    int code;
    std::string out;
};

CliRun run_cli(const std::string& args) {
    std::string cmd = std::string(CLRPATH_CLI) + " " + args + " 2>&1";
    CliRun r{-1, {}};
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    char buf[512];
    while (fgets(buf, sizeof buf, pipe)) r.out += buf;
    int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

}  // namespace

TEST(SceneFile, TriangleFeatures) {
    Scene s = load_scene(scene_path("triangle.scene"));
    ASSERT_EQ(s.polygon_count(), 1);
    int vertices = 0, edges = 0;
    for (const Feature& f : s.features()) {
        if (f.polygon != 0) continue;
        (f.is_vertex() ? vertices : edges)++;
    }
    EXPECT_EQ(vertices, 3);
    EXPECT_EQ(edges, 3);
    EXPECT_EQ(s.source().x, 1);
    EXPECT_EQ(s.target().y, 9);
}

TEST(SceneFile, SinglePointObstacle) {
    Scene s = parse_scene("version 1\nbox 0 0 4 4\nsource 1 1\ntarget 3 3\nobstacle 1\n2 1\n");
    int n = 0;
    for (const Feature& f : s.features())
        if (f.polygon == 0) {
            ++n;
            EXPECT_TRUE(f.is_vertex());
        }
    EXPECT_EQ(n, 1);
    EXPECT_NEAR(s.clr({2, 2}), 1, 1e-15);
}

TEST(SceneFile, Validation) {
    EXPECT_NE(validation_message("version 1\nbox 0 0 10 10\nsource 5 5\ntarget 9 9\nobstacle 3\n4 4\n7 4\n5 7\n")
                  .find("source"),
              std::string::npos);
    EXPECT_NE(validation_message("version 1\nbox 0 0 10 10\nsource 1 1\ntarget 20 9\n").find("target"), std::string::npos);
    EXPECT_NE(validation_message("version 2\n").find("line 1"), std::string::npos);
    EXPECT_NE(validation_message("version 1\nbox 0 0 10 10\nsource 1 x\n").find("line 3"), std::string::npos);
    EXPECT_NE(validation_message("version 1\nbox 0 0 10 10\nsource 1 1\ntarget 2 2\nobstacle 3\n4 4\n").find("truncated"),
              std::string::npos);
    EXPECT_NE(validation_message("version 1\nbox 0 0 10 10\nsource 1 1 1\n").find("trailing"), std::string::npos);
    EXPECT_NE(validation_message("version 1\nbox 0 0 10 10\nsource 1 1\n").find("target"), std::string::npos);
    EXPECT_NE(validation_message("version 1\nbox 0 0 10 10\nsource 1 1\ntarget 2 2\nhole 3\n").find("unknown"),
              std::string::npos);
    EXPECT_NE(validation_message("version 1\nbox 0 0 10 nan\n").find("line 2"), std::string::npos);
    validation_message("version 1\nbox 10 0 0 10\nsource 1 1\ntarget 2 2\n");
    // Self-intersecting ring.
    validation_message("version 1\nbox 0 0 10 10\nsource 1 1\ntarget 9 1\nobstacle 4\n4 4\n6 6\n6 4\n4 6\n");
}

TEST(SceneFile, CommentsAndBlankLines) {
    Scene s = parse_scene("# header\n\nversion 1   # trailing\nbox 0 0 4 4\n\nsource 1 1\ntarget 3 3\n");
    EXPECT_EQ(s.polygon_count(), 0);
}

TEST(SceneFile, RoundTrip) {
    for (const Scene& s : {load_scene(scene_path("mixed.scene")), random_scene(3), spiral_scene()}) {
        Scene back = parse_scene(serialize_scene(s));
        ASSERT_EQ(back.obstacles().size(), s.obstacles().size());
        for (size_t i = 0; i < s.obstacles().size(); ++i) {
            ASSERT_EQ(back.obstacles()[i].size(), s.obstacles()[i].size());
            for (size_t k = 0; k < s.obstacles()[i].size(); ++k) {
                EXPECT_EQ(back.obstacles()[i][k].x, s.obstacles()[i][k].x);
                EXPECT_EQ(back.obstacles()[i][k].y, s.obstacles()[i][k].y);
            }
        }
        EXPECT_EQ(back.source().x, s.source().x);
        EXPECT_EQ(back.target().y, s.target().y);
        EXPECT_EQ(back.box().xmax, s.box().xmax);
        EXPECT_EQ(serialize_scene(back), serialize_scene(s));
    }
}

TEST(SceneFile, Json) {
    Scene s = parse_scene(R"({"version": 1, "bounding_box": [0, 0, 10, 10], "source": [1, 1], "target": [9, 9],
                             "obstacles": [[[4, 4], [7, 4], [5, 7]], [[2, 8]]]})");
    Scene t = load_scene(scene_path("triangle.scene"));
    EXPECT_EQ(s.polygon_count(), 2);
    EXPECT_EQ(s.obstacles()[0].size(), t.obstacles()[0].size());
    EXPECT_NE(validation_message(R"({"version": 1, "source": [1, 1]})").find("bounding_box"), std::string::npos);
    EXPECT_NE(validation_message(R"({"version": 1, "bounding_box": [0, 0, 10, 10], "source": [1], "target": [9, 9],
                                    "obstacles": []})")
                  .find("source"),
              std::string::npos);
    validation_message("{not json");
}

TEST(Output, ResultJson) {
    ApproxResult r = approximate(load_scene(scene_path("triangle.scene")), 0.5);
    nlohmann::json j = result_json(r);
    EXPECT_EQ(j["cost"].get<double>(), r.final.cost);
    ASSERT_EQ(j["stage_costs"].size(), 3u);
    EXPECT_EQ(j["stage_costs"][1].get<double>(), r.stage2.cost);
    ASSERT_EQ(j["graph_stats"].size(), 3u);
    for (int i = 0; i < 3; ++i) EXPECT_TRUE(j["graph_stats"][i].contains("graph_cost")) << i;
    EXPECT_EQ(j["path"].size(), r.final.path.primitives.size());
    double sum = 0;
    for (auto& p : j["path"]) sum += p["cost"].get<double>();
    EXPECT_NEAR(sum, r.final.cost, 1e-9 * r.final.cost);
    EXPECT_NEAR(j["path"].front()["start"][0].get<double>(), 1, 1e-9);
    EXPECT_TRUE(j["timings"].contains("stage3"));
    // Parses back through the library's own JSON reader.
    EXPECT_NO_THROW(nlohmann::json::parse(j.dump()));
}

TEST(Output, SvgLayersMatchDiagram) {
    Scene s = load_scene(scene_path("mixed.scene"));
    RefinedDiagram rd = build_refined(s);
    ApproxResult r = approximate(rd, 0.5);
    int external = 0, type_i = 0, type_ii = 0, connector = 0;
    for (auto& e : rd.edges) {
        if (!e.internal) ++external;
        else if (e.radial_kind == RadialKind::type_ii) ++type_ii;
        else if (e.radial_kind == RadialKind::connector) ++connector;
        else ++type_i;
    }
    SvgInput in;
    in.diagram = &rd;
    in.path = &r.final.path;
    std::string svg = render_svg(s, in);
    EXPECT_EQ(count(svg, "class=\"edge voronoi\""), external);
    EXPECT_EQ(count(svg, "class=\"edge type-i\""), type_i);
    EXPECT_EQ(count(svg, "class=\"edge type-ii\""), type_ii);
    EXPECT_EQ(count(svg, "class=\"edge connector\""), connector);
    EXPECT_EQ(count(svg, "class=\"obstacle\""), 3);
    EXPECT_EQ(count(svg, "class=\"path\""), 1);
    EXPECT_GT(external, 0);
    EXPECT_GT(type_i, 0);
    EXPECT_EQ(svg.rfind("</svg>\n"), svg.size() - 7);
    in.layers.voronoi = false;
    EXPECT_EQ(count(render_svg(s, in), "edge voronoi"), 0);
}

TEST(Cli, SolveWritesJson) {
    auto json = scratch("solve.json");
    auto svg = scratch("solve.svg");
    CliRun r = run_cli("solve " + scene_path("triangle.scene") + " --epsilon 0.5 --json " + json.string() + " --svg " +
                    svg.string());
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("stage3: cost"), std::string::npos);
    std::ifstream f(json);
    nlohmann::json j = nlohmann::json::parse(f);
    double direct = approximate(load_scene(scene_path("triangle.scene")), 0.5).final.cost;
    EXPECT_NEAR(j["cost"].get<double>(), direct, 1e-12 * direct);
    EXPECT_GT(std::filesystem::file_size(svg), 1000u);
}

TEST(Cli, StageLimit) {
    CliRun r = run_cli("solve " + scene_path("triangle.scene") + " --stage 1");
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_EQ(r.out.find("stage2"), std::string::npos);
}

TEST(Cli, ExitCodes) {
    auto bad = scratch("bad.scene");
    std::ofstream(bad) << "version 1\nbox 0 0 10 10\nsource 5 5\ntarget 9 9\nobstacle 3\n4 4\n7 4\n5 7\n";
    CliRun r = run_cli("solve " + bad.string());
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.out.find("source"), std::string::npos);
    EXPECT_EQ(run_cli("solve " + scene_path("triangle.scene") + " --epsilon 2").code, 2);
    EXPECT_EQ(run_cli("solve /nonexistent.scene").code, 2);
    EXPECT_EQ(run_cli("").code, 2);
}

TEST(Cli, DiagramAndCheck) {
    CliRun d = run_cli("diagram " + scene_path("mixed.scene"));
    ASSERT_EQ(d.code, 0) << d.out;
    EXPECT_NE(d.out.find("cells"), std::string::npos);
    CliRun c = run_cli("check " + scene_path("triangle.scene") + " --epsilon 0.5 --resolution 128");
    EXPECT_EQ(c.code, 0) << c.out;
    EXPECT_NE(c.out.find("PASS"), std::string::npos);
    CliRun o = run_cli("oracle " + scene_path("triangle.scene") + " --resolution 64");
    EXPECT_EQ(o.code, 0) << o.out;
}
