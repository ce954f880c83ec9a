#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <catch2/catch_amalgamated.hpp>

#include "rtd/cli.hpp"
#include "rtd/io.hpp"
#include "rtd/random_scenario.hpp"

using namespace rtd;
namespace fs = std::filesystem;

namespace {

std::string scenario_path(const char* name) {
    return std::string(RTD_SCENARIO_DIR) + "/" + name;
}

fs::path fresh_dir(const char* tag) {
    const fs::path dir = fs::temp_directory_path() / (std::string("rtd_io_") + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::vector<std::string>& args, std::string* stdout_text = nullptr) {
    std::ostringstream captured;
    std::streambuf* old = std::cout.rdbuf(captured.rdbuf());
    const int code = rtd::cli::run(args);
    std::cout.rdbuf(old);
    if (stdout_text) *stdout_text = captured.str();
    return code;
}

} // namespace

TEST_CASE("bundled cuboid scenario parses with Table-I defaults") {
    const Scenario s = parse_scenario(scenario_path("cuboid_to_disk_60.json"));
    CHECK(s.agents == 60);
    CHECK(s.quad.m == 0.5);
    CHECK(s.quad.g == 9.81);
    CHECK(s.quad.l == 0.25);
    CHECK(s.quad.jr == 3.357e-5);
    CHECK(s.quad.jx == 0.0196);
    CHECK(s.quad.jz == 0.0264);
    CHECK(s.quad.b == 3e-5);
    CHECK(s.quad.k == 1.1e-6);
    CHECK(s.quad.varpi_max == 215.0);
    CHECK(s.delta == 0.19);
    CHECK(s.epsilon == 0.40);
    CHECK(s.window.t_f == 50.0);
    CHECK(s.translation.v0.x == 10.0);
}

TEST_CASE("missing fields and empty windows are reported by name") {
    const auto dir = fresh_dir("schema");
    {
        std::ofstream f(dir / "no_eps.json");
        f << R"({"agents":3,"delta":0.1,"window":{"t_s":0,"t_f":1},
                 "initial_positions":[[0,0,0],[1,0,0],[2,0,0]],
                 "final_positions":[[0,0,0],[1,0,0],[2,0,0]]})";
    }
    try {
        parse_scenario((dir / "no_eps.json").string());
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("epsilon") != std::string::npos);
    }
    {
        std::ofstream f(dir / "empty_window.json");
        f << R"({"agents":3,"delta":0.1,"epsilon":0.1,"window":{"t_s":2,"t_f":2},
                 "initial_positions":[[0,0,0],[1,0,0],[2,0,0]],
                 "final_positions":[[0,0,0],[1,0,0],[2,0,0]]})";
    }
    try {
        parse_scenario((dir / "empty_window.json").string());
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("time window empty") != std::string::npos);
    }
    {
        std::ofstream f(dir / "bad_type.json");
        f << R"({"agents":"sixty"})";
    }
    CHECK_THROWS_AS(parse_scenario((dir / "bad_type.json").string()), SchemaError);
    CHECK_THROWS_AS(parse_scenario((dir / "missing.json").string()), SchemaError);
}

TEST_CASE("scenario serialization round-trips all fields") {
    Scenario s = random_certified_scenario(6, 99);
    s.psi_d_deg = 12.5;
    s.translation.blended = true;
    s.translation.v_f = {0.5, -0.25, 0.125};
    const Scenario back = scenario_from_json(scenario_to_json(s));
    CHECK(back.agents == s.agents);
    CHECK(back.delta == s.delta);
    CHECK(back.epsilon == s.epsilon);
    CHECK(back.window.t_s == s.window.t_s);
    CHECK(back.window.t_f == s.window.t_f);
    CHECK(back.psi_d_deg == s.psi_d_deg);
    CHECK(back.translation.blended);
    CHECK(back.translation.v_f.z == s.translation.v_f.z);
    CHECK(back.poles.pos == s.poles.pos);
    CHECK(back.poles.yaw == s.poles.yaw);
    CHECK(back.sim.dt == s.sim.dt);
    CHECK(back.planner.grid_n == s.planner.grid_n);
    for (int i = 0; i < s.agents; ++i) {
        CHECK(back.initial_positions[i].x == s.initial_positions[i].x);
        CHECK(back.final_positions[i].z == s.final_positions[i].z);
    }
    CHECK(scenario_fingerprint(back) == scenario_fingerprint(s));
}

TEST_CASE("plot export writes the rotor and position series plus manifest") {
    const Scenario s = random_certified_scenario(4, 55);
    const DeploymentPlan plan = build_plan(s);
    const SimResult res = run_closed_loop(s, plan, SimConfig{1e-3, 0.0, 0.5, 50});
    const auto dir = fresh_dir("plots");
    const auto files = export_plot_data(res.log, dir.string());
    CHECK(files.size() == 8);  // 4 rotor + 3 position + manifest
    for (const char* name : {"rotor_1.csv", "rotor_2.csv", "rotor_3.csv", "rotor_4.csv",
                             "pos_x.csv", "pos_y.csv", "pos_z.csv", "manifest.json"})
        CHECK(fs::exists(dir / name));

    const std::string first = slurp(dir / "rotor_1.csv");
    export_plot_data(res.log, dir.string());
    CHECK(slurp(dir / "rotor_1.csv") == first);  // re-export is byte-identical

    TrajectoryLog empty;
    CHECK_THROWS_AS(export_plot_data(empty, dir.string()), EmptyLog);
}

TEST_CASE("cli certify exit codes follow feasibility") {
    CHECK(run_cli({"certify", scenario_path("cuboid_to_disk_60.json")}) == 0);
    CHECK(run_cli({"certify", scenario_path("letter_a_to_i_20.json")}) == 0);

    const auto dir = fresh_dir("certify");
    Scenario tight = parse_scenario(scenario_path("letter_a_to_i_20.json"));
    tight.delta = 2.0;  // impossible budget
    {
        std::ofstream f(dir / "tight.json");
        f << scenario_to_json(tight).dump(2);
    }
    CHECK(run_cli({"certify", (dir / "tight.json").string()}) == 2);
    CHECK(run_cli({"certify", (dir / "nonexistent.json").string()}) == 1);
}

TEST_CASE("cli plan and simulate round-trip through plan files") {
    const auto dir = fresh_dir("plan");
    // small, fast scenario
    const Scenario s = random_certified_scenario(4, 123);
    const std::string spath = (dir / "scenario.json").string();
    {
        std::ofstream f(spath);
        f << scenario_to_json(s).dump(2);
    }
    const std::string ppath = (dir / "plan.json").string();
    CHECK(run_cli({"plan", spath, "-o", ppath}) == 0);
    const DeploymentPlan loaded = load_plan(ppath);
    CHECK(loaded.scenario_hash == scenario_fingerprint(s));

    const std::string outdir = (dir / "out").string();
    const int code = run_cli({"simulate", spath, "--plan", ppath, "-o", outdir,
                              "--stride", "200"});
    CHECK(code == 0);
    CHECK(fs::exists(fs::path(outdir) / "trajectory.csv"));
    CHECK(fs::exists(fs::path(outdir) / "safety_report.json"));

    // a plan file cannot be replayed against a different scenario
    Scenario other = s;
    other.delta *= 0.5;
    const std::string opath = (dir / "other.json").string();
    {
        std::ofstream f(opath);
        f << scenario_to_json(other).dump(2);
    }
    CHECK(run_cli({"simulate", opath, "--plan", ppath, "-o", outdir}) == 1);
}

TEST_CASE("cli report reproduces the stride-1 safety report byte for byte") {
    const auto dir = fresh_dir("report");
    const Scenario s = random_certified_scenario(4, 321);
    Scenario quick = s;
    quick.sim.record_stride = 1;
    quick.sim.t_start = 0.0;
    quick.sim.t_end = 1.0;
    const std::string spath = (dir / "scenario.json").string();
    {
        std::ofstream f(spath);
        f << scenario_to_json(quick).dump(2);
    }
    const std::string outdir = (dir / "out").string();
    REQUIRE(run_cli({"simulate", spath, "-o", outdir}) == 0);
    std::string reported;
    REQUIRE(run_cli({"report", outdir}, &reported) == 0);
    CHECK(reported == slurp(fs::path(outdir) / "safety_report.json"));
}

TEST_CASE("too-small fleets are rejected by name") {
    const auto dir = fresh_dir("fleet");
    {
        std::ofstream f(dir / "two.json");
        f << R"({"agents":2,"delta":0.1,"epsilon":0.1,"window":{"t_s":0,"t_f":1},
                 "initial_positions":[[0,0,0],[1,0,0]],
                 "final_positions":[[0,0,0],[1,0,0]]})";
    }
    try {
        parse_scenario((dir / "two.json").string());
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("agents") != std::string::npos);
    }
}

TEST_CASE("cli simulate exits 2 when a safety condition fails") {
    const auto dir = fresh_dir("violate");
    Scenario s = random_certified_scenario(4, 999);
    s.quad.varpi_max = 100.0;  // below hover speed: condition on rotors must fail
    s.sim.t_end = 0.5;
    const std::string spath = (dir / "scenario.json").string();
    {
        std::ofstream f(spath);
        f << scenario_to_json(s).dump(2);
    }
    CHECK(run_cli({"simulate", spath, "-o", (dir / "out").string(), "--stride", "100"}) == 2);
}

TEST_CASE("corrupted plan files are rejected") {
    const Scenario s = random_certified_scenario(4, 404);
    const DeploymentPlan plan = build_plan(s);
    auto j = plan_to_json(plan);
    j["ordering"] = std::vector<int>{0, 0, 1, 2};  // not a permutation
    CHECK_THROWS_AS(plan_from_json(j), SchemaError);
    j["ordering"] = std::vector<int>{0, 1};        // wrong size
    CHECK_THROWS_AS(plan_from_json(j), SchemaError);
}

TEST_CASE("desired-trajectory sampling export carries consistent derivatives") {
    const Scenario s = random_certified_scenario(4, 808);
    const DeploymentPlan plan = build_plan(s);
    const std::string csv = desired_trajectory_csv(plan, s.window, s.translation, 0.25);
    std::istringstream in(csv);
    std::string header;
    std::getline(in, header);
    CHECK(header == "t,agent,px,py,pz,vx,vy,vz,ax,ay,az");
    int rows = 0;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    const long samples = std::lround(s.window.duration() / 0.25) + 1;
    CHECK(rows == samples * 4);
    CHECK(csv == desired_trajectory_csv(plan, s.window, s.translation, 0.25));
    CHECK_THROWS_AS(desired_trajectory_csv(plan, s.window, s.translation, 0.0),
                    ValidationError);
}

TEST_CASE("repeated cli simulate invocations are byte-identical") {
    const auto dir = fresh_dir("determinism");
    Scenario s = random_certified_scenario(4, 1212);
    s.sim.t_end = 1.0;
    s.sim.record_stride = 5;
    const std::string spath = (dir / "scenario.json").string();
    {
        std::ofstream f(spath);
        f << scenario_to_json(s).dump(2);
    }
    const std::string out1 = (dir / "a").string();
    const std::string out2 = (dir / "b").string();
    REQUIRE(run_cli({"simulate", spath, "-o", out1}) == 0);
    REQUIRE(run_cli({"simulate", spath, "-o", out2}) == 0);
    for (const char* name : {"trajectory.csv", "safety_report.json", "plan.json"})
        CHECK(slurp(fs::path(out1) / name) == slurp(fs::path(out2) / name));
}

TEST_CASE("cli random generates a parseable certified scenario") {
    const auto dir = fresh_dir("random");
    const std::string out = (dir / "rand.json").string();
    CHECK(run_cli({"random", "-n", "8", "--seed", "5", "-o", out}) == 0);
    const Scenario s = parse_scenario(out);
    CHECK(s.agents == 8);
    const DeploymentPlan plan = build_plan(s);
    CHECK(plan.certificate.feasible);
}
