#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rtd/errors.hpp"
#include "rtd/scenario.hpp"
#include "rtd/simulator.hpp"
#include "rtd/spatial_planner.hpp"

namespace rtd {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kFormatVersion = 1;

namespace detail {

using json = nlohmann::json;

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError(path + ": " + e.what());
    }
}

template <typename T>
T get_field(const json& j, const std::string& key) {
    if (!j.contains(key)) throw ValidationError("missing required field `" + key + "`");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw SchemaError("field `" + key + "`: " + e.what());
    }
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw SchemaError("field `" + key + "`: " + e.what());
    }
}

inline Vec3d get_vec3(const json& j, const std::string& key) {
    const auto arr = get_field<std::vector<double>>(j, key);
    if (arr.size() != 3) throw SchemaError("field `" + key + "` must have 3 components");
    return {arr[0], arr[1], arr[2]};
}

inline std::vector<Vec3d> get_points(const json& j, const std::string& key) {
    const auto rows = get_field<std::vector<std::vector<double>>>(j, key);
    std::vector<Vec3d> pts;
    pts.reserve(rows.size());
    for (const auto& r : rows) {
        if (r.size() != 3) throw SchemaError("field `" + key + "` rows must have 3 components");
        pts.push_back({r[0], r[1], r[2]});
    }
    return pts;
}

inline json vec3_json(const Vec3d& v) { return json::array({v.x, v.y, v.z}); }

inline json points_json(const std::vector<Vec3d>& pts) {
    json arr = json::array();
    for (const Vec3d& p : pts) arr.push_back(vec3_json(p));
    return arr;
}

} // namespace detail

inline Scenario scenario_from_json(const detail::json& j) {
    using detail::get_field;
    using detail::get_or;
    Scenario s;
    s.name = get_or<std::string>(j, "name", "");
    s.agents = get_field<int>(j, "agents");
    if (j.contains("quad")) {
        const auto& q = j.at("quad");
        s.quad.m = get_or(q, "m", s.quad.m);
        s.quad.g = get_or(q, "g", s.quad.g);
        s.quad.l = get_or(q, "l", s.quad.l);
        s.quad.jx = get_or(q, "jx", s.quad.jx);
        s.quad.jy = get_or(q, "jy", s.quad.jy);
        s.quad.jz = get_or(q, "jz", s.quad.jz);
        s.quad.jr = get_or(q, "jr", s.quad.jr);
        s.quad.b = get_or(q, "b", s.quad.b);
        s.quad.k = get_or(q, "k", s.quad.k);
    }
    s.quad.varpi_max = get_or(j, "varpi_max", s.quad.varpi_max);
    s.delta = get_field<double>(j, "delta");
    s.epsilon = get_field<double>(j, "epsilon");
    {
        if (!j.contains("window")) throw ValidationError("missing required field `window`");
        const auto& w = j.at("window");
        s.window.t_s = get_field<double>(w, "t_s");
        s.window.t_f = get_field<double>(w, "t_f");
    }
    if (j.contains("translation")) {
        const auto& t = j.at("translation");
        s.translation.d0 = detail::get_vec3(t, "d0");
        s.translation.v0 = detail::get_vec3(t, "v0");
        if (t.contains("v_f")) {
            s.translation.blended = true;
            s.translation.v_f = detail::get_vec3(t, "v_f");
        }
    }
    s.initial_positions = detail::get_points(j, "initial_positions");
    s.final_positions = detail::get_points(j, "final_positions");
    s.psi_d_deg = get_or(j, "psi_d_deg", 0.0);
    if (j.contains("controller")) {
        const auto& c = j.at("controller");
        const auto pp = get_or<std::vector<double>>(c, "poles_pos", {});
        const auto py = get_or<std::vector<double>>(c, "poles_yaw", {});
        if (!pp.empty()) {
            if (pp.size() != 4) throw SchemaError("controller.poles_pos must have 4 entries");
            std::copy(pp.begin(), pp.end(), s.poles.pos.begin());
        }
        if (!py.empty()) {
            if (py.size() != 2) throw SchemaError("controller.poles_yaw must have 2 entries");
            std::copy(py.begin(), py.end(), s.poles.yaw.begin());
        }
    }
    if (j.contains("sim")) {
        const auto& c = j.at("sim");
        s.sim.dt = get_or(c, "dt", s.sim.dt);
        s.sim.record_stride = get_or(c, "record_stride", s.sim.record_stride);
        s.sim.t_start = get_or(c, "t_start", s.sim.t_start);
        s.sim.t_end = get_or(c, "t_end", s.sim.t_end);
    }
    if (j.contains("planner")) s.planner.grid_n = get_or(j.at("planner"), "grid_n", s.planner.grid_n);
    validate_scenario(s);
    return s;
}

inline Scenario parse_scenario(const std::string& path) {
    return scenario_from_json(detail::load_json_file(path));
}

inline detail::json scenario_to_json(const Scenario& s) {
    detail::json j;
    if (!s.name.empty()) j["name"] = s.name;
    j["agents"] = s.agents;
    j["quad"] = {{"m", s.quad.m}, {"g", s.quad.g},  {"l", s.quad.l},
                 {"jx", s.quad.jx}, {"jy", s.quad.jy}, {"jz", s.quad.jz},
                 {"jr", s.quad.jr}, {"b", s.quad.b},  {"k", s.quad.k}};
    j["varpi_max"] = s.quad.varpi_max;
    j["delta"] = s.delta;
    j["epsilon"] = s.epsilon;
    j["window"] = {{"t_s", s.window.t_s}, {"t_f", s.window.t_f}};
    j["translation"] = {{"d0", detail::vec3_json(s.translation.d0)},
                        {"v0", detail::vec3_json(s.translation.v0)}};
    if (s.translation.blended) j["translation"]["v_f"] = detail::vec3_json(s.translation.v_f);
    j["initial_positions"] = detail::points_json(s.initial_positions);
    j["final_positions"] = detail::points_json(s.final_positions);
    j["psi_d_deg"] = s.psi_d_deg;
    j["controller"] = {{"poles_pos", s.poles.pos}, {"poles_yaw", s.poles.yaw}};
    j["sim"] = {{"dt", s.sim.dt},
                {"record_stride", s.sim.record_stride},
                {"t_start", s.sim.t_start},
                {"t_end", s.sim.t_end}};
    j["planner"] = {{"grid_n", s.planner.grid_n}};
    return j;
}

inline detail::json plan_to_json(const DeploymentPlan& p) {
    detail::json j;
    j["format_version"] = kFormatVersion;
    j["tool_version"] = kToolVersion;
    j["scenario_hash"] = p.scenario_hash;
    j["angles"] = {{"gamma_s", p.angles_s.gamma}, {"mu_s", p.angles_s.mu},
                   {"gamma_f", p.angles_f.gamma}, {"mu_f", p.angles_f.mu}};
    j["objectives"] = {{"initial", p.objective_s}, {"final", p.objective_f}};
    detail::json agents = detail::json::array();
    for (int i = 0; i < p.agent_count(); ++i) {
        agents.push_back({{"u_s", p.local_s[i].u}, {"v_s", p.local_s[i].v}, {"w_s", p.local_s[i].w},
                          {"u_f", p.local_f[i].u}, {"v_f", p.local_f[i].v}, {"w_f", p.local_f[i].w},
                          {"beta_s", p.weights.beta_s[i]}, {"beta_f", p.weights.beta_f[i]}});
    }
    j["agents"] = agents;
    j["ordering"] = p.ordering.b;
    j["leaders"] = {p.ordering.leader_low(), p.ordering.leader_high()};
    j["certificate"] = {{"d_min", p.certificate.d_min}, {"beta_star", p.certificate.beta_star},
                        {"margin", p.certificate.margin}, {"feasible", p.certificate.feasible}};
    j["delta"] = p.delta;
    j["epsilon"] = p.epsilon;
    j["psi_d"] = p.psi_d;
    return j;
}

inline DeploymentPlan plan_from_json(const detail::json& j) {
    using detail::get_field;
    DeploymentPlan p;
    if (get_field<int>(j, "format_version") != kFormatVersion)
        throw SchemaError("unsupported plan format_version");
    p.scenario_hash = get_field<std::string>(j, "scenario_hash");
    const auto& a = j.at("angles");
    p.angles_s = {get_field<double>(a, "gamma_s"), get_field<double>(a, "mu_s")};
    p.angles_f = {get_field<double>(a, "gamma_f"), get_field<double>(a, "mu_f")};
    p.objective_s = get_field<double>(j.at("objectives"), "initial");
    p.objective_f = get_field<double>(j.at("objectives"), "final");
    for (const auto& ag : j.at("agents")) {
        p.local_s.push_back({ag.at("u_s").get<double>(), ag.at("v_s").get<double>(),
                             ag.at("w_s").get<double>()});
        p.local_f.push_back({ag.at("u_f").get<double>(), ag.at("v_f").get<double>(),
                             ag.at("w_f").get<double>()});
        p.weights.beta_s.push_back(ag.at("beta_s").get<double>());
        p.weights.beta_f.push_back(ag.at("beta_f").get<double>());
    }
    p.ordering.b = get_field<std::vector<int>>(j, "ordering");
    const int n = p.agent_count();
    if (static_cast<int>(p.ordering.b.size()) != n ||
        static_cast<int>(p.weights.beta_s.size()) != n)
        throw SchemaError("plan agent, ordering and weight sizes disagree");
    std::vector<bool> seen(n, false);
    for (int id : p.ordering.b) {
        if (id < 0 || id >= n || seen[id]) throw SchemaError("plan ordering is not a permutation");
        seen[id] = true;
    }
    const auto& c = j.at("certificate");
    p.certificate = {get_field<double>(c, "d_min"), get_field<double>(c, "beta_star"),
                     get_field<double>(c, "margin"), get_field<bool>(c, "feasible")};
    p.delta = get_field<double>(j, "delta");
    p.epsilon = get_field<double>(j, "epsilon");
    p.psi_d = get_field<double>(j, "psi_d");
    return p;
}

inline void save_plan(const DeploymentPlan& p, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw SchemaError("cannot write " + path);
    out << plan_to_json(p).dump(2) << "\n";
}

inline DeploymentPlan load_plan(const std::string& path) {
    return plan_from_json(detail::load_json_file(path));
}

inline detail::json safety_report_to_json(const SafetyReport& r, bool failed,
                                          const std::string& failure, double failure_time) {
    detail::json j;
    j["format_version"] = kFormatVersion;
    j["limits"] = {{"varpi_max", r.limits.varpi_max}, {"delta", r.limits.delta},
                   {"epsilon", r.limits.epsilon}};
    j["max_rotor_speed"] = {{"value", r.max_rotor_speed.value}, {"t", r.max_rotor_speed.t},
                            {"agent", r.max_rotor_speed.agent}, {"rotor", r.max_rotor_speed.other}};
    j["max_tracking_error"] = {{"value", r.max_tracking_error.value},
                               {"t", r.max_tracking_error.t},
                               {"agent", r.max_tracking_error.agent}};
    j["min_pairwise_distance"] = {{"value", r.min_pairwise_distance.value},
                                  {"t", r.min_pairwise_distance.t},
                                  {"agent_i", r.min_pairwise_distance.agent},
                                  {"agent_j", r.min_pairwise_distance.other}};
    j["pass_9a_rotor_speed"] = r.pass_rotor;
    j["pass_9b_separation"] = r.pass_distance;
    j["pass_9c_tracking"] = r.pass_tracking;
    j["margins"] = {{"rotor", r.rotor_margin}, {"separation", r.distance_margin},
                    {"tracking", r.tracking_margin}};
    j["failed"] = failed;
    if (failed) {
        j["failure"] = failure;
        j["failure_time"] = failure_time;
    }
    return j;
}

inline std::string safety_report_text(const SimResult& res) {
    return safety_report_to_json(res.report, res.failed, res.failure, res.failure_time).dump(2) +
           "\n";
}

namespace detail {

inline void fmt_double(std::string& out, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

} // namespace detail

/// Trajectory log as CSV, one row per recorded step per agent. The header
/// comment carries the safety limits so the log is self-contained for
/// re-deriving the report.
inline std::string trajectory_csv(const TrajectoryLog& log, const SafetyLimits& limits) {
    std::string out;
    out += "# rtd-trajectory-v1 varpi_max=";
    detail::fmt_double(out, limits.varpi_max);
    out += " delta=";
    detail::fmt_double(out, limits.delta);
    out += " epsilon=";
    detail::fmt_double(out, limits.epsilon);
    out += "\n";
    out += "t,agent,x,y,z,vx,vy,vz,phi,theta,psi,phi_dot,theta_dot,psi_dot,p,p_dot,"
           "u_p,u_phi,u_theta,u_psi,w1,w2,w3,w4,pd_x,pd_y,pd_z\n";
    for (const LogRecord& rec : log.records) {
        for (std::size_t i = 0; i < rec.agents.size(); ++i) {
            const AgentRecord& a = rec.agents[i];
            detail::fmt_double(out, rec.t);
            out += ',';
            out += std::to_string(i);
            const double cols[] = {a.state.r.x, a.state.r.y, a.state.r.z,
                                   a.state.v.x, a.state.v.y, a.state.v.z,
                                   a.state.att.phi, a.state.att.theta, a.state.att.psi,
                                   a.state.rates.phi_dot, a.state.rates.theta_dot,
                                   a.state.rates.psi_dot, a.state.p, a.state.p_dot,
                                   a.input.u_p, a.input.u_phi, a.input.u_theta, a.input.u_psi,
                                   a.rotors.w[0], a.rotors.w[1], a.rotors.w[2], a.rotors.w[3],
                                   a.desired.x, a.desired.y, a.desired.z};
            for (double v : cols) {
                out += ',';
                detail::fmt_double(out, v);
            }
            out += '\n';
        }
    }
    return out;
}

struct ParsedLog {
    TrajectoryLog log;
    SafetyLimits limits;
};

inline ParsedLog parse_trajectory_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open " + path);
    ParsedLog out;
    std::string line;
    if (!std::getline(in, line) || line.rfind("# rtd-trajectory-v1", 0) != 0)
        throw SchemaError(path + ": not an rtd trajectory log");
    if (std::sscanf(line.c_str(), "# rtd-trajectory-v1 varpi_max=%lf delta=%lf epsilon=%lf",
                    &out.limits.varpi_max, &out.limits.delta, &out.limits.epsilon) != 3)
        throw SchemaError(path + ": malformed limits header");
    std::getline(in, line);  // column header
    LogRecord current;
    bool have_current = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        double vals[26];
        int agent = 0;
        const char* s = line.c_str();
        char* end = nullptr;
        vals[0] = std::strtod(s, &end);
        if (end == s || *end != ',') throw SchemaError(path + ": malformed row");
        s = end + 1;
        agent = static_cast<int>(std::strtol(s, &end, 10));
        for (int c = 1; c <= 25; ++c) {
            if (*end != ',') throw SchemaError(path + ": malformed row");
            s = end + 1;
            vals[c] = std::strtod(s, &end);
        }
        const double t = vals[0];
        if (!have_current || t != current.t) {
            if (have_current) out.log.records.push_back(std::move(current));
            current = LogRecord{};
            current.t = t;
            have_current = true;
        }
        AgentRecord a;
        a.state.r = {vals[1], vals[2], vals[3]};
        a.state.v = {vals[4], vals[5], vals[6]};
        a.state.att = {vals[7], vals[8], vals[9]};
        a.state.rates = {vals[10], vals[11], vals[12]};
        a.state.p = vals[13];
        a.state.p_dot = vals[14];
        a.input = {vals[15], vals[16], vals[17], vals[18]};
        a.rotors.w = {vals[19], vals[20], vals[21], vals[22]};
        a.desired = {vals[23], vals[24], vals[25]};
        if (static_cast<int>(current.agents.size()) != agent)
            throw SchemaError(path + ": agent rows out of order");
        current.agents.push_back(a);
    }
    if (have_current) out.log.records.push_back(std::move(current));
    return out;
}

/// Re-derive the safety report from a log by replaying the monitor.
inline SafetyReport report_from_log(const TrajectoryLog& log, const SafetyLimits& limits) {
    SafetyMonitor monitor(limits);
    std::vector<QuadState> states;
    std::vector<RotorSpeeds> rotors;
    std::vector<Vec3d> desired;
    for (const LogRecord& rec : log.records) {
        states.clear();
        rotors.clear();
        desired.clear();
        for (const AgentRecord& a : rec.agents) {
            states.push_back(a.state);
            rotors.push_back(a.rotors);
            desired.push_back(a.desired);
        }
        monitor.update(rec.t, states, rotors, desired);
    }
    return monitor.report();
}

/// Desired-trajectory samples as CSV: t, agent, position, velocity and
/// acceleration per axis.
inline std::string desired_trajectory_csv(const DeploymentPlan& plan, const TimeWindow& window,
                                          const RigidTranslation& translation,
                                          double sample_dt) {
    if (!(sample_dt > 0.0)) throw ValidationError("sample_dt must be positive");
    std::string out = "t,agent,px,py,pz,vx,vy,vz,ax,ay,az\n";
    const long n_samples = std::lround(window.duration() / sample_dt);
    for (long k = 0; k <= n_samples; ++k) {
        const double t = window.t_s + k * sample_dt;
        for (int i = 0; i < plan.agent_count(); ++i) {
            const DesiredState d = desired_state(t, plan, window, translation, i);
            detail::fmt_double(out, t);
            out += ',';
            out += std::to_string(i);
            for (int order = 0; order <= 2; ++order) {
                const Vec3d v = coeff(d.p, order);
                for (int axis = 0; axis < 3; ++axis) {
                    out += ',';
                    detail::fmt_double(out, v[axis]);
                }
            }
            out += '\n';
        }
    }
    return out;
}

/// Per-rotor angular-speed series and per-axis position series for plotting,
/// plus a machine-readable manifest.
inline std::vector<std::string> export_plot_data(const TrajectoryLog& log,
                                                 const std::string& dir) {
    if (log.empty()) throw EmptyLog("trajectory log holds no records");
    const std::size_t n_agents = log.records.front().agents.size();
    auto series = [&](const std::string& name, auto getter) {
        std::string out = "t";
        for (std::size_t i = 0; i < n_agents; ++i) out += ",agent_" + std::to_string(i);
        out += '\n';
        for (const LogRecord& rec : log.records) {
            detail::fmt_double(out, rec.t);
            for (const AgentRecord& a : rec.agents) {
                out += ',';
                detail::fmt_double(out, getter(a));
            }
            out += '\n';
        }
        const std::string path = dir + "/" + name;
        std::ofstream f(path);
        if (!f) throw SchemaError("cannot write " + path);
        f << out;
        return name;
    };
    std::vector<std::string> files;
    for (int r = 0; r < 4; ++r)
        files.push_back(series("rotor_" + std::to_string(r + 1) + ".csv",
                               [r](const AgentRecord& a) { return a.rotors.w[r]; }));
    files.push_back(series("pos_x.csv", [](const AgentRecord& a) { return a.state.r.x; }));
    files.push_back(series("pos_y.csv", [](const AgentRecord& a) { return a.state.r.y; }));
    files.push_back(series("pos_z.csv", [](const AgentRecord& a) { return a.state.r.z; }));

    detail::json manifest;
    manifest["format_version"] = kFormatVersion;
    manifest["files"] = files;
    manifest["records"] = log.records.size();
    manifest["agents"] = n_agents;
    const std::string mpath = dir + "/manifest.json";
    std::ofstream mf(mpath);
    if (!mf) throw SchemaError("cannot write " + mpath);
    mf << manifest.dump(2) << "\n";
    files.push_back("manifest.json");
    return files;
}

} // namespace rtd
