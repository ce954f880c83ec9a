#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rtd/errors.hpp"
#include "rtd/io.hpp"
#include "rtd/random_scenario.hpp"
#include "rtd/scenario.hpp"
#include "rtd/simulator.hpp"

namespace rtd::cli {

inline int log_level() {
    static const int level = [] {
        const char* env = std::getenv("RTD_LOG_LEVEL");
        if (!env) return 1;
        const std::string v(env);
        if (v == "quiet" || v == "error") return 0;
        if (v == "info") return 2;
        if (v == "debug") return 3;
        return 1;
    }();
    return level;
}

inline void log_info(const std::string& msg) {
    if (log_level() >= 2) std::cerr << "[rtd] " << msg << "\n";
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SchemaError("cannot write " + path);
    out << content;
}

inline std::string certificate_summary(const DeploymentPlan& plan) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "d_min = %.6f m\nbeta_star = %.6f\nd_min * beta_star = %.6f m\n"
                  "required 2(delta+epsilon) = %.6f m\nmargin = %.6f m\nfeasible = %s\n",
                  plan.certificate.d_min, plan.certificate.beta_star,
                  plan.certificate.d_min * plan.certificate.beta_star,
                  2.0 * (plan.delta + plan.epsilon), plan.certificate.margin,
                  plan.certificate.feasible ? "yes" : "no");
    return buf;
}

/// Command driver; argv excludes the program name. Exit codes: 0 success
/// (simulate: all safety conditions pass), 1 I/O or parse failure,
/// 2 infeasible certificate or safety violation, 3 numerical failure mid-run.
inline int run(const std::vector<std::string>& argv) {
    CLI::App app{"RTD: planning, certification and closed-loop simulation of "
                 "multi-quadcopter deployments"};
    app.require_subcommand(1);

    std::string scenario_path, plan_path, out_arg, traj_out;
    double sample_dt = 0.1;
    bool allow_uncertified = false;
    double dt_override = 0.0;
    int stride_override = 0;
    bool export_plots = false;
    int rand_n = 12;
    unsigned rand_seed = 1;

    CLI::App* certify_cmd = app.add_subcommand("certify", "evaluate the separation certificate");
    certify_cmd->add_option("scenario", scenario_path, "scenario JSON")->required();

    CLI::App* plan_cmd = app.add_subcommand("plan", "compute and save a deployment plan");
    plan_cmd->add_option("scenario", scenario_path, "scenario JSON")->required();
    plan_cmd->add_option("-o,--out", out_arg, "output plan path")->required();
    plan_cmd->add_flag("--allow-uncertified", allow_uncertified,
                       "save the plan even if the certificate is infeasible");
    plan_cmd->add_option("--export-trajectory", traj_out,
                         "also sample the desired trajectory to this CSV");
    plan_cmd->add_option("--sample-dt", sample_dt, "trajectory sampling step, s");

    CLI::App* sim_cmd = app.add_subcommand("simulate", "closed-loop simulation with monitoring");
    sim_cmd->add_option("scenario", scenario_path, "scenario JSON")->required();
    sim_cmd->add_option("--plan", plan_path, "replay a previously saved plan");
    sim_cmd->add_option("-o,--out", out_arg, "output directory")->required();
    sim_cmd->add_option("--dt", dt_override, "integration step override, s");
    sim_cmd->add_option("--stride", stride_override, "record every k-th step");
    sim_cmd->add_flag("--allow-uncertified", allow_uncertified,
                      "simulate even if the certificate is infeasible");
    sim_cmd->add_flag("--export-plots", export_plots,
                      "also write per-rotor and per-axis series");

    CLI::App* report_cmd = app.add_subcommand("report", "re-derive the safety report from logs");
    report_cmd->add_option("dir", out_arg, "simulate output directory")->required();

    CLI::App* random_cmd =
        app.add_subcommand("random", "generate a random certified scenario");
    random_cmd->add_option("-n,--agents", rand_n, "fleet size")->check(CLI::Range(3, 1000));
    random_cmd->add_option("--seed", rand_seed, "RNG seed");
    random_cmd->add_option("-o,--out", out_arg, "output scenario path")->required();

    try {
        std::vector<const char*> cargv{"rtd"};
        for (const std::string& a : argv) cargv.push_back(a.c_str());
        app.parse(static_cast<int>(cargv.size()), cargv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (certify_cmd->parsed()) {
            const Scenario s = parse_scenario(scenario_path);
            const DeploymentPlan plan = build_plan(s, /*allow_uncertified=*/true);
            std::cout << certificate_summary(plan);
            return plan.certificate.feasible ? 0 : 2;
        }

        if (plan_cmd->parsed()) {
            const Scenario s = parse_scenario(scenario_path);
            DeploymentPlan plan;
            try {
                plan = build_plan(s, allow_uncertified);
            } catch (const InfeasiblePlan& e) {
                std::cerr << "error: " << e.what() << "\n";
                return 2;
            }
            save_plan(plan, out_arg);
            log_info("plan written to " + out_arg);
            if (!traj_out.empty())
                write_file(traj_out,
                           desired_trajectory_csv(plan, s.window, s.translation, sample_dt));
            std::cout << certificate_summary(plan);
            return 0;
        }

        if (sim_cmd->parsed()) {
            const Scenario s = parse_scenario(scenario_path);
            DeploymentPlan plan;
            if (!plan_path.empty()) {
                plan = load_plan(plan_path);
                if (plan.scenario_hash != scenario_fingerprint(s))
                    throw ValidationError("plan was computed for a different scenario (hash mismatch)");
                if (!plan.certificate.feasible && !allow_uncertified)
                    throw InfeasiblePlan("loaded plan is uncertified; pass --allow-uncertified");
            } else {
                try {
                    plan = build_plan(s, allow_uncertified);
                } catch (const InfeasiblePlan& e) {
                    std::cerr << "error: " << e.what() << "\n";
                    return 2;
                }
            }
            SimConfig cfg = sim_config_for(s);
            if (dt_override > 0.0) cfg.dt = dt_override;
            if (stride_override > 0) cfg.record_stride = stride_override;

            log_info("simulating " + std::to_string(s.agents) + " agents, dt = " +
                     std::to_string(cfg.dt));
            const SimResult res = run_closed_loop(s, plan, cfg);

            std::filesystem::create_directories(out_arg);
            write_file(out_arg + "/trajectory.csv",
                       trajectory_csv(res.log, res.report.limits));
            write_file(out_arg + "/safety_report.json", safety_report_text(res));
            save_plan(plan, out_arg + "/plan.json");
            if (export_plots) export_plot_data(res.log, out_arg);

            if (res.failed) {
                std::cerr << "numerical failure at t = " << res.failure_time << ": "
                          << res.failure << "\n";
                return 3;
            }
            std::cout << safety_report_text(res);
            return res.report.all_pass() ? 0 : 2;
        }

        if (report_cmd->parsed()) {
            const ParsedLog parsed = parse_trajectory_csv(out_arg + "/trajectory.csv");
            const SafetyReport rep = report_from_log(parsed.log, parsed.limits);
            std::cout << safety_report_to_json(rep, false, "", 0.0).dump(2) << "\n";
            return 0;
        }

        if (random_cmd->parsed()) {
            const Scenario s = random_certified_scenario(rand_n, rand_seed);
            write_file(out_arg, scenario_to_json(s).dump(2) + "\n");
            std::cout << "wrote " << out_arg << "\n";
            return 0;
        }
    } catch (const InfeasiblePlan& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NonFiniteState& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

} // namespace rtd::cli
