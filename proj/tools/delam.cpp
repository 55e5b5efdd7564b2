#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "delam/config.hpp"
#include "delam/io.hpp"
#include "delam/limits.hpp"
#include "delam/selfcheck.hpp"

namespace fs = std::filesystem;
using namespace delam;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_solver = 3;
constexpr int exit_audit = 4;

std::string output_dir(const RunConfig& cfg, const std::string& flag)
{
    if (!flag.empty())
        return flag;
    if (const char* env = std::getenv("DELAM_OUTPUT_DIR"); env && *env)
        return env;
    return cfg.output_dir;
}

fs::path prepare_dir(const std::string& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw ConfigError("output directory " + dir + " is not writable");
    return fs::path(dir);
}

InterfaceField initial_interface(const RunConfig& cfg, const Mesh2D& mesh)
{
    return InterfaceField::constant(mesh, cfg.initial_bonded);
}

void print_check(const TrajectoryCheck& c)
{
    std::printf("unidirectional     %s\n", c.unidirectional ? "ok" : "FAILED");
    std::printf("semistable         %s\n", c.semistable ? "ok" : "FAILED");
    std::printf("perimeter_bound    %s\n", c.perimeter_bound ? "ok" : "FAILED");
    std::printf("dirichlet_zero     %s\n", c.dirichlet_zero ? "ok" : "FAILED");
    std::printf("energy_inequality  %s (max exact residual %.3e)\n", c.energy_inequality ? "ok" : "FAILED",
                c.max_exact_residual);
    std::printf("ledger_consistent  %s (max mismatch %.3e)\n", c.ledger_consistent ? "ok" : "FAILED",
                c.max_ledger_mismatch);
}

int cmd_run(const std::string& config_path, const std::string& out_flag, const std::string& resume_path)
{
    const RunConfig cfg = load_config(config_path);
    const fs::path dir = prepare_dir(output_dir(cfg, out_flag));
    const std::string normalized = dump_config(cfg);
    write_text_file((dir / "config.toml").string(), normalized);

    const Discretization disc(build_two_block_mesh(mesh_spec(cfg)), model_params(cfg, cfg.k));
    EvolutionOptions opts = evolution_options(cfg);

    std::ofstream ledger_out;
    if (cfg.streaming) {
        ledger_out.open(dir / "ledger.csv", std::ios::binary | std::ios::trunc);
        if (!ledger_out)
            throw ConfigError("cannot write " + (dir / "ledger.csv").string());
        write_ledger_header(ledger_out);
        opts.on_row = [&ledger_out](const LedgerRow& r) {
            write_ledger_row(ledger_out, r);
            ledger_out.flush();
        };
    }

    std::optional<Evolution> ev;
    if (!resume_path.empty()) {
        ev.emplace(Evolution::resume(disc, opts, checkpoint_from_json(read_text_file(resume_path))));
    } else {
        const Vec zero = Vec::Zero(disc.num_dofs());
        ev.emplace(disc, opts, zero, zero, initial_interface(cfg, disc.mesh()));
        if (ev->repaired_initial_state())
            std::printf("initial interface state repaired by one minimization step\n");
    }
    ev->run();

    const Trajectory& traj = ev->trajectory();
    if (!cfg.streaming) {
        write_text_file((dir / "ledger.csv").string(), ledger_csv(traj.ledger));
        write_text_file((dir / "trajectory.json").string(), trajectory_to_json(traj, normalized));
    }
    write_text_file((dir / "checkpoint.json").string(), checkpoint_to_json(ev->checkpoint()));

    const TrajectoryCheck check = check_trajectory(disc, traj);
    const LedgerRow& last = traj.ledger.back();
    std::printf("steps %d  t %.6g  bonded length %.6g  stored energy %.6g\n", ev->step_index(), last.t,
                last.bonded_length, last.stored_total);
    print_check(check);
    std::printf("outputs written to %s\n", dir.string().c_str());
    return check.ok() ? exit_ok : exit_audit;
}

int cmd_sweep(const std::string& config_path, const std::string& out_flag, int threads)
{
    RunConfig cfg = load_config(config_path);
    if (threads >= 0)
        cfg.threads = threads;
    const fs::path dir = prepare_dir(output_dir(cfg, out_flag));
    write_text_file((dir / "config.toml").string(), dump_config(cfg));

    const SweepReport rep = run_sweep(sweep_setup(cfg), cfg.k_values, sweep_options(cfg));
    const SweepAssessment a = assess_sweep(rep);
    write_text_file((dir / "sweep.json").string(), sweep_report_json(rep, a));
    for (const auto& [name, csv] : sweep_report_csv(rep))
        write_text_file((dir / ("sweep_" + name + ".csv")).string(), csv);

    bool invariants = true;
    for (const SweepMember& m : rep.members) {
        if (!m.ok) {
            std::printf("k=%g failed: %s\n", m.k, m.error.c_str());
            continue;
        }
        invariants = invariants && m.semistable_all && m.unidirectional;
        std::printf("k=%-8g sup J %.4e  sup jump %.4e  sup P %d  Var_R %.4e\n", m.k, m.sup_adhesive,
                    m.sup_max_jump, m.sup_perimeter, m.ri_variation_total);
    }
    std::printf("energy_bounded %d  jump_decay %d  support_monotone %d  cauchy %d  (compared %d, excluded %d)\n",
                a.energy_bounded, a.jump_decay, a.support_monotone, a.cauchy, a.compared_samples,
                a.excluded_samples);
    for (const std::string& n : a.notes)
        std::printf("note: %s\n", n.c_str());
    if (!rep.complete)
        return exit_solver;
    return a.ok() && invariants ? exit_ok : exit_audit;
}

int cmd_audit(const std::string& path)
{
    std::string config_text;
    const Trajectory traj = trajectory_from_json(read_text_file(path), &config_text);
    const RunConfig cfg = parse_config(config_text);
    const Discretization disc(build_two_block_mesh(mesh_spec(cfg)), model_params(cfg, cfg.k));
    const TrajectoryCheck check = check_trajectory(disc, traj);
    print_check(check);
    return check.ok() ? exit_ok : exit_audit;
}

int cmd_selftest(std::uint64_t seed)
{
    int failed = 0;
    for (const SuiteResult& r : run_selfchecks(seed)) {
        std::printf("%-16s passed %4d  failed %4d%s%s\n", r.name.c_str(), r.passed, r.failed,
                    r.failed ? "  first: " : "", r.first_failure.c_str());
        failed += r.failed;
    }
    std::printf("%s\n", failed == 0 ? "selftest passed" : "selftest FAILED");
    return failed == 0 ? exit_ok : exit_audit;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Two-block delamination simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir, resume_path, traj_path;
    int threads = -1;
    std::uint64_t seed = 0;

    auto* run = app.add_subcommand("run", "Run one trajectory and write its ledger");
    run->add_option("-c,--config", config_path, "config file")->required();
    run->add_option("-o,--output", out_dir, "output directory");
    run->add_option("--resume", resume_path, "continue from a checkpoint file");

    auto* sweep = app.add_subcommand("sweep", "Run the k-sweep and write the sweep report");
    sweep->add_option("-c,--config", config_path, "config file")->required();
    sweep->add_option("-o,--output", out_dir, "output directory");
    sweep->add_option("--threads", threads, "worker threads (0 = hardware)");

    auto* audit = app.add_subcommand("audit", "Re-verify the invariants of a stored trajectory");
    audit->add_option("trajectory", traj_path, "trajectory.json written by run")->required();

    auto* selftest = app.add_subcommand("selftest", "Run the built-in oracle suites");
    auto* seed_opt = selftest->add_option("--seed", seed, "random seed (default: run.seed of the config, else 0)");
    selftest->add_option("-c,--config", config_path, "config file supplying run.seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    try {
        if (*run)
            return cmd_run(config_path, out_dir, resume_path);
        if (*sweep)
            return cmd_sweep(config_path, out_dir, threads);
        if (*audit)
            return cmd_audit(traj_path);
        if (!*seed_opt && !config_path.empty())
            seed = load_config(config_path).seed;
        return cmd_selftest(seed);
    } catch (const SolverError& e) {
        std::fprintf(stderr, "solver failure: %s\n", e.what());
        return exit_solver;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_config;
    }
}
