#include "mns/mns.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace {

int do_simulate(const std::string& config_path, const std::string& restart) {
    mns::RunConfig cfg = mns::read_config_file(config_path);
    if (!restart.empty()) cfg.restart_path = restart;

    mns::RunResult res = mns::run(cfg);
    if (res.status == mns::RunStatus::completed) {
        std::printf("completed: T=%s steps=%lld records=%zu outdir=%s\n",
                    mns::format_double(cfg.T).c_str(), static_cast<long long>(res.steps),
                    res.records.size(), res.output_dir.c_str());
        std::printf("monitors: max |div|/||u|| = %s, max cancellation = %s\n",
                    mns::format_double(res.max_div_rel).c_str(),
                    mns::format_double(res.max_cancel).c_str());
        return 0;
    }
    std::fprintf(stderr, "BLOWUP at t=%s step=%lld: max|v|=%s ||v||=%s (last-good snapshot retained)\n",
                 mns::format_double(res.blowup.t).c_str(), static_cast<long long>(res.blowup.step),
                 mns::format_double(res.blowup.max_speed).c_str(),
                 mns::format_double(res.blowup.l2_norm).c_str());
    return res.exit_code();
}

int do_convergence(const std::string& config_path, int halvings) {
    mns::RunConfig cfg = mns::read_config_file(config_path);
    mns::ConvergenceTable table = mns::convergence_study(cfg, halvings);
    std::printf("%-24s %-24s %s\n", "dt", "diff_to_half", "observed_order");
    for (const auto& row : table.rows) {
        std::printf("%-24s %-24s %s\n", mns::format_double(row.dt).c_str(),
                    row.diff_to_next != 0.0 ? mns::format_double(row.diff_to_next).c_str() : "-",
                    row.observed_order != 0.0 ? mns::format_double(row.observed_order).c_str() : "-");
    }
    std::printf("final observed order: %s\n",
                mns::format_double(table.final_observed_order()).c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"pseudo-spectral solver for the mNS / NS / Hall family on the periodic 3-torus"};
    app.require_subcommand(1);

    auto* sim = app.add_subcommand("simulate", "integrate a configured run and write its artifacts");
    std::string config_path, restart;
    sim->add_option("--config", config_path, "path to key=value config file")->required();
    sim->add_option("--restart", restart, "snapshot file to resume from (needs its .aux.json)");

    auto* ver = app.add_subcommand("verify", "run the operator-identity and cancellation suites");

    auto* conv = app.add_subcommand("convergence", "self-convergence study with halved steps");
    std::string conv_config;
    int halvings = 3;
    conv->add_option("--config", conv_config, "path to key=value config file (fixed dt)")->required();
    conv->add_option("--halvings", halvings, "number of dt halvings")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return do_simulate(config_path, restart);
        if (ver->parsed()) return mns::run_verify(std::cout) ? 0 : 1;
        if (conv->parsed()) return do_convergence(conv_config, halvings);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
