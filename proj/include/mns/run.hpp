#pragma once

#include "mns/common.hpp"
#include "mns/config.hpp"
#include "mns/diagnostics.hpp"
#include "mns/initial_conditions.hpp"
#include "mns/integrator.hpp"
#include "mns/snapshot.hpp"
#include "mns/version.hpp"

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace mns {

inline constexpr const char* csv_header =
    "t,E_L2,E_half,D_half_cum,grad_sq,lap_sq,d3_sq,hm,l3,l6,linf,grad_linf,resid_en,cancel,div_max,bound_rhs";

inline std::string csv_row(const DiagnosticsRecord& r) {
    std::string out;
    const double cols[16] = {r.t,  r.e_l2, r.e_half, r.d_half_cum, r.grad_sq, r.lap_sq,
                             r.d3_sq, r.hm, r.l3, r.l6, r.linf, r.grad_linf,
                             r.resid_en, r.cancel, r.div_max, r.bound_rhs};
    for (int i = 0; i < 16; ++i) {
        if (i) out.push_back(',');
        out += format_double(cols[i]);
    }
    return out;
}

/// Parse one diagnostics.csv back into records (tests and tooling).
inline std::vector<DiagnosticsRecord> read_diagnostics_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw error("read_diagnostics_csv: cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw error("read_diagnostics_csv: '" + path + "' is empty");
    if (line != csv_header)
        throw error("read_diagnostics_csv: '" + path + "' has unexpected header: " + line);
    std::vector<DiagnosticsRecord> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        double cols[16];
        const char* p = line.c_str();
        for (int i = 0; i < 16; ++i) {
            char* end = nullptr;
            cols[i] = std::strtod(p, &end);
            if (end == p) throw error("read_diagnostics_csv: bad row: " + line);
            p = end;
            if (i < 15) {
                if (*p != ',') throw error("read_diagnostics_csv: bad row: " + line);
                ++p;
            }
        }
        DiagnosticsRecord r;
        r.t = cols[0]; r.e_l2 = cols[1]; r.e_half = cols[2]; r.d_half_cum = cols[3];
        r.grad_sq = cols[4]; r.lap_sq = cols[5]; r.d3_sq = cols[6]; r.hm = cols[7];
        r.l3 = cols[8]; r.l6 = cols[9]; r.linf = cols[10]; r.grad_linf = cols[11];
        r.resid_en = cols[12]; r.cancel = cols[13]; r.div_max = cols[14]; r.bound_rhs = cols[15];
        out.push_back(r);
    }
    return out;
}

/// Canonical in-memory form of a state that went through a snapshot file:
/// exactly what a restart reconstructs from the stored physical samples.
inline SpectralVectorField canonical_from_physical(const PhysicalVectorField& phys) {
    SpectralVectorField u = forward_transform(phys);
    dealias_inplace(u);
    return u;
}

struct RunResult {
    RunStatus status = RunStatus::completed;
    BlowUpInfo blowup;
    std::vector<DiagnosticsRecord> records;
    SpectralVectorField final_state;
    MonitorReport monitors;
    std::string output_dir;
    std::int64_t steps = 0;
    double max_div_rel = 0.0;
    double max_zero_mode = 0.0;
    double max_cancel = 0.0;
    double max_e_half_increase = 0.0;

    int exit_code() const { return status == RunStatus::completed ? 0 : 2; }
};

namespace detail {

inline nlohmann::json config_to_json(const RunConfig& cfg) {
    nlohmann::json j;
    j["model"] = model_name(cfg.model);
    j["n"] = cfg.n;
    j["T"] = cfg.T;
    if (cfg.dt) j["dt"] = *cfg.dt;
    if (cfg.cfl) {
        j["cfl"] = *cfg.cfl;
        j["dt_max"] = cfg.dt_max;
    }
    j["ic"] = cfg.ic.describe();
    j["riesz_sign"] = to_int(cfg.riesz_sign);
    j["m"] = cfg.sobolev_m;
    j["C"] = cfg.bound_c;
    j["diag_every"] = cfg.diag_every;
    j["snapshot_every"] = cfg.snapshot_every;
    j["blowup_threshold"] = cfg.blowup_threshold;
    j["output_dir"] = cfg.output_dir;
    if (!cfg.restart_path.empty()) j["restart"] = cfg.restart_path;
    return j;
}

inline nlohmann::json monitors_to_json(const MonitorReport& rep) {
    nlohmann::json j;
    j["C"] = rep.constant_c;
    j["m"] = rep.sobolev_m;
    j["closed_form_log10_rhs"] = rep.closed_form_log10_rhs;
    j["closed_form_top_exponent"] = rep.closed_form_top_exponent;
    for (const auto& s : rep.series) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& q : s.samples)
            arr.push_back({{"t", q.t},
                           {"log10_lhs", q.log10_lhs},
                           {"log10_rhs", q.log10_rhs},
                           {"ratio", q.ratio}});
        j["series"][s.name] = std::move(arr);
    }
    return j;
}

} // namespace detail

/// Execute a configured run: writes diagnostics.csv, periodic and final
/// snapshots (each with its .aux.json sidecar), run_metadata.json and
/// monitors.json into the output directory. The environment variable
/// MNS_OUTPUT_DIR overrides the configured output directory.
inline RunResult run(const RunConfig& cfg) {
    namespace fs = std::filesystem;

    std::string outdir = cfg.output_dir;
    if (const char* env = std::getenv("MNS_OUTPUT_DIR"); env && *env) outdir = env;
    fs::create_directories(outdir);

    const Grid grid = Grid::make(cfg.n);

    StepControls controls;
    controls.dt = cfg.dt;
    if (cfg.cfl) controls.cfl = *cfg.cfl;
    controls.dt_max = cfg.dt_max;
    controls.T = cfg.T;
    controls.blowup_threshold = cfg.blowup_threshold;
    controls.validate();

    // Initial state: generator output, or a snapshot plus sidecar on restart.
    SpectralVectorField u0;
    ResumeInfo resume;
    if (!cfg.restart_path.empty()) {
        SnapshotData snap = read_snapshot(cfg.restart_path);
        if (snap.field.grid.n != cfg.n)
            throw error("restart: grid mismatch (snapshot n=" + std::to_string(snap.field.grid.n) +
                        ", config n=" + std::to_string(cfg.n) + ")");
        if (snap.model != cfg.model)
            throw error(std::string("restart: model mismatch (snapshot ") + model_name(snap.model) +
                        ", config " + model_name(cfg.model) + ")");
        if (snap.sign != cfg.riesz_sign)
            throw error("restart: riesz_sign mismatch between snapshot and config");
        SnapshotAux aux = read_snapshot_aux(cfg.restart_path + ".aux.json");
        u0 = canonical_from_physical(snap.field);
        resume.t0 = snap.t;
        resume.step0 = aux.step;
        resume.accums = aux.accums;
        resume.initials = aux.initials;
        resume.resuming = true;
    } else {
        u0 = make_initial(grid, cfg.ic);
    }

    // Metadata goes out before the run starts and is finalized afterwards.
    nlohmann::json meta;
    meta["tool"] = "mns";
    meta["tool_version"] = version_string;
    meta["config"] = detail::config_to_json(cfg);
    meta["effective_output_dir"] = outdir;
    meta["rng"] = "mt19937_64 (uniforms ((x>>11)+0.5)*2^-53, trigonometric Box-Muller)";
    meta["status"] = "running";
    {
        std::ofstream mf(fs::path(outdir) / "run_metadata.json", std::ios::trunc);
        if (!mf) throw error("run: cannot write run_metadata.json in '" + outdir + "'");
        mf << meta.dump(2) << "\n";
    }

    std::ofstream csv(fs::path(outdir) / "diagnostics.csv", std::ios::trunc);
    if (!csv) throw error("run: cannot write diagnostics.csv in '" + outdir + "'");
    csv << csv_header << "\n";

    IntegrateOptions opts;
    opts.controls = controls;
    opts.diag_every = cfg.diag_every;
    opts.snapshot_every = cfg.snapshot_every;
    opts.sobolev_m = cfg.sobolev_m;
    opts.bound_c = cfg.bound_c;
    opts.sigma = cfg.riesz_sign;
    opts.resume = resume;
    opts.on_record = [&csv](const DiagnosticsRecord& r) { csv << csv_row(r) << "\n" << std::flush; };
    opts.on_snapshot = [&](SpectralVectorField& u, double t, std::int64_t step,
                           const DiagAccums& acc, const InitialNorms& init) {
        const PhysicalVectorField phys = inverse_transform(u);
        const std::string path =
            (fs::path(outdir) / ("snapshot_step_" + std::to_string(step) + ".bin")).string();
        write_snapshot(path, phys, t, cfg.model, cfg.riesz_sign);
        write_snapshot_aux(path + ".aux.json", t, step, acc, init);
        // Continue from exactly what a restart would load, so an interrupted
        // and an uninterrupted run stay bitwise identical.
        u = canonical_from_physical(phys);
    };

    IntegrationResult ir = integrate(cfg.model, u0, opts);

    RunResult res;
    res.status = ir.status;
    res.blowup = ir.blowup;
    res.records = std::move(ir.records);
    res.final_state = std::move(ir.state);
    res.output_dir = outdir;
    res.steps = ir.steps;
    res.max_div_rel = ir.max_div_rel;
    res.max_zero_mode = ir.max_zero_mode;
    res.max_cancel = ir.max_cancel;
    res.max_e_half_increase = ir.max_e_half_increase;

    if (ir.status == RunStatus::completed) {
        const PhysicalVectorField phys = inverse_transform(res.final_state);
        const std::string path = (fs::path(outdir) / "snapshot_final.bin").string();
        write_snapshot(path, phys, controls.T, cfg.model, cfg.riesz_sign);
        write_snapshot_aux(path + ".aux.json", controls.T, ir.steps, ir.accums, ir.initials);
        meta["final_t"] = controls.T;
    } else if (ir.last_good.grid.n != 0) {
        const PhysicalVectorField phys = inverse_transform(ir.last_good);
        const std::string path = (fs::path(outdir) / "snapshot_lastgood.bin").string();
        write_snapshot(path, phys, ir.blowup.t, cfg.model, cfg.riesz_sign);
    }

    if (!res.records.empty()) {
        res.monitors = estimate_monitors(res.records, cfg.bound_c, cfg.sobolev_m);
        std::ofstream mon(fs::path(outdir) / "monitors.json", std::ios::trunc);
        mon << detail::monitors_to_json(res.monitors).dump(2) << "\n";
    }

    meta["status"] = ir.status == RunStatus::completed ? "completed" : "blowup";
    if (ir.status == RunStatus::blowup) {
        meta["blowup"] = {{"t", ir.blowup.t},
                          {"step", ir.blowup.step},
                          {"max_speed", ir.blowup.max_speed},
                          {"l2_norm", ir.blowup.l2_norm}};
    }
    meta["steps"] = res.steps;
    meta["max_div_rel"] = res.max_div_rel;
    meta["max_cancel"] = res.max_cancel;
    {
        std::ofstream mf(fs::path(outdir) / "run_metadata.json", std::ios::trunc);
        mf << meta.dump(2) << "\n";
    }

    return res;
}

inline RunConfig read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw error("cannot open config file '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config(text);
}

/// Self-convergence study: integrate the configured problem at dt, dt/2, ...,
/// dt/2^halvings and report successive final-state differences and observed
/// orders. Requires a fixed-dt config.
struct ConvergenceRow {
    double dt = 0.0;
    double diff_to_next = 0.0;  // relative L2 distance to the dt/2 solution
    double observed_order = 0.0;  // log2 of the previous ratio, 0 for the first row
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;

    double final_observed_order() const {
        for (auto it = rows.rbegin(); it != rows.rend(); ++it)
            if (it->observed_order != 0.0) return it->observed_order;
        return 0.0;
    }
};

inline ConvergenceTable convergence_study(const RunConfig& cfg, int halvings) {
    if (!cfg.dt) throw error("convergence: config must use a fixed dt");
    if (halvings < 1) throw error("convergence: halvings must be >= 1");

    const Grid grid = Grid::make(cfg.n);
    const SpectralVectorField u0 = make_initial(grid, cfg.ic);

    std::vector<SpectralVectorField> finals;
    std::vector<double> dts;
    for (int h = 0; h <= halvings; ++h) {
        const double dt = *cfg.dt / std::pow(2.0, h);
        IntegrateOptions opts;
        opts.controls.dt = dt;
        opts.controls.T = cfg.T;
        opts.controls.blowup_threshold = cfg.blowup_threshold;
        opts.diag_every = std::numeric_limits<std::int64_t>::max() / 2;
        opts.sigma = cfg.riesz_sign;
        opts.sobolev_m = cfg.sobolev_m;
        opts.bound_c = cfg.bound_c;
        IntegrationResult ir = integrate(cfg.model, u0, opts);
        if (ir.status != RunStatus::completed)
            throw error("convergence: run at dt = " + format_double(dt) + " blew up");
        finals.push_back(std::move(ir.state));
        dts.push_back(dt);
    }

    ConvergenceTable table;
    std::vector<double> errs;
    for (int h = 0; h < halvings; ++h) {
        SpectralVectorField diff = finals[h];
        axpy(diff, -1.0, finals[h + 1]);
        const double denom = l2_norm(finals[h + 1]);
        errs.push_back(denom > 0.0 ? l2_norm(diff) / denom : l2_norm(diff));
    }
    for (int h = 0; h <= halvings; ++h) {
        ConvergenceRow row;
        row.dt = dts[h];
        row.diff_to_next = h < halvings ? errs[h] : 0.0;
        row.observed_order = (h >= 1 && h < halvings && errs[h] > 0.0)
                                 ? std::log2(errs[h - 1] / errs[h])
                                 : 0.0;
        table.rows.push_back(row);
    }
    return table;
}

} // namespace mns
