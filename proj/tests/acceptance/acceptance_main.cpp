// Acceptance suite: one self-contained check per numbered criterion, one
// PASS/FAIL line each, nonzero exit if anything fails. Runs on a laptop in a
// few minutes; the heaviest items are the n = 64 runs.

#include "mns/mns.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

using namespace mns;
namespace fs = std::filesystem;
using clk = std::chrono::steady_clock;

namespace {

int g_failures = 0;
fs::path g_tmp;

// Run-wide invariant stats pooled across every integration the suite
// performs (criterion 8 checks them all).
double g_max_div_rel = 0.0;
double g_max_zero_mode = 0.0;

void pool_run_invariants(const IntegrationResult& r) {
    g_max_div_rel = std::max(g_max_div_rel, r.max_div_rel);
    g_max_zero_mode = std::max(g_max_zero_mode, r.max_zero_mode);
}

void report(int criterion, bool pass, const std::string& what, const std::string& detail,
            double seconds) {
    std::printf("%s criterion %2d: %s (%s) [%.1fs]\n", pass ? "PASS" : "FAIL", criterion,
                what.c_str(), detail.c_str(), seconds);
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

IntegrationResult integrate_simple(ModelKind model, const SpectralVectorField& u0, double T,
                                   std::optional<double> dt, std::int64_t diag_every = 1,
                                   double dt_max = 0.05) {
    IntegrateOptions opts;
    opts.controls.dt = dt;
    opts.controls.T = T;
    opts.controls.cfl = 0.4;
    opts.controls.dt_max = dt_max;
    opts.diag_every = diag_every;
    IntegrationResult r = integrate(model, u0, opts);
    pool_run_invariants(r);
    return r;
}

double rel_l2(const SpectralVectorField& a, const SpectralVectorField& b) {
    SpectralVectorField d = a;
    axpy(d, -1.0, b);
    const double den = l2_norm(b);
    return den > 0.0 ? l2_norm(d) / den : l2_norm(d);
}

// --- criterion 1: operator identity suite ---------------------------------
void criterion_1() {
    auto t0 = clk::now();
    std::vector<CheckResult> checks = verify_identities(16, 100);
    const double secs = std::chrono::duration<double>(clk::now() - t0).count();
    bool pass = secs < 10.0;
    double worst = 0.0;
    for (const auto& c : checks) {
        pass = pass && c.pass;
        worst = std::max(worst, c.worst);
    }
    report(1, pass, "operator identities on 100 random fields at n=16, tol 1e-12",
           "worst=" + fmt(worst) + ", budget 10s", secs);
}

// --- criterion 2: exact heat decay on Beltrami data, all four models ------
void criterion_2() {
    auto t0 = clk::now();
    const Grid g = Grid::make(32);
    const SpectralVectorField v0 = abc_flow(g, 1.0, 1.0, 1.0);
    const SpectralVectorField want = scaled(v0, std::exp(-1.0));
    double worst = 0.0;
    bool pass = true;
    for (ModelKind m : {ModelKind::mns, ModelKind::ns_rotational, ModelKind::ns_convective,
                        ModelKind::hall}) {
        IntegrationResult r = integrate_simple(m, v0, 1.0, 1e-3, 1 << 20);
        pass = pass && (r.status == RunStatus::completed);
        worst = std::max(worst, rel_l2(r.state, want));
    }
    const double secs = std::chrono::duration<double>(clk::now() - t0).count();
    pass = pass && worst <= 1e-9 && secs < 60.0;
    report(2, pass, "ABC decay vs e^{-1} on all four models, n=32, dt=1e-3, T=1",
           "worst rel err=" + fmt(worst) + " tol 1e-9, budget 60s", secs);
}

// --- criterion 3: per-step mNS cancellation on a Taylor-Green run ---------
void criterion_3() {
    auto t0 = clk::now();
    const Grid g = Grid::make(64);
    IntegrationResult r = integrate_simple(ModelKind::mns, taylor_green(g, 1.0), 0.5, {});
    const double secs = std::chrono::duration<double>(clk::now() - t0).count();
    const bool pass = r.status == RunStatus::completed && r.max_cancel <= 1e-12;
    report(3, pass, "normalized <N,Lambda v> on every step of Taylor-Green, n=64, T=0.5",
           "max=" + fmt(r.max_cancel) + " tol 1e-12", secs);
}

// --- criterion 4: H^{1/2} balance -----------------------------------------
void criterion_4() {
    auto t0 = clk::now();
    const Grid g = Grid::make(32);
    // Low-shell-dominated data keeps the trapezoid constant inside the
    // 1e-6 budget while the Taylor-Green part keeps the nonlinearity active.
    const SpectralVectorField v0 = added(abc_flow(g, 1.0, 1.0, 1.0), taylor_green(g, 0.25));

    IntegrationResult ra = integrate_simple(ModelKind::mns, v0, 0.5, 1e-3, 1 << 20);
    IntegrationResult rb = integrate_simple(ModelKind::mns, v0, 0.5, 5e-4, 1 << 20);
    const double e0 = ra.records.front().e_half;
    const double rho_a = half_energy_residual(ra.records);
    const double rho_b = half_energy_residual(rb.records);
    const double ratio = std::abs(rho_a) / std::abs(rho_b);

    // The trapezoid's own expansion biases the measured ratio to
    // 4 (1 - O(dt^2)) from below; 3.99 is order 2 to well inside that bias,
    // while a genuine first-order defect would read about 2.
    const bool pass = ra.status == RunStatus::completed && rb.status == RunStatus::completed &&
                      std::abs(rho_a) <= 1e-6 * e0 && ratio >= 3.99 &&
                      ra.max_e_half_increase <= 1e-12 * e0;
    const double secs = std::chrono::duration<double>(clk::now() - t0).count();
    report(4, pass, "H^1/2 balance: residual, halving ratio, E_half monotone (mNS, n=32)",
           "|rho|/E0=" + fmt(std::abs(rho_a) / e0) + " tol 1e-6, ratio=" +
               std::to_string(ratio) + " >= 3.99, max E_half rise=" +
               fmt(ra.max_e_half_increase / e0) + " tol 1e-12",
           secs);
}

// --- criterion 5: rotational vs convective NS agreement -------------------
void criterion_5() {
    auto t0 = clk::now();
    const Grid g = Grid::make(32);
    double worst_term = 0.0;
    for (int i = 0; i < 50; ++i) {
        SpectralVectorField u = random_hermitian_field(g, 1000u + i, true);
        SpectralVectorField rot = nonlinear_ns_rotational(u);
        SpectralVectorField adv = nonlinear_ns_convective(u);
        worst_term = std::max(worst_term, rel_l2(adv, rot));
    }

    const SpectralVectorField v0 = random_solenoidal(g, 4242u, 2, 1.0);
    IntegrationResult rr = integrate_simple(ModelKind::ns_rotational, v0, 0.5, 1e-3, 1 << 20);
    IntegrationResult rc = integrate_simple(ModelKind::ns_convective, v0, 0.5, 1e-3, 1 << 20);
    const double run_diff = rel_l2(rc.state, rr.state);

    const double secs = std::chrono::duration<double>(clk::now() - t0).count();
    const bool pass = worst_term <= 1e-12 && run_diff <= 1e-10 &&
                      rr.status == RunStatus::completed && rc.status == RunStatus::completed;
    report(5, pass, "NS form equivalence: 50 random fields and full runs (n=32, T=0.5)",
           "worst term diff=" + fmt(worst_term) + " tol 1e-12, run diff=" + fmt(run_diff) +
               " tol 1e-10",
           secs);
}

// --- criterion 6: Hall energy law ------------------------------------------
void criterion_6() {
    auto t0 = clk::now();
    const Grid g = Grid::make(32);
    const SpectralVectorField b0 = taylor_green(g, 1.0);
    IntegrationResult ra = integrate_simple(ModelKind::hall, b0, 0.25, 2e-3, 1 << 20);
    IntegrationResult rb = integrate_simple(ModelKind::hall, b0, 0.25, 1e-3, 1 << 20);
    const double rho_a = ra.records.back().resid_en;  // L2 balance residual for Hall runs
    const double rho_b = rb.records.back().resid_en;
    const double order = std::log2(std::abs(rho_a) / std::abs(rho_b));
    // Same trapezoid-bias allowance as criterion 4: order 2 shows up as
    // 2 - O(dt^2), a real defect as something near 1.
    const bool pass = ra.status == RunStatus::completed && rb.status == RunStatus::completed &&
                      ra.max_cancel <= 1e-12 && order >= 1.996;
    const double secs = std::chrono::duration<double>(clk::now() - t0).count();
    report(6, pass, "Hall energy law: per-step <N,B> and L2 balance order (n=32, T=0.25)",
           "max cancel=" + fmt(ra.max_cancel) + " tol 1e-12, observed order=" +
               std::to_string(order) + " >= 1.996",
           secs);
}

// --- criterion 7: scaling symmetry ----------------------------------------
void criterion_7() {
    auto t0 = clk::now();
    const Grid g = Grid::make(64);
    const int band = 5;

    SpectralVectorField v0 = random_solenoidal(g, 2024u, 2, 1.0);
    const std::size_t m = g.point_count();
    for_each_mode(g, [&](std::size_t idx, int k1, int k2, int k3) {
        if (std::abs(k1) > band || std::abs(k2) > band || std::abs(k3) > band) {
            v0.data[idx] = v0.data[idx + m] = v0.data[idx + 2 * m] = cplx{0.0, 0.0};
        }
    });

    // w0(x) = 2 v0(2x): mode k of v0 lands on mode 2k with twice the amplitude.
    SpectralVectorField w0(g);
    for_each_mode(g, [&](std::size_t idx, int k1, int k2, int k3) {
        if (std::abs(k1) > band || std::abs(k2) > band || std::abs(k3) > band) return;
        const cplx a1 = v0.data[idx], a2 = v0.data[idx + m], a3 = v0.data[idx + 2 * m];
        if (std::abs(a1) == 0.0 && std::abs(a2) == 0.0 && std::abs(a3) == 0.0) return;
        const std::size_t target =
            g.linear_index(g.index_of(2 * k1), g.index_of(2 * k2), g.index_of(2 * k3));
        w0.data[target] = 2.0 * a1;
        w0.data[target + m] = 2.0 * a2;
        w0.data[target + 2 * m] = 2.0 * a3;
    });

    IntegrationResult base = integrate_simple(ModelKind::mns, v0, 0.4, 4e-3, 1 << 20);
    IntegrationResult scaledrun = integrate_simple(ModelKind::mns, w0, 0.1, 1e-3, 1 << 20);

    // expected scaled state at t = 0.1 from the base state at t = 0.4
    SpectralVectorField expect(g);
    for_each_mode(g, [&](std::size_t idx, int k1, int k2, int k3) {
        if (std::abs(k1) > 16 || std::abs(k2) > 16 || std::abs(k3) > 16) return;
        const std::size_t target =
            g.linear_index(g.index_of(2 * k1), g.index_of(2 * k2), g.index_of(2 * k3));
        expect.data[target] = 2.0 * base.state.data[idx];
        expect.data[target + m] = 2.0 * base.state.data[idx + m];
        expect.data[target + 2 * m] = 2.0 * base.state.data[idx + 2 * m];
    });

    const double err = rel_l2(scaledrun.state, expect);
    const double secs = std::chrono::duration<double>(clk::now() - t0).count();
    const bool pass = base.status == RunStatus::completed &&
                      scaledrun.status == RunStatus::completed && err <= 1e-7;
    report(7, pass, "scaling symmetry: 2v(2x,4t) vs the rescaled run (mNS, n=64, band 5)",
           "rel err=" + fmt(err) + " tol 1e-7", secs);
}

// --- criterion 8: solenoidality and zero mean across every run -------------
void criterion_8() {
    const bool pass = g_max_div_rel <= 1e-12 && g_max_zero_mode == 0.0;
    report(8, pass, "div_max <= 1e-12 ||v|| and zero mean across every run above",
           "max div/||v||=" + fmt(g_max_div_rel) + ", max |u_0|=" + fmt(g_max_zero_mode), 0.0);
}

// --- criterion 9: integrator self-convergence through the CLI --------------
void criterion_9() {
    auto t0 = clk::now();
#ifndef MNS_CLI_PATH
    report(9, false, "convergence CLI", "MNS_CLI_PATH not configured", 0.0);
    return;
#else
    const fs::path cfg_path = g_tmp / "convergence.cfg";
    const fs::path out_path = g_tmp / "convergence.out";
    {
        std::ofstream cfg(cfg_path);
        cfg << "model=mns\nn=32\nT=0.2\ndt=0.02\nic=taylor_green:2.0\noutput_dir="
            << (g_tmp / "conv_run").string() << "\n";
    }
    const std::string cmd = std::string("\"") + MNS_CLI_PATH + "\" convergence --config " +
                            cfg_path.string() + " --halvings 3 > " + out_path.string() + " 2>&1";
    const int status = std::system(cmd.c_str());

    double final_order = 0.0;
    {
        std::ifstream in(out_path);
        std::string line;
        while (std::getline(in, line)) {
            const std::string tag = "final observed order: ";
            if (line.rfind(tag, 0) == 0) final_order = std::strtod(line.c_str() + tag.size(), nullptr);
        }
    }
    const double secs = std::chrono::duration<double>(clk::now() - t0).count();
    const bool pass = status == 0 && final_order >= 3.5;
    report(9, pass, "self-convergence via `convergence --halvings 3` (mNS Taylor-Green)",
           "final observed order=" + std::to_string(final_order) + " >= 3.5", secs);
#endif
}

// --- criterion 10: long-horizon smoke test with bound reporting -------------
void criterion_10() {
    auto t0 = clk::now();
    const Grid g = Grid::make(64);
    const SpectralVectorField v0 = random_solenoidal(g, 777u, 2, 5.0);

    IntegrateOptions opts;
    opts.controls.cfl = 0.4;
    opts.controls.dt_max = 0.05;
    opts.controls.T = 10.0;
    opts.diag_every = 5;
    opts.sobolev_m = 3;
    opts.bound_c = 1.0;
    IntegrationResult r = integrate(ModelKind::mns, v0, opts);
    pool_run_invariants(r);

    bool hm_ok = r.status == RunStatus::completed && !r.records.empty();
    double hm_max = 0.0;
    const double hm0 = hm_ok ? r.records.front().hm : 0.0;
    bool bound_finite = hm_ok;
    for (const auto& rec : r.records) {
        if (!std::isfinite(rec.hm)) hm_ok = false;
        hm_max = std::max(hm_max, rec.hm);
        if (!std::isfinite(rec.bound_rhs)) bound_finite = false;
    }
    hm_ok = hm_ok && hm_max <= 10.0 * hm0;

    bool monitors_finite = false;
    if (r.status == RunStatus::completed) {
        MonitorReport rep = estimate_monitors(r.records, 1.0, 3);
        monitors_finite = true;
        for (const auto& s : rep.series)
            if (s.name == "hm_envelope")
                for (const auto& q : s.samples)
                    monitors_finite = monitors_finite && std::isfinite(q.log10_rhs);
    }

    const double secs = std::chrono::duration<double>(clk::now() - t0).count();
    const bool pass = hm_ok && bound_finite && monitors_finite;
    report(10, pass, "long run completes: mNS, ||v0||=5, n=64, T=10, H^3 bounded, bound report finite",
           "steps=" + std::to_string(r.steps) + ", max hm=" + fmt(hm_max) + " (hm0=" + fmt(hm0) +
               "), bound_rhs finite=" + (bound_finite ? "yes" : "no"),
           secs);
}

// --- criterion 11: I/O contracts -------------------------------------------
void criterion_11() {
    auto t0 = clk::now();
    bool pass = true;
    std::string what = "ok";

    try {
        // snapshot round trip, bitwise
        const Grid g = Grid::make(16);
        PhysicalVectorField p = inverse_transform(random_solenoidal(g, 99u, 3, 1.0));
        const std::string snap = (g_tmp / "c11.bin").string();
        write_snapshot(snap, p, 0.5, ModelKind::mns, RieszSign::positive);
        SnapshotData back = read_snapshot(snap);
        for (std::size_t i = 0; i < p.data.size(); ++i)
            if (back.field.data[i] != p.data[i]) pass = false;
        if (!pass) what = "snapshot round trip not bitwise";

        // restart equivalence, serial fixed dt
        const std::string base =
            "model=mns\nn=16\nT=0.2\ndt=1e-3\nic=taylor_green:1.0\ndiag_every=20\nsnapshot_every=100\n";
        RunConfig full = parse_config(base + "output_dir=" + (g_tmp / "full").string());
        RunResult rf = run(full);
        RunConfig resumed = parse_config(base + "output_dir=" + (g_tmp / "resumed").string() +
                                         "\nrestart=" + (g_tmp / "full" / "snapshot_step_100.bin").string());
        RunResult rr = run(resumed);
        auto slurp = [](const fs::path& p2) {
            std::ifstream in(p2, std::ios::binary);
            return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        };
        auto last_line = [](const std::string& text) {
            const auto end = text.find_last_not_of('\n');
            const auto start = text.find_last_of('\n', end);
            return text.substr(start + 1, end - start);
        };
        if (rf.exit_code() != 0 || rr.exit_code() != 0) {
            pass = false;
            what = "restart runs failed";
        } else if (last_line(slurp(g_tmp / "full" / "diagnostics.csv")) !=
                   last_line(slurp(g_tmp / "resumed" / "diagnostics.csv"))) {
            pass = false;
            what = "restart diagnostics rows differ";
        } else if (slurp(g_tmp / "full" / "snapshot_final.bin") !=
                   slurp(g_tmp / "resumed" / "snapshot_final.bin")) {
            pass = false;
            what = "restart final snapshots differ";
        }

        // csv schema
        std::ifstream csv(g_tmp / "full" / "diagnostics.csv");
        std::string header;
        std::getline(csv, header);
        if (header != csv_header) {
            pass = false;
            what = "csv schema mismatch: " + header;
        }
    } catch (const std::exception& e) {
        pass = false;
        what = e.what();
    }

    const double secs = std::chrono::duration<double>(clk::now() - t0).count();
    report(11, pass, "I/O: bitwise snapshot round trip, exact restart, csv schema", what, secs);
}

} // namespace

int main() {
    g_tmp = fs::temp_directory_path() / ("mns_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(g_tmp);

    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_11();

    std::error_code ec;
    fs::remove_all(g_tmp, ec);

    if (g_failures == 0) {
        std::printf("acceptance: all 11 criteria passed\n");
        return 0;
    }
    std::printf("acceptance: %d criteria FAILED\n", g_failures);
    return 1;
}
