#pragma once

#include "mns/common.hpp"
#include "mns/diagnostics.hpp"
#include "mns/field.hpp"
#include "mns/models.hpp"
#include "mns/multipliers.hpp"
#include "mns/spectral_ops.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace mns {

/// Step-size policy: either a fixed dt or an advective CFL number with a cap.
/// The viscous part needs no constraint; it is integrated exactly.
struct StepControls {
    std::optional<double> dt;
    double cfl = 0.4;
    double dt_max = 0.1;
    double T = 1.0;
    double blowup_threshold = 1e6;

    void validate() const {
        if (!(T > 0.0)) throw error("StepControls: T must be > 0");
        if (dt) {
            if (!(*dt > 0.0)) throw error("StepControls: dt must be > 0");
        } else {
            if (!(cfl > 0.0 && cfl <= 1.0)) throw error("StepControls: cfl must lie in (0, 1]");
            if (!(dt_max > 0.0)) throw error("StepControls: dt_max must be > 0");
        }
        if (!(blowup_threshold > 0.0)) throw error("StepControls: blowup_threshold must be > 0");
    }
};

inline double choose_dt_from_speed(double max_speed, int n, const StepControls& controls) {
    if (controls.dt) return *controls.dt;
    if (max_speed == 0.0) return controls.dt_max;
    const double dx = two_pi / static_cast<double>(n);
    return std::min(controls.dt_max, controls.cfl * dx / max_speed);
}

/// dt = min(dt_max, cfl dx / max_x |v(x)|); needs one inverse transform.
inline double choose_dt(const SpectralVectorField& u, const StepControls& controls) {
    controls.validate();
    if (controls.dt) return *controls.dt;
    const double speed = max_point_magnitude(inverse_transform(u));
    if (!std::isfinite(speed)) throw error("choose_dt: state is not finite");
    return choose_dt_from_speed(speed, u.grid.n, controls);
}

struct BlowUpInfo {
    double t = 0.0;
    std::int64_t step = 0;
    double max_speed = 0.0;
    double l2_norm = 0.0;
};

class BlowUpError : public error {
public:
    BlowUpInfo info;
    explicit BlowUpError(const BlowUpInfo& i)
        : error("blow-up detected at t = " + std::to_string(i.t) + " (max |v| = " +
                std::to_string(i.max_speed) + ", ||v|| = " + std::to_string(i.l2_norm) + ")"),
          info(i) {}
};

namespace detail {

/// Fused single-pass monitors evaluated on every accepted step.
struct StepMonitors {
    double l2_sq = 0.0;       // ||u||^2
    double half_sq = 0.0;     // ||Lambda^{1/2} u||^2
    double grad_sq = 0.0;     // ||Lambda u||^2
    double g3half_sq = 0.0;   // ||Lambda^{3/2} u||^2
    double div_max = 0.0;
    double zero_mode = 0.0;
};

inline StepMonitors compute_step_monitors(const SpectralVectorField& u) {
    const std::size_t m = u.grid.point_count();
    CompensatedSum s0, s1, s2, s3;
    double div_best = 0.0;
    for_each_mode(u.grid, [&](std::size_t idx, int k1, int k2, int k3) {
        const cplx u1 = u.data[idx], u2 = u.data[idx + m], u3 = u.data[idx + 2 * m];
        const double e = std::norm(u1) + std::norm(u2) + std::norm(u3);
        const double k2sum = static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2 +
                             static_cast<double>(k3) * k3;
        const double kmag = std::sqrt(k2sum);
        s0.add(e);
        s1.add(kmag * e);
        s2.add(k2sum * e);
        s3.add(k2sum * kmag * e);
        const double dv = std::abs(static_cast<double>(k1) * u1 + static_cast<double>(k2) * u2 +
                                   static_cast<double>(k3) * u3);
        if (dv > div_best) div_best = dv;
    });
    const double vol = std::pow(two_pi, 3);
    StepMonitors mon;
    mon.l2_sq = vol * s0.value();
    mon.half_sq = vol * s1.value();
    mon.grad_sq = vol * s2.value();
    mon.g3half_sq = vol * s3.value();
    mon.div_max = div_best;
    mon.zero_mode = zero_mode_magnitude(u);
    return mon;
}

inline void apply_mode_factor(SpectralVectorField& u, const std::vector<double>& f) {
    const std::size_t m = u.grid.point_count();
    for (std::size_t i = 0; i < m; ++i) {
        u.data[i] *= f[i];
        u.data[i + m] *= f[i];
        u.data[i + 2 * m] *= f[i];
    }
}

inline void assign(SpectralVectorField& dst, const SpectralVectorField& src) {
    dst.grid = src.grid;
    dst.data.assign(src.data.begin(), src.data.end());
}

/// dst = f .* src (mode factor applied per component).
inline void assign_with_factor(SpectralVectorField& dst, const SpectralVectorField& src,
                               const std::vector<double>& f) {
    dst.grid = src.grid;
    dst.data.resize(src.data.size());
    const std::size_t m = src.grid.point_count();
    for (std::size_t i = 0; i < m; ++i) {
        dst.data[i] = f[i] * src.data[i];
        dst.data[i + m] = f[i] * src.data[i + m];
        dst.data[i + 2 * m] = f[i] * src.data[i + 2 * m];
    }
}

/// dst += a * (f .* x).
inline void axpy_with_factor(SpectralVectorField& dst, double a, const SpectralVectorField& x,
                             const std::vector<double>& f) {
    const std::size_t m = x.grid.point_count();
    for (std::size_t i = 0; i < m; ++i) {
        dst.data[i] += a * (f[i] * x.data[i]);
        dst.data[i + m] += a * (f[i] * x.data[i + m]);
        dst.data[i + 2 * m] += a * (f[i] * x.data[i + 2 * m]);
    }
}

} // namespace detail

/// Integrating-factor RK4 on d u_hat/dt = N_hat(u) - |k|^2 u_hat. The heat
/// semigroup is applied exactly through precomputed mode factors, so a run
/// with N = 0 decays exactly and no stiffness restriction enters the step
/// size. Heat tables are cached per dt.
class IfRk4Stepper {
public:
    IfRk4Stepper(const Grid& grid, ModelKind model, RieszSign sigma = RieszSign::positive)
        : grid_(grid), model_(model), sigma_(sigma) {}

    ModelKind model() const { return model_; }
    RieszSign sigma() const { return sigma_; }

    /// One step of size dt from u. If `stage1` is supplied it must be
    /// nonlinear_term(model, u) evaluated beforehand (the integrate loop does
    /// this to reuse it for monitors); otherwise it is computed here.
    ///
    /// Stage and scratch fields are preallocated members: a step performs no
    /// large allocations. Inner stage states are linear combinations of
    /// solenoidal fields under diagonal factors, so they stay solenoidal by
    /// construction and use the unvalidated evaluation path.
    SpectralVectorField step(const SpectralVectorField& u, double dt,
                             const SpectralVectorField* stage1 = nullptr) {
        if (!(dt >= 0.0)) throw error("step_ifrk4: dt must be >= 0");
        ensure_tables(dt);
        double speed = 0.0;

        const SpectralVectorField* n1 = stage1;
        if (!n1) {
            mns::detail::nonlinear_term_into(model_, u, sigma_, n1_, speed, ws_);
            n1 = &n1_;
        }

        // u_a = E2 (u + dt/2 N1)
        detail::assign(stage_, u);
        axpy(stage_, 0.5 * dt, *n1);
        detail::apply_mode_factor(stage_, e_half_);
        mns::detail::nonlinear_term_into(model_, stage_, sigma_, n2_, speed, ws_);

        // u_b = E2 u + dt/2 N2
        detail::assign_with_factor(stage_, u, e_half_);
        axpy(stage_, 0.5 * dt, n2_);
        mns::detail::nonlinear_term_into(model_, stage_, sigma_, n3_, speed, ws_);

        // u_c = E u + dt E2 N3
        detail::assign_with_factor(stage_, u, e_full_);
        detail::axpy_with_factor(stage_, dt, n3_, e_half_);
        mns::detail::nonlinear_term_into(model_, stage_, sigma_, n4_, speed, ws_);

        // u' = E u + dt/6 (E N1 + 2 E2 N2 + 2 E2 N3 + N4)
        SpectralVectorField out;
        detail::assign_with_factor(out, u, e_full_);
        const double w = dt / 6.0;
        detail::axpy_with_factor(out, w, *n1, e_full_);
        detail::axpy_with_factor(out, 2.0 * w, n2_, e_half_);
        detail::axpy_with_factor(out, 2.0 * w, n3_, e_half_);
        axpy(out, w, n4_);

        dealias_inplace(out);
        leray_project_inplace(out);
        return out;
    }

    /// Evaluate N(u) into `out` with this stepper's scratch; returns the
    /// pointwise max speed and leaves the physical state in scratch for the
    /// caller to inspect (valid until the next evaluation).
    double eval_rhs(const SpectralVectorField& u, SpectralVectorField& out) {
        double speed = 0.0;
        mns::detail::nonlinear_term_into(model_, u, sigma_, out, speed, ws_);
        return speed;
    }

    const PhysicalVectorField& last_physical_state() const { return ws_.phys_state; }

private:
    void ensure_tables(double dt) {
        if (have_dt_ && dt == cached_dt_) return;
        const std::size_t m = grid_.point_count();
        e_half_.assign(m, 1.0);
        e_full_.assign(m, 1.0);
        for_each_mode(grid_, [&](std::size_t idx, int k1, int k2, int k3) {
            const double k2sum = static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2 +
                                 static_cast<double>(k3) * k3;
            const double h = std::exp(-k2sum * 0.5 * dt);
            e_half_[idx] = h;
            e_full_[idx] = h * h;
        });
        cached_dt_ = dt;
        have_dt_ = true;
    }

    Grid grid_;
    ModelKind model_;
    RieszSign sigma_;
    NonlinearScratch ws_;
    SpectralVectorField n1_, n2_, n3_, n4_, stage_;
    std::vector<double> e_half_, e_full_;
    double cached_dt_ = 0.0;
    bool have_dt_ = false;
};

/// One IFRK4 step as a standalone operation. Throws BlowUpError if the step
/// produces a non-finite state.
inline SpectralVectorField step_ifrk4(ModelKind model, const SpectralVectorField& u, double dt,
                                      RieszSign sigma = RieszSign::positive) {
    IfRk4Stepper stepper(u.grid, model, sigma);
    SpectralVectorField out = stepper.step(u, dt);
    if (!all_finite(out))
        throw BlowUpError(BlowUpInfo{0.0, 0, std::numeric_limits<double>::infinity(), l2_norm(u)});
    return out;
}

/// Per-step trapezoid accumulators and the record-to-record envelope state.
/// Serialized into the snapshot sidecar so a restart resumes bit-exactly.
struct DiagAccums {
    double d_half_cum = 0.0;   // int ||Lambda^{3/2} u||^2 ds
    double d_l2_cum = 0.0;     // int ||grad u||^2 ds
    double env_cum = 0.0;      // int (||u||_inf^2 + ||grad u||_inf^2) ds over records
    double prev_rec_t = 0.0;
    double prev_rec_env = 0.0; // envelope integrand at the previous record
    bool have_prev_rec = false;
};

/// Norms of the initial data the balance residuals and bounds refer back to.
struct InitialNorms {
    double e_l2_0 = 0.0;
    double e_half_0 = 0.0;
    double grad_sq_0 = 0.0;
    double hm_0 = 0.0;
    bool set = false;
};

struct ResumeInfo {
    double t0 = 0.0;
    std::int64_t step0 = 0;
    DiagAccums accums;
    InitialNorms initials;
    bool resuming = false;
};

enum class RunStatus { completed, blowup };

struct IntegrateOptions {
    StepControls controls;
    std::int64_t diag_every = 1;
    std::int64_t snapshot_every = 0;  // 0: no periodic snapshots
    int sobolev_m = 3;
    double bound_c = 1.0;
    RieszSign sigma = RieszSign::positive;
    std::function<void(const DiagnosticsRecord&)> on_record;
    // Invoked after a snapshot-cadence step completes. The callback persists
    // the state and must leave `u` in the exact form a restart would load
    // (see run.hpp: write_and_canonicalize).
    std::function<void(SpectralVectorField& u, double t, std::int64_t step, const DiagAccums&,
                       const InitialNorms&)>
        on_snapshot;
    ResumeInfo resume;
};

struct IntegrationResult {
    SpectralVectorField state;
    std::vector<DiagnosticsRecord> records;
    RunStatus status = RunStatus::completed;
    BlowUpInfo blowup;
    SpectralVectorField last_good;  // state preceding a blow-up step
    std::int64_t steps = 0;
    DiagAccums accums;
    InitialNorms initials;
    // Run-wide invariant monitors.
    double max_div_rel = 0.0;       // max over steps of div_max / ||u||
    double max_zero_mode = 0.0;
    double max_cancel = 0.0;        // max over steps of the normalized cancellation
    double max_e_half_increase = 0.0;  // max over steps of E_half(n+1) - E_half(n)
};

/// March u0 to T, invoking observers at the configured cadences. Diagnostics
/// rows are emitted at step 0, every diag_every-th step and at the final time;
/// the trapezoid accumulators advance every accepted step regardless.
inline IntegrationResult integrate(ModelKind model, const SpectralVectorField& u0,
                                   const IntegrateOptions& opts) {
    opts.controls.validate();
    if (opts.diag_every < 1) throw error("integrate: diag_every must be >= 1");
    if (opts.snapshot_every < 0) throw error("integrate: snapshot_every must be >= 0");

    const Grid grid = u0.grid;
    IfRk4Stepper stepper(grid, model, opts.sigma);

    IntegrationResult res;
    res.state = u0;
    dealias_inplace(res.state);
    mns::detail::require_solenoidal_input(res.state, "integrate");
    SpectralVectorField n1_store;

    double t = opts.resume.resuming ? opts.resume.t0 : 0.0;
    std::int64_t step = opts.resume.resuming ? opts.resume.step0 : 0;
    res.accums = opts.resume.accums;
    res.initials = opts.resume.initials;

    const double T = opts.controls.T;
    const double t_eps = 1e-12 * std::max(1.0, std::abs(T));

    bool suppress_record = opts.resume.resuming;
    double e_half_prev = std::numeric_limits<double>::quiet_NaN();
    // Monitors of the current state; carried over from the end of the
    // previous step when the state was not touched in between.
    std::optional<detail::StepMonitors> carried;

    while (true) {
        // Cheap spectral monitors come first: a non-finite state must be
        // flagged as blow-up before anything tries to transform it.
        detail::StepMonitors mon = carried ? *carried : detail::compute_step_monitors(res.state);
        const double l2 = std::sqrt(std::max(0.0, mon.l2_sq));
        if (!std::isfinite(mon.l2_sq)) {
            res.status = RunStatus::blowup;
            res.blowup = BlowUpInfo{t, step, std::numeric_limits<double>::quiet_NaN(), l2};
            res.steps = step;
            return res;
        }

        // Stage-1 evaluation doubles as the per-step probe: it materializes
        // the physical state (CFL, blow-up, L^p norms) and the nonlinear term
        // (cancellation monitor) before any output for this step is written.
        const double max_speed = stepper.eval_rhs(res.state, n1_store);

        if (!std::isfinite(max_speed) || max_speed > opts.controls.blowup_threshold) {
            res.status = RunStatus::blowup;
            res.blowup = BlowUpInfo{t, step, max_speed, l2};
            res.steps = step;
            return res;
        }

        if (!res.initials.set) {
            res.initials.e_l2_0 = 0.5 * mon.l2_sq;
            res.initials.e_half_0 = 0.5 * mon.half_sq;
            res.initials.grad_sq_0 = mon.grad_sq;
            res.initials.hm_0 = hm_norm(res.state, opts.sobolev_m);
            res.initials.set = true;
        }

        const double e_half = 0.5 * mon.half_sq;
        if (std::isfinite(e_half_prev))
            res.max_e_half_increase = std::max(res.max_e_half_increase, e_half - e_half_prev);
        e_half_prev = e_half;

        if (l2 > 0.0) res.max_div_rel = std::max(res.max_div_rel, mon.div_max / l2);
        res.max_zero_mode = std::max(res.max_zero_mode, mon.zero_mode);
        const double cancel = cancellation_value(model, n1_store, res.state);
        res.max_cancel = std::max(res.max_cancel, cancel);

        const bool final_step = (T - t) <= t_eps;
        const bool cadence_hit = (step % opts.diag_every) == 0;
        // A resumed run must still *compute* the record falling on the resume
        // step (the uninterrupted run advanced the envelope accumulators
        // there), it just must not emit the row a second time.
        if (cadence_hit || final_step) {
            DiagnosticsRecord rec;
            rec.t = t;
            rec.step = step;
            rec.e_l2 = 0.5 * mon.l2_sq;
            rec.e_half = e_half;
            rec.d_half_cum = res.accums.d_half_cum;
            rec.grad_sq = mon.grad_sq;
            rec.lap_sq = std::pow(sobolev_seminorm(res.state, 2.0), 2);
            rec.d3_sq = std::pow(sobolev_seminorm(res.state, 3.0), 2);
            rec.hm = hm_norm(res.state, opts.sobolev_m);
            rec.l3 = lp_norm(stepper.last_physical_state(), 3.0);
            rec.l6 = lp_norm(stepper.last_physical_state(), 6.0);
            rec.linf = max_speed;
            rec.grad_linf = grad_linf_norm(res.state);
            rec.cancel = cancel;
            rec.div_max = mon.div_max;
            if (model == ModelKind::mns)
                rec.resid_en = (rec.e_half + res.accums.d_half_cum) - res.initials.e_half_0;
            else
                rec.resid_en = (rec.e_l2 + res.accums.d_l2_cum) - res.initials.e_l2_0;
            {
                const double env = rec.linf * rec.linf + rec.grad_linf * rec.grad_linf;
                if (res.accums.have_prev_rec)
                    res.accums.env_cum +=
                        0.5 * (rec.t - res.accums.prev_rec_t) * (res.accums.prev_rec_env + env);
                res.accums.prev_rec_t = rec.t;
                res.accums.prev_rec_env = env;
                res.accums.have_prev_rec = true;
                const double hm0_sq = res.initials.hm_0 * res.initials.hm_0;
                rec.bound_rhs = (hm0_sq > 0.0 ? std::log10(hm0_sq) : 0.0) +
                                opts.bound_c * res.accums.env_cum / std::log(10.0);
            }
            {
                // ||D u||_{H^m}^2 for the H^m envelope monitor.
                const std::size_t mcount = grid.point_count();
                CompensatedSum acc;
                for_each_mode(grid, [&](std::size_t idx, int k1, int k2, int k3) {
                    const double k2sum = static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2 +
                                         static_cast<double>(k3) * k3;
                    double w = k2sum;
                    for (int p = 0; p < opts.sobolev_m; ++p) w *= 1.0 + k2sum;
                    acc.add(w * (std::norm(res.state.data[idx]) + std::norm(res.state.data[idx + mcount]) +
                                 std::norm(res.state.data[idx + 2 * mcount])));
                });
                rec.dv_hm_sq = std::pow(two_pi, 3) * acc.value();
            }
            if (!suppress_record) {
                res.records.push_back(rec);
                if (opts.on_record) opts.on_record(rec);
            }
        }
        suppress_record = false;

        if (final_step) break;

        double dt = choose_dt_from_speed(max_speed, grid.n, opts.controls);
        dt = std::min(dt, T - t);

        SpectralVectorField next = stepper.step(res.state, dt, &n1_store);

        detail::StepMonitors mon_next = detail::compute_step_monitors(next);
        res.accums.d_half_cum += 0.5 * dt * (mon.g3half_sq + mon_next.g3half_sq);
        res.accums.d_l2_cum += 0.5 * dt * (mon.grad_sq + mon_next.grad_sq);
        carried = mon_next;

        res.last_good = res.state;
        res.state = std::move(next);
        t += dt;
        ++step;

        if (opts.snapshot_every > 0 && (step % opts.snapshot_every) == 0 && (T - t) > t_eps) {
            if (opts.on_snapshot) {
                opts.on_snapshot(res.state, t, step, res.accums, res.initials);
                carried.reset();  // the callback may have canonicalized the state
            }
        }
    }

    res.steps = step;
    return res;
}

} // namespace mns
