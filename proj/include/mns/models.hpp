#pragma once

#include "mns/common.hpp"
#include "mns/field.hpp"
#include "mns/multipliers.hpp"
#include "mns/spectral_ops.hpp"

#include <optional>
#include <string>

namespace mns {

/// Which right-hand side is integrated; the evolution is always
/// d u_hat/dt = N_hat(u) - |k|^2 u_hat.
enum class ModelKind {
    mns,            // v_t + R x (v x omega) = Lap v
    ns_rotational,  // v_t = P(v x omega) + Lap v
    ns_convective,  // v_t = -P(v . grad v) + Lap v
    hall,           // B_t + curl(B x curl B) = Lap B
};

inline const char* model_name(ModelKind m) {
    switch (m) {
        case ModelKind::mns: return "mns";
        case ModelKind::ns_rotational: return "ns_rotational";
        case ModelKind::ns_convective: return "ns_convective";
        case ModelKind::hall: return "hall";
    }
    throw error("model_name: unknown model");
}

inline ModelKind model_from_name(const std::string& s) {
    if (s == "mns") return ModelKind::mns;
    if (s == "ns_rotational") return ModelKind::ns_rotational;
    if (s == "ns_convective") return ModelKind::ns_convective;
    if (s == "hall") return ModelKind::hall;
    throw error("unknown model '" + s + "' (expected mns, ns_rotational, ns_convective or hall)");
}

inline std::uint32_t model_id(ModelKind m) { return static_cast<std::uint32_t>(m); }

inline ModelKind model_from_id(std::uint32_t id) {
    if (id > 3) throw error("snapshot carries unknown model id " + std::to_string(id));
    return static_cast<ModelKind>(id);
}

/// Nonlinear term evaluation, together with the pointwise state statistics
/// that fall out for free (the state has to pass through physical space
/// anyway). `state_physical` is filled only on request.
struct NonlinearResult {
    SpectralVectorField term;
    double max_point_speed = 0.0;
    std::optional<PhysicalVectorField> state_physical;
};

/// Preallocated temporaries for repeated nonlinear evaluations. The stepper
/// owns one per run; the convenience API makes a transient one per call.
struct NonlinearScratch {
    Grid grid;
    SpectralVectorField spec_tmp;                  // curl / derivative holder
    PhysicalVectorField phys_state, phys_tmp, phys_prod;
    std::array<SpectralVectorField, 3> dj;         // convective form only
    std::array<PhysicalVectorField, 3> grad;
    bool base_ready = false;
    bool grad_ready = false;

    void ensure(const Grid& g, ModelKind model) {
        if (!base_ready || grid != g) {
            grid = g;
            spec_tmp = SpectralVectorField(g);
            phys_state = PhysicalVectorField(g);
            phys_tmp = PhysicalVectorField(g);
            phys_prod = PhysicalVectorField(g);
            base_ready = true;
            grad_ready = false;
        }
        if (model == ModelKind::ns_convective && !grad_ready) {
            for (int j = 0; j < 3; ++j) {
                dj[j] = SpectralVectorField(g);
                grad[j] = PhysicalVectorField(g);
            }
            grad_ready = true;
        }
    }
};

namespace detail {

inline void require_solenoidal_input(const SpectralVectorField& u, const char* where) {
    const double dmax = divergence_max(u);
    const double scale = l2_norm(u);
    if (dmax > 1e-6 * scale && dmax > 1e-300)
        throw error(std::string(where) + ": input is not solenoidal (max |k.u_k| = " +
                    std::to_string(dmax) + ", ||u|| = " + std::to_string(scale) + ")");
}

/// Unvalidated evaluation writing N(u) into `out`. Transforms run two real
/// fields per complex FFT; the quadratic product is dealiased before the
/// final multiplier. The integrator uses this directly for the inner
/// Runge-Kutta stages, whose inputs are solenoidal by construction.
inline void nonlinear_term_into(ModelKind model, const SpectralVectorField& u, RieszSign sigma,
                                SpectralVectorField& out, double& max_point_speed,
                                NonlinearScratch& ws) {
    const Grid& g = u.grid;
    ws.ensure(g, model);
    if (out.grid != g) out = SpectralVectorField(g);

    switch (model) {
        case ModelKind::mns:
        case ModelKind::ns_rotational:
        case ModelKind::hall: {
            curl_into(u, ws.spec_tmp);
            inverse_components(
                g,
                {u.comp(0).data(), u.comp(1).data(), u.comp(2).data(), ws.spec_tmp.comp(0).data(),
                 ws.spec_tmp.comp(1).data(), ws.spec_tmp.comp(2).data()},
                {ws.phys_state.comp(0).data(), ws.phys_state.comp(1).data(),
                 ws.phys_state.comp(2).data(), ws.phys_tmp.comp(0).data(),
                 ws.phys_tmp.comp(1).data(), ws.phys_tmp.comp(2).data()});
            max_point_speed = max_point_magnitude(ws.phys_state);

            cross_into(ws.phys_state, ws.phys_tmp, ws.phys_prod);
            forward_components(g,
                               {ws.phys_prod.comp(0).data(), ws.phys_prod.comp(1).data(),
                                ws.phys_prod.comp(2).data()},
                               {out.comp(0).data(), out.comp(1).data(), out.comp(2).data()});
            dealias_inplace(out);

            if (model == ModelKind::mns)
                minus_riesz_cross_inplace(out, sigma);
            else if (model == ModelKind::ns_rotational)
                leray_project_inplace(out);
            else
                minus_curl_inplace(out);
            break;
        }
        case ModelKind::ns_convective: {
            std::vector<const cplx*> spec = {u.comp(0).data(), u.comp(1).data(), u.comp(2).data()};
            std::vector<double*> phys = {ws.phys_state.comp(0).data(), ws.phys_state.comp(1).data(),
                                         ws.phys_state.comp(2).data()};
            for (int j = 0; j < 3; ++j) {
                partial_into(u, j, ws.dj[j]);
                for (int c = 0; c < 3; ++c) {
                    spec.push_back(ws.dj[j].comp(c).data());
                    phys.push_back(ws.grad[j].comp(c).data());
                }
            }
            inverse_components(g, spec, phys);
            max_point_speed = max_point_magnitude(ws.phys_state);

            advective_into(ws.phys_state, ws.grad, ws.phys_prod);
            forward_components(g,
                               {ws.phys_prod.comp(0).data(), ws.phys_prod.comp(1).data(),
                                ws.phys_prod.comp(2).data()},
                               {out.comp(0).data(), out.comp(1).data(), out.comp(2).data()});
            dealias_inplace(out);
            leray_project_inplace(out);
            for (auto& z : out.data) z = -z;
            break;
        }
        default:
            throw error("nonlinear_term: unknown model");
    }
}

} // namespace detail

/// N(u) for the selected model. Products are evaluated pseudo-spectrally and
/// the quadratic product is dealiased before any multiplier is applied, which
/// is what makes the discrete energy cancellations exact.
inline NonlinearResult nonlinear_term(ModelKind model, const SpectralVectorField& u,
                                      RieszSign sigma = RieszSign::positive,
                                      bool want_physical = false) {
    detail::require_solenoidal_input(u, "nonlinear_term");
    NonlinearScratch ws;
    NonlinearResult res;
    res.term = SpectralVectorField(u.grid);
    detail::nonlinear_term_into(model, u, sigma, res.term, res.max_point_speed, ws);
    if (want_physical) res.state_physical = std::move(ws.phys_state);
    return res;
}

inline SpectralVectorField nonlinear_mns(const SpectralVectorField& v,
                                         RieszSign sigma = RieszSign::positive) {
    return nonlinear_term(ModelKind::mns, v, sigma).term;
}

inline SpectralVectorField nonlinear_ns_rotational(const SpectralVectorField& v) {
    return nonlinear_term(ModelKind::ns_rotational, v).term;
}

inline SpectralVectorField nonlinear_ns_convective(const SpectralVectorField& v) {
    return nonlinear_term(ModelKind::ns_convective, v).term;
}

inline SpectralVectorField nonlinear_hall(const SpectralVectorField& b) {
    return nonlinear_term(ModelKind::hall, b).term;
}

/// Dispatch used by the time integrator; the stiff -|k|^2 part is handled
/// exactly by the integrating factor, never here.
inline SpectralVectorField rhs_nonstiff(ModelKind model, const SpectralVectorField& u,
                                        RieszSign sigma = RieszSign::positive) {
    return nonlinear_term(model, u, sigma).term;
}

} // namespace mns
