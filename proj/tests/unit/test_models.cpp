#include <doctest.h>

#include "test_support.hpp"

using namespace mns;

namespace {
const ModelKind all_models[4] = {ModelKind::mns, ModelKind::ns_rotational,
                                 ModelKind::ns_convective, ModelKind::hall};
}

TEST_CASE("every nonlinearity vanishes on Beltrami (ABC) data") {
    const Grid g = Grid::make(16);
    SpectralVectorField v = abc_flow(g, 1.0, 1.0, 1.0);
    const double scale = l2_norm(v);
    for (ModelKind m : all_models) {
        SpectralVectorField n = nonlinear_term(m, v).term;
        CHECK(l2_norm(n) <= 1e-14 * scale);
    }
}

TEST_CASE("every nonlinearity maps zero to zero") {
    const Grid g = Grid::make(8);
    SpectralVectorField z(g);
    for (ModelKind m : all_models) {
        SpectralVectorField n = nonlinear_term(m, z).term;
        CHECK(l2_norm(n) == 0.0);
    }
}

TEST_CASE("mNS cancellation <N, Lambda v> vanishes on Taylor-Green at n=32") {
    const Grid g = Grid::make(32);
    SpectralVectorField v = taylor_green(g, 1.0);
    NonlinearResult r = nonlinear_term(ModelKind::mns, v);
    SpectralVectorField lv = lambda_pow(v, 1.0);
    const double ip = std::abs(l2_inner(r.term, lv));
    CHECK(ip <= 1e-12 * l2_norm(r.term) * l2_norm(lv));
    CHECK(l2_norm(r.term) > 0.0);  // the cancellation is not vacuous
}

TEST_CASE("NS rotational cancellation <N, v> vanishes on Taylor-Green at n=32") {
    const Grid g = Grid::make(32);
    SpectralVectorField v = taylor_green(g, 1.0);
    SpectralVectorField n = nonlinear_ns_rotational(v);
    CHECK(std::abs(l2_inner(n, v)) <= 1e-12 * l2_norm(n) * l2_norm(v));
}

TEST_CASE("Hall cancellation <N, B> vanishes on Taylor-Green at n=32") {
    const Grid g = Grid::make(32);
    SpectralVectorField b = taylor_green(g, 1.0);
    SpectralVectorField n = nonlinear_hall(b);
    CHECK(std::abs(l2_inner(n, b)) <= 1e-12 * l2_norm(n) * l2_norm(b));
}

TEST_CASE("curl moves across the inner product exactly (Hall mechanism)") {
    const Grid g = Grid::make(16);
    SpectralVectorField x = random_hermitian_field(g, 40u);
    SpectralVectorField b = random_hermitian_field(g, 41u);
    const double lhs = l2_inner(curl_vec(x), b);
    const double rhs = l2_inner(x, curl_vec(b));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13));
}

TEST_CASE("a purely gradient cross product is annihilated by the projection") {
    // v = (sin y, 0, 0): omega = (0, 0, -cos y), v x omega = 0.5 grad(sin^2 y).
    const Grid g = Grid::make(8);
    SpectralVectorField v(g);
    const std::size_t m = g.point_count();
    v.data[g.linear_index(0, g.index_of(1), 0)] = cplx{0.0, -0.5};
    v.data[g.linear_index(0, g.index_of(-1), 0)] = cplx{0.0, 0.5};
    (void)m;
    SpectralVectorField n = nonlinear_ns_rotational(v);
    CHECK(l2_norm(n) <= 1e-14 * l2_norm(v));
}

TEST_CASE("rotational and convective NS forms agree on dealiased solenoidal fields") {
    const Grid g = Grid::make(32);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        SpectralVectorField v = random_hermitian_field(g, seed, true);
        SpectralVectorField rot = nonlinear_ns_rotational(v);
        SpectralVectorField adv = nonlinear_ns_convective(v);
        CHECK(testsup::rel_l2_diff(adv, rot) < 1e-12);
    }
}

TEST_CASE("every model output is solenoidal, dealiased and mean-free") {
    const Grid g = Grid::make(16);
    SpectralVectorField v = random_hermitian_field(g, 123u, true);
    for (ModelKind m : all_models) {
        SpectralVectorField n = nonlinear_term(m, v).term;
        CHECK(divergence_max(n) <= 1e-13 * std::max(1e-300, l2_norm(n)));
        CHECK(zero_mode_magnitude(n) == 0.0);
        bool clean = true;
        for_each_mode(g, [&](std::size_t idx, int k1, int k2, int k3) {
            if (!g.in_dealias_band(k1, k2, k3)) {
                const std::size_t mm = g.point_count();
                if (std::abs(n.data[idx]) != 0.0 || std::abs(n.data[idx + mm]) != 0.0 ||
                    std::abs(n.data[idx + 2 * mm]) != 0.0)
                    clean = false;
            }
        });
        CHECK(clean);
    }
}

TEST_CASE("non-solenoidal input is rejected") {
    const Grid g = Grid::make(16);
    SpectralScalarField f(g);
    {
        SpectralVectorField tmp = random_hermitian_field(g, 9u);
        std::copy(tmp.comp(0).begin(), tmp.comp(0).end(), f.c.begin());
    }
    SpectralVectorField bad = gradient(f);
    for (ModelKind m : all_models)
        CHECK_THROWS_WITH_AS(nonlinear_term(m, bad), doctest::Contains("solenoidal"), error);
}

TEST_CASE("rhs_nonstiff dispatches to the model nonlinearity") {
    const Grid g = Grid::make(16);
    SpectralVectorField v = random_hermitian_field(g, 5u, true);
    for (ModelKind m : all_models) {
        SpectralVectorField a = rhs_nonstiff(m, v);
        SpectralVectorField b = nonlinear_term(m, v).term;
        CHECK(testsup::rel_l2_diff(a, b) == 0.0);
    }
}

TEST_CASE("model names round-trip and unknown names are rejected") {
    for (ModelKind m : all_models) CHECK(model_from_name(model_name(m)) == m);
    CHECK_THROWS_WITH_AS(model_from_name("navier"), doctest::Contains("unknown model"), error);
    CHECK_THROWS_AS(model_from_id(17u), error);
}

TEST_CASE("nonlinear_term can capture the physical state it transformed") {
    const Grid g = Grid::make(16);
    SpectralVectorField v = taylor_green(g, 1.0);
    NonlinearResult r = nonlinear_term(ModelKind::mns, v, RieszSign::positive, true);
    REQUIRE(r.state_physical.has_value());
    PhysicalVectorField direct = inverse_transform(v);
    CHECK(testsup::max_abs_diff_physical(*r.state_physical, direct) < 1e-14);
    CHECK(r.max_point_speed == doctest::Approx(max_point_magnitude(direct)).epsilon(1e-14));
}

TEST_CASE("mNS cancellation holds for the opposite Riesz sign as well") {
    const Grid g = Grid::make(32);
    SpectralVectorField v = taylor_green(g, 1.0);
    CHECK(cancellation_check(ModelKind::mns, v, RieszSign::negative) <= 1e-12);
}
