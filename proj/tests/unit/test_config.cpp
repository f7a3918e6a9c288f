#include <doctest.h>

#include "test_support.hpp"

using namespace mns;

TEST_CASE("a minimal valid config parses with documented defaults") {
    RunConfig cfg = parse_config("model=mns\nn=64\nT=2.0\ncfl=0.4\nic=taylor_green:1.0\n");
    CHECK(cfg.model == ModelKind::mns);
    CHECK(cfg.n == 64);
    CHECK(cfg.T == 2.0);
    CHECK(!cfg.dt.has_value());
    CHECK(cfg.cfl == 0.4);
    CHECK(cfg.dt_max == 0.1);
    CHECK(cfg.ic.kind == ICSpec::Kind::taylor_green);
    CHECK(cfg.riesz_sign == RieszSign::positive);
    CHECK(cfg.sobolev_m == 3);
    CHECK(cfg.bound_c == 1.0);
    CHECK(cfg.diag_every == 1);
    CHECK(cfg.snapshot_every == 0);
    CHECK(cfg.blowup_threshold == 1e6);
    CHECK(cfg.output_dir == "out");
}

TEST_CASE("comments, blank lines and whitespace are tolerated") {
    RunConfig cfg = parse_config(
        "# a comment\n"
        "model = hall   # trailing comment\n"
        "\n"
        "n=16\nT=0.5\ndt=1e-3\nic=abc:1,1,1\n"
        "riesz_sign = -1\n"
        "m = 4\nC = 2.5\noutput_dir = rundir\ndiag_every = 10\nsnapshot_every = 50\n"
        "blowup_threshold = 100\n");
    CHECK(cfg.model == ModelKind::hall);
    CHECK(cfg.dt == 1e-3);
    CHECK(cfg.riesz_sign == RieszSign::negative);
    CHECK(cfg.sobolev_m == 4);
    CHECK(cfg.bound_c == 2.5);
    CHECK(cfg.output_dir == "rundir");
    CHECK(cfg.diag_every == 10);
    CHECK(cfg.snapshot_every == 50);
    CHECK(cfg.blowup_threshold == 100.0);
}

TEST_CASE("odd n is rejected with the range named") {
    CHECK_THROWS_WITH_AS(parse_config("model=mns\nn=63\nT=1\ndt=1e-3\nic=taylor_green:1\n"),
                         doctest::Contains("even"), error);
    CHECK_THROWS_AS(parse_config("model=mns\nn=6\nT=1\ndt=1e-3\nic=taylor_green:1\n"), error);
}

TEST_CASE("unknown keys fail closed") {
    CHECK_THROWS_WITH_AS(parse_config("modle=mns\nn=64\nT=1\ndt=1e-3\nic=taylor_green:1\n"),
                         doctest::Contains("unknown key 'modle'"), error);
}

TEST_CASE("missing required keys are named") {
    CHECK_THROWS_WITH_AS(parse_config("n=64\nT=1\ndt=1e-3\nic=taylor_green:1\n"),
                         doctest::Contains("missing required key 'model'"), error);
    CHECK_THROWS_WITH_AS(parse_config("model=mns\nn=64\nT=1\ndt=1e-3\n"),
                         doctest::Contains("missing required key 'ic'"), error);
}

TEST_CASE("dt and cfl are mutually exclusive and one is required") {
    CHECK_THROWS_WITH_AS(
        parse_config("model=mns\nn=16\nT=1\ndt=1e-3\ncfl=0.4\nic=taylor_green:1\n"),
        doctest::Contains("not both"), error);
    CHECK_THROWS_WITH_AS(parse_config("model=mns\nn=16\nT=1\nic=taylor_green:1\n"),
                         doctest::Contains("one of dt or cfl"), error);
    CHECK_THROWS_WITH_AS(
        parse_config("model=mns\nn=16\nT=1\ndt=1e-3\ndt_max=0.1\nic=taylor_green:1\n"),
        doctest::Contains("dt_max"), error);
}

TEST_CASE("type and range violations are named") {
    CHECK_THROWS_WITH_AS(parse_config("model=mns\nn=abc\nT=1\ndt=1e-3\nic=taylor_green:1\n"),
                         doctest::Contains("not an integer"), error);
    CHECK_THROWS_WITH_AS(parse_config("model=mns\nn=16\nT=zero\ndt=1e-3\nic=taylor_green:1\n"),
                         doctest::Contains("not a number"), error);
    CHECK_THROWS_AS(parse_config("model=mns\nn=16\nT=-1\ndt=1e-3\nic=taylor_green:1\n"), error);
    CHECK_THROWS_AS(parse_config("model=mns\nn=16\nT=1\ndt=0\nic=taylor_green:1\n"), error);
    CHECK_THROWS_AS(parse_config("model=mns\nn=16\nT=1\ncfl=1.5\nic=taylor_green:1\n"), error);
    CHECK_THROWS_AS(parse_config("model=mns\nn=16\nT=1\ndt=1e-3\nic=taylor_green:1\nm=-1\n"), error);
    CHECK_THROWS_AS(parse_config("model=mns\nn=16\nT=1\ndt=1e-3\nic=taylor_green:1\nC=0\n"), error);
    CHECK_THROWS_AS(parse_config("model=wrong\nn=16\nT=1\ndt=1e-3\nic=taylor_green:1\n"), error);
    CHECK_THROWS_AS(parse_config("model=mns\nn=16\nT=1\ndt=1e-3\nic=taylor_green:1\nriesz_sign=2\n"),
                    error);
    CHECK_THROWS_AS(parse_config("model=mns\nn=16\nT=1\ndt=1e-3\nic=taylor_green:1\ndiag_every=0\n"),
                    error);
}

TEST_CASE("duplicate keys and malformed lines are rejected") {
    CHECK_THROWS_WITH_AS(parse_config("model=mns\nmodel=hall\nn=16\nT=1\ndt=1e-3\nic=abc:1,1,1\n"),
                         doctest::Contains("duplicate"), error);
    CHECK_THROWS_WITH_AS(parse_config("model mns\nn=16\nT=1\ndt=1e-3\nic=abc:1,1,1\n"),
                         doctest::Contains("key=value"), error);
}

TEST_CASE("random ic k0 is validated against the grid cutoff") {
    CHECK_NOTHROW(parse_config("model=mns\nn=16\nT=1\ndt=1e-3\nic=random:1,4,1.0\n"));
    CHECK_THROWS_WITH_AS(parse_config("model=mns\nn=16\nT=1\ndt=1e-3\nic=random:1,5,1.0\n"),
                         doctest::Contains("k0"), error);
}
