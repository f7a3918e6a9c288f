#include <doctest.h>

#include "test_support.hpp"

#include <filesystem>
#include <fstream>

using namespace mns;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("mns_test_" + std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

} // namespace

TEST_CASE("snapshot write/read round trip is bitwise on every sample") {
    TempDir tmp;
    const Grid g = Grid::make(16);
    PhysicalVectorField p = inverse_transform(random_solenoidal(g, 5u, 3, 1.0));
    const std::string path = (tmp.path / "snap.bin").string();
    write_snapshot(path, p, 0.625, ModelKind::hall, RieszSign::negative);

    SnapshotData snap = read_snapshot(path);
    CHECK(snap.t == 0.625);
    CHECK(snap.model == ModelKind::hall);
    CHECK(snap.sign == RieszSign::negative);
    CHECK(snap.field.grid.n == 16);
    for (std::size_t i = 0; i < p.data.size(); ++i) CHECK(snap.field.data[i] == p.data[i]);
}

TEST_CASE("truncated snapshots raise an explicit corruption error") {
    TempDir tmp;
    const Grid g = Grid::make(8);
    PhysicalVectorField p(g);
    const std::string path = (tmp.path / "snap.bin").string();
    write_snapshot(path, p, 0.0, ModelKind::mns, RieszSign::positive);

    const auto full = fs::file_size(path);
    fs::resize_file(path, full - 9);
    CHECK_THROWS_WITH_AS(read_snapshot(path), doctest::Contains("corrupt"), error);

    fs::resize_file(path, 10);  // not even a full header
    CHECK_THROWS_WITH_AS(read_snapshot(path), doctest::Contains("truncated"), error);
}

TEST_CASE("wrong magic and wrong version are rejected") {
    TempDir tmp;
    const Grid g = Grid::make(8);
    PhysicalVectorField p(g);
    const std::string path = (tmp.path / "snap.bin").string();
    write_snapshot(path, p, 0.0, ModelKind::mns, RieszSign::positive);

    {
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(0);
        f.write("XXXX", 4);
    }
    CHECK_THROWS_WITH_AS(read_snapshot(path), doctest::Contains("magic"), error);

    write_snapshot(path, p, 0.0, ModelKind::mns, RieszSign::positive);
    {
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(4);
        const char nine = 9;
        f.write(&nine, 1);
    }
    CHECK_THROWS_WITH_AS(read_snapshot(path), doctest::Contains("version"), error);
}

TEST_CASE("snapshot header layout is exactly as documented") {
    TempDir tmp;
    const Grid g = Grid::make(8);
    PhysicalVectorField p(g);
    p.data[0] = 1.0;
    const std::string path = (tmp.path / "snap.bin").string();
    write_snapshot(path, p, 1.5, ModelKind::ns_convective, RieszSign::positive);

    std::ifstream in(path, std::ios::binary);
    std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
    REQUIRE(buf.size() == 28 + 3 * g.point_count() * 8);
    CHECK(buf[0] == 'M');
    CHECK(buf[1] == 'N');
    CHECK(buf[2] == 'S');
    CHECK(buf[3] == '1');
    CHECK(buf[4] == 1);   // version, little-endian u32
    CHECK(buf[8] == 8);   // n
    CHECK(buf[12] == 2);  // model id of ns_convective
    CHECK(buf[16] == 1);  // riesz sign +1
    // t = 1.5 is 0x3FF8000000000000, little-endian
    CHECK(buf[20 + 7] == 0x3F);
    CHECK(buf[20 + 6] == 0xF8);
}

TEST_CASE("snapshot aux sidecar round-trips accumulators exactly") {
    TempDir tmp;
    DiagAccums acc;
    acc.d_half_cum = 0.12345678901234567;
    acc.d_l2_cum = 1.0 / 3.0;
    acc.env_cum = 7.25e-13;
    acc.prev_rec_t = 0.4999999999999999;
    acc.prev_rec_env = 123.456789;
    acc.have_prev_rec = true;
    InitialNorms init;
    init.e_l2_0 = 62.01255336059963;
    init.e_half_0 = 107.4152;
    init.grad_sq_0 = 372.07;
    init.hm_0 = 19.25;
    init.set = true;

    const std::string path = (tmp.path / "snap.bin.aux.json").string();
    write_snapshot_aux(path, 0.1, 100, acc, init);
    SnapshotAux aux = read_snapshot_aux(path);
    CHECK(aux.t == 0.1);
    CHECK(aux.step == 100);
    CHECK(aux.accums.d_half_cum == acc.d_half_cum);
    CHECK(aux.accums.d_l2_cum == acc.d_l2_cum);
    CHECK(aux.accums.env_cum == acc.env_cum);
    CHECK(aux.accums.prev_rec_t == acc.prev_rec_t);
    CHECK(aux.accums.prev_rec_env == acc.prev_rec_env);
    CHECK(aux.accums.have_prev_rec == acc.have_prev_rec);
    CHECK(aux.initials.e_l2_0 == init.e_l2_0);
    CHECK(aux.initials.hm_0 == init.hm_0);

    CHECK_THROWS_WITH_AS(read_snapshot_aux((tmp.path / "missing.aux.json").string()),
                         doctest::Contains("aux"), error);
}
