#pragma once

#include "mns/common.hpp"
#include "mns/field.hpp"
#include "mns/integrator.hpp"
#include "mns/models.hpp"
#include "mns/multipliers.hpp"

#include <json.hpp>

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

namespace mns {

/// Snapshot file layout (all little-endian):
///   magic "MNS1" | u32 format version (=1) | u32 n | u32 model id |
///   i32 riesz sign | f64 t | 3 * n^3 f64 physical samples
/// Samples are component-major, first axis fastest within a component.
inline constexpr char snapshot_magic[4] = {'M', 'N', 'S', '1'};
inline constexpr std::uint32_t snapshot_version = 1;

namespace detail {

inline void put_u32_le(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_u64_le(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline std::uint32_t get_u32_le(const unsigned char* p) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
    return v;
}

inline std::uint64_t get_u64_le(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return v;
}

} // namespace detail

inline void write_snapshot(const std::string& path, const PhysicalVectorField& field, double t,
                           ModelKind model, RieszSign sign) {
    std::string buf;
    buf.reserve(28 + field.data.size() * 8);
    buf.append(snapshot_magic, 4);
    detail::put_u32_le(buf, snapshot_version);
    detail::put_u32_le(buf, static_cast<std::uint32_t>(field.grid.n));
    detail::put_u32_le(buf, model_id(model));
    detail::put_u32_le(buf, static_cast<std::uint32_t>(static_cast<std::int32_t>(to_int(sign))));
    detail::put_u64_le(buf, std::bit_cast<std::uint64_t>(t));
    for (double v : field.data) detail::put_u64_le(buf, std::bit_cast<std::uint64_t>(v));

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw error("write_snapshot: cannot open '" + path + "' for writing");
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw error("write_snapshot: short write to '" + path + "'");
}

struct SnapshotData {
    PhysicalVectorField field;
    double t = 0.0;
    ModelKind model = ModelKind::mns;
    RieszSign sign = RieszSign::positive;
};

inline SnapshotData read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw error("read_snapshot: cannot open '" + path + "'");
    std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    if (buf.size() < 28) throw error("read_snapshot: '" + path + "' is truncated (header incomplete)");
    if (std::memcmp(buf.data(), snapshot_magic, 4) != 0)
        throw error("read_snapshot: '" + path + "' has wrong magic (not a snapshot file)");
    const std::uint32_t version = detail::get_u32_le(buf.data() + 4);
    if (version != snapshot_version)
        throw error("read_snapshot: '" + path + "' has unsupported format version " +
                    std::to_string(version));
    const std::uint32_t n = detail::get_u32_le(buf.data() + 8);
    const std::uint32_t model = detail::get_u32_le(buf.data() + 12);
    const std::int32_t sign = static_cast<std::int32_t>(detail::get_u32_le(buf.data() + 16));

    SnapshotData snap;
    snap.t = std::bit_cast<double>(detail::get_u64_le(buf.data() + 20));
    snap.model = model_from_id(model);
    snap.sign = riesz_sign_from_int(sign);

    const Grid grid = Grid::make(static_cast<int>(n));
    const std::size_t want = 28 + 3 * grid.point_count() * 8;
    if (buf.size() != want)
        throw error("read_snapshot: '" + path + "' is corrupt (size " + std::to_string(buf.size()) +
                    ", expected " + std::to_string(want) + ")");

    snap.field = PhysicalVectorField(grid);
    for (std::size_t i = 0; i < snap.field.data.size(); ++i)
        snap.field.data[i] = std::bit_cast<double>(detail::get_u64_le(buf.data() + 28 + 8 * i));
    return snap;
}

/// Sidecar carrying the integrator accumulators a restart needs to resume
/// bit-exactly. Doubles survive the JSON round trip unchanged.
inline void write_snapshot_aux(const std::string& path, double t, std::int64_t step,
                               const DiagAccums& acc, const InitialNorms& init) {
    nlohmann::json j;
    j["format"] = "mns-aux";
    j["version"] = 1;
    j["t"] = t;
    j["step"] = step;
    j["accums"] = {{"d_half_cum", acc.d_half_cum},
                   {"d_l2_cum", acc.d_l2_cum},
                   {"env_cum", acc.env_cum},
                   {"prev_rec_t", acc.prev_rec_t},
                   {"prev_rec_env", acc.prev_rec_env},
                   {"have_prev_rec", acc.have_prev_rec}};
    j["initials"] = {{"e_l2_0", init.e_l2_0},
                     {"e_half_0", init.e_half_0},
                     {"grad_sq_0", init.grad_sq_0},
                     {"hm_0", init.hm_0}};
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw error("write_snapshot_aux: cannot open '" + path + "'");
    out << j.dump(2) << "\n";
    if (!out) throw error("write_snapshot_aux: short write to '" + path + "'");
}

struct SnapshotAux {
    double t = 0.0;
    std::int64_t step = 0;
    DiagAccums accums;
    InitialNorms initials;
};

inline SnapshotAux read_snapshot_aux(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw error("read_snapshot_aux: cannot open '" + path +
                    "' (restart needs the .aux.json written next to the snapshot)");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw error("read_snapshot_aux: '" + path + "' is not valid JSON: " + e.what());
    }
    try {
        SnapshotAux aux;
        aux.t = j.at("t").get<double>();
        aux.step = j.at("step").get<std::int64_t>();
        const auto& a = j.at("accums");
        aux.accums.d_half_cum = a.at("d_half_cum").get<double>();
        aux.accums.d_l2_cum = a.at("d_l2_cum").get<double>();
        aux.accums.env_cum = a.at("env_cum").get<double>();
        aux.accums.prev_rec_t = a.at("prev_rec_t").get<double>();
        aux.accums.prev_rec_env = a.at("prev_rec_env").get<double>();
        aux.accums.have_prev_rec = a.at("have_prev_rec").get<bool>();
        const auto& i = j.at("initials");
        aux.initials.e_l2_0 = i.at("e_l2_0").get<double>();
        aux.initials.e_half_0 = i.at("e_half_0").get<double>();
        aux.initials.grad_sq_0 = i.at("grad_sq_0").get<double>();
        aux.initials.hm_0 = i.at("hm_0").get<double>();
        aux.initials.set = true;
        return aux;
    } catch (const nlohmann::json::exception& e) {
        throw error("read_snapshot_aux: '" + path + "' is missing fields: " + e.what());
    }
}

} // namespace mns
