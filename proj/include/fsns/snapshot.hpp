#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>

#include "fsns/dynamics.hpp"

namespace fsns {

/// Self-describing binary snapshot:
///   magic "FSCN", version u32, grid descriptor (dim_h i32, ny i32, nz i32,
///   length f64, z_max f64, stretch f64), t f64, A f64, field count u32,
///   then per field: name length u32, name bytes, sample count u64, samples
///   as little-endian f64 in declared order (rho, v..., h).
struct Snapshot {
    GridConfig grid;
    double t = 0.0;
    double A = 1.0;
    std::vector<std::pair<std::string, Field>> fields;

    const Field* find(const std::string& name) const {
        for (const auto& [n, f] : fields)
            if (n == name) return &f;
        return nullptr;
    }
};

namespace snapdetail {

template <class T>
void put(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
template <class T>
bool get(std::istream& in, T& v) {
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    return bool(in);
}

}  // namespace snapdetail

inline constexpr std::uint32_t snapshot_version = 1;

inline Snapshot snapshot_of(const FlowState& s, const Domain& dom) {
    Snapshot sn;
    sn.grid = dom.grid.cfg;
    sn.t = s.t;
    sn.A = s.A;
    sn.fields.emplace_back("rho", s.rho);
    for (size_t j = 0; j < s.v.size(); ++j) sn.fields.emplace_back("v" + std::to_string(j), s.v[j]);
    sn.fields.emplace_back("h", s.h.values);
    return sn;
}

inline void write_snapshot(const std::string& path, const Snapshot& sn) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open snapshot file for writing: " + path);
    out.write("FSCN", 4);
    snapdetail::put(out, snapshot_version);
    snapdetail::put(out, static_cast<std::int32_t>(sn.grid.dim_h));
    snapdetail::put(out, static_cast<std::int32_t>(sn.grid.ny));
    snapdetail::put(out, static_cast<std::int32_t>(sn.grid.nz));
    snapdetail::put(out, sn.grid.length);
    snapdetail::put(out, sn.grid.z_max);
    snapdetail::put(out, sn.grid.stretch);
    snapdetail::put(out, sn.t);
    snapdetail::put(out, sn.A);
    snapdetail::put(out, static_cast<std::uint32_t>(sn.fields.size()));
    for (const auto& [name, f] : sn.fields) {
        snapdetail::put(out, static_cast<std::uint32_t>(name.size()));
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
        snapdetail::put(out, static_cast<std::uint64_t>(f.size()));
        out.write(reinterpret_cast<const char*>(f.data()),
                  static_cast<std::streamsize>(f.size() * sizeof(double)));
    }
    if (!out) throw ConfigError("snapshot write failed: " + path);
}

inline Snapshot read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open snapshot file: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "FSCN", 4) != 0)
        throw ConfigError("not a snapshot file (bad magic): " + path);
    std::uint32_t version = 0;
    snapdetail::get(in, version);
    if (version != snapshot_version)
        throw ConfigError("unsupported snapshot version " + std::to_string(version));
    Snapshot sn;
    std::int32_t dim_h = 0, ny = 0, nz = 0;
    snapdetail::get(in, dim_h);
    snapdetail::get(in, ny);
    snapdetail::get(in, nz);
    snapdetail::get(in, sn.grid.length);
    snapdetail::get(in, sn.grid.z_max);
    snapdetail::get(in, sn.grid.stretch);
    sn.grid.dim_h = dim_h;
    sn.grid.ny = ny;
    sn.grid.nz = nz;
    snapdetail::get(in, sn.t);
    snapdetail::get(in, sn.A);
    std::uint32_t nf = 0;
    if (!snapdetail::get(in, nf)) throw ConfigError("truncated snapshot header: " + path);
    for (std::uint32_t i = 0; i < nf; ++i) {
        std::uint32_t len = 0;
        if (!snapdetail::get(in, len)) throw ConfigError("truncated snapshot: " + path);
        std::string name(len, '\0');
        in.read(name.data(), len);
        std::uint64_t count = 0;
        if (!snapdetail::get(in, count)) throw ConfigError("truncated snapshot: " + path);
        Field f(count);
        in.read(reinterpret_cast<char*>(f.data()),
                static_cast<std::streamsize>(count * sizeof(double)));
        if (!in) throw ConfigError("truncated snapshot: " + path);
        sn.fields.emplace_back(std::move(name), std::move(f));
    }
    return sn;
}

/// Rebuild a FlowState from a snapshot (metric reassembled from h and A).
inline FlowState state_from_snapshot(const Snapshot& sn, const Domain& dom) {
    if (!(dom.grid.cfg.dim_h == sn.grid.dim_h && dom.grid.cfg.ny == sn.grid.ny &&
          dom.grid.cfg.nz == sn.grid.nz))
        throw ConfigError("snapshot grid does not match the domain");
    const Field* rho = sn.find("rho");
    const Field* h = sn.find("h");
    if (!rho || !h) throw ConfigError("snapshot is missing rho or h");
    std::vector<Field> v;
    for (int j = 0; j <= sn.grid.dim_h; ++j) {
        const Field* c = sn.find("v" + std::to_string(j));
        if (!c) throw ConfigError("snapshot is missing v" + std::to_string(j));
        v.push_back(*c);
    }
    FlowState s = make_state(*rho, std::move(v), *h, sn.A, dom);
    s.t = sn.t;
    return s;
}

}  // namespace fsns
