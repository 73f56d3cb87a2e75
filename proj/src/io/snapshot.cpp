#include "nsv/io/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>

namespace nsv::io {

namespace {

constexpr char MAGIC[8] = {'S', 'N', 'S', 'V', '1', 0, 0, 0};
constexpr std::uint32_t ENDIAN_TAG = 0x01020304u;  // written little-endian

struct ManifestEntry {
    char name[16];
    std::uint32_t components;
    std::uint64_t offset;
};

void put_bytes(std::string& out, const void* p, std::size_t len) {
    out.append(static_cast<const char*>(p), len);
}

template <class T>
void put(std::string& out, T v) {
    put_bytes(out, &v, sizeof v);
}

struct Reader {
    const std::string& buf;
    const std::string& path;
    std::size_t pos = 0;

    void need(std::size_t len) const {
        if (pos + len > buf.size())
            throw std::runtime_error("snapshot: truncated file '" + path + "'");
    }
    void read(void* p, std::size_t len) {
        need(len);
        std::memcpy(p, buf.data() + pos, len);
        pos += len;
    }
    template <class T>
    T get() {
        T v;
        read(&v, sizeof v);
        return v;
    }
};

} // namespace

void snapshot_write(const std::string& path, const solver::FluidState& s,
                    const std::string& config_hash,
                    const std::vector<spectral::VectorField>& families,
                    const patch::MarkerCurve& markers) {
    const int n = s.grid().n;
    const std::size_t plane = static_cast<std::size_t>(n) * n * sizeof(double);
    const std::size_t nf = 2 + families.size();
    const std::size_t m = markers.x.size();
    if (markers.y.size() != m)
        throw std::invalid_argument("snapshot: marker coordinate lists differ in length");

    std::string out;
    out.reserve(108 + 28 * nf + 16 * m + plane * (1 + 2 * (1 + families.size())));
    put_bytes(out, MAGIC, 8);
    put(out, ENDIAN_TAG);
    put(out, static_cast<std::uint32_t>(n));
    put(out, s.grid().L);
    put(out, s.t);
    char hash[64] = {};
    std::memcpy(hash, config_hash.data(), std::min<std::size_t>(64, config_hash.size()));
    put_bytes(out, hash, 64);

    put(out, static_cast<std::uint32_t>(nf));
    std::uint64_t offset = 108 + 28 * nf + 16 * m;
    auto entry = [&](const char* name, std::uint32_t comp) {
        ManifestEntry e{};
        std::snprintf(e.name, sizeof e.name, "%s", name);
        e.components = comp;
        e.offset = offset;
        put_bytes(out, e.name, 16);
        put(out, e.components);
        put(out, e.offset);
        offset += comp * plane;
    };
    entry("rho", 1);
    entry("u", 2);
    for (std::size_t i = 0; i < families.size(); ++i) {
        char name[16];
        std::snprintf(name, sizeof name, "family%zu", i);
        entry(name, 2);
    }

    put(out, static_cast<std::uint64_t>(m));
    if (m > 0) {
        put_bytes(out, markers.x.data(), m * sizeof(double));
        put_bytes(out, markers.y.data(), m * sizeof(double));
    }

    put_bytes(out, s.rho.data(), plane);
    put_bytes(out, s.u.x.data(), plane);
    put_bytes(out, s.u.y.data(), plane);
    for (const auto& f : families) {
        put_bytes(out, f.x.data(), plane);
        put_bytes(out, f.y.data(), plane);
    }

    write_file_atomic(path, out);
}

Snapshot snapshot_read(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("snapshot: cannot open '" + path + "'");
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    Reader r{buf, path};

    char magic[8];
    r.read(magic, 8);
    if (std::memcmp(magic, MAGIC, 8) != 0)
        throw std::runtime_error("snapshot: bad magic in '" + path + "'");
    if (r.get<std::uint32_t>() != ENDIAN_TAG)
        throw std::runtime_error("snapshot: endianness mismatch in '" + path + "'");

    Snapshot snap;
    snap.n = static_cast<int>(r.get<std::uint32_t>());
    snap.L = r.get<double>();
    snap.t = r.get<double>();
    if (snap.n <= 0 || !(snap.L > 0.0))
        throw std::runtime_error("snapshot: invalid grid header in '" + path + "'");
    char hash[65] = {};
    r.read(hash, 64);
    snap.config_hash = hash;

    const std::uint32_t nf = r.get<std::uint32_t>();
    if (nf < 2 || nf > 64)
        throw std::runtime_error("snapshot: implausible field count in '" + path + "'");
    std::vector<ManifestEntry> manifest(nf);
    for (auto& e : manifest) {
        r.read(e.name, 16);
        e.name[15] = 0;
        e.components = r.get<std::uint32_t>();
        e.offset = r.get<std::uint64_t>();
    }

    const std::uint64_t m = r.get<std::uint64_t>();
    const std::size_t plane = static_cast<std::size_t>(snap.n) * snap.n * sizeof(double);
    std::uint64_t expect = 108 + 28ull * nf + 16 * m;
    for (const auto& e : manifest) {
        if (e.offset != expect)
            throw std::runtime_error("snapshot: manifest offsets inconsistent in '" + path +
                                     "'");
        expect += e.components * plane;
    }
    if (m > (1ull << 32))
        throw std::runtime_error("snapshot: implausible marker count in '" + path + "'");
    snap.markers.x.resize(m);
    snap.markers.y.resize(m);
    if (m > 0) {
        r.read(snap.markers.x.data(), m * sizeof(double));
        r.read(snap.markers.y.data(), m * sizeof(double));
    }

    const spectral::Grid g(snap.n, snap.L);
    snap.rho = spectral::ScalarField(g);
    snap.u = spectral::VectorField(g);
    auto read_plane = [&](double* dst) { r.read(dst, plane); };
    std::size_t next_family = 0;
    for (const auto& e : manifest) {
        const std::string name = e.name;
        if (name == "rho") {
            if (e.components != 1)
                throw std::runtime_error("snapshot: rho must have one component");
            read_plane(snap.rho.data());
        } else if (name == "u") {
            if (e.components != 2)
                throw std::runtime_error("snapshot: u must have two components");
            read_plane(snap.u.x.data());
            read_plane(snap.u.y.data());
        } else if (name.rfind("family", 0) == 0) {
            if (e.components != 2)
                throw std::runtime_error("snapshot: family fields must have two components");
            if (name != "family" + std::to_string(next_family))
                throw std::runtime_error("snapshot: family fields out of order in '" + path +
                                         "'");
            spectral::VectorField f(g);
            read_plane(f.x.data());
            read_plane(f.y.data());
            snap.families.push_back(std::move(f));
            ++next_family;
        } else {
            throw std::runtime_error("snapshot: unknown field '" + name + "' in '" + path +
                                     "'");
        }
    }
    return snap;
}

} // namespace nsv::io
