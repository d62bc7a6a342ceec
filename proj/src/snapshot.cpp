#include "nsch/snapshot.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "nsch/physics.hpp"

namespace nsch {

namespace {

constexpr char kMagic[4] = {'N', 'S', 'C', 'H'};
constexpr uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "snapshot format is little-endian; big-endian hosts unsupported");

void put_u32(std::ostream& os, uint32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); }
void put_f64(std::ostream& os, double v) { os.write(reinterpret_cast<const char*>(&v), 8); }

uint32_t get_u32(std::istream& is, const std::string& path) {
    uint32_t v = 0;
    if (!is.read(reinterpret_cast<char*>(&v), 4))
        throw IoError(path + ": truncated snapshot");
    return v;
}
double get_f64(std::istream& is, const std::string& path) {
    double v = 0;
    if (!is.read(reinterpret_cast<char*>(&v), 8))
        throw IoError(path + ": truncated snapshot");
    return v;
}
void get_block(std::istream& is, double* dst, size_t count, const std::string& path) {
    if (!is.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(count * 8)))
        throw IoError(path + ": truncated snapshot payload");
}

}  // namespace

void write_snapshot(const State& s, const std::string& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError(path + ": cannot open for writing");
    const Grid& g = s.phi.grid();
    os.write(kMagic, 4);
    put_u32(os, kVersion);
    put_u32(os, static_cast<uint32_t>(g.nx));
    put_u32(os, static_cast<uint32_t>(g.ny));
    put_f64(os, g.hx);
    put_f64(os, g.hy);
    put_f64(os, s.t);
    auto put_arr = [&](const double* p, size_t n) {
        os.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n * 8));
    };
    put_arr(s.phi.data(), s.phi.size());
    put_arr(s.sigma.data(), s.sigma.size());
    put_arr(s.p.data(), s.p.size());
    put_arr(s.v.u_data().data(), s.v.u_data().size());
    put_arr(s.v.w_data().data(), s.v.w_data().size());
    if (!os) throw IoError(path + ": write failed");
}

State read_snapshot(const std::string& path, const Grid* expected) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError(path + ": cannot open for reading");
    char magic[4];
    if (!is.read(magic, 4)) throw IoError(path + ": truncated snapshot");
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw IoError(path + ": bad magic, not a snapshot file");
    const uint32_t version = get_u32(is, path);
    if (version != kVersion)
        throw IoError(path + ": unsupported snapshot version " + std::to_string(version));
    const uint32_t nx = get_u32(is, path);
    const uint32_t ny = get_u32(is, path);
    const double hx = get_f64(is, path);
    const double hy = get_f64(is, path);
    const double t = get_f64(is, path);
    if (nx < 4 || ny < 4 || !(hx > 0.0) || !(hy > 0.0))
        throw IoError(path + ": corrupt snapshot header");
    Grid g(static_cast<int>(nx), static_cast<int>(ny), nx * hx, ny * hy);
    if (expected && !g.same_as(*expected))
        throw IoError(path + ": snapshot grid " + std::to_string(nx) + "x" +
                      std::to_string(ny) + " does not match the run grid");

    State s;
    s.t = t;
    s.phi = ScalarField(g);
    s.sigma = ScalarField(g);
    s.p = ScalarField(g);
    s.mu = ScalarField(g);
    s.v = VectorField(g);
    get_block(is, s.phi.data(), s.phi.size(), path);
    get_block(is, s.sigma.data(), s.sigma.size(), path);
    get_block(is, s.p.data(), s.p.size(), path);
    get_block(is, s.v.u_data().data(), s.v.u_data().size(), path);
    get_block(is, s.v.w_data().data(), s.v.w_data().size(), path);
    char extra;
    if (is.read(&extra, 1)) throw IoError(path + ": trailing bytes after payload");
    return s;
}

void refresh_mu(State& s, const PhysParams& p) {
    s.mu = chemical_potential(s.phi, s.sigma, p);
}

}  // namespace nsch
