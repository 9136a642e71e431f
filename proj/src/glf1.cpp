#include "glv/glf1.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

static_assert(std::endian::native == std::endian::little,
              "GLF1 writes native doubles and assumes a little-endian host");

namespace glv {

namespace {

void write_header(std::ostream& out, const GridGeometry& g, double epsilon,
                  const char* kind) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "GLF1\nnx %d\nny %d\nspacing %.17g\norigin %.17g %.17g\n"
                  "epsilon %.17g\nkind %s\n\n",
                  g.nx(), g.ny(), g.spacing(), g.origin().x, g.origin().y, epsilon, kind);
    out << buf;
}

void write_doubles(std::ostream& out, const double* p, std::size_t n) {
    out.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
}

void write_mask(std::ostream& out, const GridGeometry& g) {
    out.write(reinterpret_cast<const char*>(g.mask().data()),
              static_cast<std::streamsize>(g.mask().size()));
}

struct Header {
    int nx, ny;
    double spacing, ox, oy, epsilon;
    std::string kind;
};

Header read_header(std::istream& in) {
    Header h;
    std::string line, key;
    std::getline(in, line);
    if (line != "GLF1") throw std::runtime_error("GLF1: bad magic");
    auto next = [&](const char* want) -> std::istringstream {
        std::getline(in, line);
        std::istringstream ss(line);
        ss >> key;
        if (key != want) throw std::runtime_error("GLF1: expected header field " + std::string(want));
        return ss;
    };
    next("nx") >> h.nx;
    next("ny") >> h.ny;
    next("spacing") >> h.spacing;
    {
        auto ss = next("origin");
        ss >> h.ox >> h.oy;
    }
    next("epsilon") >> h.epsilon;
    next("kind") >> h.kind;
    std::getline(in, line);  // blank separator
    return h;
}

}  // namespace

void write_glf1(const std::string& path, const ComplexGrid& g) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("GLF1: cannot open " + path);
    write_header(out, *g.geom, g.epsilon, "complex");
    write_doubles(out, reinterpret_cast<const double*>(g.v.data()), 2 * g.v.size());
    write_mask(out, *g.geom);
}

void write_glf1(const std::string& path, const VectorGrid& g) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("GLF1: cannot open " + path);
    write_header(out, *g.geom, 0.0, "vector2");
    write_doubles(out, reinterpret_cast<const double*>(g.v.data()), 2 * g.v.size());
    write_mask(out, *g.geom);
}

void write_glf1(const std::string& path, const ScalarGrid& g) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("GLF1: cannot open " + path);
    write_header(out, *g.geom, 0.0, "scalar");
    write_doubles(out, g.v.data(), g.v.size());
    write_mask(out, *g.geom);
}

AnyGrid read_glf1(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("GLF1: cannot open " + path);
    Header h = read_header(in);
    std::size_t n = static_cast<std::size_t>(h.nx) * h.ny;
    std::size_t per = (h.kind == "scalar") ? 1 : 2;
    std::vector<double> raw(per * n);
    in.read(reinterpret_cast<char*>(raw.data()),
            static_cast<std::streamsize>(raw.size() * sizeof(double)));
    std::vector<uint8_t> mask(n);
    in.read(reinterpret_cast<char*>(mask.data()), static_cast<std::streamsize>(n));
    if (!in) throw std::runtime_error("GLF1: truncated file " + path);
    auto geom = make_geometry(h.nx, h.ny, h.spacing, {h.ox, h.oy}, std::move(mask));

    if (h.kind == "complex") {
        ComplexGrid g(geom, h.epsilon > 0 ? h.epsilon : 0.5);
        g.epsilon = h.epsilon;
        std::memcpy(g.v.data(), raw.data(), raw.size() * sizeof(double));
        return g;
    }
    if (h.kind == "vector2") {
        VectorGrid g(geom);
        std::memcpy(g.v.data(), raw.data(), raw.size() * sizeof(double));
        return g;
    }
    if (h.kind == "scalar") {
        ScalarGrid g(geom);
        g.v = std::move(raw);
        return g;
    }
    throw std::runtime_error("GLF1: unknown field kind " + h.kind);
}

}  // namespace glv
