#include "glv/fields.hpp"

#include <algorithm>
#include <cmath>

namespace glv {

void require_same_geometry(const GridGeometry& a, const GridGeometry& b) {
    if (!a.same_grid(b)) throw std::invalid_argument("geometry mismatch");
}

namespace {

// Difference stencil along one axis: centered where both neighbors are in
// the mask, one-sided toward the interior otherwise, zero if isolated.
template <typename T>
T diff_axis(const GridGeometry& g, const std::vector<T>& v, int i, int j, int di, int dj) {
    const double h = g.spacing();
    bool fwd = g.inside(i + di, j + dj);
    bool bwd = g.inside(i - di, j - dj);
    int idx = g.index(i, j);
    if (fwd && bwd)
        return (v[g.index(i + di, j + dj)] - v[g.index(i - di, j - dj)]) * (0.5 / h);
    if (fwd) return (v[g.index(i + di, j + dj)] - v[idx]) * (1.0 / h);
    if (bwd) return (v[idx] - v[g.index(i - di, j - dj)]) * (1.0 / h);
    return T{};
}

}  // namespace

ScalarGrid curl(const VectorGrid& a) {
    const GridGeometry& g = *a.geom;
    ScalarGrid out(a.geom);
    std::vector<double> ax(g.size()), ay(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        ax[k] = a.v[k].x;
        ay[k] = a.v[k].y;
    }
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            if (!g.inside(i, j)) continue;
            double dyx = diff_axis(g, ay, i, j, 1, 0);
            double dxy = diff_axis(g, ax, i, j, 0, 1);
            out.v[g.index(i, j)] = dyx - dxy;
        }
    return out;
}

ScalarGrid covariant_grad_sq(const ComplexGrid& u, const VectorGrid& a) {
    require_same_geometry(*u.geom, *a.geom);
    const GridGeometry& g = *u.geom;
    ScalarGrid out(u.geom);
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            if (!g.inside(i, j)) continue;
            int idx = g.index(i, j);
            cplx ux = diff_axis(g, u.v, i, j, 1, 0) - cplx(0, 1) * a.v[idx].x * u.v[idx];
            cplx uy = diff_axis(g, u.v, i, j, 0, 1) - cplx(0, 1) * a.v[idx].y * u.v[idx];
            out.v[idx] = std::norm(ux) + std::norm(uy);
        }
    return out;
}

ScalarGrid modulus_grad_sq(const ComplexGrid& u) {
    const GridGeometry& g = *u.geom;
    ScalarGrid out(u.geom);
    std::vector<double> mod(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) mod[k] = std::abs(u.v[k]);
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            if (!g.inside(i, j)) continue;
            double mx = diff_axis(g, mod, i, j, 1, 0);
            double my = diff_axis(g, mod, i, j, 0, 1);
            out.v[g.index(i, j)] = mx * mx + my * my;
        }
    return out;
}

ScalarGrid energy_density(const ComplexGrid& u, const VectorGrid& a) {
    require_same_geometry(*u.geom, *a.geom);
    const GridGeometry& g = *u.geom;
    ScalarGrid grad = covariant_grad_sq(u, a);
    ScalarGrid h = curl(a);
    ScalarGrid out(u.geom);
    const double inv2e2 = 1.0 / (2.0 * u.epsilon * u.epsilon);
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!g.inside(static_cast<int>(k))) continue;
        double pot = 1.0 - std::norm(u.v[k]);
        out.v[k] = 0.5 * (grad.v[k] + h.v[k] * h.v[k] + pot * pot * inv2e2);
    }
    return out;
}

VectorGrid current(const ComplexGrid& u, const VectorGrid& a) {
    require_same_geometry(*u.geom, *a.geom);
    const GridGeometry& g = *u.geom;
    VectorGrid out(u.geom);
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            if (!g.inside(i, j)) continue;
            int idx = g.index(i, j);
            cplx ux = diff_axis(g, u.v, i, j, 1, 0);
            cplx uy = diff_axis(g, u.v, i, j, 0, 1);
            double u2 = std::norm(u.v[idx]);
            out.v[idx].x = std::imag(std::conj(u.v[idx]) * ux) - a.v[idx].x * u2;
            out.v[idx].y = std::imag(std::conj(u.v[idx]) * uy) - a.v[idx].y * u2;
        }
    return out;
}

ScalarGrid vorticity(const ComplexGrid& u, const VectorGrid& a) {
    VectorGrid j = current(u, a);
    ScalarGrid cj = curl(j);
    ScalarGrid ca = curl(a);
    ScalarGrid out(u.geom);
    for (std::size_t k = 0; k < out.v.size(); ++k) out.v[k] = cj.v[k] + ca.v[k];
    return out;
}

double integrate(const ScalarGrid& f) {
    const GridGeometry& g = *f.geom;
    double s = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k)
        if (g.inside(static_cast<int>(k))) s += f.v[k];
    return s * g.cell_area();
}

double integrate_disk(const ScalarGrid& f, Vec2 center, double radius) {
    const GridGeometry& g = *f.geom;
    const double h = g.spacing();
    int i0, j0;
    g.nearest_node(center, i0, j0);
    int span = static_cast<int>(std::ceil((radius + h) / h)) + 1;
    double s = 0.0;
    for (int j = std::max(0, j0 - span); j <= std::min(g.ny() - 1, j0 + span); ++j)
        for (int i = std::max(0, i0 - span); i <= std::min(g.nx() - 1, i0 + span); ++i) {
            if (!g.inside(i, j)) continue;
            double w = cell_disk_overlap(g.pos(i, j), h, center, radius);
            if (w > 0.0) s += f.v[g.index(i, j)] * w;
        }
    return s;
}

double integrate_nodes(const ScalarGrid& f, const std::vector<int>& nodes) {
    double s = 0.0;
    for (int idx : nodes) s += f.v[idx];
    return s * f.geom->cell_area();
}

namespace {

template <typename T>
T bilinear(const GridGeometry& g, const std::vector<T>& v, Vec2 p) {
    double fx = (p.x - g.origin().x) / g.spacing();
    double fy = (p.y - g.origin().y) / g.spacing();
    int i = std::clamp(static_cast<int>(std::floor(fx)), 0, g.nx() - 2);
    int j = std::clamp(static_cast<int>(std::floor(fy)), 0, g.ny() - 2);
    double tx = std::clamp(fx - i, 0.0, 1.0);
    double ty = std::clamp(fy - j, 0.0, 1.0);
    return v[g.index(i, j)] * ((1 - tx) * (1 - ty)) +
           v[g.index(i + 1, j)] * (tx * (1 - ty)) +
           v[g.index(i, j + 1)] * ((1 - tx) * ty) +
           v[g.index(i + 1, j + 1)] * (tx * ty);
}

}  // namespace

cplx interp(const ComplexGrid& u, Vec2 p) { return bilinear(*u.geom, u.v, p); }
double interp(const ScalarGrid& f, Vec2 p) { return bilinear(*f.geom, f.v, p); }
Vec2 interp(const VectorGrid& f, Vec2 p) {
    Vec2 r;
    const GridGeometry& g = *f.geom;
    std::vector<double> tmp;  // avoid; interpolate componentwise inline
    double fx = (p.x - g.origin().x) / g.spacing();
    double fy = (p.y - g.origin().y) / g.spacing();
    int i = std::clamp(static_cast<int>(std::floor(fx)), 0, g.nx() - 2);
    int j = std::clamp(static_cast<int>(std::floor(fy)), 0, g.ny() - 2);
    double tx = std::clamp(fx - i, 0.0, 1.0);
    double ty = std::clamp(fy - j, 0.0, 1.0);
    auto at = [&](int ii, int jj) { return f.v[g.index(ii, jj)]; };
    r.x = at(i, j).x * (1 - tx) * (1 - ty) + at(i + 1, j).x * tx * (1 - ty) +
          at(i, j + 1).x * (1 - tx) * ty + at(i + 1, j + 1).x * tx * ty;
    r.y = at(i, j).y * (1 - tx) * (1 - ty) + at(i + 1, j).y * tx * (1 - ty) +
          at(i, j + 1).y * (1 - tx) * ty + at(i + 1, j + 1).y * tx * ty;
    return r;
}

}  // namespace glv
