#pragma once

#include <complex>
#include <vector>

#include "glv/geometry.hpp"

namespace glv {

using cplx = std::complex<double>;

struct ComplexGrid {
    GeometryPtr geom;
    std::vector<cplx> v;
    double epsilon = 0.0;

    ComplexGrid(GeometryPtr g, double eps)
        : geom(std::move(g)), v(geom->size(), cplx(0.0, 0.0)), epsilon(eps) {
        if (!(epsilon > 0.0 && epsilon < 1.0))
            throw std::invalid_argument("ComplexGrid: epsilon must lie in (0,1)");
    }
    cplx& at(int i, int j) { return v[geom->index(i, j)]; }
    cplx at(int i, int j) const { return v[geom->index(i, j)]; }
};

struct VectorGrid {
    GeometryPtr geom;
    std::vector<Vec2> v;

    explicit VectorGrid(GeometryPtr g) : geom(std::move(g)), v(geom->size()) {}
    Vec2& at(int i, int j) { return v[geom->index(i, j)]; }
    Vec2 at(int i, int j) const { return v[geom->index(i, j)]; }
};

struct ScalarGrid {
    GeometryPtr geom;
    std::vector<double> v;

    explicit ScalarGrid(GeometryPtr g) : geom(std::move(g)), v(geom->size(), 0.0) {}
    double& at(int i, int j) { return v[geom->index(i, j)]; }
    double at(int i, int j) const { return v[geom->index(i, j)]; }
};

/// e = (|grad_A u|^2 + (curl A)^2 + (1-|u|^2)^2/(2 eps^2)) / 2 per node,
/// centered differences inside the mask, one-sided at the mask boundary.
ScalarGrid energy_density(const ComplexGrid& u, const VectorGrid& a);

/// Supercurrent j = (iu, grad_A u) = Im(conj(u) grad u) - |u|^2 A.
VectorGrid current(const ComplexGrid& u, const VectorGrid& a);

/// Vorticity mu = curl j + curl A.
ScalarGrid vorticity(const ComplexGrid& u, const VectorGrid& a);

ScalarGrid curl(const VectorGrid& a);

/// Gauge-covariant derivative magnitude squared |grad_A u|^2 and the
/// modulus-gradient energy |grad |u||^2, used by circle lower bounds.
ScalarGrid covariant_grad_sq(const ComplexGrid& u, const VectorGrid& a);
ScalarGrid modulus_grad_sq(const ComplexGrid& u);

/// Trapezoid-type integrals. Node cells fully weighted inside the mask;
/// disk integrals weight each cell by its exact overlap with the disk.
double integrate(const ScalarGrid& f);
double integrate_disk(const ScalarGrid& f, Vec2 center, double radius);
double integrate_nodes(const ScalarGrid& f, const std::vector<int>& nodes);

/// Bilinear interpolation (mask-unaware: uses raw node values).
cplx interp(const ComplexGrid& u, Vec2 p);
double interp(const ScalarGrid& f, Vec2 p);
Vec2 interp(const VectorGrid& f, Vec2 p);

void require_same_geometry(const GridGeometry& a, const GridGeometry& b);

}  // namespace glv
