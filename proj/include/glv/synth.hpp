#pragma once

#include <utility>
#include <vector>

#include "glv/fields.hpp"
#include "glv/profile.hpp"

namespace glv {

struct VortexSpec {
    Vec2 p;
    int degree = 1;
};

/// Test-configuration factory input. Single vortices and lattices are
/// expressed through the vortex list; `uniform` synthesizes a constant state.
struct SynthSpec {
    enum class Kind { Uniform, Vortices } kind = Kind::Vortices;
    cplx uniform_value{1.0, 0.0};
    std::vector<VortexSpec> vortices;
    double epsilon = 0.02;
    double gauge_h0 = 0.0;  // A = (h0/2)(-y, x) when nonzero, else A = 0

    static SynthSpec uniform(cplx c);
    static SynthSpec single(Vec2 p, int degree, double eps);
    static SynthSpec multi(std::vector<VortexSpec> vs, double eps);
    /// n x n lattice of +1 vortices with the given pitch, centered at origin.
    static SynthSpec lattice(double pitch, int n, double eps);
};

/// u = c * prod_i f(|x-p_i|/eps) e^{i d_i theta_i}, with f the degree-one
/// radial profile; |u| <= 1 everywhere by construction.
std::pair<ComplexGrid, VectorGrid> synthesize(GeometryPtr g, const SynthSpec& spec,
                                              const RadialProfile& profile);

/// Shared degree-one profile (r_max 20, tol 1e-9), solved once per process.
const RadialProfile& shared_profile();

/// Gauge change (u, A) -> (u e^{i phi}, A + grad phi), discrete gradient.
std::pair<ComplexGrid, VectorGrid> gauge_transform(const ComplexGrid& u, const VectorGrid& a,
                                                   const ScalarGrid& phi);

}  // namespace glv
