#pragma once

#include <string>
#include <vector>

namespace glv {

/// Degree-one radial vortex profile f on [0, r_max]: solution of
/// f'' + f'/r - d^2 f/r^2 + f(1 - f^2) = 0 with f(0) = 0, f(inf) = 1,
/// sampled on a uniform grid.
struct RadialProfile {
    std::vector<double> radii;   // increasing, radii[0] = 0
    std::vector<double> values;  // f samples
    double r_max = 0.0;
    double step = 0.0;
    double slope0 = 0.0;  // f'(0) for degree 1, leading coefficient otherwise
    int degree = 1;
    double asym_a2 = 0.0, asym_a4 = 0.0, asym_a6 = 0.0;  // 1-f tail series

    double eval(double r) const;        // linear interpolation, series tail
    double eval_deriv(double r) const;  // centered difference on the sample grid
    void validate() const;              // monotone, in [0,1], tail matches asymptote
};

/// Shooting (adaptive RK45 + bisection) followed by a Newton relaxation
/// sweep of the finite-difference system. `tol` bounds the FD residual at
/// every interior sample.
RadialProfile solve_profile(double r_max, double tol, int degree = 1);

struct GammaEstimate {
    double value = 0.0;
    double error_estimate = 0.0;
    std::vector<double> ladder_R;      // evaluation radii
    std::vector<double> ladder_gamma;  // E(B_R) - pi d^2 log R at those radii
};

/// Finite part of the degree-one vortex energy:
/// lim_R ( int_{B_R} e_1(u0) - pi log R ), via Richardson extrapolation
/// in 1/R^2 over a geometric ladder of radii.
GammaEstimate gamma_constant(const RadialProfile& profile);

/// Same limit for a degree-d radial ansatz (pi d^2 log R subtracted);
/// for |d| = 1 this is the gamma constant, for d = 0 it is zero.
GammaEstimate radial_cost_constant(const RadialProfile& profile);

/// Energy of the profile ansatz restricted to B_R at epsilon = 1.
double profile_energy(const RadialProfile& profile, double R);

void export_profile_csv(const RadialProfile& p, const std::string& path);

}  // namespace glv
