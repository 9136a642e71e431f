#include <cmath>
#include <numbers>

#include "doctest.h"
#include "glv/constants.hpp"
#include "glv/profile.hpp"

using namespace glv;

namespace {

// Independent oracle: fixed-step RK4 shooting of the profile equation,
// bisecting the initial slope. Deliberately a different integrator and
// stepping scheme from the library solver.
struct Rk4Oracle {
    double slope;
    std::vector<double> r, f;
};

Rk4Oracle rk4_shoot_oracle(double r_end, double hstep) {
    auto rhs = [](double r, double f, double fp) {
        return -fp / r + f / (r * r) - f * (1.0 - f * f);
    };
    auto run = [&](double a, std::vector<double>* rr, std::vector<double>* ff) {
        double r0 = 0.01;  // series start keeps RK4 away from the 1/r^2 terms
        double f = a * r0 * (1 - r0 * r0 / 8), fp = a * (1 - 3 * r0 * r0 / 8);
        double r = r0;
        int state = 0;  // 0 ok, +1 overshoot, -1 undershoot
        while (r < r_end) {
            double h = std::min(hstep, r_end - r);
            auto step = [&](double rr_, double f_, double fp_, double& kf, double& kfp) {
                kf = fp_;
                kfp = rhs(rr_, f_, fp_);
            };
            double k1f, k1p, k2f, k2p, k3f, k3p, k4f, k4p;
            step(r, f, fp, k1f, k1p);
            step(r + h / 2, f + h / 2 * k1f, fp + h / 2 * k1p, k2f, k2p);
            step(r + h / 2, f + h / 2 * k2f, fp + h / 2 * k2p, k3f, k3p);
            step(r + h, f + h * k3f, fp + h * k3p, k4f, k4p);
            f += h / 6 * (k1f + 2 * k2f + 2 * k3f + k4f);
            fp += h / 6 * (k1p + 2 * k2p + 2 * k3p + k4p);
            r += h;
            if (rr) {
                rr->push_back(r);
                ff->push_back(f);
            }
            if (f > 1.0) {
                state = +1;
                break;
            }
            if (fp < 0.0) {
                state = -1;
                break;
            }
        }
        return state;
    };
    double lo = 0.3, hi = 1.0;
    for (int it = 0; it < 70; ++it) {
        double mid = 0.5 * (lo + hi);
        int s = run(mid, nullptr, nullptr);
        if (s == +1)
            hi = mid;
        else
            lo = mid;
    }
    Rk4Oracle out;
    out.slope = 0.5 * (lo + hi);
    run(out.slope, &out.r, &out.f);
    return out;
}

}  // namespace

TEST_CASE("profile boundary values and slope stability") {
    RadialProfile p = solve_profile(20.0, 1e-9);
    CHECK(p.values.front() == 0.0);
    // Tail within 1e-6 of the far-field asymptote (the defect to 1 itself is
    // ~ 1/(2 r_max^2) at any usable r_max).
    double asym = 1.0 - 0.5 / (20.0 * 20.0) - 9.0 / 8.0 / std::pow(20.0, 4);
    CHECK(p.values.back() == doctest::Approx(asym).epsilon(2e-6));

    RadialProfile p2 = solve_profile(40.0, 1e-9);
    CHECK(p.slope0 == doctest::Approx(p2.slope0).epsilon(1e-6));

    // Frozen from the RK4 shooting oracle (h = 2e-4, r_end = 10).
    CHECK(p.slope0 == doctest::Approx(0.5831894958).epsilon(2e-5));
}

TEST_CASE("profile matches independent RK4 shooting oracle") {
    RadialProfile p = solve_profile(20.0, 1e-9);
    Rk4Oracle o = rk4_shoot_oracle(10.0, 5e-4);
    CHECK(p.slope0 == doctest::Approx(o.slope).epsilon(1e-5));
    // Compare only well inside the oracle's shooting horizon; near the
    // horizon the bisected trajectory drifts along the unstable mode.
    for (std::size_t k = 0; k < o.r.size(); k += 200)
        if (o.r[k] <= 6.0) CHECK(p.eval(o.r[k]) == doctest::Approx(o.f[k]).epsilon(2e-5));
}

TEST_CASE("profile ODE residual below tolerance at interior samples") {
    RadialProfile p = solve_profile(20.0, 1e-9);
    double h = p.step;
    double maxres = 0.0;
    for (std::size_t k = 1; k + 1 < p.values.size(); ++k) {
        double r = p.radii[k];
        double res = (p.values[k + 1] - 2 * p.values[k] + p.values[k - 1]) / (h * h) +
                     (p.values[k + 1] - p.values[k - 1]) / (2 * h * r) -
                     p.values[k] / (r * r) + p.values[k] * (1 - p.values[k] * p.values[k]);
        maxres = std::max(maxres, std::abs(res));
    }
    CHECK(maxres < 1e-9);
}

TEST_CASE("gamma ladder contracts like 1/R^2 and the value is pinned") {
    RadialProfile p = solve_profile(40.0, 1e-10);
    GammaEstimate g = gamma_constant(p);
    // Successive ladder differences shrink by about 4x.
    std::size_t m = g.ladder_gamma.size();
    REQUIRE(m >= 3);
    double d1 = g.ladder_gamma[m - 2] - g.ladder_gamma[m - 3];
    double d2 = g.ladder_gamma[m - 1] - g.ladder_gamma[m - 2];
    CHECK(std::abs(d2) < std::abs(d1) * 0.35);

    // Energy monotonicity: R -> E(B_R) - pi log R decreasing along the ladder.
    for (std::size_t k = 1; k < m; ++k) CHECK(g.ladder_gamma[k] < g.ladder_gamma[k - 1]);

    // Reference value frozen from this solver at tol 1e-10, r_max 40,
    // cross-checked at r_max 20 and at half resolution below.
    CHECK(std::abs(g.value - kGammaReference) < 1e-4);
}

TEST_CASE("gamma agrees across truncation radii to 1e-4") {
    RadialProfile p20 = solve_profile(20.0, 1e-10);
    RadialProfile p40 = solve_profile(40.0, 1e-10);
    GammaEstimate g20 = gamma_constant(p20);
    GammaEstimate g40 = gamma_constant(p40);
    CHECK(std::abs(g20.value - g40.value) < 1e-4);
}
