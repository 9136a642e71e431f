#include "glv/profile.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace glv {

namespace {

constexpr double kPi = std::numbers::pi;

double ode_rhs(double r, double f, double fp, int d) {
    // f'' = -f'/r + d^2 f/r^2 - f(1-f^2)
    return -fp / r + (double)(d * d) * f / (r * r) - f * (1.0 - f * f);
}

// One adaptive Cash-Karp RK45 step of the first-order system (f, f').
struct State {
    double f, fp;
};

// Advances by the accepted step (reported in `haccept`); `hstep` carries the
// suggestion for the next step on return.
State rk45_step(double r, State s, double& hstep, double& haccept, int d, double tol) {
    static const double a2 = 1. / 5, a3 = 3. / 10, a4 = 3. / 5, a5 = 1., a6 = 7. / 8;
    static const double b21 = 1. / 5;
    static const double b31 = 3. / 40, b32 = 9. / 40;
    static const double b41 = 3. / 10, b42 = -9. / 10, b43 = 6. / 5;
    static const double b51 = -11. / 54, b52 = 5. / 2, b53 = -70. / 27, b54 = 35. / 27;
    static const double b61 = 1631. / 55296, b62 = 175. / 512, b63 = 575. / 13824,
                        b64 = 44275. / 110592, b65 = 253. / 4096;
    static const double c1 = 37. / 378, c3 = 250. / 621, c4 = 125. / 594, c6 = 512. / 1771;
    static const double d1 = 2825. / 27648, d3 = 18575. / 48384, d4 = 13525. / 55296,
                        d5 = 277. / 14336, d6 = 1. / 4;

    auto F = [d](double rr, State st) { return State{st.fp, ode_rhs(rr, st.f, st.fp, d)}; };
    while (true) {
        double h = hstep;
        State k1 = F(r, s);
        State k2 = F(r + a2 * h, {s.f + h * b21 * k1.f, s.fp + h * b21 * k1.fp});
        State k3 = F(r + a3 * h, {s.f + h * (b31 * k1.f + b32 * k2.f),
                                  s.fp + h * (b31 * k1.fp + b32 * k2.fp)});
        State k4 = F(r + a4 * h, {s.f + h * (b41 * k1.f + b42 * k2.f + b43 * k3.f),
                                  s.fp + h * (b41 * k1.fp + b42 * k2.fp + b43 * k3.fp)});
        State k5 = F(r + a5 * h,
                     {s.f + h * (b51 * k1.f + b52 * k2.f + b53 * k3.f + b54 * k4.f),
                      s.fp + h * (b51 * k1.fp + b52 * k2.fp + b53 * k3.fp + b54 * k4.fp)});
        State k6 = F(r + a6 * h, {s.f + h * (b61 * k1.f + b62 * k2.f + b63 * k3.f +
                                             b64 * k4.f + b65 * k5.f),
                                  s.fp + h * (b61 * k1.fp + b62 * k2.fp + b63 * k3.fp +
                                              b64 * k4.fp + b65 * k5.fp)});
        State out5{s.f + h * (c1 * k1.f + c3 * k3.f + c4 * k4.f + c6 * k6.f),
                   s.fp + h * (c1 * k1.fp + c3 * k3.fp + c4 * k4.fp + c6 * k6.fp)};
        State out4{s.f + h * (d1 * k1.f + d3 * k3.f + d4 * k4.f + d5 * k5.f + d6 * k6.f),
                   s.fp + h * (d1 * k1.fp + d3 * k3.fp + d4 * k4.fp + d5 * k5.fp + d6 * k6.fp)};
        double err = std::max(std::abs(out5.f - out4.f), std::abs(out5.fp - out4.fp));
        if (err <= tol || h < 1e-12) {
            haccept = h;
            hstep = h * std::clamp(0.9 * std::pow(tol / std::max(err, 1e-300), 0.2), 0.2, 5.0);
            return out5;
        }
        hstep = h * std::max(0.9 * std::pow(tol / err, 0.25), 0.1);
    }
}

// Integrate from the small-r series start to r_end; returns false if f left
// [0, 1.5] on the way (used by the shooting bracket).
bool shoot_to(double a, double r_end, int d, double tol, double& f_end, double& fp_end,
              std::vector<double>* rs = nullptr, std::vector<double>* fs = nullptr) {
    double r = 1e-4;
    State s;
    if (std::abs(d) == 1) {
        s.f = a * r * (1.0 - r * r / 8.0);
        s.fp = a * (1.0 - 3.0 * r * r / 8.0);
    } else {
        s.f = a * std::pow(r, std::abs(d));
        s.fp = a * std::abs(d) * std::pow(r, std::abs(d) - 1);
    }
    double h = 1e-4;
    while (r < r_end - 1e-14) {
        double hnext = std::min(h, r_end - r);
        double haccept = hnext;
        State next = rk45_step(r, s, hnext, haccept, d, tol);
        r += haccept;
        h = hnext;
        s = next;
        if (rs) {
            rs->push_back(r);
            fs->push_back(s.f);
        }
        if (s.f < 0.0 || s.f > 1.5) {
            f_end = s.f;
            fp_end = s.fp;
            return false;
        }
    }
    f_end = s.f;
    fp_end = s.fp;
    return true;
}

double asymptote(double r, int d) {
    // 1 - f ~ A2/r^2 + A4/r^4 + A6/r^6, matching the equation order by order.
    double d2 = (double)(d * d);
    double A2 = d2 / 2.0;
    double A4 = (A2 * (4.0 - d2) + 3.0 * A2 * A2) / 2.0;            // 9/8 for d=1
    double A6 = ((16.0 - d2) * A4 + 6.0 * A2 * A4 - A2 * A2 * A2) / 2.0;  // 161/16 for d=1
    return 1.0 - A2 / (r * r) - A4 / std::pow(r, 4) - A6 / std::pow(r, 6);
}

}  // namespace

double RadialProfile::eval(double r) const {
    if (r <= 0.0) return 0.0;
    if (r >= r_max)
        return 1.0 - asym_a2 / (r * r) - asym_a4 / std::pow(r, 4) - asym_a6 / std::pow(r, 6);
    double t = r / step;
    int k = std::min((int)t, (int)radii.size() - 2);
    double w = t - k;
    return values[k] * (1.0 - w) + values[k + 1] * w;
}

double RadialProfile::eval_deriv(double r) const {
    if (r >= r_max)
        return 2.0 * asym_a2 / std::pow(r, 3) + 4.0 * asym_a4 / std::pow(r, 5) +
               6.0 * asym_a6 / std::pow(r, 7);
    double t = r / step;
    int k = std::clamp((int)t, 0, (int)radii.size() - 2);
    return (values[k + 1] - values[k]) / step;
}

void RadialProfile::validate() const {
    if (radii.empty() || radii.size() != values.size())
        throw std::runtime_error("profile: empty or inconsistent samples");
    if (std::abs(values.front()) > 1e-12) throw std::runtime_error("profile: f(0) != 0");
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (values[k] < -1e-12 || values[k] > 1.0 + 1e-12)
            throw std::runtime_error("profile: f outside [0,1]");
        if (k > 0 && values[k] + 1e-12 < values[k - 1])
            throw std::runtime_error("profile: f not nondecreasing");
    }
    // Tail pinned to the far-field asymptote rather than to 1 itself: at any
    // practical r_max the defect 1 - f(r_max) ~ d^2/(2 r_max^2) dominates.
    double want = asymptote(r_max, degree);
    if (std::abs(values.back() - want) > 1e-6)
        throw std::runtime_error("profile: tail does not match asymptote");
}

RadialProfile solve_profile(double r_max, double tol, int degree) {
    if (r_max < 20.0) throw std::invalid_argument("solve_profile: r_max must be >= 20");
    if (tol > 1e-8) throw std::invalid_argument("solve_profile: tol must be <= 1e-8");
    int d = std::abs(degree);
    if (d == 0) throw std::invalid_argument("solve_profile: degree must be nonzero");

    // Stage 1: bisection on the shooting parameter. Too large -> f crosses 1,
    // too small -> f turns back down toward 0.
    double lo = 0.05, hi = 2.0;
    double r_shoot = std::min(12.0, r_max);
    auto classify = [&](double a) {
        double fe, fpe;
        std::vector<double> rs, fs;
        bool ok = shoot_to(a, r_shoot, d, 1e-12, fe, fpe, &rs, &fs);
        if (!ok) return fe > 1.0 ? +1 : -1;
        // Completed: overshoot if f exceeded 1, undershoot if decreasing.
        for (std::size_t k = 0; k < fs.size(); ++k)
            if (fs[k] > 1.0) return +1;
        return fpe < 0.0 ? -1 : (fe > 1.0 ? +1 : -1);
    };
    if (classify(lo) != -1 || classify(hi) != +1)
        throw std::runtime_error("solve_profile: shooting bracket failed");
    for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        if (classify(mid) == +1)
            hi = mid;
        else
            lo = mid;
    }
    double a = 0.5 * (lo + hi);

    // Stage 2: Newton relaxation of the finite-difference system on a uniform
    // grid, seeded by the shooting solution and the far-field series.
    double step = r_max / std::ceil(r_max / 0.002);
    int n = (int)std::lround(r_max / step) + 1;
    std::vector<double> f(n);
    {
        double fe, fpe;
        std::vector<double> rs, fs;
        shoot_to(a, r_shoot, d, 1e-12, fe, fpe, &rs, &fs);
        std::size_t pos = 0;
        for (int k = 0; k < n; ++k) {
            double r = k * step;
            if (r <= 1e-4) {
                f[k] = (d == 1) ? a * r : a * std::pow(r, d);
            } else if (r < r_shoot) {
                while (pos + 1 < rs.size() && rs[pos + 1] < r) ++pos;
                double r0 = (pos == 0) ? 1e-4 : rs[pos];
                double f0 = (pos == 0) ? a * 1e-4 : fs[pos];
                double r1 = rs[std::min(pos + 1, rs.size() - 1)];
                double f1 = fs[std::min(pos + 1, rs.size() - 1)];
                double w = (r1 > r0) ? (r - r0) / (r1 - r0) : 0.0;
                f[k] = f0 * (1 - w) + f1 * w;
            } else {
                f[k] = asymptote(std::max(r, 1.0), d);
            }
            f[k] = std::clamp(f[k], 0.0, 1.0);
        }
    }
    f[0] = 0.0;
    f[n - 1] = asymptote(r_max, d);

    // Tridiagonal Newton iterations. Residual at node k (1..n-2):
    // (f[k+1]-2f[k]+f[k-1])/h^2 + (f[k+1]-f[k-1])/(2 h r) - d^2 f/r^2 + f - f^3.
    std::vector<double> du(n), dd(n), dl(n), rhs(n), delta(n);
    const double h2 = step * step;
    for (int iter = 0; iter < 60; ++iter) {
        double maxres = 0.0;
        for (int k = 1; k < n - 1; ++k) {
            double r = k * step;
            double res = (f[k + 1] - 2 * f[k] + f[k - 1]) / h2 +
                         (f[k + 1] - f[k - 1]) / (2 * step * r) -
                         (double)(d * d) * f[k] / (r * r) + f[k] * (1.0 - f[k] * f[k]);
            rhs[k] = -res;
            maxres = std::max(maxres, std::abs(res));
            dl[k] = 1.0 / h2 - 1.0 / (2 * step * r);
            dd[k] = -2.0 / h2 - (double)(d * d) / (r * r) + 1.0 - 3.0 * f[k] * f[k];
            du[k] = 1.0 / h2 + 1.0 / (2 * step * r);
        }
        if (maxres < tol * 0.1 && iter > 0) break;
        // Thomas solve on nodes 1..n-2 (Dirichlet ends).
        for (int k = 2; k < n - 1; ++k) {
            double m = dl[k] / dd[k - 1];
            dd[k] -= m * du[k - 1];
            rhs[k] -= m * rhs[k - 1];
        }
        delta[n - 2] = rhs[n - 2] / dd[n - 2];
        for (int k = n - 3; k >= 1; --k)
            delta[k] = (rhs[k] - du[k] * delta[k + 1]) / dd[k];
        for (int k = 1; k < n - 1; ++k)
            f[k] = std::clamp(f[k] + delta[k], 0.0, 1.0);
    }

    RadialProfile p;
    p.r_max = r_max;
    p.step = step;
    p.degree = d;
    p.radii.resize(n);
    p.values = std::move(f);
    for (int k = 0; k < n; ++k) p.radii[k] = k * step;
    double d2c = (double)(d * d);
    p.asym_a2 = d2c / 2.0;
    p.asym_a4 = (p.asym_a2 * (4.0 - d2c) + 3.0 * p.asym_a2 * p.asym_a2) / 2.0;
    p.asym_a6 = ((16.0 - d2c) * p.asym_a4 + 6.0 * p.asym_a2 * p.asym_a4 -
                 p.asym_a2 * p.asym_a2 * p.asym_a2) / 2.0;
    // Leading coefficient from the series f ~ a r (1 - r^2/8) for d=1.
    if (d == 1) {
        double r1 = p.radii[1];
        p.slope0 = p.values[1] / (r1 * (1.0 - r1 * r1 / 8.0));
    } else {
        p.slope0 = p.values[1] / std::pow(p.radii[1], d);
    }
    p.validate();
    return p;
}

double profile_energy(const RadialProfile& p, double R) {
    // 2 pi int_0^R [ (f'^2 + d^2 f^2/r^2)/2 + (1-f^2)^2/4 ] r dr, composite
    // Simpson on the sample grid with the analytic r->0 limit.
    int n = (int)p.radii.size();
    int kmax = std::min(n - 1, (int)std::floor(R / p.step));
    if (kmax % 2 == 1) --kmax;
    auto integrand = [&](int k) {
        double r = p.radii[k];
        double d2 = (double)(p.degree * p.degree);
        double fp = (k == 0)   ? p.slope0
                    : (k == n - 1) ? (p.values[k] - p.values[k - 1]) / p.step
                                   : (p.values[k + 1] - p.values[k - 1]) / (2 * p.step);
        double fr;  // f/r with the origin limit
        if (k == 0)
            fr = (p.degree == 1) ? p.slope0 : 0.0;
        else
            fr = p.values[k] / r;
        double e = 0.5 * (fp * fp + d2 * fr * fr) +
                   0.25 * (1.0 - p.values[k] * p.values[k]) * (1.0 - p.values[k] * p.values[k]);
        return e * r;
    };
    double s = 0.0;
    for (int k = 0; k + 2 <= kmax; k += 2)
        s += p.step / 3.0 * (integrand(k) + 4.0 * integrand(k + 1) + integrand(k + 2));
    return 2.0 * kPi * s;
}

GammaEstimate radial_cost_constant(const RadialProfile& p) {
    GammaEstimate g;
    double d2 = (double)(p.degree * p.degree);
    // Geometric ladder of radii up to r_max.
    std::vector<double> Rs;
    for (double R = p.r_max; R >= 4.0; R /= 2.0) Rs.push_back(R);
    std::reverse(Rs.begin(), Rs.end());
    for (double R : Rs) {
        double val = profile_energy(p, R) - kPi * d2 * std::log(R);
        g.ladder_R.push_back(R);
        g.ladder_gamma.push_back(val);
    }
    std::size_t m = g.ladder_gamma.size();
    if (m < 2) throw std::runtime_error("gamma ladder too short");
    // Tail behaves like c/R^2: Richardson with factor 4.
    double g1 = g.ladder_gamma[m - 2], g2 = g.ladder_gamma[m - 1];
    g.value = (4.0 * g2 - g1) / 3.0;
    g.error_estimate = std::abs(g2 - g1) / 3.0;
    return g;
}

GammaEstimate gamma_constant(const RadialProfile& p) {
    if (p.degree != 1) throw std::invalid_argument("gamma_constant: degree-one profile required");
    // Non-monotone ladder tail signals a bad profile.
    GammaEstimate g = radial_cost_constant(p);
    for (std::size_t k = 1; k + 1 < g.ladder_gamma.size(); ++k) {
        double d1 = g.ladder_gamma[k] - g.ladder_gamma[k - 1];
        double d2 = g.ladder_gamma[k + 1] - g.ladder_gamma[k];
        if (std::abs(d2) > std::abs(d1) * 0.7 + 1e-12)
            throw std::runtime_error("gamma_constant: ladder tail not contracting");
    }
    return g;
}

void export_profile_csv(const RadialProfile& p, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "r,f\n";
    for (std::size_t k = 0; k < p.radii.size(); ++k)
        out << p.radii[k] << "," << p.values[k] << "\n";
}

}  // namespace glv
