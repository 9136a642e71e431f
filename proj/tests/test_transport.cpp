#include <cmath>
#include <functional>
#include <random>

#include "doctest.h"
#include "glv/synth.hpp"
#include "glv/transport.hpp"
#include "test_util.hpp"

using namespace glv;

namespace {

// Brute-force oracle: the dual norm of an atomic measure equals the optimum
// of a small LP over the atom values of the witness, constrained by the
// graph metric (pairwise and to the exterior). Vertices of the polytope are
// enumerated from all subsets of active constraints.
double lp_polytope_oracle(const MetricRegion& region, const std::vector<int>& atom_ids,
                          const std::vector<double>& weights) {
    int m = (int)atom_ids.size();
    std::vector<std::vector<double>> dist(m);
    for (int i = 0; i < m; ++i) dist[i] = region.distances_from(atom_ids[i]);

    // Constraint list: |x_i - x_j| <= d_ij and |x_i| <= d_i,ext.
    struct Con {
        int i, j;  // j = -1 means the exterior constraint
        double d;
    };
    std::vector<Con> cons;
    for (int i = 0; i < m; ++i) {
        cons.push_back({i, -1, dist[i][region.size()]});
        for (int j = i + 1; j < m; ++j) cons.push_back({i, j, dist[i][atom_ids[j]]});
    }

    // Enumerate candidate vertices: solve all m-subsets of tight constraints
    // with all sign patterns; keep feasible points, maximize sum w x.
    double best = 0.0;
    int nc = (int)cons.size();
    std::vector<int> pick(m);
    std::function<void(int, int)> rec = [&](int start, int k) {
        if (k == m) {
            // For each sign assignment solve the tight system by forward
            // substitution over the constraint graph.
            int combos = 1;
            for (int t = 0; t < m; ++t) combos *= 2;
            for (int smask = 0; smask < combos; ++smask) {
                std::vector<double> x(m, 1e300);
                // Iterate a few sweeps: ext constraints pin directly,
                // pair constraints propagate.
                bool progress = true;
                for (int sweep = 0; sweep < m + 1 && progress; ++sweep) {
                    progress = false;
                    for (int t = 0; t < m; ++t) {
                        const Con& c = cons[pick[t]];
                        double sgn = (smask >> t) & 1 ? 1.0 : -1.0;
                        if (c.j < 0) {
                            double want = sgn * c.d;
                            if (x[c.i] == 1e300) {
                                x[c.i] = want;
                                progress = true;
                            }
                        } else {
                            if (x[c.i] != 1e300 && x[c.j] == 1e300) {
                                x[c.j] = x[c.i] - sgn * c.d;
                                progress = true;
                            } else if (x[c.j] != 1e300 && x[c.i] == 1e300) {
                                x[c.i] = x[c.j] + sgn * c.d;
                                progress = true;
                            }
                        }
                    }
                }
                bool ok = true;
                for (int t = 0; t < m && ok; ++t)
                    if (x[t] == 1e300) ok = false;
                for (const auto& c : cons)
                    if (ok) {
                        if (c.j < 0)
                            ok = std::abs(x[c.i]) <= c.d + 1e-9;
                        else
                            ok = std::abs(x[c.i] - x[c.j]) <= c.d + 1e-9;
                    }
                if (!ok) continue;
                double val = 0.0;
                for (int t = 0; t < m; ++t) val += weights[t] * x[t];
                best = std::max(best, val);
            }
            return;
        }
        for (int c = start; c < nc; ++c) {
            pick[k] = c;
            rec(c + 1, k + 1);
        }
    };
    rec(0, 0);
    return best;
}

AtomicMeasure atoms_at(GeometryPtr g, const std::vector<std::pair<int, double>>& list) {
    AtomicMeasure f(g);
    for (auto [idx, w] : list) f.add_atom(g->pos(idx), w);
    return f;
}

}  // namespace

TEST_CASE("dual norm: two interior atoms transport at graph distance") {
    auto g = make_square_geometry(0.5, 16);  // h = 1/15
    MetricRegion region = MetricRegion::whole_domain(g);
    double h = g->spacing();
    int a = g->index(6, 8), b = g->index(10, 8);
    AtomicMeasure f = atoms_at(g, {{a, 1.0}, {b, -1.0}});
    LipDualResult r = lip_dual_norm(f, region);
    CHECK(r.value == doctest::Approx(4.0 * h).epsilon(1e-12));
    CHECK(r.duality_gap < 1e-9);
}

TEST_CASE("dual norm: lone atom pays its distance to the exterior") {
    auto g = make_square_geometry(0.5, 16);
    MetricRegion region = MetricRegion::whole_domain(g);
    double h = g->spacing();
    // Node at grid position (3, 8): 4 crossings to leave through the left.
    AtomicMeasure f = atoms_at(g, {{g->index(3, 8), 2.5}});
    LipDualResult r = lip_dual_norm(f, region);
    CHECK(r.value == doctest::Approx(2.5 * 4.0 * h).epsilon(1e-12));
    CHECK(r.duality_gap < 1e-9);
}

TEST_CASE("dual norm: witness is Lipschitz and attains the value") {
    auto g = make_square_geometry(0.5, 12);
    MetricRegion region = MetricRegion::whole_domain(g);
    double h = g->spacing();
    AtomicMeasure f = atoms_at(g, {{g->index(2, 2), 1.0},
                                   {g->index(9, 3), -0.5},
                                   {g->index(5, 8), 0.75}});
    LipDualResult r = lip_dual_norm(f, region);
    CHECK(r.duality_gap < 1e-9);
    // Edge-wise Lipschitz check of the witness.
    for (int c = 0; c < region.size(); ++c) {
        int idx = region.grid_of[c];
        int i = g->ix(idx), j = g->iy(idx);
        if (region.id_of[g->index(i + 1, j)] >= 0 && i + 1 < g->nx())
            CHECK(std::abs(r.witness[c] - r.witness[region.id_of[g->index(i + 1, j)]]) <=
                  h + 1e-9);
        if (region.touches_exterior[c]) CHECK(std::abs(r.witness[c]) <= h + 1e-9);
    }
}

TEST_CASE("dual norm matches the LP polytope oracle on random 8x8 instances") {
    auto g = make_square_geometry(0.5, 8);
    MetricRegion region = MetricRegion::whole_domain(g);
    std::mt19937_64 rng(12345);
    std::uniform_int_distribution<int> node(0, 63);
    std::uniform_real_distribution<double> weight(-2.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<int> ids;
        std::vector<double> ws;
        while ((int)ids.size() < 5) {
            int idx = node(rng);
            if (std::find(ids.begin(), ids.end(), idx) == ids.end()) {
                ids.push_back(idx);
                ws.push_back(weight(rng));
            }
        }
        AtomicMeasure f(g);
        std::vector<int> compact;
        for (std::size_t k = 0; k < ids.size(); ++k) {
            f.add_atom(g->pos(ids[k]), ws[k]);
            compact.push_back(region.id_of[ids[k]]);
        }
        LipDualResult r = lip_dual_norm(f, region);
        double oracle = lp_polytope_oracle(region, compact, ws);
        CHECK(r.value == doctest::Approx(oracle).epsilon(1e-7));
        CHECK(r.duality_gap < 1e-9);
    }
}

TEST_CASE("triangle inequality of the dual norm on random pairs") {
    auto g = make_square_geometry(0.5, 10);
    MetricRegion region = MetricRegion::whole_domain(g);
    std::mt19937_64 rng(777);
    std::uniform_int_distribution<int> node(0, 99);
    std::uniform_real_distribution<double> weight(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        AtomicMeasure f1(g), f2(g), fsum(g);
        for (int k = 0; k < 4; ++k) {
            int n1 = node(rng), n2 = node(rng);
            double w1 = weight(rng), w2 = weight(rng);
            f1.add_atom(g->pos(n1), w1);
            f2.add_atom(g->pos(n2), w2);
            fsum.add_atom(g->pos(n1), w1);
            fsum.add_atom(g->pos(n2), w2);
        }
        double v1 = lip_dual_norm(f1, region).value;
        double v2 = lip_dual_norm(f2, region).value;
        double vs = lip_dual_norm(fsum, region).value;
        CHECK(vs <= v1 + v2 + 1e-9);
    }
}

TEST_CASE("displace: nonnegative input untouched; dipole within bounds") {
    auto g = make_square_geometry(0.5, 16);
    MetricRegion region = MetricRegion::whole_domain(g);
    AtomicMeasure fpos = atoms_at(g, {{g->index(5, 5), 1.0}, {g->index(9, 9), 2.0}});
    DisplaceResult r = displace(fpos, region);
    CHECK(r.residual_norm == doctest::Approx(0.0));
    CHECK(r.g.total() == doctest::Approx(3.0));

    // f = delta_a - delta_b: residual is min(d(a,b), d(a,ext)+d(b,ext))
    // but never more than the norm of f itself.
    int a = g->index(6, 8), b = g->index(10, 8);
    AtomicMeasure f = atoms_at(g, {{a, 1.0}, {b, -1.0}});
    DisplaceResult rd = displace(f, region);
    LipDualResult norm_f = lip_dual_norm(f, region);
    CHECK(rd.residual_norm <= norm_f.value + 1e-9);
    // g stays within [0, f_+].
    auto gm = rd.g.node_mass();
    for (std::size_t k = 0; k < gm.size(); ++k) {
        CHECK(gm[k] >= -1e-12);
        double fplus = ((int)k == a) ? 1.0 : 0.0;
        CHECK(gm[k] <= fplus + 1e-12);
    }
}

TEST_CASE("displace residual equals the minimum over admissible g (oracle)") {
    // Small region; enumerate g on a grid of candidate retention fractions.
    auto g = make_square_geometry(0.5, 8);
    MetricRegion region = MetricRegion::whole_domain(g);
    double h = g->spacing();
    int a = g->index(3, 3), b = g->index(5, 3);
    AtomicMeasure f = atoms_at(g, {{a, 2.0}, {b, -1.0}});
    DisplaceResult r = displace(f, region);
    // Candidates: keep t in [0,2] at a, ship the rest; the negative atom
    // needs 1 unit from a (distance 2h) or from the exterior (distance 4h
    // from b to the bottom/left edge... actually 3 crossings + 1).
    double d_ab = 2.0 * h;
    double d_b_ext = region.distance_to_exterior(region.id_of[b]);
    double expect = std::min(1.0 * d_ab, 1.0 * d_b_ext);
    CHECK(r.residual_norm == doctest::Approx(expect).epsilon(1e-9));

    // Exhaustive check against the dual-norm of f - g over a fine sweep of
    // admissible g = t delta_a (only the mass at a matters by symmetry).
    double best = 1e300;
    for (double t = 0.0; t <= 2.0 + 1e-9; t += 0.05) {
        AtomicMeasure fg(g);
        fg.add_atom(g->pos(a), 2.0 - t);
        fg.add_atom(g->pos(b), -1.0);
        best = std::min(best, lip_dual_norm(fg, region).value);
    }
    CHECK(r.residual_norm <= best + 1e-9);
}

TEST_CASE("displace_cheap: formula and bound via the dual norm") {
    auto g = make_square_geometry(0.5, 12);
    MetricRegion region = MetricRegion::whole_domain(g);
    AtomicMeasure f = atoms_at(g, {{g->index(2, 2), 1.0},
                                   {g->index(8, 3), -1.0},
                                   {g->index(5, 9), 1.0}});
    AtomicMeasure gch = displace_cheap(f, region);
    // f_+ mass 2, f_- mass 1: g = f_+ / 2.
    auto gm = gch.node_mass();
    CHECK(gm[g->index(2, 2)] == doctest::Approx(0.5));
    CHECK(gm[g->index(5, 9)] == doctest::Approx(0.5));
    CHECK(gch.total() == doctest::Approx(1.0));

    // || f - g || <= 2 diam f_-(w).
    AtomicMeasure resid(g);
    resid.add_atom(g->pos(g->index(2, 2)), 0.5);
    resid.add_atom(g->pos(g->index(5, 9)), 0.5);
    resid.add_atom(g->pos(g->index(8, 3)), -1.0);
    double val = lip_dual_norm(resid, region).value;
    double diam = std::hypot(g->xmax() - g->xmin(), g->ymax() - g->ymin());
    CHECK(val <= 2.0 * diam * 1.0 + 1e-9);

    AtomicMeasure bad = atoms_at(g, {{g->index(2, 2), 0.5}, {g->index(8, 3), -1.0}});
    CHECK_THROWS(displace_cheap(bad, region));
}

TEST_CASE("displace_in_ball: vortex-free ball has zero residual") {
    auto g = make_square_geometry(1.0, 128);
    auto [u, a] = synthesize(g, SynthSpec::uniform(1.0), shared_profile());
    ScalarGrid e = energy_density(u, a);
    AtomicMeasure nu(g);
    Ball ball{{0.2, 0.2}, 0.15, 0, 0.0};
    BallDisplaceResult r = displace_in_ball(ball, e, nu, 1.0);
    CHECK(r.residual_norm == doctest::Approx(0.0));
    CHECK(r.nu_mass == 0.0);
}

TEST_CASE("displace_in_ball: dipole ball conserves mass") {
    auto g = make_square_geometry(1.0, 384);
    double eps = 0.01;
    auto [u, a] = synthesize(
        g, SynthSpec::multi({{{-0.05, 0}, 1}, {{0.05, 0}, -1}}, eps), shared_profile());
    ScalarGrid e = energy_density(u, a);
    AtomicMeasure nu(g);
    nu.add_atom({-0.05, 0}, 2 * 3.14159265358979312);
    nu.add_atom({0.05, 0}, -2 * 3.14159265358979312);
    Ball ball{{0, 0}, 0.2, 0, 0.0};
    double lambda_value = 0.4;
    AtomicMeasure fB(g);
    fB.ensure_density();
    MetricRegion region = MetricRegion::disk(g, ball.center, ball.radius);
    for (int c = 0; c < region.size(); ++c) fB.density[region.grid_of[c]] = e.v[region.grid_of[c]];
    for (const auto& at : nu.atoms) fB.add_atom(at.p, -lambda_value * at.w);

    BallDisplaceResult r = displace_in_ball(ball, e, nu, lambda_value);
    // Interior ball with zero net degree: the displaced measure keeps the
    // total mass of f_B (the test function 1 is admissible).
    CHECK(r.g.total() == doctest::Approx(fB.total()).epsilon(1e-6));
}
