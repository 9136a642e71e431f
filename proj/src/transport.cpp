#include "glv/transport.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <queue>
#include <stdexcept>

#include "json.hpp"

namespace glv {

namespace {
constexpr double kPi = std::numbers::pi;
}

MetricRegion MetricRegion::from_nodes(GeometryPtr g, const std::vector<uint8_t>& in_A) {
    MetricRegion r;
    r.geom = g;
    r.id_of.assign(g->size(), -1);
    for (std::size_t k = 0; k < g->size(); ++k) {
        if (!in_A[k]) continue;
        if (!g->inside((int)k)) continue;
        r.id_of[k] = (int)r.grid_of.size();
        r.grid_of.push_back((int)k);
    }
    if (r.grid_of.empty()) throw std::invalid_argument("MetricRegion: empty node set");
    r.touches_exterior.assign(r.grid_of.size(), 0);
    for (std::size_t c = 0; c < r.grid_of.size(); ++c) {
        int idx = r.grid_of[c];
        int i = g->ix(idx), j = g->iy(idx);
        const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
            int ii = i + di[k], jj = j + dj[k];
            if (!g->in_bounds(ii, jj) || r.id_of[g->index(ii, jj)] < 0)
                r.touches_exterior[c] = 1;
        }
    }
    return r;
}

MetricRegion MetricRegion::whole_domain(GeometryPtr g) {
    return from_nodes(g, g->mask());
}

MetricRegion MetricRegion::disk(GeometryPtr g, Vec2 center, double radius) {
    std::vector<uint8_t> in(g->size(), 0);
    for (std::size_t k = 0; k < g->size(); ++k)
        if (g->inside((int)k) && (g->pos((int)k) - center).norm() <= radius) in[k] = 1;
    return from_nodes(g, in);
}

std::vector<double> MetricRegion::distances_from(int start) const {
    // Dijkstra over A plus the collapsed exterior node (id = size()).
    const double h = geom->spacing();
    int nb = size() + 1;
    std::vector<double> dist(nb, 1e300);
    std::priority_queue<std::pair<double, int>, std::vector<std::pair<double, int>>,
                        std::greater<>> pq;
    dist[start] = 0.0;
    pq.push({0.0, start});
    while (!pq.empty()) {
        auto [d, v] = pq.top();
        pq.pop();
        if (d > dist[v] + 1e-15) continue;
        auto relax = [&](int w, double nd) {
            if (nd < dist[w] - 1e-15) {
                dist[w] = nd;
                pq.push({nd, w});
            }
        };
        if (v == size()) {
            for (int c = 0; c < size(); ++c)
                if (touches_exterior[c]) relax(c, d + h);
            continue;
        }
        int idx = grid_of[v];
        int i = geom->ix(idx), j = geom->iy(idx);
        const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
            int ii = i + di[k], jj = j + dj[k];
            if (geom->in_bounds(ii, jj) && id_of[geom->index(ii, jj)] >= 0)
                relax(id_of[geom->index(ii, jj)], d + h);
        }
        if (touches_exterior[v]) relax(size(), d + h);
    }
    return dist;
}

double MetricRegion::distance_to_exterior(int c) const {
    // BFS suffices: uniform edge lengths.
    const double h = geom->spacing();
    std::vector<double> dist(size(), -1.0);
    std::queue<int> q;
    q.push(c);
    dist[c] = 0.0;
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        if (touches_exterior[v]) return dist[v] + h;
        int idx = grid_of[v];
        int i = geom->ix(idx), j = geom->iy(idx);
        const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
            int ii = i + di[k], jj = j + dj[k];
            if (!geom->in_bounds(ii, jj)) continue;
            int w = id_of[geom->index(ii, jj)];
            if (w >= 0 && dist[w] < 0) {
                dist[w] = dist[v] + h;
                q.push(w);
            }
        }
    }
    return 1e300;
}

std::string TransportPlan::to_json() const {
    nlohmann::ordered_json o;
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& e : edges) {
        nlohmann::ordered_json je;
        je["from"] = e.from_grid;
        je["to"] = e.to_grid;
        je["amount"] = e.amount;
        arr.push_back(je);
    }
    o["edges"] = arr;
    o["cost"] = cost;
    return o.dump();
}

namespace {

struct GraphArcs {
    // Compact-node graph arcs (both directions), plus exterior crossings.
    std::vector<std::array<int, 2>> pairs;  // compact ids
};

// Shared assembly of the flow network over a metric region.
// Node ids: [0, n) region nodes, n = exterior, then optional extras.
void add_region_arcs(MinCostFlow& mcf, const MetricRegion& region,
                     std::vector<std::array<int, 3>>& arc_list) {
    const GridGeometry& g = *region.geom;
    const double h = g.spacing();
    int n = region.size();
    for (int c = 0; c < n; ++c) {
        int idx = region.grid_of[c];
        int i = g.ix(idx), j = g.iy(idx);
        // Right and up neighbors once per undirected edge, two arcs each.
        const int di[2] = {1, 0}, dj[2] = {0, 1};
        for (int k = 0; k < 2; ++k) {
            int ii = i + di[k], jj = j + dj[k];
            if (!g.in_bounds(ii, jj)) continue;
            int w = region.id_of[g.index(ii, jj)];
            if (w < 0) continue;
            int a1 = mcf.add_arc(c, w, h);
            int a2 = mcf.add_arc(w, c, h);
            arc_list.push_back({a1, c, w});
            arc_list.push_back({a2, w, c});
        }
        if (region.touches_exterior[c]) {
            int a1 = mcf.add_arc(c, n, h);
            int a2 = mcf.add_arc(n, c, h);
            arc_list.push_back({a1, c, n});
            arc_list.push_back({a2, n, c});
        }
    }
}

TransportPlan extract_plan(const MinCostFlow& mcf, const MetricRegion& region,
                           const std::vector<std::array<int, 3>>& arc_list) {
    TransportPlan plan;
    int n = region.size();
    for (const auto& [arc, from, to] : arc_list) {
        double fl = mcf.flow(arc);
        if (fl > 1e-12) {
            TransportPlan::EdgeFlow ef;
            ef.from_grid = from < n ? region.grid_of[from] : -1;
            ef.to_grid = to < n ? region.grid_of[to] : -1;
            ef.amount = fl;
            plan.edges.push_back(ef);
        }
    }
    plan.cost = mcf.total_cost();
    return plan;
}

std::vector<double> measure_on_region(const AtomicMeasure& f, const MetricRegion& region) {
    std::vector<double> mass = f.node_mass();
    std::vector<double> out(region.size(), 0.0);
    for (std::size_t k = 0; k < mass.size(); ++k) {
        if (mass[k] == 0.0) continue;
        int c = region.id_of[k];
        if (c < 0) throw std::invalid_argument("measure support outside the region");
        out[c] = mass[k];
    }
    return out;
}

}  // namespace

LipDualResult lip_dual_norm(const AtomicMeasure& f, const MetricRegion& region) {
    std::vector<double> b = measure_on_region(f, region);
    int n = region.size();
    MinCostFlow mcf(n + 1);
    double total = 0.0;
    for (int c = 0; c < n; ++c) {
        mcf.set_supply(c, b[c]);
        total += b[c];
    }
    mcf.set_supply(n, -total);
    std::vector<std::array<int, 3>> arcs;
    add_region_arcs(mcf, region, arcs);
    auto status = mcf.solve();
    if (status != MinCostFlow::Status::Optimal)
        throw std::runtime_error("lip_dual_norm: flow solve failed");

    LipDualResult res;
    res.value = mcf.total_cost();
    res.plan = extract_plan(mcf, region, arcs);
    res.witness.resize(n);
    double pib = mcf.potential(n);
    double dual = 0.0;
    for (int c = 0; c < n; ++c) {
        res.witness[c] = pib - mcf.potential(c);
        dual += res.witness[c] * b[c];
    }
    res.duality_gap = std::abs(res.value - dual);
    return res;
}

DisplaceResult displace(const AtomicMeasure& f, const MetricRegion& region) {
    std::vector<double> b = measure_on_region(f, region);
    int n = region.size();
    // Node n = exterior, node n+1 = the supply tap.
    MinCostFlow mcf(n + 2);
    double demand = 0.0;
    for (int c = 0; c < n; ++c)
        if (b[c] < 0) demand += -b[c];
    for (int c = 0; c < n; ++c) mcf.set_supply(c, b[c] < 0 ? b[c] : 0.0);
    mcf.set_supply(n, 0.0);
    mcf.set_supply(n + 1, demand);
    std::vector<std::array<int, 3>> arcs;
    add_region_arcs(mcf, region, arcs);
    std::vector<std::pair<int, int>> taps;  // (arc, compact id)
    for (int c = 0; c < n; ++c)
        if (b[c] > 0) taps.push_back({mcf.add_arc(n + 1, c, 0.0, b[c]), c});
    mcf.add_arc(n + 1, n, 0.0);  // free creation at the exterior
    auto status = mcf.solve();
    if (status != MinCostFlow::Status::Optimal)
        throw std::runtime_error("displace: flow solve failed");

    DisplaceResult res{AtomicMeasure(region.geom), mcf.total_cost(),
                       extract_plan(mcf, region, arcs)};
    std::vector<double> gm(region.geom->size(), 0.0);
    for (int c = 0; c < n; ++c)
        if (b[c] > 0) gm[region.grid_of[c]] = b[c];
    for (auto [arc, c] : taps) {
        gm[region.grid_of[c]] -= mcf.flow(arc);
        if (std::abs(gm[region.grid_of[c]]) < 1e-13) gm[region.grid_of[c]] = 0.0;
    }
    res.g = AtomicMeasure::from_node_mass(region.geom, gm);
    return res;
}

AtomicMeasure displace_cheap(const AtomicMeasure& f, const MetricRegion& region) {
    std::vector<double> b = measure_on_region(f, region);
    double pos = 0.0, neg = 0.0;
    for (double x : b) {
        if (x > 0) pos += x;
        if (x < 0) neg += -x;
    }
    if (pos - neg < -1e-10 * std::max(1.0, pos + neg))
        throw std::invalid_argument("displace_cheap: requires f(region) >= 0");
    std::vector<double> gm(region.geom->size(), 0.0);
    double scale = pos > 0 ? 1.0 - neg / pos : 0.0;
    for (int c = 0; c < region.size(); ++c)
        if (b[c] > 0) gm[region.grid_of[c]] = b[c] * scale;
    return AtomicMeasure::from_node_mass(region.geom, gm);
}

BallDisplaceResult displace_in_ball(const Ball& ball, const ScalarGrid& e,
                                    const AtomicMeasure& nu, double lambda_value) {
    GeometryPtr g = e.geom;
    MetricRegion region = MetricRegion::disk(g, ball.center, ball.radius);
    AtomicMeasure f(g);
    f.ensure_density();
    for (int c = 0; c < region.size(); ++c) {
        int idx = region.grid_of[c];
        f.density[idx] = e.v[idx];
    }
    double nu_mass = 0.0;
    for (const auto& at : nu.atoms) {
        if (!ball.contains(at.p)) continue;
        f.add_atom(at.p, -lambda_value * at.w);
        nu_mass += std::abs(at.w);
    }
    DisplaceResult d = displace(f, region);
    BallDisplaceResult out{std::move(d.g), d.residual_norm, nu_mass,
                           nu_mass > 0 ? d.residual_norm / nu_mass : 0.0};
    return out;
}

GAssembly assemble_g(const ComplexGrid& u, const VectorGrid& a, const Covering& cov,
                     const DisjointFamily& bep, const VortexMeasure& vm,
                     const BoundConstants& cst) {
    const GridGeometry& g = *u.geom;
    const double eps = u.epsilon;
    const double L = std::abs(std::log(eps));
    const double ca = g.cell_area();
    ScalarGrid e = energy_density(u, a);
    Region whole = Region::whole(u.geom);

    if (cst.M <= 12.0 * cov.overlap_mprime * kPi)
        throw std::invalid_argument("assemble_g: M must exceed 12 m' pi");

    // Node masses of e and f = e - (L/2) nu.
    std::vector<double> e_mass(g.size(), 0.0);
    for (std::size_t k = 0; k < g.size(); ++k)
        if (g.inside((int)k)) e_mass[k] = e.v[k] * ca;
    std::vector<double> f_mass = e_mass;
    auto node_of = [&](Vec2 p) {
        int i, j;
        g.nearest_node(p, i, j);
        return g.index(i, j);
    };
    for (const auto& at : vm.nu.atoms) f_mass[node_of(at.p)] -= 0.5 * L * at.w;

    // Ball membership of nodes (center-in-ball convention).
    std::vector<int> ball_of(g.size(), -1);
    for (std::size_t bi = 0; bi < bep.balls.size(); ++bi) {
        const Ball& b = bep.balls[bi].ball;
        int i0, j0;
        g.nearest_node(b.center, i0, j0);
        int span = (int)std::ceil(b.radius / g.spacing()) + 1;
        for (int j = std::max(0, j0 - span); j <= std::min(g.ny() - 1, j0 + span); ++j)
            for (int i = std::max(0, i0 - span); i <= std::min(g.nx() - 1, i0 + span); ++i)
                if (g.inside(i, j) && (g.pos(i, j) - b.center).norm() <= b.radius)
                    ball_of[g.index(i, j)] = (int)bi;
    }

    GAssembly out{AtomicMeasure(u.geom), AtomicMeasure(u.geom), {}, 0, 0, 0, {}};
    std::vector<double> g_mass = f_mass;  // start from f, add sum(g_a - f_a)

    // Per-cell lambda values (needed per owned ball).
    std::map<int, LambdaAlpha> lam;
    for (const auto& [cell, n_a] : vm.n_alpha) {
        double e_a = 0.0;
        for (const auto& ob : bep.balls)
            if (ob.cell == cell) e_a += integrate_disk(e, ob.ball.center, ob.ball.radius);
        double cb = c_bar_alpha(n_a, e_a, cst.M, eps);
        lam[cell] = lambda_alpha(cst, cov.rho, cb, eps);
    }

    // Per-ball displacement; g^B and f^B kept as node masses.
    std::vector<std::vector<double>> gB_mass(bep.balls.size());
    std::vector<std::vector<double>> fB_mass(bep.balls.size());
    for (std::size_t bi = 0; bi < bep.balls.size(); ++bi) {
        const OwnedBall& ob = bep.balls[bi];
        double lv = lam.count(ob.cell) ? lam[ob.cell].value : 0.0;
        BallDisplaceResult br = displace_in_ball(ob.ball, e, vm.nu, lv);
        gB_mass[bi] = br.g.node_mass();
        std::vector<double> fb(g.size(), 0.0);
        for (std::size_t k = 0; k < g.size(); ++k)
            if (ball_of[k] == (int)bi) fb[k] = e_mass[k];
        for (const auto& at : vm.nu.atoms)
            if (ob.ball.contains(at.p)) fb[node_of(at.p)] -= lv * at.w;
        fB_mass[bi] = std::move(fb);
        out.ball_results.push_back(std::move(br));
    }

    // Cells carrying vortices: build the split remainder and displace it.
    const double inv4m = 1.0 / (4.0 * std::max(cov.overlap_mprime, 1));
    for (const auto& [cell, n_a] : vm.n_alpha) {
        const CoverCell& cc = cov.cells[cell];
        CellReport rep;
        rep.cell = cell;
        rep.n_alpha = n_a;
        rep.lambda_value = lam[cell].value;
        rep.lambda_clamped = lam[cell].clamped;

        // Interior test: the enlarged set clears the eps-collar.
        bool interior = true;
        for (int idx : cc.a_nodes)
            if (whole.dist[idx] <= eps) interior = false;
        // The enlarged disk may stick out of the grid rectangle entirely.
        if (cc.center.x - cov.r1 < g.xmin() + eps || cc.center.x + cov.r1 > g.xmax() - eps ||
            cc.center.y - cov.r1 < g.ymin() + eps || cc.center.y + cov.r1 > g.ymax() - eps)
            interior = false;
        rep.interior = interior;

        // gt_plus = (1/4m')(e 1_{B^c} + sum g^B) on A_alpha;
        // gt_minus = (L/2 - Lambda_a)(nu_a)_+ atoms.
        std::vector<double> gt(g.size(), 0.0), gtp(g.size(), 0.0);
        for (int idx : cc.a_nodes) {
            double m = (ball_of[idx] < 0) ? e_mass[idx] : gB_mass[ball_of[idx]][idx];
            gtp[idx] = inv4m * m;
            gt[idx] = gtp[idx];
        }
        double gtp_total = 0.0;
        for (int idx : cc.a_nodes) gtp_total += gtp[idx];
        double coef = 0.5 * L - lam[cell].value;
        double gtm_total = 0.0;
        const AtomicMeasure& nu_a = vm.per_cell.at(cell);
        for (const auto& at : nu_a.atoms)
            if (at.w > 0) {
                gt[node_of(at.p)] -= coef * at.w;
                gtm_total += coef * at.w;
            }

        std::vector<double> ga(g.size(), 0.0);
        if (interior) {
            double areaA = (double)cc.a_nodes.size() * ca;
            double gt_total = gtp_total - gtm_total;
            double c_alpha = std::max(0.0, -gt_total / areaA);
            rep.c_alpha = c_alpha;
            // Cheap displacement of gt + c_alpha on the enlarged cell.
            double pos = 0.0, neg = 0.0;
            std::vector<double> mu(g.size(), 0.0);
            for (int idx : cc.a_nodes) {
                mu[idx] = gt[idx] + c_alpha * ca;
                if (mu[idx] > 0)
                    pos += mu[idx];
                else
                    neg += -mu[idx];
            }
            double scale = pos > 0 ? std::max(0.0, 1.0 - neg / pos) : 0.0;
            for (int idx : cc.a_nodes) {
                double phi = mu[idx] > 0 ? mu[idx] * scale : 0.0;
                ga[idx] = phi - c_alpha * ca;
            }
        } else {
            // Boundary cells keep exactly the positive split part.
            for (int idx : cc.a_nodes) ga[idx] = gtp[idx];
        }

        // f_alpha = sum_B (f^B - g^B) + gt (which is gt_plus - gt_minus).
        std::vector<double> fa(g.size(), 0.0);
        for (std::size_t bi = 0; bi < bep.balls.size(); ++bi) {
            if (bep.balls[bi].cell != cell) continue;
            for (std::size_t k = 0; k < g.size(); ++k) {
                double d = fB_mass[bi][k] - gB_mass[bi][k];
                if (d != 0.0) fa[k] += d;
            }
        }
        for (int idx : cc.a_nodes) fa[idx] += gt[idx];

        double ga_tot = 0.0, fa_tot = 0.0;
        for (std::size_t k = 0; k < g.size(); ++k) {
            g_mass[k] += ga[k] - fa[k];
            ga_tot += ga[k];
            fa_tot += fa[k];
        }
        rep.g_alpha_total = ga_tot;
        rep.f_alpha_total = fa_tot;
        out.cells.push_back(rep);
    }

    out.g = AtomicMeasure::from_node_mass(u.geom, g_mass);
    out.f = AtomicMeasure::from_node_mass(u.geom, f_mass);
    // Upper bound e + (L/2)(nu)_- as node masses.
    std::vector<double> cap = e_mass;
    for (const auto& at : vm.nu.atoms)
        if (at.w < 0) cap[node_of(at.p)] += 0.5 * L * (-at.w);
    double min_g = 1e300, min_f = 1e300, upper = -1e300;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!g.inside((int)k)) continue;
        min_g = std::min(min_g, g_mass[k] / ca);
        min_f = std::min(min_f, f_mass[k] / ca);
        upper = std::max(upper, g_mass[k] - cap[k]);
    }
    out.min_g_density = min_g;
    out.min_f_density = min_f;
    out.upper_violation = std::max(0.0, upper);
    return out;
}

}  // namespace glv
