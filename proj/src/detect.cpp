#include "glv/detect.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace glv {

namespace {
constexpr double kPi = std::numbers::pi;

std::vector<double> region_distance(const GridGeometry& g, const std::vector<uint8_t>& in) {
    // Distance to the complement of the node set, reusing the geometry EDT
    // machinery: build a throwaway geometry whose mask is the set. The set
    // may be disconnected here, so run the transform directly.
    const double INF = 1e18;
    std::size_t n = g.size();
    std::vector<double> f(n);
    for (std::size_t k = 0; k < n; ++k) f[k] = in[k] ? INF : 0.0;

    auto dt1d = [](std::vector<double>& fv, std::vector<double>& dv, int m) {
        std::vector<int> v(m);
        std::vector<double> z(m + 1);
        int k = 0;
        v[0] = 0;
        z[0] = -1e30;
        z[1] = 1e30;
        for (int q = 1; q < m; ++q) {
            double s;
            while (true) {
                s = ((fv[q] + q * q) - (fv[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
                if (s <= z[k])
                    --k;
                else
                    break;
            }
            ++k;
            v[k] = q;
            z[k] = s;
            z[k + 1] = 1e30;
        }
        k = 0;
        for (int q = 0; q < m; ++q) {
            while (z[k + 1] < q) ++k;
            dv[q] = (q - v[k]) * (double)(q - v[k]) + fv[v[k]];
        }
    };
    std::vector<double> col(g.ny()), colo(g.ny());
    for (int i = 0; i < g.nx(); ++i) {
        for (int j = 0; j < g.ny(); ++j) col[j] = f[g.index(i, j)];
        dt1d(col, colo, g.ny());
        for (int j = 0; j < g.ny(); ++j) f[g.index(i, j)] = colo[j];
    }
    std::vector<double> row(g.nx()), rowo(g.nx());
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) row[i] = f[g.index(i, j)];
        dt1d(row, rowo, g.nx());
        for (int i = 0; i < g.nx(); ++i) f[g.index(i, j)] = rowo[i];
    }
    std::vector<double> out(n);
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            double d = std::sqrt(f[g.index(i, j)]) * g.spacing();
            Vec2 p = g.pos(i, j);
            double dr = std::min(std::min(p.x - g.xmin(), g.xmax() - p.x),
                                 std::min(p.y - g.ymin(), g.ymax() - p.y));
            out[g.index(i, j)] = std::min(d, dr);
        }
    return out;
}

}  // namespace

Region Region::whole(GeometryPtr g) {
    Region r;
    r.geom = g;
    r.in = g->mask();
    r.dist = region_distance(*g, r.in);
    return r;
}

Region Region::disk(GeometryPtr g, Vec2 center, double radius) {
    Region r;
    r.geom = g;
    r.in.assign(g->size(), 0);
    for (int j = 0; j < g->ny(); ++j)
        for (int i = 0; i < g->nx(); ++i)
            if (g->inside(i, j) && (g->pos(i, j) - center).norm() < radius)
                r.in[g->index(i, j)] = 1;
    r.dist = region_distance(*g, r.in);
    return r;
}

Region Region::nodes(GeometryPtr g, const std::vector<uint8_t>& membership) {
    Region r;
    r.geom = g;
    r.in = membership;
    r.dist = region_distance(*g, r.in);
    return r;
}

double BallFamily::total_radius() const {
    double s = 0.0;
    for (const auto& b : balls) s += b.radius;
    return s;
}

bool BallFamily::disjoint_on(const Region& region) const {
    const GridGeometry& g = *region.geom;
    std::vector<int> owner(g.size(), -1);
    for (std::size_t bi = 0; bi < balls.size(); ++bi) {
        const Ball& b = balls[bi];
        int i0, j0;
        g.nearest_node(b.center, i0, j0);
        int span = (int)std::ceil(b.radius / g.spacing()) + 1;
        for (int j = std::max(0, j0 - span); j <= std::min(g.ny() - 1, j0 + span); ++j)
            for (int i = std::max(0, i0 - span); i <= std::min(g.nx() - 1, i0 + span); ++i) {
                int idx = g.index(i, j);
                if (!region.contains(idx)) continue;
                if ((g.pos(i, j) - b.center).norm() > b.radius) continue;
                if (owner[idx] >= 0 && owner[idx] != (int)bi) return false;
                owner[idx] = (int)bi;
            }
    }
    return true;
}

std::string BallFamily::to_json() const {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& b : balls) {
        nlohmann::ordered_json o;
        o["cx"] = b.center.x;
        o["cy"] = b.center.y;
        o["r"] = b.radius;
        o["degree"] = b.degree;
        o["energy"] = b.energy;
        arr.push_back(o);
    }
    return arr.dump();
}

int winding_number(const ComplexGrid& u, Vec2 center, double radius) {
    const double h = u.geom->spacing();
    int K = std::max(32, (int)std::ceil(4.0 * kPi * radius / h));
    double total = 0.0;
    cplx prev = interp(u, {center.x + radius, center.y});
    if (std::abs(prev) < 1e-9)
        throw std::runtime_error("winding_number: zero of u on sampled circle");
    for (int k = 1; k <= K; ++k) {
        double th = 2.0 * kPi * k / K;
        cplx cur = interp(u, {center.x + radius * std::cos(th), center.y + radius * std::sin(th)});
        if (std::abs(cur) < 1e-9)
            throw std::runtime_error("winding_number: zero of u on sampled circle");
        total += std::arg(cur / prev);
        prev = cur;
    }
    double w = total / (2.0 * kPi);
    int d = (int)std::lround(w);
    if (std::abs(w - d) > 0.05)
        throw std::runtime_error("winding_number: phase increments did not close to an integer");
    return d;
}

ComponentSet sublevel_components(const ComplexGrid& u, const Region& region) {
    const GridGeometry& g = *u.geom;
    require_same_geometry(g, *region.geom);
    const double eps = u.epsilon;

    std::vector<uint8_t> in_S(g.size(), 0);
    for (std::size_t k = 0; k < g.size(); ++k)
        in_S[k] = region.contains((int)k) && region.dist[k] > eps && std::abs(u.v[k]) <= 0.5;

    ComponentSet cs;
    std::vector<int> label(g.size(), -1);
    for (std::size_t start = 0; start < g.size(); ++start) {
        if (!in_S[start] || label[start] >= 0) continue;
        Component comp;
        std::queue<int> q;
        q.push((int)start);
        label[start] = (int)cs.components.size();
        while (!q.empty()) {
            int idx = q.front();
            q.pop();
            comp.nodes.push_back(idx);
            int i = g.ix(idx), j = g.iy(idx);
            const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
            for (int k = 0; k < 4; ++k) {
                int ii = i + di[k], jj = j + dj[k];
                if (!g.in_bounds(ii, jj)) continue;
                int nidx = g.index(ii, jj);
                if (in_S[nidx] && label[nidx] < 0) {
                    label[nidx] = label[start];
                    q.push(nidx);
                }
            }
        }
        // Compactness: the component and its 1-ring stay inside U_eps.
        comp.compact = true;
        for (int idx : comp.nodes) {
            int i = g.ix(idx), j = g.iy(idx);
            for (int dj2 = -1; dj2 <= 1 && comp.compact; ++dj2)
                for (int di2 = -1; di2 <= 1; ++di2) {
                    int ii = i + di2, jj = j + dj2;
                    if (!g.in_bounds(ii, jj) || !region.contains(ii, jj) ||
                        region.dist[g.index(ii, jj)] <= eps) {
                        comp.compact = false;
                        break;
                    }
                }
            if (!comp.compact) break;
        }
        Vec2 c{0, 0};
        for (int idx : comp.nodes) c = c + g.pos(idx);
        comp.centroid = c / (double)comp.nodes.size();
        for (int idx : comp.nodes)
            comp.enclosing_radius =
                std::max(comp.enclosing_radius, (g.pos(idx) - comp.centroid).norm());
        cs.components.push_back(std::move(comp));
    }

    // Boundary degrees via a surrounding circle that avoids every sublevel
    // node and stays where |u| > 1/2.
    const double h = g.spacing();
    for (auto& comp : cs.components) {
        if (!comp.compact) continue;
        double d_foreign = 1e18;
        for (const auto& other : cs.components) {
            if (&other == &comp) continue;
            for (int idx : other.nodes)
                d_foreign = std::min(d_foreign, (g.pos(idx) - comp.centroid).norm());
        }
        double r_lo = comp.enclosing_radius + h;
        double r_hi = std::min(d_foreign - h, r_lo + std::max(4.0 * h, 0.5 * eps) + 0.2);
        for (double r = r_lo; r <= r_hi + 1e-15; r += 0.5 * h) {
            bool ok = true;
            int K = std::max(32, (int)std::ceil(4.0 * kPi * r / h));
            for (int k = 0; k < K && ok; ++k) {
                double th = 2.0 * kPi * k / K;
                Vec2 p{comp.centroid.x + r * std::cos(th), comp.centroid.y + r * std::sin(th)};
                if (std::abs(interp(u, p)) <= 0.55) ok = false;
            }
            if (ok) {
                comp.boundary_degree = winding_number(u, comp.centroid, r);
                break;
            }
        }
    }
    return cs;
}

Ball enclose_pair(const Ball& a, const Ball& b) {
    Ball out;
    double d = (b.center - a.center).norm();
    out.radius = a.radius + b.radius;
    out.degree = a.degree + b.degree;
    if (d < 1e-15) {
        out.center = a.center;
        return out;
    }
    // Center of the minimal ball containing both, kept even though the
    // radius is inflated to the exact sum: containment then has slack.
    double t = std::clamp((d + b.radius - a.radius) / (2.0 * d), 0.0, 1.0);
    out.center = a.center + (b.center - a.center) * t;
    return out;
}

void merge_until_disjoint(std::vector<Ball>& balls) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < balls.size() && !changed; ++i)
            for (std::size_t j = i + 1; j < balls.size() && !changed; ++j) {
                double d = (balls[i].center - balls[j].center).norm();
                if (d <= balls[i].radius + balls[j].radius + 1e-12) {
                    Ball m = enclose_pair(balls[i], balls[j]);
                    balls.erase(balls.begin() + j);
                    balls[i] = m;
                    changed = true;
                }
            }
    }
}

BallFamily initial_cover(const ComplexGrid& u, const VectorGrid& a, const Region& region,
                         const BoundConstants& cst, bool essential_only) {
    const GridGeometry& g = *u.geom;
    const double eps = u.epsilon;
    ScalarGrid e = energy_density(u, a);

    // Energy growth budget (the asymptotic hypothesis, with the configured
    // exponent; desk-scale epsilons need a generous budget).
    double G = integrate_nodes(e, [&] {
        std::vector<int> nodes;
        for (std::size_t k = 0; k < g.size(); ++k)
            if (region.contains((int)k)) nodes.push_back((int)k);
        return nodes;
    }());
    if (G > std::pow(eps, -cst.beta_budget) + 1e-9)
        throw std::runtime_error("initial_cover: energy exceeds the eps^{-beta} budget");

    ComponentSet cs = sublevel_components(u, region);
    std::vector<Ball> seeds;
    for (const auto& comp : cs.components) {
        if (!comp.compact) continue;
        if (essential_only && (!comp.boundary_degree || *comp.boundary_degree == 0)) continue;
        Ball b;
        b.center = comp.centroid;
        b.radius = std::max(eps, comp.enclosing_radius + 0.75 * g.spacing());
        b.degree = comp.boundary_degree.value_or(0);
        seeds.push_back(b);
    }
    merge_until_disjoint(seeds);

    BallFamily fam;
    for (auto& b : seeds) {
        double ener = 0.0;
        int i0, j0;
        g.nearest_node(b.center, i0, j0);
        int span = (int)std::ceil((b.radius + g.spacing()) / g.spacing()) + 1;
        for (int j = std::max(0, j0 - span); j <= std::min(g.ny() - 1, j0 + span); ++j)
            for (int i = std::max(0, i0 - span); i <= std::min(g.nx() - 1, i0 + span); ++i) {
                if (!region.contains(i, j)) continue;
                double w = cell_disk_overlap(g.pos(i, j), g.spacing(), b.center, b.radius);
                if (w > 0) ener += e.v[g.index(i, j)] * w;
            }
        b.energy = ener;
        if (ener < cst.c1 * b.radius / eps)
            throw std::runtime_error("initial_cover: seed ball violates the c1 r/eps bound");
        fam.balls.push_back(b);
    }
    std::sort(fam.balls.begin(), fam.balls.end(), [](const Ball& x, const Ball& y) {
        return x.center.y != y.center.y ? x.center.y < y.center.y : x.center.x < y.center.x;
    });
    return fam;
}

}  // namespace glv
