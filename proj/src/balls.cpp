#include "glv/balls.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace glv {

namespace {
constexpr double kPi = std::numbers::pi;

double ball_energy(const ScalarGrid& e, const Region& region, Vec2 c, double r) {
    const GridGeometry& g = *e.geom;
    int i0, j0;
    g.nearest_node(c, i0, j0);
    int span = (int)std::ceil((r + g.spacing()) / g.spacing()) + 1;
    double s = 0.0;
    for (int j = std::max(0, j0 - span); j <= std::min(g.ny() - 1, j0 + span); ++j)
        for (int i = std::max(0, i0 - span); i <= std::min(g.nx() - 1, i0 + span); ++i) {
            if (!region.contains(i, j)) continue;
            double w = cell_disk_overlap(g.pos(i, j), g.spacing(), c, r);
            if (w > 0) s += e.v[g.index(i, j)] * w;
        }
    return s;
}

}  // namespace

LowerBoundProfile::LowerBoundProfile(double epsilon, BoundConstants cst)
    : eps_(epsilon), cst_(cst) {
    if (!(epsilon > 0 && epsilon < 1)) throw std::invalid_argument("profile: bad epsilon");
    if (!(cst_.c2 > 0 && cst_.c2 < cst_.c1))
        throw std::invalid_argument("profile: need 0 < c2 < c1");
    // Crossing of c2/eps with the decreasing second branch.
    auto second = [&](double x) {
        return (kPi / x) / (1.0 + 0.5 * x + kPi * eps_ / (cst_.c0 * x));
    };
    double lo = 1e-9, hi = 10.0;
    if (second(lo) <= cst_.c2 / eps_) {
        xcross_ = lo;
    } else {
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (lo + hi);
            if (second(mid) > cst_.c2 / eps_)
                lo = mid;
            else
                hi = mid;
        }
        xcross_ = 0.5 * (lo + hi);
    }
}

double LowerBoundProfile::lambda(double x) const {
    if (!(x > 0)) throw std::invalid_argument("lambda: x must be positive");
    double second = (kPi / x) / (1.0 + 0.5 * x + kPi * eps_ / (cst_.c0 * x));
    return std::min(cst_.c2 / eps_, second);
}

namespace {

// Adaptive Simpson with absolute tolerance budget.
double simpson(const std::function<double(double)>& f, double a, double b, double fa,
               double fm, double fb, double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
           simpson(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double tol) {
    if (b <= a) return 0.0;
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4 * fm + fb);
    return simpson(f, a, b, fa, fm, fb, whole, tol, 40);
}

}  // namespace

double LowerBoundProfile::Lambda(double s) const {
    if (!(s > 0)) throw std::invalid_argument("Lambda: s must be positive");
    // The flat branch integrates exactly; the rational branch adaptively.
    double flat_end = std::min(s, xcross_);
    double val = cst_.c2 / eps_ * flat_end;
    if (s > xcross_) {
        auto f = [this](double x) { return lambda(x); };
        double tail = integrate_adaptive(f, xcross_, s, 1e-9 * std::max(1.0, val));
        val += tail;
    }
    return val;
}

BallFamily GrowthTrace::family_at(double s) const {
    if (events.empty()) return {};
    const TraceEvent* last = &events.front();
    for (const auto& ev : events)
        if (ev.s <= s + 1e-15) last = &ev;
    BallFamily fam;
    for (const auto& b : last->after) {
        Ball out;
        out.center = b.center;
        out.degree = b.degree;
        out.radius = b.growing ? std::max(b.radius, std::abs((double)b.degree) * s) : b.radius;
        fam.balls.push_back(out);
    }
    return fam;
}

double GrowthTrace::total_radius_at(double s) const {
    BallFamily f = family_at(s);
    return f.total_radius();
}

double GrowthTrace::s_for_total_radius(double target) const {
    // Piecewise linear and nondecreasing between events.
    if (events.empty()) return 0.0;
    for (std::size_t k = 0; k + 1 < events.size(); ++k) {
        double s0 = events[k].s, s1 = events[k + 1].s;
        double r0 = total_radius_at(s0), r1 = total_radius_at(s1 - 1e-13);
        if (target <= r0) return s0;
        if (target <= r1) {
            double slope = (r1 - r0) / std::max(s1 - s0, 1e-300);
            return slope > 0 ? s0 + (target - r0) / slope : s1;
        }
    }
    return s_final;
}

std::string GrowthTrace::to_json_lines() const {
    std::ostringstream out;
    for (const auto& ev : events) {
        nlohmann::ordered_json o;
        o["s"] = ev.s;
        switch (ev.kind) {
            case TraceEvent::Kind::Seed: o["kind"] = "seed"; break;
            case TraceEvent::Kind::Onset: o["kind"] = "onset"; break;
            case TraceEvent::Kind::Merge: o["kind"] = "merge"; break;
            case TraceEvent::Kind::Exit: o["kind"] = "exit"; break;
            case TraceEvent::Kind::Stop: o["kind"] = "stop"; break;
        }
        auto dump = [](const std::vector<TraceEventBall>& bs) {
            nlohmann::ordered_json arr = nlohmann::ordered_json::array();
            for (const auto& b : bs) {
                nlohmann::ordered_json jb;
                jb["cx"] = b.center.x;
                jb["cy"] = b.center.y;
                jb["r"] = b.radius;
                jb["degree"] = b.degree;
                jb["growing"] = b.growing;
                jb["in_U"] = b.in_U;
                arr.push_back(jb);
            }
            return arr;
        };
        o["before"] = dump(ev.before);
        o["after"] = dump(ev.after);
        out << o.dump() << "\n";
    }
    return out.str();
}

namespace {

struct LiveBall {
    Vec2 center;
    double radius;
    int degree;
    bool growing;
    bool in_U;
};

std::vector<TraceEventBall> snapshot(const std::vector<LiveBall>& balls, double s) {
    std::vector<TraceEventBall> out;
    for (const auto& b : balls)
        out.push_back({b.center, b.growing ? std::abs((double)b.degree) * s : b.radius,
                       b.degree, b.growing, b.in_U});
    return out;
}

double radius_at(const LiveBall& b, double s) {
    return b.growing ? std::abs((double)b.degree) * s : b.radius;
}

bool ball_in_U(const Region& region, Vec2 c, double r, double eps) {
    // Bilinear distance estimate at the center; the ball sits inside the
    // eroded region when its center clears eps + r.
    const GridGeometry& g = *region.geom;
    double fx = (c.x - g.origin().x) / g.spacing();
    double fy = (c.y - g.origin().y) / g.spacing();
    int i = std::clamp((int)std::floor(fx), 0, g.nx() - 2);
    int j = std::clamp((int)std::floor(fy), 0, g.ny() - 2);
    double tx = std::clamp(fx - i, 0.0, 1.0), ty = std::clamp(fy - j, 0.0, 1.0);
    auto D = [&](int ii, int jj) { return region.dist[g.index(ii, jj)]; };
    double dc = D(i, j) * (1 - tx) * (1 - ty) + D(i + 1, j) * tx * (1 - ty) +
                D(i, j + 1) * (1 - tx) * ty + D(i + 1, j + 1) * tx * ty;
    return dc > eps + r;
}

void refresh_flags(std::vector<LiveBall>& balls, const Region& region, double eps, double s) {
    for (auto& b : balls) {
        double r = radius_at(b, s);
        bool inU = ball_in_U(region, b.center, r, eps);
        b.in_U = inU;
        bool want_grow = inU && b.degree != 0 && r <= std::abs((double)b.degree) * s + 1e-13;
        if (b.growing && !want_grow) {
            b.radius = r;  // freeze at current size
            b.growing = false;
        } else if (!b.growing && want_grow) {
            b.growing = true;
        }
    }
}

// Merge every overlapping group at parameter s; returns true if anything merged.
bool merge_pass(std::vector<LiveBall>& balls, double s) {
    for (std::size_t i = 0; i < balls.size(); ++i)
        for (std::size_t j = i + 1; j < balls.size(); ++j) {
            double ri = radius_at(balls[i], s), rj = radius_at(balls[j], s);
            double d = (balls[i].center - balls[j].center).norm();
            // Closed balls: tangency already breaks disjointness.
            if (d <= ri + rj + 1e-12) {
                Ball a{balls[i].center, ri, balls[i].degree, 0.0};
                Ball b{balls[j].center, rj, balls[j].degree, 0.0};
                Ball m = enclose_pair(a, b);
                LiveBall nb{m.center, m.radius, m.degree, false, false};
                balls.erase(balls.begin() + j);
                balls[i] = nb;
                return true;
            }
        }
    return false;
}

}  // namespace

GrowthTrace grow_and_merge(const BallFamily& seed, const ComplexGrid& u, const VectorGrid& a,
                           const Region& region, double s_target, const BoundConstants& cst) {
    if (s_target >= 0.5)
        throw std::invalid_argument("grow_and_merge: s_target must stay below 1/2");
    const double eps = u.epsilon;
    std::vector<LiveBall> balls;
    for (const auto& b : seed.balls) balls.push_back({b.center, b.radius, b.degree, false, false});
    std::sort(balls.begin(), balls.end(), [](const LiveBall& x, const LiveBall& y) {
        return x.center.y != y.center.y ? x.center.y < y.center.y : x.center.x < y.center.x;
    });

    GrowthTrace trace;
    double s = 0.0;
    refresh_flags(balls, region, eps, s);
    while (merge_pass(balls, s)) refresh_flags(balls, region, eps, s);
    TraceEvent seed_ev;
    seed_ev.s = 0.0;
    seed_ev.kind = TraceEvent::Kind::Seed;
    seed_ev.after = snapshot(balls, s);
    trace.events.push_back(seed_ev);

    for (int guard = 0; guard < 100000; ++guard) {
        // Next event: earliest of onset, contact, region exit, or the stop.
        double s_next = s_target;
        enum { STOP, ONSET, CONTACT, EXIT } kind = STOP;
        std::size_t ei = 0, ej = 0;

        for (std::size_t i = 0; i < balls.size(); ++i) {
            const auto& b = balls[i];
            if (!b.growing && b.in_U && b.degree != 0) {
                double so = b.radius / std::abs((double)b.degree);
                if (so > s + 1e-13 && so < s_next) {
                    s_next = so;
                    kind = ONSET;
                    ei = i;
                }
            }
            if (b.growing) {
                // Exit of the eroded region: conservative linear bound using
                // the center distance (centers never move while growing).
                const GridGeometry& g = *region.geom;
                double fx = (b.center.x - g.origin().x) / g.spacing();
                double fy = (b.center.y - g.origin().y) / g.spacing();
                int ii = std::clamp((int)std::floor(fx), 0, g.nx() - 2);
                int jj = std::clamp((int)std::floor(fy), 0, g.ny() - 2);
                double tx = std::clamp(fx - ii, 0.0, 1.0), ty = std::clamp(fy - jj, 0.0, 1.0);
                auto D = [&](int i2, int j2) { return region.dist[g.index(i2, j2)]; };
                double dc = D(ii, jj) * (1 - tx) * (1 - ty) + D(ii + 1, jj) * tx * (1 - ty) +
                            D(ii, jj + 1) * (1 - tx) * ty + D(ii + 1, jj + 1) * tx * ty;
                double se = (dc - eps) / std::abs((double)b.degree);
                if (se > s + 1e-13 && se < s_next) {
                    s_next = se;
                    kind = EXIT;
                    ei = i;
                }
            }
        }
        for (std::size_t i = 0; i < balls.size(); ++i)
            for (std::size_t j = i + 1; j < balls.size(); ++j) {
                double slope = (balls[i].growing ? std::abs((double)balls[i].degree) : 0.0) +
                               (balls[j].growing ? std::abs((double)balls[j].degree) : 0.0);
                if (slope <= 0) continue;
                double gap = (balls[i].center - balls[j].center).norm() -
                             radius_at(balls[i], s) - radius_at(balls[j], s);
                double sc = s + gap / slope;
                if (sc > s + 1e-13 && sc < s_next) {
                    s_next = sc;
                    kind = CONTACT;
                    ei = i;
                    ej = j;
                }
            }

        TraceEvent ev;
        ev.s = s_next;
        ev.before = snapshot(balls, s_next);
        s = s_next;
        if (kind == STOP) {
            // Validity window: a growing ball at r >= |d|/2 means the circle
            // bound no longer applies past this parameter.
            for (const auto& b : balls)
                if (b.growing && radius_at(b, s) >= std::abs((double)b.degree) * 0.5 - 1e-12)
                    throw std::runtime_error("grow_and_merge: growth exceeded the r < |d|/2 window");
            ev.kind = TraceEvent::Kind::Stop;
            refresh_flags(balls, region, eps, s);
            ev.after = snapshot(balls, s);
            trace.events.push_back(ev);
            break;
        }
        if (kind == ONSET) {
            ev.kind = TraceEvent::Kind::Onset;
            balls[ei].growing = true;
        } else if (kind == EXIT) {
            ev.kind = TraceEvent::Kind::Exit;
            balls[ei].radius = radius_at(balls[ei], s);
            balls[ei].growing = false;
            balls[ei].in_U = false;
        } else {
            ev.kind = TraceEvent::Kind::Merge;
            for (auto& b : balls) {
                b.radius = radius_at(b, s);
                b.growing = false;  // re-derived below from flags
            }
            while (merge_pass(balls, s)) {
            }
        }
        refresh_flags(balls, region, eps, s);
        ev.after = snapshot(balls, s);
        trace.events.push_back(ev);
    }
    trace.s_final = s;
    return trace;
}

std::string DichotomyVerdict::to_csv() const {
    std::ostringstream out;
    out << "cx,cy,r,degree,energy,bound,slack,in_U\n";
    for (const auto& r : rows) {
        char buf[256];
        std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%d,%.12g,%.12g,%.12g,%d\n",
                      r.center.x, r.center.y, r.radius, r.degree, r.energy, r.bound, r.slack,
                      r.in_U ? 1 : 0);
        out << buf;
    }
    return out.str();
}

ConstructResult construct(const ComplexGrid& u, const VectorGrid& a, const Region& region,
                          double r_target, double c_bar, const BoundConstants& cst) {
    const double eps = u.epsilon;
    if (!(r_target < 0.5)) throw std::invalid_argument("construct: need r < 1/2");
    DichotomyVerdict verdict;
    verdict.c_bar = c_bar;
    double cap = std::sqrt(r_target / eps);
    if (c_bar < 2.0 || c_bar > cap)
        throw std::invalid_argument("construct: need 2 <= c_bar <= sqrt(r/eps)");

    BallFamily ess = initial_cover(u, a, region, cst, /*essential_only=*/true);
    // Non-essential compact sublevel components still need covering; their
    // balls carry zero degree and never grow.
    BallFamily extra;
    {
        ComponentSet cs = sublevel_components(u, region);
        for (const auto& comp : cs.components) {
            if (!comp.compact) continue;
            if (comp.boundary_degree && *comp.boundary_degree != 0) continue;
            Ball b;
            b.center = comp.centroid;
            b.radius = std::max(eps, comp.enclosing_radius + 0.75 * u.geom->spacing());
            b.degree = 0;
            extra.balls.push_back(b);
        }
    }
    double seed_total = ess.total_radius() + extra.total_radius();
    if (r_target <= seed_total)
        throw std::invalid_argument("construct: r below the measured seed cover radius");

    GrowthTrace trace;
    BallFamily grown = ess;
    if (!ess.empty()) {
        double grow_to = r_target - extra.total_radius();
        trace = grow_and_merge(ess, u, a, region, 0.45, cst);
        double s_hit = trace.s_for_total_radius(grow_to);
        grown = trace.family_at(s_hit);
    }
    std::vector<Ball> all = grown.balls;
    for (const auto& b : extra.balls) all.push_back(b);
    merge_until_disjoint(all);

    ScalarGrid e = energy_density(u, a);
    BallFamily fam;
    double total_energy = 0.0;
    for (auto& b : all) {
        b.energy = ball_energy(e, region, b.center, b.radius);
        total_energy += b.energy;
        fam.balls.push_back(b);
    }
    std::sort(fam.balls.begin(), fam.balls.end(), [](const Ball& x, const Ball& y) {
        return x.center.y != y.center.y ? x.center.y < y.center.y : x.center.x < y.center.x;
    });

    // Cover check, node by node.
    {
        ComponentSet cs = sublevel_components(u, region);
        for (const auto& comp : cs.components) {
            if (!comp.compact) continue;
            for (int idx : comp.nodes) {
                bool covered = false;
                for (const auto& b : fam.balls)
                    if (b.contains(u.geom->pos(idx))) covered = true;
                if (!covered)
                    throw std::runtime_error("construct: sublevel cover property violated");
            }
        }
    }

    verdict.branch1_lhs = total_energy;
    verdict.branch1_rhs = c_bar * std::log(r_target / eps);
    verdict.branch1 = verdict.branch1_lhs >= verdict.branch1_rhs;
    verdict.branch2 = true;
    verdict.branch2_min_slack = 1e300;
    for (const auto& b : fam.balls) {
        DichotomyRow row;
        row.center = b.center;
        row.radius = b.radius;
        row.degree = b.degree;
        row.energy = b.energy;
        row.in_U = ball_in_U(region, b.center, b.radius, eps);
        row.bound = row.in_U ? kPi * std::abs((double)b.degree) *
                                   (std::log(r_target / (eps * c_bar)) - cst.C_dichotomy)
                             : 0.0;
        row.slack = row.energy - row.bound;
        if (row.in_U) {
            verdict.branch2 = verdict.branch2 && row.slack >= 0.0;
            verdict.branch2_min_slack = std::min(verdict.branch2_min_slack, row.slack);
        }
        verdict.rows.push_back(row);
    }
    if (verdict.rows.empty()) verdict.branch2_min_slack = 0.0;

    ConstructResult res;
    res.family = std::move(fam);
    res.verdict = std::move(verdict);
    res.trace = std::move(trace);
    return res;
}

}  // namespace glv
