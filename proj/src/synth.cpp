#include "glv/synth.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>

namespace glv {

SynthSpec SynthSpec::uniform(cplx c) {
    SynthSpec s;
    s.kind = Kind::Uniform;
    s.uniform_value = c;
    s.epsilon = 0.02;
    return s;
}

SynthSpec SynthSpec::single(Vec2 p, int degree, double eps) {
    SynthSpec s;
    s.vortices.push_back({p, degree});
    s.epsilon = eps;
    return s;
}

SynthSpec SynthSpec::multi(std::vector<VortexSpec> vs, double eps) {
    SynthSpec s;
    s.vortices = std::move(vs);
    s.epsilon = eps;
    return s;
}

SynthSpec SynthSpec::lattice(double pitch, int n, double eps) {
    SynthSpec s;
    s.epsilon = eps;
    double off = 0.5 * (n - 1) * pitch;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            s.vortices.push_back({{i * pitch - off, j * pitch - off}, 1});
    return s;
}

const RadialProfile& shared_profile() {
    static RadialProfile p = [] { return solve_profile(20.0, 1e-9); }();
    return p;
}

std::pair<ComplexGrid, VectorGrid> synthesize(GeometryPtr g, const SynthSpec& spec,
                                              const RadialProfile& profile) {
    ComplexGrid u(g, spec.epsilon);
    VectorGrid a(g);

    if (spec.kind == SynthSpec::Kind::Uniform) {
        for (auto& z : u.v) z = spec.uniform_value;
        return {std::move(u), std::move(a)};
    }

    const double eps = spec.epsilon;
    for (std::size_t i = 0; i < spec.vortices.size(); ++i) {
        for (std::size_t j = i + 1; j < spec.vortices.size(); ++j) {
            double d = (spec.vortices[i].p - spec.vortices[j].p).norm();
            if (d < 4.0 * eps)
                throw std::invalid_argument("synthesize: vortex centers closer than 4 eps");
        }
    }
    const auto& dist = g->distance_to_complement();
    for (const auto& vs : spec.vortices) {
        int i, j;
        g->nearest_node(vs.p, i, j);
        if (!g->inside(i, j) || dist[g->index(i, j)] < 2.0 * eps)
            throw std::invalid_argument("synthesize: vortex within 2 eps of mask boundary");
    }

    for (int j = 0; j < g->ny(); ++j)
        for (int i = 0; i < g->nx(); ++i) {
            Vec2 p = g->pos(i, j);
            cplx val = spec.uniform_value;
            for (const auto& vs : spec.vortices) {
                Vec2 d = p - vs.p;
                double r = d.norm();
                double th = std::atan2(d.y, d.x);
                val *= std::polar(profile.eval(r / eps), vs.degree * th);
            }
            u.at(i, j) = val;
        }

    if (spec.gauge_h0 != 0.0) {
        for (int j = 0; j < g->ny(); ++j)
            for (int i = 0; i < g->nx(); ++i) {
                Vec2 p = g->pos(i, j);
                a.at(i, j) = Vec2{-p.y, p.x} * (0.5 * spec.gauge_h0);
            }
    }
    return {std::move(u), std::move(a)};
}

std::pair<ComplexGrid, VectorGrid> gauge_transform(const ComplexGrid& u, const VectorGrid& a,
                                                   const ScalarGrid& phi) {
    require_same_geometry(*u.geom, *phi.geom);
    const GridGeometry& g = *u.geom;
    ComplexGrid u2(u.geom, u.epsilon);
    VectorGrid a2(u.geom);
    const double h = g.spacing();
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            int idx = g.index(i, j);
            u2.v[idx] = u.v[idx] * std::polar(1.0, phi.v[idx]);
            auto diff = [&](int di, int dj) {
                bool fwd = g.inside(i + di, j + dj), bwd = g.inside(i - di, j - dj);
                if (fwd && bwd)
                    return (phi.v[g.index(i + di, j + dj)] - phi.v[g.index(i - di, j - dj)]) /
                           (2 * h);
                if (fwd) return (phi.v[g.index(i + di, j + dj)] - phi.v[idx]) / h;
                if (bwd) return (phi.v[idx] - phi.v[g.index(i - di, j - dj)]) / h;
                return 0.0;
            };
            a2.v[idx] = a.v[idx] + Vec2{diff(1, 0), diff(0, 1)};
        }
    return {std::move(u2), std::move(a2)};
}

}  // namespace glv
