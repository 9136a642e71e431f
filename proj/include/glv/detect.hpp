#pragma once

#include <optional>
#include <string>
#include <vector>

#include "glv/constants.hpp"
#include "glv/fields.hpp"

namespace glv {

/// A working subset of grid nodes (one covering cell, a ball, or the whole
/// masked domain) together with the distance of each node to the subset's
/// complement. The eroded set {dist > eps} plays the role of U_eps.
struct Region {
    GeometryPtr geom;
    std::vector<uint8_t> in;
    std::vector<double> dist;

    bool contains(int idx) const { return in[idx] != 0; }
    bool contains(int i, int j) const {
        return geom->in_bounds(i, j) && in[geom->index(i, j)] != 0;
    }

    static Region whole(GeometryPtr g);
    /// B(center, radius) intersected with the geometry mask.
    static Region disk(GeometryPtr g, Vec2 center, double radius);
    static Region nodes(GeometryPtr g, const std::vector<uint8_t>& membership);
};

struct Ball {
    Vec2 center;
    double radius = 0.0;
    int degree = 0;
    double energy = 0.0;  // cached e(B cap U) at construction time

    bool contains(Vec2 p) const { return (p - center).norm() <= radius; }
    bool contains_ball(const Ball& o, double tol = 1e-9) const {
        return (o.center - center).norm() + o.radius <= radius + tol;
    }
};

struct BallFamily {
    std::vector<Ball> balls;

    double total_radius() const;
    bool empty() const { return balls.empty(); }
    std::size_t size() const { return balls.size(); }
    /// Pairwise-disjointness restricted to a node set: two balls conflict
    /// only if some node of the set lies in both.
    bool disjoint_on(const Region& region) const;
    std::string to_json() const;  // list of {cx, cy, r, degree, energy}
};

struct Component {
    std::vector<int> nodes;
    bool compact = false;
    std::optional<int> boundary_degree;
    Vec2 centroid;
    double enclosing_radius = 0.0;  // max distance centroid -> node
};

struct ComponentSet {
    std::vector<Component> components;
};

/// Winding number of u/|u| on the circle of given center and radius,
/// sampled at step <= spacing/2 with bilinear interpolation.
/// Throws if |u| vanishes (below 1e-9) at a sample point.
int winding_number(const ComplexGrid& u, Vec2 center, double radius);

/// Connected components (4-connectivity) of {|u| <= 1/2} inside the eroded
/// region, with compactness flags and boundary degrees where defined.
ComponentSet sublevel_components(const ComplexGrid& u, const Region& region);

/// Disjoint closed balls of radius >= eps covering the essential sublevel
/// set, each carrying its energy and degree; every ball satisfies
/// e(B cap U) >= c1 r(B)/eps for the configured c1.
BallFamily initial_cover(const ComplexGrid& u, const VectorGrid& a, const Region& region,
                         const BoundConstants& cst, bool essential_only = true);

/// Merge touching balls into enclosing balls of summed radius until the
/// family is pairwise disjoint (degrees add).
void merge_until_disjoint(std::vector<Ball>& balls);

/// Smallest ball of radius r1+r2 containing both input balls.
Ball enclose_pair(const Ball& a, const Ball& b);

}  // namespace glv
