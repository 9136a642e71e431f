#pragma once

#include <string>
#include <vector>

#include "glv/fields.hpp"

namespace glv {

struct Atom {
    Vec2 p;
    double w = 0.0;
};

/// Finite signed measure on the grid: weighted atoms (kept exactly) plus an
/// optional density sampled at nodes. The lumped node-mass view assigns each
/// atom to its nearest node and converts the density by the cell area.
struct AtomicMeasure {
    GeometryPtr geom;
    std::vector<Atom> atoms;
    std::vector<double> density;  // per node; empty means zero

    explicit AtomicMeasure(GeometryPtr g) : geom(std::move(g)) {}

    void add_atom(Vec2 p, double w);
    void ensure_density();

    std::vector<double> node_mass() const;
    double total() const;
    double total_variation() const;  // of the node-mass view
    /// Sum of node masses over a disk (atom included iff its node center is).
    double mass_in_disk(Vec2 center, double radius) const;

    /// atoms + a reference string for the density grid (written separately).
    std::string to_json(const std::string& density_ref = "") const;

    static AtomicMeasure from_node_mass(GeometryPtr g, const std::vector<double>& mass);
};

}  // namespace glv
