#include "glv/measure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace glv {

void AtomicMeasure::add_atom(Vec2 p, double w) {
    for (auto& a : atoms)
        if (a.p.x == p.x && a.p.y == p.y) {
            a.w += w;
            return;
        }
    atoms.push_back({p, w});
}

void AtomicMeasure::ensure_density() {
    if (density.empty()) density.assign(geom->size(), 0.0);
}

std::vector<double> AtomicMeasure::node_mass() const {
    std::vector<double> m(geom->size(), 0.0);
    if (!density.empty()) {
        double ca = geom->cell_area();
        for (std::size_t k = 0; k < m.size(); ++k) m[k] = density[k] * ca;
    }
    for (const auto& a : atoms) {
        int i, j;
        geom->nearest_node(a.p, i, j);
        m[geom->index(i, j)] += a.w;
    }
    return m;
}

double AtomicMeasure::total() const {
    double s = 0.0;
    if (!density.empty()) {
        double ca = geom->cell_area();
        for (double d : density) s += d * ca;
    }
    for (const auto& a : atoms) s += a.w;
    return s;
}

double AtomicMeasure::total_variation() const {
    double s = 0.0;
    for (double m : node_mass()) s += std::abs(m);
    return s;
}

double AtomicMeasure::mass_in_disk(Vec2 center, double radius) const {
    std::vector<double> m = node_mass();
    double s = 0.0;
    for (std::size_t k = 0; k < m.size(); ++k)
        if (m[k] != 0.0 && (geom->pos((int)k) - center).norm() <= radius) s += m[k];
    return s;
}

std::string AtomicMeasure::to_json(const std::string& density_ref) const {
    nlohmann::ordered_json o;
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    std::vector<Atom> sorted = atoms;
    std::sort(sorted.begin(), sorted.end(), [](const Atom& a, const Atom& b) {
        return a.p.y != b.p.y ? a.p.y < b.p.y : (a.p.x != b.p.x ? a.p.x < b.p.x : a.w < b.w);
    });
    for (const auto& a : sorted) {
        nlohmann::ordered_json ja;
        ja["x"] = a.p.x;
        ja["y"] = a.p.y;
        ja["w"] = a.w;
        arr.push_back(ja);
    }
    o["atoms"] = arr;
    o["density_ref"] = density_ref;
    o["total"] = total();
    return o.dump();
}

AtomicMeasure AtomicMeasure::from_node_mass(GeometryPtr g, const std::vector<double>& mass) {
    AtomicMeasure m(g);
    m.density.resize(g->size());
    double inv = 1.0 / g->cell_area();
    for (std::size_t k = 0; k < mass.size(); ++k) m.density[k] = mass[k] * inv;
    return m;
}

}  // namespace glv
