#pragma once

#include <map>
#include <string>
#include <vector>

#include "glv/balls.hpp"
#include "glv/detect.hpp"
#include "glv/measure.hpp"

namespace glv {

struct CoverCell {
    int id = 0;
    Vec2 center;                // lattice point
    std::vector<int> u_nodes;   // U_alpha = B(center, ell0) cap mask
    std::vector<int> a_nodes;   // A_alpha = B(center, 3 ell0) cap mask
};

struct Covering {
    GeometryPtr geom;
    double ell0 = 0.1;
    double r0 = 0.1, r1 = 0.3;  // annulus radii: ell0 and 3 ell0
    std::vector<CoverCell> cells;
    int overlap_m = 0;        // max number of U_alpha containing one node
    int neighbor_m = 0;       // max number of cells meeting a given cell
    int overlap_mprime = 0;   // same for the enlarged sets A_alpha
    int intersect_N = 0;      // max number of U_beta meeting B(center, r1)
    double lebesgue_ell = 0;  // continuum Lebesgue number of the cover
    double rho_paper = 0;     // min(ell/(8m), ell0/N)
    double rho = 0;           // per-cell construction radius actually used

    int cell_of_point(Vec2 p) const;  // lowest cell id containing p, or -1
};

/// Lattice covering by balls of radius ell0 centered on ell0 Z^2.
/// The per-cell construction radius rho is the paper-side bound when that is
/// usable, otherwise the configured desk-scale fraction of ell0.
Covering build_covering(GeometryPtr g, double ell0, double rho_fraction = 0.35);

/// Per-cell ball construction at total radius cov.rho.
struct CellConstruction {
    int cell = -1;
    GrowthTrace trace;        // essential-seed growth inside U_alpha
    BallFamily at_rho;        // family queried at total radius rho
    BallFamily extra;         // zero-degree sublevel cover, never grown
    Region region;            // U_alpha with its own erosion distances
};

std::vector<CellConstruction> per_cell_construct(const ComplexGrid& u, const VectorGrid& a,
                                                 const Covering& cov,
                                                 const BoundConstants& cst);

/// A ball of the extracted disjoint family, remembering its cell.
struct OwnedBall {
    Ball ball;
    int cell = -1;
};

struct DisjointFamily {
    std::vector<OwnedBall> balls;
    BallFamily family() const;
};

/// Component-wise deletion: keep, in each connected component of the union,
/// only the balls of the cell that contains the component most deeply.
DisjointFamily extract_disjoint(const std::vector<CellConstruction>& per_cell,
                                const Covering& cov, const ComplexGrid& u,
                                const Region& whole);

/// Balls of the r-level per-cell families contained in surviving balls.
DisjointFamily nested_family(const DisjointFamily& bep,
                             const std::vector<CellConstruction>& per_cell,
                             const Covering& cov, double r);

struct VortexMeasure {
    AtomicMeasure nu;                  // 2 pi d_B atoms at small-ball centers
    std::map<int, AtomicMeasure> per_cell;  // nu_alpha, mutually singular
    std::map<int, double> n_alpha;          // |nu_alpha| / 2pi
};

VortexMeasure vortex_measure(const DisjointFamily& small, const ComplexGrid& u,
                             const Region& whole);

double c_bar_alpha(double n_alpha, double e_alpha, double M, double eps);

struct LambdaAlpha {
    double value = 0.0;     // (log(r/(eps c_bar)) - C0)/2, clamped at 0
    double raw = 0.0;       // before clamping
    bool clamped = false;   // c_bar exceeded sqrt(r/eps) and was capped
    double c_bar_used = 0.0;
    double eq24_slack = 0.0;  // (beta|log eps| + |log r| + C0)/2 - (|log eps|/2 - value)
};

/// Per-ball expected haul. The weight constant M makes c_bar enormous at
/// desk epsilon, so the cap sqrt(r/eps) is enforced here and flagged.
LambdaAlpha lambda_alpha(const BoundConstants& cst, double r, double c_bar, double eps);

struct AnnulusReport {
    double lhs = 0.0;          // integral over good radii of the circle bound
    double rhs = 0.0;          // annulus_c * (D0p - D1m)^2
    double good_measure = 0.0; // |T_alpha|
    int D0p = 0, D1m = 0;
    double energy_off_balls = 0.0;  // e(A_alpha minus the union of balls)
    double measured_c = 0.0;        // energy_off_balls / n_alpha^2 when n_alpha > 0
};

AnnulusReport annulus_bound(const ComplexGrid& u, const VectorGrid& a, const Covering& cov,
                            int cell, const DisjointFamily& bep, double n_alpha,
                            const BoundConstants& cst);

/// f = e - (|log eps|/2) nu as density plus atoms.
AtomicMeasure assemble_f(const ScalarGrid& e, const AtomicMeasure& nu, double eps);

}  // namespace glv
