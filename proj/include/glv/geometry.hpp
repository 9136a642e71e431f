#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

namespace glv {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double norm2() const { return x * x + y * y; }
    double norm() const { return std::sqrt(norm2()); }
    // 90-degree counterclockwise rotation.
    Vec2 perp() const { return {-y, x}; }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

/// Uniform node-centered square grid over a rectangle with a per-node mask.
/// Node (i,j) sits at origin + (i,j)*spacing and owns the cell of side
/// `spacing` centered on it. Mask value 1 marks nodes of the working domain.
class GridGeometry {
public:
    GridGeometry(int nx, int ny, double spacing, Vec2 origin,
                 std::vector<uint8_t> mask = {});

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    double spacing() const { return h_; }
    Vec2 origin() const { return origin_; }
    std::size_t size() const { return static_cast<std::size_t>(nx_) * ny_; }
    double cell_area() const { return h_ * h_; }

    int index(int i, int j) const { return j * nx_ + i; }
    int ix(int idx) const { return idx % nx_; }
    int iy(int idx) const { return idx / nx_; }
    Vec2 pos(int i, int j) const { return {origin_.x + i * h_, origin_.y + j * h_}; }
    Vec2 pos(int idx) const { return pos(ix(idx), iy(idx)); }

    bool in_bounds(int i, int j) const {
        return i >= 0 && i < nx_ && j >= 0 && j < ny_;
    }
    bool inside(int i, int j) const {
        return in_bounds(i, j) && mask_[index(i, j)] != 0;
    }
    bool inside(int idx) const { return mask_[idx] != 0; }
    const std::vector<uint8_t>& mask() const { return mask_; }

    // Nearest node to a point (indices clamped to the grid).
    void nearest_node(Vec2 p, int& i, int& j) const;

    // Rectangle spanned by the node cells.
    double xmin() const { return origin_.x - 0.5 * h_; }
    double xmax() const { return origin_.x + (nx_ - 0.5) * h_; }
    double ymin() const { return origin_.y - 0.5 * h_; }
    double ymax() const { return origin_.y + (ny_ - 0.5) * h_; }

    // Euclidean distance from each node to the complement of the masked
    // domain (nearest masked-out node center or rectangle edge).
    const std::vector<double>& distance_to_complement() const;

    double mask_area() const;
    std::size_t mask_count() const;

    bool same_grid(const GridGeometry& o) const {
        return nx_ == o.nx_ && ny_ == o.ny_ && h_ == o.h_ &&
               origin_.x == o.origin_.x && origin_.y == o.origin_.y &&
               mask_ == o.mask_;
    }

private:
    int nx_, ny_;
    double h_;
    Vec2 origin_;
    std::vector<uint8_t> mask_;
    mutable std::vector<double> dist_;  // lazily computed, immutable after

    void check_mask_connected() const;
};

using GeometryPtr = std::shared_ptr<const GridGeometry>;

GeometryPtr make_geometry(int nx, int ny, double spacing, Vec2 origin,
                          std::vector<uint8_t> mask = {});

/// Rectangle geometry centered at `center` with extent `half` on each side
/// and approximately `n` nodes across; all nodes masked in.
GeometryPtr make_square_geometry(double half, int n, Vec2 center = {0, 0});

/// Exact area of the intersection of the axis-aligned square cell of side
/// `h` centered at `cell` with the closed disk B(center, radius).
double cell_disk_overlap(Vec2 cell, double h, Vec2 center, double radius);

}  // namespace glv
