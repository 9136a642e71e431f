#include "glv/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace glv {

GridGeometry::GridGeometry(int nx, int ny, double spacing, Vec2 origin,
                           std::vector<uint8_t> mask)
    : nx_(nx), ny_(ny), h_(spacing), origin_(origin), mask_(std::move(mask)) {
    if (nx_ < 4 || ny_ < 4) throw std::invalid_argument("grid: nx, ny must be >= 4");
    if (!(h_ > 0.0)) throw std::invalid_argument("grid: spacing must be positive");
    if (mask_.empty()) mask_.assign(size(), 1);
    if (mask_.size() != size()) throw std::invalid_argument("grid: mask size mismatch");
    check_mask_connected();
}

void GridGeometry::nearest_node(Vec2 p, int& i, int& j) const {
    i = static_cast<int>(std::lround((p.x - origin_.x) / h_));
    j = static_cast<int>(std::lround((p.y - origin_.y) / h_));
    i = std::clamp(i, 0, nx_ - 1);
    j = std::clamp(j, 0, ny_ - 1);
}

void GridGeometry::check_mask_connected() const {
    // 4-connectivity flood fill from the first masked-in node.
    std::size_t total = mask_count();
    if (total == 0) throw std::invalid_argument("grid: empty mask");
    std::vector<uint8_t> seen(size(), 0);
    std::queue<int> q;
    for (std::size_t k = 0; k < size(); ++k) {
        if (mask_[k]) {
            q.push(static_cast<int>(k));
            seen[k] = 1;
            break;
        }
    }
    std::size_t reached = 0;
    while (!q.empty()) {
        int idx = q.front();
        q.pop();
        ++reached;
        int i = ix(idx), j = iy(idx);
        const int di[4] = {1, -1, 0, 0};
        const int dj[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
            int ii = i + di[k], jj = j + dj[k];
            if (inside(ii, jj) && !seen[index(ii, jj)]) {
                seen[index(ii, jj)] = 1;
                q.push(index(ii, jj));
            }
        }
    }
    if (reached != total)
        throw std::invalid_argument("grid: masked-in nodes are not connected");
}

std::size_t GridGeometry::mask_count() const {
    std::size_t n = 0;
    for (uint8_t m : mask_) n += (m != 0);
    return n;
}

double GridGeometry::mask_area() const { return mask_count() * cell_area(); }

namespace {

// Felzenszwalb-Huttenlocher 1D squared distance transform.
void dt1d(const std::vector<double>& f, std::vector<double>& d, int n) {
    static thread_local std::vector<int> v;
    static thread_local std::vector<double> z;
    v.assign(n, 0);
    z.assign(n + 1, 0.0);
    int k = 0;
    v[0] = 0;
    z[0] = -std::numeric_limits<double>::infinity();
    z[1] = std::numeric_limits<double>::infinity();
    for (int q = 1; q < n; ++q) {
        double s;
        while (true) {
            s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
            if (s <= z[k]) {
                --k;
            } else {
                break;
            }
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = std::numeric_limits<double>::infinity();
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q) ++k;
        d[q] = (q - v[k]) * (double)(q - v[k]) + f[v[k]];
    }
}

}  // namespace

const std::vector<double>& GridGeometry::distance_to_complement() const {
    if (!dist_.empty()) return dist_;
    const double INF = 1e18;
    std::vector<double> g(size());
    for (std::size_t k = 0; k < size(); ++k) g[k] = mask_[k] ? INF : 0.0;

    // Column pass then row pass of the squared EDT (grid units).
    std::vector<double> col(ny_), colout(ny_);
    for (int i = 0; i < nx_; ++i) {
        for (int j = 0; j < ny_; ++j) col[j] = g[index(i, j)];
        dt1d(col, colout, ny_);
        for (int j = 0; j < ny_; ++j) g[index(i, j)] = colout[j];
    }
    std::vector<double> row(nx_), rowout(nx_);
    for (int j = 0; j < ny_; ++j) {
        for (int i = 0; i < nx_; ++i) row[i] = g[index(i, j)];
        dt1d(row, rowout, nx_);
        for (int i = 0; i < nx_; ++i) g[index(i, j)] = rowout[i];
    }

    dist_.resize(size());
    for (int j = 0; j < ny_; ++j) {
        for (int i = 0; i < nx_; ++i) {
            double d = std::sqrt(g[index(i, j)]) * h_;
            // Also the surrounding rectangle acts as complement.
            Vec2 p = pos(i, j);
            double dr = std::min(std::min(p.x - xmin(), xmax() - p.x),
                                 std::min(p.y - ymin(), ymax() - p.y));
            dist_[index(i, j)] = std::min(d, dr);
        }
    }
    return dist_;
}

GeometryPtr make_geometry(int nx, int ny, double spacing, Vec2 origin,
                          std::vector<uint8_t> mask) {
    return std::make_shared<const GridGeometry>(nx, ny, spacing, origin, std::move(mask));
}

GeometryPtr make_square_geometry(double half, int n, Vec2 center) {
    double h = 2.0 * half / (n - 1);
    Vec2 origin{center.x - half, center.y - half};
    return make_geometry(n, n, h, origin);
}

namespace {

// Area of disk(0, r) intersected with the quadrant {X <= x, Y <= y}.
double disk_quadrant_area(double x, double y, double r) {
    if (x <= -r || y <= -r) return 0.0;
    x = std::min(x, r);
    y = std::min(y, r);
    auto G = [r](double t) {  // integral of sqrt(r^2-u^2)
        t = std::clamp(t, -r, r);
        return 0.5 * (t * std::sqrt(std::max(0.0, r * r - t * t)) +
                      r * r * std::asin(std::clamp(t / r, -1.0, 1.0)));
    };
    // Integrate over u in [-r, x] the strip length clamp(y + sqrt(r^2-u^2), 0, 2 sqrt(...)).
    if (y >= 0.0) {
        double q = std::sqrt(std::max(0.0, r * r - y * y));
        // For |u| <= q the chord top exceeds y: length = y + sqrt(r^2-u^2).
        // For |u| > q the full chord is below y: length = 2 sqrt(r^2-u^2).
        double a = 0.0;
        double lo = -r, hi = x;
        double s1 = std::min(hi, -q);
        if (s1 > lo) a += 2.0 * (G(s1) - G(lo));
        double s2 = std::clamp(hi, -q, q);
        if (s2 > -q) a += y * (s2 + q) + (G(s2) - G(-q));
        double s3 = hi;
        if (s3 > q) a += 2.0 * (G(s3) - G(q));
        return a;
    }
    // y < 0: strip nonempty only where sqrt(r^2-u^2) >= -y, i.e. |u| <= q.
    double q = std::sqrt(std::max(0.0, r * r - y * y));
    double lo = -q, hi = std::min(x, q);
    if (hi <= lo) return 0.0;
    return y * (hi - lo) + (G(hi) - G(lo));
}

}  // namespace

double cell_disk_overlap(Vec2 cell, double h, Vec2 center, double radius) {
    // Shift so the disk is centered at the origin.
    double x1 = cell.x - 0.5 * h - center.x;
    double x2 = cell.x + 0.5 * h - center.x;
    double y1 = cell.y - 0.5 * h - center.y;
    double y2 = cell.y + 0.5 * h - center.y;
    // Quick accept/reject.
    double rr = radius * radius;
    double dx = std::max({x1, 0.0, -x2});
    double dy = std::max({y1, 0.0, -y2});
    if (dx * dx + dy * dy >= rr) return 0.0;
    double cx = std::max(std::abs(x1), std::abs(x2));
    double cy = std::max(std::abs(y1), std::abs(y2));
    if (cx * cx + cy * cy <= rr) return h * h;
    double a = disk_quadrant_area(x2, y2, radius) - disk_quadrant_area(x1, y2, radius) -
               disk_quadrant_area(x2, y1, radius) + disk_quadrant_area(x1, y1, radius);
    return std::clamp(a, 0.0, h * h);
}

}  // namespace glv
