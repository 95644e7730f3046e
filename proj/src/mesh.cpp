#include "swrhc/mesh.hpp"

#include "swrhc/error.hpp"

#include <algorithm>
#include <cmath>

namespace swrhc {

double Mesh::signed_area(std::size_t e) const {
    const Point& a = nodes[elements[e][0]];
    const Point& b = nodes[elements[e][1]];
    const Point& c = nodes[elements[e][2]];
    return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

Mesh build_mesh(std::size_t n) {
    if (n < 2) throw InvalidArgument("build_mesh: need at least 2 cells per side, got " + std::to_string(n));
    Mesh mesh;
    mesh.n_cells_per_side = n;
    const std::size_t np = n + 1;
    mesh.nodes.reserve(np * np);
    for (std::size_t j = 0; j < np; ++j) {
        for (std::size_t i = 0; i < np; ++i) {
            mesh.nodes.push_back({static_cast<double>(i) / static_cast<double>(n),
                                  static_cast<double>(j) / static_cast<double>(n)});
        }
    }
    mesh.elements.reserve(2 * n * n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            const auto v00 = static_cast<std::uint32_t>(j * np + i);
            const auto v10 = v00 + 1;
            const auto v01 = static_cast<std::uint32_t>(v00 + np);
            const auto v11 = v01 + 1;
            mesh.elements.push_back({v00, v10, v11});
            mesh.elements.push_back({v00, v11, v01});
        }
    }
    return mesh;
}

std::optional<PointLocation> locate(const Mesh& mesh, Point p) {
    constexpr double tol = 1e-12;
    if (!(p.x >= -tol && p.x <= 1.0 + tol && p.y >= -tol && p.y <= 1.0 + tol)) return std::nullopt;

    // Candidate cells: the structured layout lets us skip a global scan. A
    // point on a cell boundary touches up to four cells; scan them all and
    // keep the lowest element index.
    const auto n = mesh.n_cells_per_side;
    const double fx = p.x * static_cast<double>(n);
    const double fy = p.y * static_cast<double>(n);
    const auto clampi = [n](double v) {
        return static_cast<std::size_t>(std::clamp(v, 0.0, static_cast<double>(n - 1)));
    };
    const std::size_t i_lo = clampi(std::floor(fx - 1e-9)), i_hi = clampi(std::floor(fx + 1e-9));
    const std::size_t j_lo = clampi(std::floor(fy - 1e-9)), j_hi = clampi(std::floor(fy + 1e-9));

    std::optional<PointLocation> best;
    for (std::size_t j = j_lo; j <= j_hi; ++j) {
        for (std::size_t i = i_lo; i <= i_hi; ++i) {
            for (std::size_t half = 0; half < 2; ++half) {
                const std::size_t e = 2 * (j * n + i) + half;
                if (best && best->element <= e) continue;
                const Point& a = mesh.nodes[mesh.elements[e][0]];
                const Point& b = mesh.nodes[mesh.elements[e][1]];
                const Point& c = mesh.nodes[mesh.elements[e][2]];
                const double det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
                const double l1 = ((p.x - a.x) * (c.y - a.y) - (c.x - a.x) * (p.y - a.y)) / det;
                const double l2 = ((b.x - a.x) * (p.y - a.y) - (p.x - a.x) * (b.y - a.y)) / det;
                const double l0 = 1.0 - l1 - l2;
                if (l0 >= -tol && l1 >= -tol && l2 >= -tol) {
                    std::array<double, 3> lam{std::max(l0, 0.0), std::max(l1, 0.0), std::max(l2, 0.0)};
                    const double sum = lam[0] + lam[1] + lam[2];
                    for (double& v : lam) v /= sum;
                    best = PointLocation{e, lam};
                }
            }
        }
    }
    return best;
}

} // namespace swrhc
