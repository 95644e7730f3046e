#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace swrhc {

struct Point {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Point&, const Point&) = default;
};

using Triangle = std::array<std::uint32_t, 3>;

/// Uniform triangulation of the unit square. Node (i, j) sits at
/// (i/n, j/n) with index j*(n+1)+i; every cell is split along its
/// bottom-left to top-right diagonal into two counterclockwise triangles.
struct Mesh {
    std::size_t n_cells_per_side = 0;
    std::vector<Point> nodes;
    std::vector<Triangle> elements;

    std::size_t num_nodes() const { return nodes.size(); }
    double h() const { return 1.0 / static_cast<double>(n_cells_per_side); }

    /// Signed area of element e (positive for counterclockwise).
    double signed_area(std::size_t e) const;
};

/// Throws InvalidArgument for n < 2.
Mesh build_mesh(std::size_t n_cells_per_side);

struct PointLocation {
    std::size_t element;
    std::array<double, 3> barycentric;
};

/// Lowest-index element whose closure contains p, with the barycentric
/// coordinates of p in it. Empty when p lies outside the closed square.
std::optional<PointLocation> locate(const Mesh& mesh, Point p);

} // namespace swrhc
