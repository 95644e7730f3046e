#include "swrhc/fem.hpp"

#include "swrhc/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace swrhc {
namespace {

struct ElementGeometry {
    double area;
    std::array<Point, 3> vertices;
    std::array<Point, 3> grad; // gradients of the barycentric functions
};

ElementGeometry geometry(const Mesh& mesh, std::size_t e) {
    const auto& tri = mesh.elements[e];
    ElementGeometry g;
    for (std::size_t k = 0; k < 3; ++k) g.vertices[k] = mesh.nodes[tri[k]];
    g.area = mesh.signed_area(e);
    const double inv = 1.0 / (2.0 * g.area);
    for (std::size_t k = 0; k < 3; ++k) {
        const Point& p = g.vertices[(k + 1) % 3];
        const Point& q = g.vertices[(k + 2) % 3];
        g.grad[k] = {(p.y - q.y) * inv, (q.x - p.x) * inv};
    }
    return g;
}

std::shared_ptr<const SparsityPattern> ensure_pattern(const Mesh& mesh,
                                                      std::shared_ptr<const SparsityPattern> pattern) {
    if (!pattern) return make_pattern(mesh);
    if (pattern->size() != mesh.num_nodes()) throw InvalidArgument("pattern does not match mesh");
    return pattern;
}

} // namespace

Coefficients unstable_coefficients() {
    Coefficients c;
    c.reaction = [](double t, Point x) {
        return -2.0 + (2.0 - x.x) * std::cos(std::numbers::pi * x.y) - 0.2 * std::abs(std::sin(t + x.y));
    };
    c.convection = [](double t, Point x) {
        return Point{(t + 2.0) / (t + 1.0) * (x.x * (x.x - 1.0) * x.y),
                     -(x.x - 0.5) * x.y * (x.y - 1.0) * std::cos(t)};
    };
    return c;
}

Coefficients zero_coefficients() {
    Coefficients c;
    c.reaction = [](double, Point) { return 0.0; };
    c.convection = [](double, Point) { return Point{0.0, 0.0}; };
    return c;
}

std::vector<double> interpolate(const Mesh& mesh, const std::function<double(Point)>& f) {
    std::vector<double> v(mesh.num_nodes());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(mesh.nodes[i]);
    return v;
}

std::vector<double> default_initial_state(const Mesh& mesh) {
    return interpolate(mesh, [](Point x) { return x.x * (1.0 + std::sin(2.0 * x.y)); });
}

std::shared_ptr<const SparsityPattern> make_pattern(const Mesh& mesh) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> entries;
    entries.reserve(mesh.elements.size() * 9);
    for (const auto& tri : mesh.elements) {
        for (auto r : tri) {
            for (auto c : tri) entries.emplace_back(r, c);
        }
    }
    return std::make_shared<const SparsityPattern>(mesh.num_nodes(), std::move(entries));
}

CsrMatrix assemble_mass(const Mesh& mesh, std::shared_ptr<const SparsityPattern> pattern) {
    CsrMatrix m(ensure_pattern(mesh, std::move(pattern)));
    for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
        const auto& tri = mesh.elements[e];
        const double s = mesh.signed_area(e) / 12.0;
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) m.add(tri[i], tri[j], i == j ? 2.0 * s : s);
        }
    }
    return m;
}

CsrMatrix assemble_stiffness(const Mesh& mesh, std::shared_ptr<const SparsityPattern> pattern) {
    CsrMatrix k(ensure_pattern(mesh, std::move(pattern)));
    for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
        const auto& tri = mesh.elements[e];
        const auto g = geometry(mesh, e);
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) {
                k.add(tri[i], tri[j], g.area * (g.grad[i].x * g.grad[j].x + g.grad[i].y * g.grad[j].y));
            }
        }
    }
    return k;
}

CsrMatrix assemble_reaction_convection(const Mesh& mesh, const Coefficients& coeffs, double t,
                                       std::shared_ptr<const SparsityPattern> pattern) {
    CsrMatrix c(ensure_pattern(mesh, std::move(pattern)));
    for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
        const auto& tri = mesh.elements[e];
        const auto g = geometry(mesh, e);
        std::array<std::array<double, 3>, 3> local{};
        // Edge midpoint q between vertices k and k+1: lambda_k = lambda_{k+1} = 1/2.
        for (std::size_t q = 0; q < 3; ++q) {
            const std::size_t k0 = q;
            const std::size_t k1 = (q + 1) % 3;
            const Point xq{0.5 * (g.vertices[k0].x + g.vertices[k1].x),
                           0.5 * (g.vertices[k0].y + g.vertices[k1].y)};
            std::array<double, 3> lam{};
            lam[k0] = 0.5;
            lam[k1] = 0.5;
            const double a = coeffs.reaction(t, xq);
            const Point b = coeffs.convection(t, xq);
            const double w = g.area / 3.0;
            for (std::size_t i = 0; i < 3; ++i) {
                if (lam[i] == 0.0) continue;
                for (std::size_t j = 0; j < 3; ++j) {
                    const double adv = b.x * g.grad[j].x + b.y * g.grad[j].y;
                    local[i][j] += w * lam[i] * (a * lam[j] + adv);
                }
            }
        }
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) c.add(tri[i], tri[j], local[i][j]);
        }
    }
    return c;
}

OperatorSet::OperatorSet(const Mesh& mesh, double nu, Coefficients coeffs)
    : mesh_(std::make_shared<const Mesh>(mesh)), nu_(nu), coeffs_(std::move(coeffs)),
      pattern_(make_pattern(mesh)), mass_(assemble_mass(mesh, pattern_)),
      stiffness_(assemble_stiffness(mesh, pattern_)) {
    if (!(nu > 0.0)) throw InvalidArgument("diffusion coefficient must be positive");
    if (!coeffs_.reaction || !coeffs_.convection) throw InvalidArgument("coefficient functions must be set");
}

SparseVector dirac_load(const Mesh& mesh, Point p) {
    const auto loc = locate(mesh, p);
    if (!loc) {
        throw InvalidArgument("dirac_load: point (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                              ") is outside the domain");
    }
    std::array<std::pair<std::uint32_t, double>, 3> e;
    for (std::size_t k = 0; k < 3; ++k) e[k] = {mesh.elements[loc->element][k], loc->barycentric[k]};
    std::sort(e.begin(), e.end());
    SparseVector v;
    v.size = mesh.num_nodes();
    for (const auto& [idx, val] : e) {
        if (val == 0.0) continue;
        v.indices.push_back(idx);
        v.values.push_back(val);
    }
    return v;
}

ActuatorSet::ActuatorSet(const Mesh& mesh, std::vector<Point> points) : points_(std::move(points)) {
    for (std::size_t j = 0; j < points_.size(); ++j) {
        const Point& p = points_[j];
        if (!(p.x > 0.0 && p.x < 1.0 && p.y > 0.0 && p.y < 1.0)) {
            throw InvalidArgument("actuator " + std::to_string(j + 1) + " is not strictly inside the domain");
        }
        for (std::size_t i = 0; i < j; ++i) {
            if (points_[i] == p) {
                throw InvalidArgument("actuators " + std::to_string(i + 1) + " and " + std::to_string(j + 1) +
                                      " coincide");
            }
        }
        loads_.push_back(dirac_load(mesh, p));
    }
}

void ActuatorSet::apply(std::span<const double> u, std::span<double> rhs) const {
    for (std::size_t j = 0; j < loads_.size(); ++j) {
        if (u[j] != 0.0) loads_[j].add_to(u[j], rhs);
    }
}

void ActuatorSet::apply_transpose(std::span<const double> v, std::span<double> out) const {
    for (std::size_t j = 0; j < loads_.size(); ++j) out[j] = loads_[j].dot(v);
}

} // namespace swrhc
