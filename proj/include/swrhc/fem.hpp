#pragma once

#include "swrhc/mesh.hpp"
#include "swrhc/sparse.hpp"

#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace swrhc {

/// Time-dependent reaction and convection coefficients of
///   y_t - nu Lap y + a(t,x) y + b(t,x) . grad y = sum_j u_j(t) delta_{x^j}.
struct Coefficients {
    std::function<double(double t, Point x)> reaction;
    std::function<Point(double t, Point x)> convection;
};

/// a(t,x) = -2 + (2 - x1) cos(pi x2) - 0.2 |sin(t + x2)|
/// b(t,x) = ( (t+2)/(t+1) x1 (x1-1) x2 , -(x1 - 0.5) x2 (x2-1) cos t )
Coefficients unstable_coefficients();

/// a = 0, b = 0
Coefficients zero_coefficients();

/// Nodal interpolant of f.
std::vector<double> interpolate(const Mesh& mesh, const std::function<double(Point)>& f);

/// y0(x) = x1 (1 + sin(2 x2)), interpolated.
std::vector<double> default_initial_state(const Mesh& mesh);

std::shared_ptr<const SparsityPattern> make_pattern(const Mesh& mesh);

/// Exact P1 mass matrix: area/12 [2 1 1; 1 2 1; 1 1 2] per element.
CsrMatrix assemble_mass(const Mesh& mesh, std::shared_ptr<const SparsityPattern> pattern = nullptr);

/// Weak Laplacian int grad phi_j . grad phi_i (homogeneous Neumann).
CsrMatrix assemble_stiffness(const Mesh& mesh, std::shared_ptr<const SparsityPattern> pattern = nullptr);

/// int (a(t) phi_j phi_i + (b(t) . grad phi_j) phi_i), three-point
/// edge-midpoint quadrature per element. Row i tests with phi_i.
CsrMatrix assemble_reaction_convection(const Mesh& mesh, const Coefficients& coeffs, double t,
                                       std::shared_ptr<const SparsityPattern> pattern = nullptr);

/// Mass, stiffness and diffusion coefficient of one discretization, plus the
/// time-varying reaction-convection assembler. Immutable once built.
class OperatorSet {
public:
    OperatorSet(const Mesh& mesh, double nu, Coefficients coeffs);

    const Mesh& mesh() const { return *mesh_; }
    std::size_t size() const { return mass_.rows(); }
    double nu() const { return nu_; }
    const Coefficients& coefficients() const { return coeffs_; }
    const std::shared_ptr<const SparsityPattern>& pattern() const { return pattern_; }
    const CsrMatrix& mass() const { return mass_; }
    const CsrMatrix& stiffness() const { return stiffness_; }

    /// nu K + M, the discrete A used for the V and V' norms.
    CsrMatrix a_operator() const { return lincomb(nu_, stiffness_, 1.0, mass_); }

    CsrMatrix reaction_convection(double t) const {
        return assemble_reaction_convection(*mesh_, coeffs_, t, pattern_);
    }

    /// nu K + C(t): the full spatial operator of the semidiscrete system.
    CsrMatrix spatial_operator(double t) const {
        return lincomb(nu_, stiffness_, 1.0, reaction_convection(t));
    }

private:
    std::shared_ptr<const Mesh> mesh_;
    double nu_;
    Coefficients coeffs_;
    std::shared_ptr<const SparsityPattern> pattern_;
    CsrMatrix mass_;
    CsrMatrix stiffness_;
};

/// Point evaluation functional phi_i(p) on the containing element.
/// Throws InvalidArgument when p is outside the closed unit square.
SparseVector dirac_load(const Mesh& mesh, Point p);

/// Dirac actuators at pairwise distinct interior points.
class ActuatorSet {
public:
    /// Throws InvalidArgument for boundary/exterior or repeated points.
    ActuatorSet(const Mesh& mesh, std::vector<Point> points);

    std::size_t count() const { return points_.size(); }
    std::span<const Point> points() const { return points_; }
    std::span<const SparseVector> loads() const { return loads_; }

    /// rhs += sum_j u[j] d^j
    void apply(std::span<const double> u, std::span<double> rhs) const;

    /// out[j] = (d^j)^T v
    void apply_transpose(std::span<const double> v, std::span<double> out) const;

private:
    std::vector<Point> points_;
    std::vector<SparseVector> loads_;
};

} // namespace swrhc
