#pragma once

#include <cstddef>
#include <vector>

#include "nsch/errors.hpp"

namespace nsch {

/// Uniform rectangular MAC grid. Scalars live at cell centers,
/// velocity components on cell faces. Homogeneous Neumann conditions for
/// scalars are realized with mirror ghosts; velocities carry no-slip walls.
struct Grid {
    int nx = 0;
    int ny = 0;
    double Lx = 0.0;
    double Ly = 0.0;
    double hx = 0.0;
    double hy = 0.0;

    Grid() = default;
    Grid(int nx_, int ny_, double Lx_, double Ly_);

    double cell_x(int i) const { return (i + 0.5) * hx; }
    double cell_y(int j) const { return (j + 0.5) * hy; }
    double cell_area() const { return hx * hy; }
    double area() const { return Lx * Ly; }
    int cells() const { return nx * ny; }

    bool same_as(const Grid& other) const {
        return nx == other.nx && ny == other.ny && Lx == other.Lx && Ly == other.Ly;
    }
};

/// Cell-centered scalar samples, row-major with x fastest: index = j*nx + i.
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(const Grid& g) : grid_(g), v_(static_cast<size_t>(g.nx) * g.ny, 0.0) {}

    const Grid& grid() const { return grid_; }
    double& operator()(int i, int j) { return v_[static_cast<size_t>(j) * grid_.nx + i]; }
    double operator()(int i, int j) const { return v_[static_cast<size_t>(j) * grid_.nx + i]; }
    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }
    size_t size() const { return v_.size(); }

    void fill(double c) { std::fill(v_.begin(), v_.end(), c); }

    bool finite() const;
    void require_grid(const Grid& g, const char* who) const;

private:
    Grid grid_;
    std::vector<double> v_;
};

/// Face-staggered velocity: u on vertical faces ((nx+1) x ny, x fastest,
/// index = j*(nx+1) + i), w on horizontal faces (nx x (ny+1), index = j*nx + i).
/// Boundary faces carry the no-slip value 0 when the field represents v.
class VectorField {
public:
    VectorField() = default;
    explicit VectorField(const Grid& g)
        : grid_(g),
          u_(static_cast<size_t>(g.nx + 1) * g.ny, 0.0),
          w_(static_cast<size_t>(g.nx) * (g.ny + 1), 0.0) {}

    const Grid& grid() const { return grid_; }

    double& u(int i, int j) { return u_[static_cast<size_t>(j) * (grid_.nx + 1) + i]; }
    double u(int i, int j) const { return u_[static_cast<size_t>(j) * (grid_.nx + 1) + i]; }
    double& w(int i, int j) { return w_[static_cast<size_t>(j) * grid_.nx + i]; }
    double w(int i, int j) const { return w_[static_cast<size_t>(j) * grid_.nx + i]; }

    std::vector<double>& u_data() { return u_; }
    const std::vector<double>& u_data() const { return u_; }
    std::vector<double>& w_data() { return w_; }
    const std::vector<double>& w_data() const { return w_; }

    void fill(double c);
    void zero_boundary_faces();
    double max_abs_boundary_face() const;

    bool finite() const;
    void require_grid(const Grid& g, const char* who) const;

private:
    Grid grid_;
    std::vector<double> u_;
    std::vector<double> w_;
};

/// Norm bundle for a scalar field: L2, H1 seminorm, (H1)' dual norm, mean.
struct NormReport {
    double l2 = 0.0;
    double h1_semi = 0.0;
    double h1_dual = 0.0;
    double mean = 0.0;
};

// Weighted discrete inner products and reductions used throughout.
double cell_sum(const ScalarField& f);                      // sum f * hx*hy
double cell_mean(const ScalarField& f);                     // |Omega|^-1 sum f
double cell_dot(const ScalarField& a, const ScalarField& b);// sum a*b * hx*hy
double l2_norm(const ScalarField& f);
double max_abs(const ScalarField& f);

// Face-weighted L2 pairing of vector fields; boundary faces get half weight.
double face_dot(const VectorField& a, const VectorField& b);
double l2_norm(const VectorField& a);
double max_abs(const VectorField& a);

}  // namespace nsch
