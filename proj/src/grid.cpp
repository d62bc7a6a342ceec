#include "nsch/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nsch {

Grid::Grid(int nx_, int ny_, double Lx_, double Ly_) : nx(nx_), ny(ny_), Lx(Lx_), Ly(Ly_) {
    if (nx < 4 || ny < 4) throw ContractError("Grid: nx and ny must be >= 4");
    if (!(Lx > 0.0) || !(Ly > 0.0)) throw ContractError("Grid: Lx and Ly must be positive");
    hx = Lx / nx;
    hy = Ly / ny;
}

bool ScalarField::finite() const {
    for (double x : v_)
        if (!std::isfinite(x)) return false;
    return true;
}

void ScalarField::require_grid(const Grid& g, const char* who) const {
    if (!grid_.same_as(g)) throw ContractError(std::string(who) + ": field grid mismatch");
}

void VectorField::fill(double c) {
    std::fill(u_.begin(), u_.end(), c);
    std::fill(w_.begin(), w_.end(), c);
}

void VectorField::zero_boundary_faces() {
    for (int j = 0; j < grid_.ny; ++j) {
        u(0, j) = 0.0;
        u(grid_.nx, j) = 0.0;
    }
    for (int i = 0; i < grid_.nx; ++i) {
        w(i, 0) = 0.0;
        w(i, grid_.ny) = 0.0;
    }
}

double VectorField::max_abs_boundary_face() const {
    double m = 0.0;
    for (int j = 0; j < grid_.ny; ++j)
        m = std::max({m, std::abs(u(0, j)), std::abs(u(grid_.nx, j))});
    for (int i = 0; i < grid_.nx; ++i)
        m = std::max({m, std::abs(w(i, 0)), std::abs(w(i, grid_.ny))});
    return m;
}

bool VectorField::finite() const {
    for (double x : u_)
        if (!std::isfinite(x)) return false;
    for (double x : w_)
        if (!std::isfinite(x)) return false;
    return true;
}

void VectorField::require_grid(const Grid& g, const char* who) const {
    if (!grid_.same_as(g)) throw ContractError(std::string(who) + ": field grid mismatch");
}

double cell_sum(const ScalarField& f) {
    double s = 0.0;
    const double* p = f.data();
    for (size_t k = 0; k < f.size(); ++k) s += p[k];
    return s * f.grid().cell_area();
}

double cell_mean(const ScalarField& f) { return cell_sum(f) / f.grid().area(); }

double cell_dot(const ScalarField& a, const ScalarField& b) {
    b.require_grid(a.grid(), "cell_dot");
    double s = 0.0;
    const double* pa = a.data();
    const double* pb = b.data();
    for (size_t k = 0; k < a.size(); ++k) s += pa[k] * pb[k];
    return s * a.grid().cell_area();
}

double l2_norm(const ScalarField& f) { return std::sqrt(std::max(0.0, cell_dot(f, f))); }

double max_abs(const ScalarField& f) {
    double m = 0.0;
    const double* p = f.data();
    for (size_t k = 0; k < f.size(); ++k) m = std::max(m, std::abs(p[k]));
    return m;
}

double face_dot(const VectorField& a, const VectorField& b) {
    b.require_grid(a.grid(), "face_dot");
    const Grid& g = a.grid();
    double s = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) {
            double wgt = (i == 0 || i == g.nx) ? 0.5 : 1.0;
            s += wgt * a.u(i, j) * b.u(i, j);
        }
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            double wgt = (j == 0 || j == g.ny) ? 0.5 : 1.0;
            s += wgt * a.w(i, j) * b.w(i, j);
        }
    return s * g.cell_area();
}

double l2_norm(const VectorField& a) { return std::sqrt(std::max(0.0, face_dot(a, a))); }

double max_abs(const VectorField& a) {
    double m = 0.0;
    for (double x : a.u_data()) m = std::max(m, std::abs(x));
    for (double x : a.w_data()) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace nsch
