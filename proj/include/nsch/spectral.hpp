#pragma once

#include <memory>
#include <vector>

#include "nsch/grid.hpp"

namespace nsch {

/// Fast transform workspace for one grid geometry. The uniform rectangle
/// makes every constant-coefficient operator in the scheme diagonal in a
/// cosine or sine basis:
///   - cell scalars with mirror-ghost Neumann walls  -> DCT-II/III,
///   - interior u-faces (Dirichlet in x, odd ghosts in y) -> DST-I x DST-II,
///   - interior w-faces mirrored.
/// Plans are created once per grid with FFTW_ESTIMATE and reused; results are
/// bit-deterministic for a fixed grid.
class SpectralWorkspace {
public:
    ~SpectralWorkspace();
    SpectralWorkspace(const SpectralWorkspace&) = delete;
    SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;

    /// Registry lookup keyed by (nx, ny, Lx, Ly). Kept for the process
    /// lifetime; cheap to call repeatedly.
    static SpectralWorkspace& get(const Grid& g);

    /// Solve (a - b*Laplacian_N) x = rhs on cell values (x fastest, nx*ny).
    /// Requires a >= 0, b > 0. For a == 0 the zero mode of the rhs is dropped
    /// and the solution is returned mean-free.
    void solve_cell_helmholtz(double a, double b, const double* rhs, double* x);

    /// Solve (a - b*Laplacian_noslip) on interior u-faces,
    /// array (nx-1) x ny with x fastest. Requires a >= 0, b > 0.
    void solve_u_helmholtz(double a, double b, const double* rhs, double* x);

    /// Same for interior w-faces, array nx x (ny-1) with x fastest.
    void solve_w_helmholtz(double a, double b, const double* rhs, double* x);

    /// Raw unnormalized cell transforms (DCT-II forward / DCT-III inverse)
    /// and the eigenvalues of -Laplacian_N per 1D mode, for callers that
    /// build their own mode-space block solves. After forward + inverse the
    /// data is scaled by cell_norm().
    void cell_dct_forward(const double* in, double* out);
    void cell_dct_inverse(const double* in, double* out);
    const std::vector<double>& cell_eig_x() const;
    const std::vector<double>& cell_eig_y() const;
    double cell_norm() const;

    const Grid& grid() const { return grid_; }

    /// Smallest nonzero eigenvalue of the cell Neumann Laplacian (-L).
    double lambda1_neumann() const;

private:
    explicit SpectralWorkspace(const Grid& g);

    struct Impl;
    Grid grid_;
    std::unique_ptr<Impl> impl_;
};

}  // namespace nsch
