#include "nsch/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

namespace nsch {

namespace {

std::vector<double> neumann_eigs(int n, double h) {
    // Eigenvalues of -d^2/dx^2 with mirror ghosts, modes cos(pi k (i+1/2)/n).
    std::vector<double> lam(n);
    for (int k = 0; k < n; ++k) {
        const double s = std::sin(0.5 * M_PI * k / n);
        lam[k] = 4.0 * s * s / (h * h);
    }
    return lam;
}

std::vector<double> dirichlet_eigs(int n, double h) {
    // Interior faces i=1..n-1 with pinned walls, modes sin(pi k i/n).
    std::vector<double> lam(n - 1);
    for (int k = 1; k < n; ++k) {
        const double s = std::sin(0.5 * M_PI * k / n);
        lam[k - 1] = 4.0 * s * s / (h * h);
    }
    return lam;
}

std::vector<double> halfwall_eigs(int n, double h) {
    // Cells j=0..n-1 with odd-reflection ghosts (wall through the first/last
    // face), modes sin(pi (k+1)(j+1/2)/n).
    std::vector<double> lam(n);
    for (int k = 0; k < n; ++k) {
        const double s = std::sin(0.5 * M_PI * (k + 1) / n);
        lam[k] = 4.0 * s * s / (h * h);
    }
    return lam;
}

}  // namespace

struct SpectralWorkspace::Impl {
    // cell-centered transforms
    std::vector<double> cell_buf;
    fftw_plan cell_fwd = nullptr;
    fftw_plan cell_inv = nullptr;
    std::vector<double> cell_lx, cell_ly;

    // interior u-faces: (nx-1) x ny
    std::vector<double> u_buf;
    fftw_plan u_fwd = nullptr;
    fftw_plan u_inv = nullptr;
    std::vector<double> u_lx, u_ly;

    // interior w-faces: nx x (ny-1)
    std::vector<double> w_buf;
    fftw_plan w_fwd = nullptr;
    fftw_plan w_inv = nullptr;
    std::vector<double> w_lx, w_ly;

    double norm_cell = 1.0, norm_u = 1.0, norm_w = 1.0;

    ~Impl() {
        for (fftw_plan p : {cell_fwd, cell_inv, u_fwd, u_inv, w_fwd, w_inv})
            if (p) fftw_destroy_plan(p);
    }
};

SpectralWorkspace::SpectralWorkspace(const Grid& g) : grid_(g), impl_(new Impl) {
    const int nx = g.nx, ny = g.ny;
    Impl& im = *impl_;

    im.cell_buf.assign(static_cast<size_t>(nx) * ny, 0.0);
    im.cell_fwd = fftw_plan_r2r_2d(ny, nx, im.cell_buf.data(), im.cell_buf.data(),
                                   FFTW_REDFT10, FFTW_REDFT10, FFTW_ESTIMATE);
    im.cell_inv = fftw_plan_r2r_2d(ny, nx, im.cell_buf.data(), im.cell_buf.data(),
                                   FFTW_REDFT01, FFTW_REDFT01, FFTW_ESTIMATE);
    im.cell_lx = neumann_eigs(nx, g.hx);
    im.cell_ly = neumann_eigs(ny, g.hy);
    im.norm_cell = 4.0 * nx * ny;

    im.u_buf.assign(static_cast<size_t>(nx - 1) * ny, 0.0);
    im.u_fwd = fftw_plan_r2r_2d(ny, nx - 1, im.u_buf.data(), im.u_buf.data(),
                                FFTW_RODFT10, FFTW_RODFT00, FFTW_ESTIMATE);
    im.u_inv = fftw_plan_r2r_2d(ny, nx - 1, im.u_buf.data(), im.u_buf.data(),
                                FFTW_RODFT01, FFTW_RODFT00, FFTW_ESTIMATE);
    im.u_lx = dirichlet_eigs(nx, g.hx);
    im.u_ly = halfwall_eigs(ny, g.hy);
    im.norm_u = 4.0 * nx * ny;  // DST-I logical 2*nx, DST-II logical 2*ny

    im.w_buf.assign(static_cast<size_t>(nx) * (ny - 1), 0.0);
    im.w_fwd = fftw_plan_r2r_2d(ny - 1, nx, im.w_buf.data(), im.w_buf.data(),
                                FFTW_RODFT00, FFTW_RODFT10, FFTW_ESTIMATE);
    im.w_inv = fftw_plan_r2r_2d(ny - 1, nx, im.w_buf.data(), im.w_buf.data(),
                                FFTW_RODFT00, FFTW_RODFT01, FFTW_ESTIMATE);
    im.w_lx = halfwall_eigs(nx, g.hx);
    im.w_ly = dirichlet_eigs(ny, g.hy);
    im.norm_w = 4.0 * nx * ny;
}

SpectralWorkspace::~SpectralWorkspace() = default;

SpectralWorkspace& SpectralWorkspace::get(const Grid& g) {
    using Key = std::tuple<int, int, double, double>;
    static std::mutex mu;
    static std::map<Key, std::unique_ptr<SpectralWorkspace>> registry;
    std::lock_guard<std::mutex> lock(mu);
    Key key{g.nx, g.ny, g.Lx, g.Ly};
    auto it = registry.find(key);
    if (it == registry.end())
        it = registry.emplace(key, std::unique_ptr<SpectralWorkspace>(new SpectralWorkspace(g)))
                 .first;
    return *it->second;
}

double SpectralWorkspace::lambda1_neumann() const {
    return std::min(impl_->cell_lx[1], impl_->cell_ly[1]);
}

void SpectralWorkspace::cell_dct_forward(const double* in, double* out) {
    Impl& im = *impl_;
    std::copy(in, in + im.cell_buf.size(), im.cell_buf.begin());
    fftw_execute(im.cell_fwd);
    std::copy(im.cell_buf.begin(), im.cell_buf.end(), out);
}

void SpectralWorkspace::cell_dct_inverse(const double* in, double* out) {
    Impl& im = *impl_;
    std::copy(in, in + im.cell_buf.size(), im.cell_buf.begin());
    fftw_execute(im.cell_inv);
    std::copy(im.cell_buf.begin(), im.cell_buf.end(), out);
}

const std::vector<double>& SpectralWorkspace::cell_eig_x() const { return impl_->cell_lx; }
const std::vector<double>& SpectralWorkspace::cell_eig_y() const { return impl_->cell_ly; }
double SpectralWorkspace::cell_norm() const { return impl_->norm_cell; }

void SpectralWorkspace::solve_cell_helmholtz(double a, double b, const double* rhs, double* x) {
    if (a < 0.0 || b <= 0.0) throw ContractError("solve_cell_helmholtz: need a >= 0, b > 0");
    Impl& im = *impl_;
    const int nx = grid_.nx, ny = grid_.ny;
    std::copy(rhs, rhs + im.cell_buf.size(), im.cell_buf.begin());
    fftw_execute(im.cell_fwd);
    for (int ky = 0; ky < ny; ++ky) {
        for (int kx = 0; kx < nx; ++kx) {
            const size_t idx = static_cast<size_t>(ky) * nx + kx;
            const double denom = a + b * (im.cell_lx[kx] + im.cell_ly[ky]);
            if (kx == 0 && ky == 0 && a == 0.0)
                im.cell_buf[idx] = 0.0;  // nullspace: drop the mean mode
            else
                im.cell_buf[idx] /= denom;
        }
    }
    fftw_execute(im.cell_inv);
    const double s = 1.0 / im.norm_cell;
    for (size_t k = 0; k < im.cell_buf.size(); ++k) x[k] = im.cell_buf[k] * s;
}

void SpectralWorkspace::solve_u_helmholtz(double a, double b, const double* rhs, double* x) {
    if (a < 0.0 || b <= 0.0) throw ContractError("solve_u_helmholtz: need a >= 0, b > 0");
    Impl& im = *impl_;
    const int mx = grid_.nx - 1, my = grid_.ny;
    std::copy(rhs, rhs + im.u_buf.size(), im.u_buf.begin());
    fftw_execute(im.u_fwd);
    for (int ky = 0; ky < my; ++ky)
        for (int kx = 0; kx < mx; ++kx)
            im.u_buf[static_cast<size_t>(ky) * mx + kx] /=
                a + b * (im.u_lx[kx] + im.u_ly[ky]);
    fftw_execute(im.u_inv);
    const double s = 1.0 / im.norm_u;
    for (size_t k = 0; k < im.u_buf.size(); ++k) x[k] = im.u_buf[k] * s;
}

void SpectralWorkspace::solve_w_helmholtz(double a, double b, const double* rhs, double* x) {
    if (a < 0.0 || b <= 0.0) throw ContractError("solve_w_helmholtz: need a >= 0, b > 0");
    Impl& im = *impl_;
    const int mx = grid_.nx, my = grid_.ny - 1;
    std::copy(rhs, rhs + im.w_buf.size(), im.w_buf.begin());
    fftw_execute(im.w_fwd);
    for (int ky = 0; ky < my; ++ky)
        for (int kx = 0; kx < mx; ++kx)
            im.w_buf[static_cast<size_t>(ky) * mx + kx] /=
                a + b * (im.w_lx[kx] + im.w_ly[ky]);
    fftw_execute(im.w_inv);
    const double s = 1.0 / im.norm_w;
    for (size_t k = 0; k < im.w_buf.size(); ++k) x[k] = im.w_buf[k] * s;
}

}  // namespace nsch
