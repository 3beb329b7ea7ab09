#include "riskpde/fdsolve.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>
#include <vector>

namespace riskpde {

namespace {

struct KindData {
    bool barrier_right; // interior on the low side of the level
    double bc;          // Dirichlet value on the barrier side
    double ic;          // initial value on the interior
};

KindData kind_data(Kind kind) {
    switch (kind) {
        case Kind::F: return {false, 0.0, 1.0}; // lives on x >= level
        case Kind::G: return {false, 1.0, 0.0};
        case Kind::Q: return {true, 0.0, 1.0}; // lives on x <= level
        case Kind::N: return {true, 1.0, 0.0};
    }
    throw std::logic_error("bad kind");
}

// Thomas solve of a constant tridiagonal system (lower, diag, upper); b is
// overwritten with the solution.
void tridiag_solve(const std::vector<double>& lower, const std::vector<double>& diag,
                   const std::vector<double>& upper, std::vector<double>& b,
                   std::vector<double>& scratch) {
    const std::size_t n = diag.size();
    scratch.resize(n);
    double piv = diag[0];
    scratch[0] = upper[0] / piv;
    b[0] /= piv;
    for (std::size_t i = 1; i < n; ++i) {
        piv = diag[i] - lower[i] * scratch[i - 1];
        scratch[i] = upper[i] / piv;
        b[i] = (b[i] - lower[i] * b[i - 1]) / piv;
    }
    for (std::size_t i = n - 1; i-- > 0;) b[i] -= scratch[i] * b[i + 1];
}

} // namespace

FdResult solve(const RiskPdeSpec& spec) {
    spec.domain.validate();
    if (!(spec.diffusion > 0.0))
        throw std::invalid_argument("diffusion must be positive");
    if (std::fabs(spec.domain.t_lo) > 1e-12)
        throw std::invalid_argument("initial data lives at T = 0; grid must start there");
    const int nx = spec.domain.nx(), nt = spec.domain.nt();
    if (nx < 3) throw std::invalid_argument("need at least 3 space nodes");

    const KindData kd = kind_data(spec.kind);
    const double edge = kd.barrier_right ? spec.domain.x_hi : spec.domain.x_lo;
    if (std::fabs(spec.level - edge) > 1e-9 * std::max(1.0, std::fabs(edge)))
        throw std::invalid_argument(
            "the level must sit on the barrier-side grid edge for this kind");

    const double dx = spec.domain.dx, dt = spec.domain.dt;
    const double peclet = std::fabs(spec.convection) * dx / (2.0 * spec.diffusion);
    if (peclet >= 5.0)
        throw std::domain_error("cell Peclet number " + std::to_string(peclet) +
                                " is too large; refine dx or cut convection");
    if (peclet > 1.0)
        std::cerr << "fdsolve: cell Peclet number " << peclet
                  << " above 1; central differences may wiggle\n";

    // Interior operator L u = diffusion u_xx + convection u_x; the far
    // (non-barrier) edge is a mirrored zero-gradient node.
    const double alpha = spec.diffusion / (dx * dx) - spec.convection / (2.0 * dx);
    const double beta = -2.0 * spec.diffusion / (dx * dx);
    const double gamma = spec.diffusion / (dx * dx) + spec.convection / (2.0 * dx);

    // Unknowns: every node except the Dirichlet one, ordered by grid index.
    // With the barrier on the right, unknown u_i has neighbors (i-1, i+1) and
    // unknown index m == nx-2 couples to the boundary value; mirrored for the
    // barrier on the left.
    const int m = nx - 1; // unknown count
    std::vector<double> lo_c(m), di_c(m), up_c(m); // L coefficients per row
    for (int r = 0; r < m; ++r) {
        lo_c[r] = kd.barrier_right ? alpha : gamma;
        di_c[r] = beta;
        up_c[r] = kd.barrier_right ? gamma : alpha;
    }
    // Far-edge Neumann row: ghost mirror u_{-1} = u_{+1}.
    if (kd.barrier_right) {
        di_c[0] = beta;
        up_c[0] = -beta;
        lo_c[0] = 0.0;
    } else {
        di_c[m - 1] = beta;
        lo_c[m - 1] = -beta;
        up_c[m - 1] = 0.0;
    }
    // The row next to the Dirichlet node loses that column; it reappears on
    // the right-hand side as bc * (coefficient) * dt.
    const double bc_coef = kd.barrier_right ? up_c[m - 1] : lo_c[0];
    if (kd.barrier_right)
        up_c[m - 1] = 0.0;
    else
        lo_c[0] = 0.0;

    ProbabilityField field;
    field.grid = spec.domain;
    field.kind = spec.kind;
    field.provenance = Provenance::FD;
    field.lambda = spec.convection;
    field.values.assign(static_cast<std::size_t>(nx) * nt, 0.0);

    // Initial row: indicator of the kind's event at T=0, except the corner
    // node, which takes the boundary value (its T -> 0+ limit).
    std::vector<double> u(m, kd.ic);
    const int bnode = kd.barrier_right ? nx - 1 : 0;
    for (int i = 0; i < nx; ++i) field.at(i, 0) = i == bnode ? kd.bc : kd.ic;

    double lo_seen = kd.bc, hi_seen = kd.bc;
    for (double v : u) {
        lo_seen = std::min(lo_seen, v);
        hi_seen = std::max(hi_seen, v);
    }

    auto unknown_to_grid = [&](int r) { return kd.barrier_right ? r : r + 1; };

    std::vector<double> a_lo(m), a_di(m), a_up(m), rhs(m), scratch(m);
    for (int step = 1; step < nt; ++step) {
        // Implicit-Euler first step damps the discontinuous start, then
        // Crank-Nicolson.
        const double theta = step == 1 ? 1.0 : 0.5;
        for (int r = 0; r < m; ++r) {
            a_lo[r] = -theta * dt * lo_c[r];
            a_di[r] = 1.0 - theta * dt * di_c[r];
            a_up[r] = -theta * dt * up_c[r];
        }
        const double ex = (1.0 - theta) * dt;
        for (int r = 0; r < m; ++r) {
            double lu = di_c[r] * u[r];
            if (r > 0) lu += lo_c[r] * u[r - 1];
            if (r + 1 < m) lu += up_c[r] * u[r + 1];
            rhs[r] = u[r] + ex * lu;
        }
        const int bc_row = kd.barrier_right ? m - 1 : 0;
        rhs[bc_row] += dt * bc_coef * kd.bc; // theta + (1-theta) of a constant bc
        tridiag_solve(a_lo, a_di, a_up, rhs, scratch);
        u.swap(rhs);

        field.at(bnode, step) = kd.bc;
        for (int r = 0; r < m; ++r) {
            const double v = u[r];
            lo_seen = std::min(lo_seen, v);
            hi_seen = std::max(hi_seen, v);
            field.at(unknown_to_grid(r), step) = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
        }
    }

    FdResult res;
    res.field = std::move(field);
    res.pre_clamp_min = lo_seen;
    res.pre_clamp_max = hi_seen;
    return res;
}

double residual_check(const ProbabilityField& f, const RiskPdeSpec& spec) {
    f.grid.validate();
    const int nx = f.grid.nx(), nt = f.grid.nt();
    if (nx < 3 || nt < 3)
        throw std::invalid_argument("residual check needs at least a 3x3 grid");
    const double dx = f.grid.dx, dt = f.grid.dt;
    double worst = 0.0;
    for (int i = 1; i + 1 < nx; ++i)
        for (int j = 1; j + 1 < nt; ++j) {
            const double ut = (f.at(i, j + 1) - f.at(i, j - 1)) / (2.0 * dt);
            const double ux = (f.at(i + 1, j) - f.at(i - 1, j)) / (2.0 * dx);
            const double uxx =
                (f.at(i + 1, j) - 2.0 * f.at(i, j) + f.at(i - 1, j)) / (dx * dx);
            worst = std::max(worst, std::fabs(ut - spec.convection * ux -
                                              spec.diffusion * uxx));
        }
    return worst;
}

} // namespace riskpde
