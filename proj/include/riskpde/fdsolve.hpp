#pragma once

// Crank-Nicolson solver for the 1-D convection-diffusion equation obeyed by
// the four probabilities,
//     du/dT = diffusion * u_xx + convection * u_x,
// marched from the indicator initial data of the chosen kind. The barrier
// side of the grid carries the kind's Dirichlet value (F: 0, G: 1, Q: 0,
// N: 1); the far side is a homogeneous Neumann (zero-gradient) boundary.
// Kinds F and G live on x >= level (barrier at the left edge), Q and N on
// x <= level (barrier at the right edge).

#include "riskpde/grid.hpp"

namespace riskpde {

struct RiskPdeSpec {
    Kind kind = Kind::N;
    double level = 2.0;      // barrier coordinate; must sit on the grid edge
    double convection = 0.0; // drift coefficient
    double diffusion = 0.5;  // half squared noise
    GridSpec domain;
};

struct FdResult {
    ProbabilityField field;
    // Extremes of the unclamped solution; output values are clamped to [0,1].
    double pre_clamp_min = 0.0;
    double pre_clamp_max = 1.0;
};

// Throws std::invalid_argument for bad grids or a level off the grid edge,
// std::domain_error when the cell Peclet number |convection| dx / (2 diffusion)
// reaches 5. Warns on stderr when it exceeds 1.
FdResult solve(const RiskPdeSpec&);

// Max abs of the centered-difference residual
//   (u_{i,j+1}-u_{i,j-1})/(2 dT) - convection*(u_{i+1,j}-u_{i-1,j})/(2 dx)
//   - diffusion*(u_{i+1,j}-2u_{i,j}+u_{i-1,j})/dx^2
// over interior nodes. Grid must be at least 3x3.
double residual_check(const ProbabilityField&, const RiskPdeSpec&);

} // namespace riskpde
