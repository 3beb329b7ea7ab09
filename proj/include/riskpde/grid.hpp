#pragma once

// Uniform (x, T) grids and the field containers shared by every estimator.
// Fields are stored row-major with x as the slow index: values[i*nt + j]
// holds the node (x_i, T_j).

#include <algorithm>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace riskpde {

// The four long-run probabilities of the augmented-state formulation:
//   F: safety (never crosses below the level up to the horizon)
//   G: ruin   (crosses below the level by the horizon)
//   Q: stays below the level throughout
//   N: recovery (reaches the level by the horizon)
enum class Kind { F, G, Q, N };

enum class Provenance { MC, McDenoised, FD, PINN, Analytic };

std::string to_string(Kind k);
std::string to_string(Provenance p);
Kind parse_kind(const std::string& s);
Provenance parse_provenance(const std::string& s);

struct GridSpec {
    double x_lo = 0.0, x_hi = 0.0, dx = 1.0;
    double t_lo = 0.0, t_hi = 0.0, dt = 1.0;

    int nx() const;
    int nt() const;
    // Clamped so the last node cannot land past the bound: under contracted
    // arithmetic lo + i*dx can round one ulp beyond hi, which strict range
    // guards downstream reject.
    double x(int i) const { return std::min(x_lo + i * dx, x_hi); }
    double t(int j) const { return std::min(t_lo + j * dt, t_hi); }

    // Throws std::invalid_argument unless both spacings are positive and
    // divide their ranges to within 1e-9 of a whole cell count.
    void validate() const;

    bool operator==(const GridSpec&) const = default;
};

struct ProbabilityField {
    GridSpec grid;
    Kind kind = Kind::N;
    Provenance provenance = Provenance::MC;
    double lambda = 0.0;
    std::vector<double> values; // nx*nt, row-major in x

    double& at(int i, int j) { return values[static_cast<std::size_t>(i) * grid.nt() + j]; }
    double at(int i, int j) const { return values[static_cast<std::size_t>(i) * grid.nt() + j]; }
};

// d/dx of a probability field. Same storage layout, values unconstrained.
struct GradientField {
    GridSpec grid;
    Provenance provenance = Provenance::Analytic;
    double lambda = 0.0;
    std::vector<double> values;

    double& at(int i, int j) { return values[static_cast<std::size_t>(i) * grid.nt() + j]; }
    double at(int i, int j) const { return values[static_cast<std::size_t>(i) * grid.nt() + j]; }
};

// CSV: header "x,T,lambda,kind,provenance,value", one row per node, nodes in
// storage order. Doubles are written as shortest round-trip decimals, so a
// write/read/write cycle is byte-identical.
void write_csv(const ProbabilityField&, std::ostream&);
void write_csv(const GradientField&, std::ostream&); // kind column: "grad_x"
ProbabilityField read_field_csv(std::istream&);

// JSON: grid spec plus row-major values.
void write_json(const ProbabilityField&, std::ostream&);
ProbabilityField read_field_json(std::istream&);

void write_field_file(const ProbabilityField&, const std::string& path); // by extension
void write_field_file(const GradientField&, const std::string& path);
ProbabilityField read_field_file(const std::string& path);

std::string format_double(double v); // shortest round-trip decimal

} // namespace riskpde
