#pragma once

#include <functional>
#include <span>
#include <vector>

#include "tnl/advect.hpp"
#include "tnl/exact.hpp"
#include "tnl/field.hpp"

namespace tnl {

/// Scaled copy of the standard bump: bump((x-center)/width), supported on
/// (center-width, center+width).
struct Bump1D {
    double center = 0.0;
    double width = 1.0;

    double value(double x) const;
    double deriv(double x) const;
    double integral() const;   // closed under scaling: width * integral of bump
    double sup() const;        // bump(0) = e^-1
    double sup_deriv() const;  // max |d/dx|, scales as 1/width
};

/// Tensor product of 1D bumps, optionally with a time factor; gradients and
/// the time derivative are available in closed form, as are the exact sup
/// norms (the factors maximize independently).
class TestFunction {
  public:
    TestFunction(Bump1D fx, Bump1D fy, double amplitude = 1.0);
    TestFunction(Bump1D ft, Bump1D fx, Bump1D fy, double amplitude = 1.0);

    bool space_time() const { return has_time_; }
    double value(Vec2 x) const;
    double value(double t, Vec2 x) const;
    Vec2 grad(double t, Vec2 x) const;
    double time_deriv(double t, Vec2 x) const;

    double integral_space() const;  // integral of the spatial factor over R^2
    double sup_grad() const;        // sup norm of the spatial gradient
    double sup_time_deriv() const;

    const Bump1D& fx() const { return fx_; }
    const Bump1D& fy() const { return fy_; }
    const Bump1D& ft() const { return ft_; }
    double amplitude() const { return amp_; }

  private:
    bool has_time_ = false;
    Bump1D ft_{}, fx_{}, fy_{};
    double amp_ = 1.0;
};

/// Max over level-j parity-1 cells inside the window of |cell average - 1/2|,
/// in exact dyadic arithmetic.
Dyadic weak_gap_exact(const CellField& field, int level, Window window);
double weak_gap(const CellField& field, int level, Window window);
/// Grid variant: averages of samples over level-j cells (h must divide 2^-j).
double weak_gap(const GridField& field, int level, Window window);

/// integral of phi * field over the field window; phi must be a space-only
/// test function supported inside the window. Exact per cell up to the 1D
/// quadrature of the bump factors.
double pair_integral(const CellField& field, const TestFunction& phi);

struct ResidualOptions {
    double dx = 1.0 / 64;    // space node spacing (midpoint rule)
    double dt_node = 0.0;    // time node spacing; defaults to dx
    double gap_beta = 0.0;   // skip (1-beta, 1+beta) when positive
};

/// |R(phi)| for the distributional transport identity: space-time quadrature
/// of rho (dphi/dt + b . grad phi) plus the initial term (and the frozen tail
/// when phi outlives the schedule). Stages finer than the node spacing are
/// skipped; their contribution is O(dx).
double weak_residual(const std::function<double(double, Vec2)>& rho, const FieldSpec& spec,
                     const TestFunction& phi, ResidualOptions opt);
double weak_residual(const BranchDensity& rho, const TestFunction& phi, ResidualOptions opt);

/// TV seminorm |D u(2^scale .)|(region) of the vortex lattice: per filled
/// cell, quadrature of the constant |Du| over the four triangles plus the
/// jump magnitudes integrated along the diagonals and cell edges. The region
/// boundary must align with cell edges.
double tv_norm_layout(int scale, Window region);
/// L1 norm of u(2^scale .) over the region (same alignment rule).
double l1_norm_layout(int scale, Window region);
/// Grid variant: sum of |finite differences| * h.
double tv_norm(const GridField& scalar);

struct GagliardoResult {
    double estimate = 0.0;
    double stderr_ = 0.0;
    double tail_bound = 0.0;  // bound for the truncated near-diagonal shells
    std::vector<double> shell_contrib;
};

struct GagliardoOptions {
    double s = 0.5;
    std::uint64_t pairs = 1'000'000;  // total sample pairs across shells
    int shells = 22;
    std::uint64_t seed = 2024;
    double t_lo = 0.0, t_hi = 2.0;    // Omega = [t_lo, t_hi] x B
    double box_half = 0.5;            // B = [-box_half, box_half]^2
};

/// Monte-Carlo Gagliardo seminorm of a space-time vector field over
/// Omega x Omega, stratified by dyadic shells of |z - z'|.
GagliardoResult gagliardo_seminorm(const std::function<Vec2(double, Vec2)>& f,
                                   const GagliardoOptions& opt);

/// p(s, sigma) = sigma / s for 0 < s < sigma < 1.
double interpolation_exponent(double s, double sigma);

/// The fixed battery of five test bumps used by the pairing and residual
/// diagnostics; spatial supports inside Q1, time supports inside (-1/2, 5/2).
std::vector<TestFunction> pairing_bumps();
std::vector<TestFunction> residual_bumps();

/// Least-squares slope of y against x.
double fit_slope(std::span<const double> x, std::span<const double> y);

}  // namespace tnl
