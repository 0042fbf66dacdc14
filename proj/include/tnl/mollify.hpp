#pragma once

#include <vector>

#include "tnl/field.hpp"
#include "tnl/grid.hpp"

namespace tnl {

/// The standard bump exp(-1/(1-|z|^2)) on |z| < 1, with unit-mass
/// normalizations for the 1D (time) and radial 2D (space) kernels.
namespace kernel {

double bump(double z);                   // unnormalized 1D/radial profile
double norm_1d();                        // integral of bump over [-1,1]
double norm_2d();                        // integral of bump(|z|) over the unit disk
/// Mass of the normalized 1D kernel on [a, b] (clipped to [-1, 1]).
double mass_1d(double a, double b);

}  // namespace kernel

/// Quadrature stencil for spatial convolution with the radial bump at scale
/// eps: fixed tensor Gauss-Legendre nodes (subdivided per axis), with weights
/// normalized to unit mass so the discrete mollifier is a probability
/// measure. One stencil is shared by every sample point.
struct Stencil2D {
    std::vector<double> dx, dy, w;
    static Stencil2D make(double eps, int subdivisions = 4, int order = 8);
};

/// Space-time mollification b * phi_eps of a scheduled field, factorized as
/// sum_n w_n(t) * (psi_eps * u_n)(x): the field is constant in time within a
/// stage, so the time convolution reduces to kernel masses of the stage
/// overlaps, and the spatial convolutions are precomputed per stage scale on
/// a grid.
class MollifiedField {
  public:
    /// Covers queries with t in [t_lo, t_hi] and x in `domain`; grid_h is the
    /// spacing of the per-stage grids (must satisfy grid_h <= 2^-j-2).
    MollifiedField(const FieldSpec& spec, int j, Window domain, double t_lo, double t_hi,
                   Dyadic grid_h);

    double eps() const { return eps_; }
    const FieldSpec& spec() const { return spec_; }

    /// Stage weights at time t: at most a handful of (grid index, signed
    /// weight) entries. Hoist per time step; weights depend on t only.
    struct Slice {
        const MollifiedField* field;
        int count = 0;
        int grid_index[6];
        double weight[6];
        Vec2 operator()(Vec2 x) const;
    };
    Slice at_time(double t) const;
    Vec2 operator()(double t, Vec2 x) const { return at_time(t)(x); }

    /// Spatially mollified scale-n stage field (sign +1), for diagnostics.
    const GridField& stage_grid(int scale) const;

  private:
    FieldSpec spec_;
    double eps_;
    std::vector<int> scales_;            // distinct stage scales with grids
    std::vector<GridField> grids_;       // psi_eps * u_n on the domain
    std::vector<StageSpan> spans_;       // non-zeroed stage spans in [t_lo-eps, t_hi+eps]
    std::vector<int> span_grid_;         // span -> grid index
};

/// Pointwise mollified initial data (rho_in 1_{Q_N}) * psi_eps.
class MollifiedData {
  public:
    MollifiedData(int data_n, int j);
    double operator()(Vec2 x) const;
    double eps() const { return eps_; }

  private:
    int data_n_;
    double eps_;
};

/// Time-dependent vector GridField: sampled frames of the mollified field.
struct SampledField {
    std::vector<double> times;
    std::vector<GridField> frames;
};

/// The mollification operator surface: samples b * phi_{2^-j} on the given
/// grid at the given times. Requires grid.h <= 2^-j-2 (the grid must resolve
/// the kernel).
SampledField mollify_field(const FieldSpec& spec, int j, GridDesc grid,
                           const std::vector<double>& times);

/// rho_{j,in} = rho_in * psi_{2^-j} sampled on the grid; same spacing rule.
GridField mollify_data(int data_n, int j, GridDesc grid);

/// Centered-difference divergence of a vector grid field (diagnostic);
/// returns a scalar field on the interior grid.
GridField discrete_divergence(const GridField& vec);

}  // namespace tnl
