#pragma once

#include <optional>
#include <vector>

#include "tnl/dyadic.hpp"
#include "tnl/field.hpp"

namespace tnl {

/// The measure-preserving action of one completed stage: every "filled"
/// side-2^-scale block (centered at a point of 2^-scale Lambda) rotates its
/// sub-cell array by 90 degrees, counterclockwise for forward stages and
/// clockwise for mirrored ones; all other blocks are fixed.
struct StagePermutation {
    int scale = 0;
    int sign = 1;  // +1 counterclockwise (forward), -1 clockwise (mirrored)
    std::optional<int> active_n;
};

/// Applies the block permutation exactly. Requires field.level >= scale+1 and
/// a window covering whole blocks.
CellField apply_stage(const CellField& field, const StagePermutation& stage);

/// Evolves the data through all stages of the (possibly truncated) schedule
/// completed by the dyadic time t. Zeroed stages act as the identity; t must
/// be a stage endpoint or lie inside a zeroed region.
CellField evolve_exact(const CellField& data, const FieldSpec& spec, Dyadic t);

/// Exact characteristic position after flowing from t0 to t1 (both within the
/// closure of a single stage, or inside a zero region): square sup-norm
/// streamlines traversed at one quarter turn per 2^-scale-1 time.
struct FlowResult {
    Vec2 point;
    bool boundary = false;  // started on a cell edge or the diagonal tie set
};
FlowResult exact_point_flow(const FieldSpec& spec, double t0, double t1, Vec2 x);

enum class Branch { prime, tilde, trunc1, trunc2 };

/// Exact branch solutions with chessboard-in-Q_N data: rho' continues with
/// the constant 1/2 after t=1, rho~ with the time reflection rho(2-t), and
/// the truncated branches follow b^1_i / b^2_i.
struct BranchSolution {
    Branch branch = Branch::prime;
    int i = 1;          // truncation index (trunc1/trunc2 only)
    int level = 4;      // representation level of snapshots
    int space_n = 4;    // data truncated to Q_N; field to Q_{N+2^-n-1} per stage
    Window window;      // cell-field window, must cover all active blocks

    /// Default window Q_{N+1/2}: covers every active block of every stage.
    static BranchSolution make(Branch b, int i, int level, int space_n);

    FieldSpec spec() const;
    CellField initial_data() const;
    CellField snapshot(Dyadic t) const;
};

/// Exact density of the requested branch at dyadic time t, at representation
/// level `level`.
CellField branch_snapshot(const BranchSolution& branch, Dyadic t);

/// Pointwise closed-form density of the untruncated branches (prime/tilde):
/// cascade state at the enclosing stage start, pulled back along the exact
/// in-stage flow. Valid where the Q_N truncation does not interfere
/// (|x|_inf <= N/2 is always safe).
class BranchDensity {
  public:
    BranchDensity(Branch branch, int space_n);

    double operator()(double t, Vec2 x) const;
    const FieldSpec& spec() const { return spec_; }

  private:
    Branch branch_;
    int space_n_;
    FieldSpec spec_;
    double forward_value(double t, Vec2 x) const;  // t <= 1
};

/// Slice of the lifted solution theta at time t and coordinate y0: zero
/// outside the slab y0 in [t-1, t]; rho_in for y0 <= 0; the branch at 2D-time
/// y0 for 0 <= y0 <= 2; the branch's end state for y0 > 2.
CellField lifted_slice(const BranchSolution& branch, double t, double y0);

}  // namespace tnl
