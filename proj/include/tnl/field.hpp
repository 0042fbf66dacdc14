#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tnl/core.hpp"
#include "tnl/dyadic.hpp"

namespace tnl {

/// Uniform sup-norm bound for every field constructible here: |w| <= 4*(1/2).
inline constexpr double kFieldSup = 2.0;

/// One lattice of vortex cells: squares of side 2^-scale centered at
/// 2^-scale * Lambda, Lambda = {(a,b) in Z^2 : a+b even}.
struct VortexLayout {
    int scale = 0;
    int sign = 1;
    /// Spatial truncation: a cell is active iff its center c satisfies
    /// |c|_inf <= active_n, i.e. the field is cut to Q_{active_n + 2^-scale-1}
    /// along whole-cell boundaries.
    std::optional<int> active_n;
};

/// Stage n of the dyadic schedule: forward stages occupy
/// (1 - 2^-n, 1 - 2^-n-1) with scale n and sign +1; for 1 < t < 2 the field
/// is mirrored, b(t,x) = -b(2-t,x).
struct StageSpan {
    int scale = 0;
    int sign = 1;          // +1 forward, -1 mirrored
    Dyadic t_begin, t_end;
};

/// Exactly evaluable description of the scheduled field b and its truncations.
struct FieldSpec {
    /// Open time interval on which the field is identically zero.
    std::optional<std::pair<Dyadic, Dyadic>> zero_interval;
    /// Spatial truncation parameter N (stage n keeps Q_{N + 2^-n-1}).
    std::optional<int> space_n;
    bool lifted = false;

    // Construction bookkeeping, carried for serialization and manifests.
    int variant = 0;  // 0 untruncated, else 1|2
    int trunc_i = 0;

    bool zeroed_at(double t) const {
        return zero_interval && t > zero_interval->first.to_double() &&
               t < zero_interval->second.to_double();
    }
    /// True when the whole closed interval [a,b] is inside the zero interval.
    bool zero_covers(Dyadic a, Dyadic b) const {
        return zero_interval && zero_interval->first <= a && b <= zero_interval->second;
    }

    std::string serialize() const;
    static FieldSpec deserialize(const std::string& text);
};

/// The single vortex cell: (0, 4x1) on the right/left triangles,
/// (-4x2, 0) on the top/bottom ones, zero outside |x|_inf < 1/2 and on the
/// diagonal tie set.
Vec2 eval_w(Vec2 x);

/// sign * u(2^scale x) with u(x) = sum over Lambda of w(x - y); evaluated by
/// locating the containing cell (supports are disjoint).
Vec2 eval_u(Vec2 x, const VortexLayout& layout);

/// Stage active at time t, if any: resolves the dyadic schedule, the mirror
/// rule, and the zero interval. Stages are half-open [begin, end) in forward
/// time; the field is 0 outside (0, 2).
struct ActiveStage {
    int scale;
    int sign;
};
std::optional<ActiveStage> stage_at(const FieldSpec& spec, double t);

/// Closed stage interval of forward stage n (mirrored: reflected about t=1).
StageSpan forward_stage(int n);
StageSpan mirrored_stage(int n);

/// All non-zeroed stage spans of the schedule intersecting (t_lo, t_hi),
/// in time order. Throws if infinitely many stages intersect the range
/// (untruncated schedule across t = 1).
std::vector<StageSpan> stages_overlapping(const FieldSpec& spec, double t_lo, double t_hi);

/// Pointwise evaluation of the scheduled field (2D part of a lifted spec).
Vec2 eval_field(const FieldSpec& spec, double t, Vec2 x);

/// Autonomous 3D evaluation f(b)(y) = (1, b(y0, (y1,y2))).
Vec3 eval_lifted(const FieldSpec& spec, Vec3 y);

/// b^1_i / b^2_i: zeroes (1-2^-2i, 1+2^-(2i-2)) resp. (1-2^-2i, 1+2^-2i).
/// For variant 1 with i = 1 the zero interval degenerates to (3/4, 2).
FieldSpec truncate_time(const FieldSpec& base, int i, int variant);

/// Per-stage spatial truncation to Q_{N + 2^-n-1}; mirrored stages share the
/// window of their forward partner, so the cut removes whole vortex cells and
/// the field stays divergence-free.
FieldSpec truncate_space(const FieldSpec& base, int n);

/// Marks the spec as lifted; evaluation goes through eval_lifted.
FieldSpec lift_autonomous(const FieldSpec& base);

/// Initial data for the lifted problem: rho_in(y1,y2) on the slab
/// -1 <= y0 <= 0, zero elsewhere, with optional Q_N data truncation.
double theta_in(Vec3 y, std::optional<int> data_n = std::nullopt);

}  // namespace tnl
