#include "tnl/exact.hpp"

#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tnl {

CellField apply_stage(const CellField& field, const StagePermutation& stage) {
    const int L = field.level();
    const int n = stage.scale;
    if (L < n + 1)
        throw std::invalid_argument("field level too coarse for stage scale " + std::to_string(n));
    const std::int64_t block = std::int64_t(1) << (L - n);  // cells per block side
    const std::int64_t half = block >> 1;
    const std::int64_t k0 = field.origin_kx(), l0 = field.origin_ky();
    const std::int64_t nx = field.cells_x(), ny = field.cells_y();

    // Lattice range of block centers (in scale-n units) touching the window.
    auto div_floor = [](std::int64_t a, std::int64_t b) {
        std::int64_t q = a / b, r = a % b;
        return r != 0 && ((r < 0) != (b < 0)) ? q - 1 : q;
    };
    std::int64_t a_lo = div_floor(k0 + half, block) - 1;
    std::int64_t a_hi = div_floor(k0 + nx + half, block) + 1;
    std::int64_t b_lo = div_floor(l0 + half, block) - 1;
    std::int64_t b_hi = div_floor(l0 + ny + half, block) + 1;

    CellField out = field;
    std::int64_t bound = stage.active_n ? (std::int64_t(*stage.active_n) << n) : -1;

    std::vector<std::pair<std::int64_t, std::int64_t>> filled;
    for (std::int64_t b = b_lo; b <= b_hi; ++b) {
        for (std::int64_t a = a_lo; a <= a_hi; ++a) {
            if (((a + b) & 1) != 0) continue;  // empty block: identity
            if (bound >= 0 && (std::abs(a) > bound || std::abs(b) > bound)) continue;
            std::int64_t cx0 = a * block - half, cy0 = b * block - half;  // cell origin
            bool outside = cx0 + block <= k0 || cx0 >= k0 + nx || cy0 + block <= l0 ||
                           cy0 >= l0 + ny;
            if (outside) continue;
            bool inside = cx0 >= k0 && cx0 + block <= k0 + nx && cy0 >= l0 &&
                          cy0 + block <= l0 + ny;
            if (!inside)
                throw std::invalid_argument("window does not cover a whole active block");
            filled.emplace_back(cx0, cy0);
        }
    }

#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::int64_t idx = 0; idx < std::int64_t(filled.size()); ++idx) {
        auto [cx0, cy0] = filled[size_t(idx)];
        std::vector<std::int64_t> tmp(size_t(block) * size_t(block));
        for (std::int64_t r = 0; r < block; ++r)
            for (std::int64_t c = 0; c < block; ++c)
                tmp[size_t(r) * size_t(block) + size_t(c)] = field.at(cx0 + c, cy0 + r);
        if (stage.sign > 0) {
            // counterclockwise: (c, r) -> (block-1-r, c)
            for (std::int64_t r = 0; r < block; ++r)
                for (std::int64_t c = 0; c < block; ++c)
                    out.at(cx0 + block - 1 - r, cy0 + c) = tmp[size_t(r) * size_t(block) + size_t(c)];
        } else {
            // clockwise: (c, r) -> (r, block-1-c)
            for (std::int64_t r = 0; r < block; ++r)
                for (std::int64_t c = 0; c < block; ++c)
                    out.at(cx0 + r, cy0 + block - 1 - c) = tmp[size_t(r) * size_t(block) + size_t(c)];
        }
    }
    return out;
}

CellField evolve_exact(const CellField& data, const FieldSpec& spec, Dyadic t) {
    constexpr int kMaxStage = 50;
    const Dyadic one = Dyadic::from_int(1);
    CellField state = data;

    // forward stages in increasing order
    bool done = false;
    for (int n = 0; n <= kMaxStage; ++n) {
        StageSpan s = forward_stage(n);
        bool zeroed = spec.zero_covers(s.t_begin, s.t_end);
        if (s.t_end <= t) {
            if (zeroed) {
                if (spec.zero_interval->second >= one) { done = true; break; }
                continue;
            }
            state = apply_stage(state, {n, 1, spec.space_n});
            continue;
        }
        // stage not completed: t must not fall strictly inside a live stage
        if (!zeroed && s.t_begin < t && t < s.t_end)
            throw std::invalid_argument("t is not a stage endpoint of the schedule");
        done = true;
        break;
    }
    if (!done && t >= one)
        throw std::invalid_argument("cannot evolve across the stage accumulation at t=1");

    if (t <= one) return state;

    // mirrored stages in decreasing-n (time) order
    std::vector<int> pending;
    for (int n = 0; n <= kMaxStage; ++n) {
        StageSpan s = mirrored_stage(n);
        bool zeroed = spec.zero_covers(s.t_begin, s.t_end);
        if (zeroed) {
            if (spec.zero_interval->first <= one) break;
            continue;
        }
        if (s.t_end <= t) {
            pending.push_back(n);
        } else if (s.t_begin < t && t < s.t_end) {
            throw std::invalid_argument("t is not a stage endpoint of the schedule");
        }
        if (n == kMaxStage)
            throw std::invalid_argument("cannot evolve across the stage accumulation at t=1");
    }
    for (auto it = pending.rbegin(); it != pending.rend(); ++it)
        state = apply_stage(state, {*it, -1, spec.space_n});
    return state;
}

FlowResult exact_point_flow(const FieldSpec& spec, double t0, double t1, Vec2 x) {
    double lo = std::min(t0, t1), hi = std::max(t0, t1);
    auto st = stage_at(spec, 0.5 * (t0 + t1));
    if (!st) {
        // whole interval must carry zero field
        for (double probe : {lo, hi, 0.5 * lo + 0.5 * hi}) {
            auto p = stage_at(spec, probe);
            if (p) throw std::invalid_argument("flow interval is not inside a single stage");
        }
        return {x, false};
    }
    StageSpan span = st->sign > 0 ? forward_stage(st->scale) : mirrored_stage(st->scale);
    if (lo < span.t_begin.to_double() - 1e-15 || hi > span.t_end.to_double() + 1e-15)
        throw std::invalid_argument("flow interval is not inside a single stage");

    const int n = st->scale;
    double scale = std::ldexp(1.0, n);
    Vec2 z{x.x * scale, x.y * scale};
    double cx = std::nearbyint(z.x), cy = std::nearbyint(z.y);
    auto a = std::int64_t(cx), b = std::int64_t(cy);
    if (((a + b) & 1) != 0) return {x, false};  // empty cell
    if (spec.space_n) {
        std::int64_t bound = std::int64_t(*spec.space_n) << n;
        if (std::abs(a) > bound || std::abs(b) > bound) return {x, false};
    }
    Vec2 loc{z.x - cx, z.y - cy};
    double pa = std::abs(loc.x), pb = std::abs(loc.y);
    double r = std::max(pa, pb);
    if (r == 0.0) return {x, false};          // vortex center: fixed point
    if (pa == pb || r >= 0.5) return {x, true};  // diagonal tie set / cell edge

    // Perimeter coordinate, counterclockwise from the corner (r, -r).
    double theta;
    if (loc.x == r)
        theta = r + loc.y;
    else if (loc.y == r)
        theta = 2 * r + (r - loc.x);
    else if (loc.x == -r)
        theta = 4 * r + (r - loc.y);
    else
        theta = 6 * r + (loc.x + r);

    // One quarter turn (2r of perimeter) per 2^-n-1 of time.
    double dir = st->sign > 0 ? 1.0 : -1.0;
    theta += dir * (t1 - t0) * (4.0 * r * scale);
    double per = 8.0 * r;
    theta = std::fmod(theta, per);
    if (theta < 0) theta += per;

    Vec2 nloc;
    if (theta < 2 * r)
        nloc = {r, theta - r};
    else if (theta < 4 * r)
        nloc = {r - (theta - 2 * r), r};
    else if (theta < 6 * r)
        nloc = {-r, r - (theta - 4 * r)};
    else
        nloc = {theta - 6 * r - r, -r};

    return {{(cx + nloc.x) / scale, (cy + nloc.y) / scale}, false};
}

BranchSolution BranchSolution::make(Branch b, int i, int level, int space_n) {
    BranchSolution out;
    out.branch = b;
    out.i = i;
    out.level = level;
    out.space_n = space_n;
    out.window = Window::centered(Dyadic::from_int(space_n) + Dyadic(1, 1));
    return out;
}

FieldSpec BranchSolution::spec() const {
    FieldSpec s = truncate_space(FieldSpec{}, space_n);
    if (branch == Branch::trunc1) return truncate_time(s, i, 1);
    if (branch == Branch::trunc2) return truncate_time(s, i, 2);
    return s;
}

CellField BranchSolution::initial_data() const {
    return zero_outside(checkerboard(0, window, level), space_n);
}

CellField BranchSolution::snapshot(Dyadic t) const {
    const Dyadic one = Dyadic::from_int(1);
    const Dyadic two = Dyadic::from_int(2);
    if (t < Dyadic() || t > two) throw std::invalid_argument("branch time outside [0, 2]");
    switch (branch) {
        case Branch::prime:
            if (t >= one) {
                CellField half(level, window);
                half.set_value_exp(1);
                for (auto& v : half.numerators()) v = 1;
                return half;
            }
            return evolve_exact(initial_data(), spec(), t);
        case Branch::tilde:
            if (t > one) return evolve_exact(initial_data(), spec(), two - t);
            return evolve_exact(initial_data(), spec(), t);
        case Branch::trunc1:
        case Branch::trunc2:
            return evolve_exact(initial_data(), spec(), t);
    }
    throw std::logic_error("unreachable");
}

CellField branch_snapshot(const BranchSolution& branch, Dyadic t) { return branch.snapshot(t); }

BranchDensity::BranchDensity(Branch branch, int space_n) : branch_(branch), space_n_(space_n) {
    if (branch != Branch::prime && branch != Branch::tilde)
        throw std::invalid_argument("pointwise densities exist for the prime/tilde branches only");
    spec_ = truncate_space(FieldSpec{}, space_n);
}

double BranchDensity::forward_value(double t, Vec2 x) const {
    if (t <= 0.0) {
        if (std::abs(x.x) > space_n_ || std::abs(x.y) > space_n_) return 0.0;
        return double(checkerboard_value(x));
    }
    auto st = stage_at(spec_, t);
    if (!st) return 0.5;  // t == 1 exactly; no pointwise limit, measure zero
    const int n = st->scale;
    // stage start state: rho(1-2^-n) = chessboard(n) for even n, complemented
    // for odd n (cascade identity)
    double t_start = (Dyadic::from_int(1) - Dyadic::pow2(n)).to_double();
    Vec2 y = exact_point_flow(spec_, t, t_start, x).point;
    if (std::abs(y.x) > space_n_ || std::abs(y.y) > space_n_) return 0.0;
    int v = checkerboard_value(y, n);
    return double((n & 1) ? 1 - v : v);
}

double BranchDensity::operator()(double t, Vec2 x) const {
    if (t < 1.0) return forward_value(t, x);
    if (branch_ == Branch::prime) return 0.5;
    if (t >= 2.0) return forward_value(0.0, x);
    if (t == 1.0) return 0.5;  // no pointwise limit at t=1; measure-zero choice
    return forward_value(2.0 - t, x);
}

CellField lifted_slice(const BranchSolution& branch, double t, double y0) {
    CellField zero(branch.level, branch.window);
    if (y0 < t - 1.0 || y0 > t) return zero;
    if (y0 <= 0.0) return branch.initial_data();
    if (y0 >= 2.0) {
        if (branch.branch == Branch::prime) return branch.snapshot(Dyadic::from_int(2));
        return branch.initial_data();  // tilde ends at rho_in
    }
    int exp = 0;
    double frac = y0;
    while (frac != std::floor(frac) && exp < 60) { frac *= 2; ++exp; }
    if (exp >= 60) throw std::invalid_argument("slice coordinate is not dyadic");
    return branch.snapshot(Dyadic(std::int64_t(frac), exp));
}

}  // namespace tnl
