#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "tnl/dyadic.hpp"
#include "tnl/field.hpp"
#include "tnl/grid.hpp"

namespace tnl {

/// Adapter giving a FieldSpec the solver's field interface
/// (slice = field.at_time(t); slice(x) -> velocity).
struct SpecField {
    FieldSpec spec;
    struct Slice {
        const FieldSpec* spec;
        double t;
        Vec2 operator()(Vec2 x) const { return eval_field(*spec, t, x); }
    };
    Slice at_time(double t) const { return {&spec, t}; }
};

struct SolverConfig {
    Dyadic h;                          // density grid spacing (power of two)
    double cfl = 0.25;                 // dt = cfl * h / field_sup, at most 0.5
    Window window;                     // density grid window
    double t_start = 0.0;
    std::vector<double> checkpoints;   // increasing times > t_start
    double field_sup = kFieldSup;

    void validate() const {
        if (cfl <= 0.0 || cfl > 0.5) throw std::invalid_argument("CFL must be in (0, 0.5]");
        if (checkpoints.empty()) throw std::invalid_argument("no checkpoints");
        double prev = t_start;
        for (double t : checkpoints) {
            if (t <= prev) throw std::invalid_argument("checkpoints must increase from t_start");
            prev = t;
        }
    }
};

struct CheckpointDiag {
    double t = 0.0;
    double min = 0.0;
    double max = 0.0;
    double mass = 0.0;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<GridField> snapshots;
    std::vector<CheckpointDiag> diags;
};

/// One backward RK4 step of size dt ending at (t_next, x): returns the
/// characteristic foot at t_next - dt.
template <class Field>
Vec2 rk4_backstep(const Field& field, double t_next, double dt, Vec2 x) {
    auto s1 = field.at_time(t_next);
    auto s2 = field.at_time(t_next - 0.5 * dt);
    auto s3 = field.at_time(t_next - dt);
    Vec2 k1 = s1(x);
    Vec2 k2 = s2({x.x - 0.5 * dt * k1.x, x.y - 0.5 * dt * k1.y});
    Vec2 k3 = s2({x.x - 0.5 * dt * k2.x, x.y - 0.5 * dt * k2.y});
    Vec2 k4 = s3({x.x - dt * k3.x, x.y - dt * k3.y});
    return {x.x - dt / 6.0 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x),
            x.y - dt / 6.0 * (k1.y + 2 * k2.y + 2 * k3.y + k4.y)};
}

/// RK4 characteristic tracing from (t_from, x) to t_to, substepped at dt_sub.
/// Integrates forward or backward depending on the time order.
template <class Field>
Vec2 trace_characteristic(const Field& field, double t_from, double t_to, Vec2 x,
                          double dt_sub) {
    double span = t_to - t_from;
    if (span == 0.0) return x;
    int n = std::max(1, int(std::ceil(std::abs(span) / dt_sub)));
    double dt = span / n;
    double t = t_from;
    for (int k = 0; k < n; ++k) {
        auto s1 = field.at_time(t);
        auto s2 = field.at_time(t + 0.5 * dt);
        auto s3 = field.at_time(t + dt);
        Vec2 k1 = s1(x);
        Vec2 k2 = s2({x.x + 0.5 * dt * k1.x, x.y + 0.5 * dt * k1.y});
        Vec2 k3 = s2({x.x + 0.5 * dt * k2.x, x.y + 0.5 * dt * k2.y});
        Vec2 k4 = s3({x.x + dt * k3.x, x.y + dt * k3.y});
        x = {x.x + dt / 6.0 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x),
             x.y + dt / 6.0 * (k1.y + 2 * k2.y + 2 * k3.y + k4.y)};
        t = t_from + span * double(k + 1) / n;
    }
    return x;
}

namespace detail {
void solve_step(const GridField& prev, GridField& next, const std::vector<Vec2>& feet);
CheckpointDiag snapshot_diag(double t, const GridField& g);
void enforce_range(const GridField& g, double lo, double hi);
}  // namespace detail

/// Semi-Lagrangian transport: each step samples the previous snapshot at the
/// backward characteristic foot with bilinear interpolation (a convex
/// combination, so the discrete max principle holds); snapshots are recorded
/// at the checkpoint times.
template <class Field>
Trajectory solve(const Field& field, const GridField& data, const SolverConfig& cfg) {
    cfg.validate();
    GridDesc desc = GridDesc::cover(cfg.window, cfg.h);
    if (!(desc == data.desc)) throw std::invalid_argument("data grid does not match config");
    const double dt_max = cfg.cfl * cfg.h.to_double() / cfg.field_sup;
    const double lo = data.min_value(), hi = data.max_value();

    Trajectory traj;
    traj.diags.push_back(detail::snapshot_diag(cfg.t_start, data));
    GridField curr = data;
    GridField next(desc, 1);
    std::vector<Vec2> feet(size_t(desc.nx) * size_t(desc.ny));

    double seg_begin = cfg.t_start;
    for (double seg_end : cfg.checkpoints) {
        double seg = seg_end - seg_begin;
        int n_steps = std::max(1, int(std::ceil(seg / dt_max - 1e-12)));
        double dt = seg / n_steps;
        for (int step = 0; step < n_steps; ++step) {
            double t_next = seg_begin + seg * double(step + 1) / n_steps;
            auto s1 = field.at_time(t_next);
            auto s2 = field.at_time(t_next - 0.5 * dt);
            auto s3 = field.at_time(t_next - dt);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
            for (std::int64_t j = 0; j < desc.ny; ++j) {
                for (std::int64_t i = 0; i < desc.nx; ++i) {
                    Vec2 x{desc.cx(i), desc.cy(j)};
                    Vec2 k1 = s1(x);
                    Vec2 k2 = s2({x.x - 0.5 * dt * k1.x, x.y - 0.5 * dt * k1.y});
                    Vec2 k3 = s2({x.x - 0.5 * dt * k2.x, x.y - 0.5 * dt * k2.y});
                    Vec2 k4 = s3({x.x - dt * k3.x, x.y - dt * k3.y});
                    feet[size_t(j) * size_t(desc.nx) + size_t(i)] = {
                        x.x - dt / 6.0 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x),
                        x.y - dt / 6.0 * (k1.y + 2 * k2.y + 2 * k3.y + k4.y)};
                }
            }
            detail::solve_step(curr, next, feet);
            std::swap(curr, next);
        }
        detail::enforce_range(curr, lo, hi);
        traj.times.push_back(seg_end);
        traj.snapshots.push_back(curr);
        traj.diags.push_back(detail::snapshot_diag(seg_end, curr));
        seg_begin = seg_end;
    }
    return traj;
}

/// Midpoint-quadrature L1 distance over the window (per total window area,
/// not normalized). Grids must coincide; cell fields are rasterized exactly
/// at grid cell centers.
double l1_distance(const GridField& a, const GridField& b, Window window);
double l1_distance(const GridField& a, const CellField& b, Window window);
/// Exact L1 distance of two cell fields (dyadic rational arithmetic).
Dyadic l1_distance_exact(const CellField& a, const CellField& b, Window window);
double l1_distance(const CellField& a, const CellField& b, Window window);

}  // namespace tnl
