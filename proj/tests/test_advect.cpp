#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "tnl/advect.hpp"
#include "tnl/exact.hpp"
#include "tnl/mollify.hpp"

using namespace tnl;
using doctest::Approx;

namespace {

struct ZeroField {
    struct Slice {
        Vec2 operator()(Vec2) const { return {0, 0}; }
    };
    Slice at_time(double) const { return {}; }
};

GridField sample_data(const GridDesc& d, auto&& f) {
    GridField g(d, 1);
    for (std::int64_t j = 0; j < d.ny; ++j)
        for (std::int64_t i = 0; i < d.nx; ++i) g.at(i, j) = f(Vec2{d.cx(i), d.cy(j)});
    return g;
}

}  // namespace

TEST_CASE("tracing the zero field is the identity") {
    ZeroField z;
    Vec2 x = trace_characteristic(z, 0.0, 1.7, {0.3, -0.2}, 1e-2);
    CHECK(x.x == 0.3);
    CHECK(x.y == -0.2);
}

TEST_CASE("tracing the stage-0 vortex lands near the exact quarter turn") {
    // plain RK4 degrades to first order where the trajectory crosses the
    // square-streamline corners (the velocity direction jumps there), so the
    // usable tolerance at dt = 1e-3 is a few times 1e-4
    SpecField f{FieldSpec{}};
    Vec2 x = trace_characteristic(f, 0.0, 0.5, {0.25, 0.0}, 1e-3);
    CHECK(std::abs(x.x - 0.0) < 5e-4);
    CHECK(std::abs(x.y - 0.25) < 5e-4);
    Vec2 fine = trace_characteristic(f, 0.0, 0.5, {0.25, 0.0}, 2e-5);
    CHECK(std::abs(fine.x - 0.0) < 2e-5);
    CHECK(std::abs(fine.y - 0.25) < 2e-5);
}

TEST_CASE("trace reversibility") {
    // on the smooth (mollified) field the RK4 self-consistency bound applies
    FieldSpec spec = truncate_space(FieldSpec{}, 1);
    MollifiedField mf(spec, 4, Window::centered(2), 0.0, 0.5, Dyadic::pow2(6));
    Vec2 start{0.31, 0.07};
    Vec2 fwd = trace_characteristic(mf, 0.05, 0.45, start, 1e-3);
    Vec2 back = trace_characteristic(mf, 0.45, 0.05, fwd, 1e-3);
    CHECK(std::abs(back.x - start.x) < 10 * 1e-12 * 0.4 + 1e-10);
    CHECK(std::abs(back.y - start.y) < 10 * 1e-12 * 0.4 + 1e-10);
    // the raw field with its corner kinks still reverses to first order
    SpecField f{FieldSpec{}};
    Vec2 fwd2 = trace_characteristic(f, 0.05, 0.45, start, 1e-3);
    Vec2 back2 = trace_characteristic(f, 0.45, 0.05, fwd2, 1e-3);
    CHECK(std::abs(back2.x - start.x) < 1e-6);
    CHECK(std::abs(back2.y - start.y) < 1e-6);
}

TEST_CASE("solve with the zero field returns the data bit-exactly") {
    ZeroField z;
    GridDesc d = GridDesc::cover(Window::centered(1), Dyadic::pow2(5));
    GridField data = sample_data(d, [](Vec2 p) { return 0.25 + 0.5 * (p.x > 0); });
    SolverConfig cfg;
    cfg.h = Dyadic::pow2(5);
    cfg.window = Window::centered(1);
    cfg.checkpoints = {0.25, 0.5};
    Trajectory traj = solve(z, data, cfg);
    CHECK(traj.snapshots.size() == 2);
    CHECK(traj.snapshots[1].data == data.data);
}

TEST_CASE("constant data stays constant under the vortex field") {
    FieldSpec spec = truncate_space(FieldSpec{}, 1);
    MollifiedField mf(spec, 4, Window::centered(2), 0.0, 0.5, Dyadic::pow2(6));
    GridDesc d = GridDesc::cover(Window::centered(2), Dyadic::pow2(5));
    GridField data(d, 1);
    for (auto& v : data.data) v = 0.7;
    SolverConfig cfg;
    cfg.h = Dyadic::pow2(5);
    cfg.window = Window::centered(2);
    cfg.checkpoints = {0.5};
    Trajectory traj = solve(mf, data, cfg);
    CHECK(traj.snapshots[0].min_value() >= 0.7 - 1e-12);
    CHECK(traj.snapshots[0].max_value() <= 0.7 + 1e-12);
}

TEST_CASE("CFL violations are rejected before starting") {
    ZeroField z;
    GridDesc d = GridDesc::cover(Window::centered(1), Dyadic::pow2(4));
    GridField data(d, 1);
    SolverConfig cfg;
    cfg.h = Dyadic::pow2(4);
    cfg.window = Window::centered(1);
    cfg.checkpoints = {0.5};
    cfg.cfl = 0.75;
    CHECK_THROWS(solve(z, data, cfg));
    cfg.cfl = 0.25;
    cfg.checkpoints = {0.5, 0.25};  // non-increasing
    CHECK_THROWS(solve(z, data, cfg));
}

TEST_CASE("discrete max principle along a real run") {
    FieldSpec spec = truncate_space(FieldSpec{}, 1);
    MollifiedField mf(spec, 4, Window::centered(2), 0.0, 0.75, Dyadic::pow2(6));
    GridDesc d = GridDesc::cover(Window::centered(2), Dyadic::pow2(6));
    MollifiedData md(1, 4);
    GridField data = sample_data(d, [&](Vec2 p) { return md(p); });
    SolverConfig cfg;
    cfg.h = Dyadic::pow2(6);
    cfg.window = Window::centered(2);
    cfg.checkpoints = {0.5, 0.75};
    Trajectory traj = solve(mf, data, cfg);
    for (const auto& diag : traj.diags) {
        CHECK(diag.min >= -1e-12);
        CHECK(diag.max <= 1.0 + 1e-12);
    }
    // mass drift stays small for the divergence-free field
    double m0 = traj.diags.front().mass;
    double m1 = traj.diags.back().mass;
    CHECK(std::abs(m1 - m0) <= 0.02 * std::max(1.0, std::abs(m0)));
}

TEST_CASE("l1 distances") {
    GridDesc d = GridDesc::cover(Window::centered(1), Dyadic::pow2(4));
    Window q1 = Window::centered(1);
    GridField a = sample_data(d, [](Vec2) { return 0.5; });
    CHECK(l1_distance(a, a, q1) == 0.0);

    // constant 1/2 against the chessboard: distance 1/2 per unit area
    CellField cb = checkerboard(0, Window::centered(2), 4);
    CHECK(l1_distance(a, cb, q1) == Approx(0.5 * 4.0));  // window area 4

    // chessboard against its complement: distance 1
    CellField inv = cb;
    for (auto& v : inv.numerators()) v = 1 - v;
    CHECK(l1_distance_exact(cb, inv, q1) == Dyadic::from_int(4));
    CHECK(l1_distance(cb, inv, q1) == 4.0);

    // exact arithmetic: prime(2) against tilde(2) is exactly 1/2 per unit area
    BranchSolution prime = BranchSolution::make(Branch::prime, 1, 3, 4);
    BranchSolution tilde = BranchSolution::make(Branch::tilde, 1, 3, 4);
    Dyadic floor_dist =
        l1_distance_exact(prime.snapshot(Dyadic::from_int(2)), tilde.snapshot(Dyadic::from_int(2)), q1);
    CHECK(floor_dist == Dyadic::from_int(2));  // 1/2 x area 4

    // grids must coincide
    GridDesc d2 = GridDesc::cover(Window::centered(1), Dyadic::pow2(3));
    GridField b(d2, 1);
    CHECK_THROWS((void)l1_distance(a, b, q1));
}

TEST_CASE("solver converges to the exact snapshot under refinement") {
    // stages 0 and 1 with a j=5 mollified field; compare at t = 3/4 on Q1
    FieldSpec spec = truncate_space(FieldSpec{}, 2);
    const int j = 5;
    Window solve_win = Window::centered(2);
    MollifiedField mf(spec, j, Window::centered(Dyadic(9, 2)), 0.0, 0.75, Dyadic::pow2(j + 2));
    BranchSolution branch = BranchSolution::make(Branch::prime, 1, 2, 2);
    CellField exact = branch.snapshot(Dyadic(3, 2));
    MollifiedData md(2, j);

    double prev = -1.0;
    for (int m : {5, 6, 7}) {
        GridDesc d = GridDesc::cover(solve_win, Dyadic::pow2(m));
        GridField data = sample_data(d, [&](Vec2 p) { return md(p); });
        SolverConfig cfg;
        cfg.h = Dyadic::pow2(m);
        cfg.window = solve_win;
        cfg.checkpoints = {0.5, 0.75};
        Trajectory traj = solve(mf, data, cfg);
        double dist = l1_distance(traj.snapshots[1], exact, Window::centered(1));
        if (prev > 0) CHECK(dist < prev);
        prev = dist;
    }
    CHECK(prev < 0.6);  // per window area 4: well below the trivial 2.0
}
