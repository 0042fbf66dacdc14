#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tnl/field.hpp"

using namespace tnl;
using doctest::Approx;

TEST_CASE("w: piecewise-linear vortex cell") {
    CHECK(eval_w({0.3, 0.1}).x == 0.0);
    CHECK(eval_w({0.3, 0.1}).y == Approx(1.2));
    CHECK(eval_w({0.1, -0.3}).x == Approx(1.2));
    CHECK(eval_w({0.1, -0.3}).y == 0.0);
    CHECK(eval_w({0.6, 0.2}).x == 0.0);
    CHECK(eval_w({0.6, 0.2}).y == 0.0);
    // tie set and boundary evaluate to zero
    CHECK(eval_w({0.2, 0.2}).sup_norm() == 0.0);
    CHECK(eval_w({0.5, 0.1}).sup_norm() == 0.0);
}

TEST_CASE("u: lattice of disjoint vortex cells") {
    VortexLayout l0{0, 1, std::nullopt};
    CHECK(eval_u({1.3, 1.1}, l0).y == Approx(1.2));  // translate by (1,1) in Lambda
    CHECK(eval_u({1.3, 0.1}, l0).sup_norm() == 0.0);  // (1,0) has odd sum: empty
    VortexLayout l1{1, 1, std::nullopt};
    CHECK(eval_u({0.15, 0.05}, l1).y == Approx(1.2));  // u(2x) at (0.3, 0.1)
    VortexLayout neg{0, -1, std::nullopt};
    CHECK(eval_u({0.3, 0.1}, neg).y == Approx(-1.2));
}

TEST_CASE("disjoint support: single-cell lookup equals the 9-translate sum") {
    VortexLayout l{2, 1, std::nullopt};
    CounterRng rng{3};
    for (int k = 0; k < 2000; ++k) {
        Vec2 x{rng.uniform(2 * k, -2, 2), rng.uniform(2 * k + 1, -2, 2)};
        Vec2 v = eval_u(x, l);
        // explicit lattice sum over the 9 nearest scale-2 translates
        double scale = 4.0;
        Vec2 z{x.x * scale, x.y * scale};
        double cx = std::nearbyint(z.x), cy = std::nearbyint(z.y);
        Vec2 sum{0, 0};
        for (int dx = -1; dx <= 1; ++dx)
            for (int dy = -1; dy <= 1; ++dy) {
                auto a = std::int64_t(cx) + dx, b = std::int64_t(cy) + dy;
                if (((a + b) & 1) != 0) continue;
                Vec2 w = eval_w({z.x - double(a), z.y - double(b)});
                sum += w;
            }
        CHECK(v.x == Approx(sum.x));
        CHECK(v.y == Approx(sum.y));
    }
}

TEST_CASE("scheduled field evaluation") {
    FieldSpec b;
    CHECK(eval_field(b, 0.25, {0.3, 0.1}).y == Approx(1.2));
    CHECK(eval_field(b, 0.6, {0.15, 0.05}).y == Approx(1.2));  // stage 1
    CHECK(eval_field(b, 1.75, {0.3, 0.1}).y == Approx(-1.2));  // mirror
    CHECK(eval_field(b, -0.5, {0.3, 0.1}).sup_norm() == 0.0);
    CHECK(eval_field(b, 2.5, {0.3, 0.1}).sup_norm() == 0.0);

    FieldSpec b21 = truncate_time(b, 1, 2);
    CHECK(eval_field(b21, 1.0, {0.3, 0.1}).sup_norm() == 0.0);
    CHECK(eval_field(b21, 0.9, {0.3, 0.1}).sup_norm() == 0.0);  // inside (3/4, 5/4)
    CHECK(eval_field(b21, 0.25, {0.3, 0.1}).y == Approx(1.2));
}

TEST_CASE("mirror antisymmetry b(t,x) = -b(2-t,x)") {
    FieldSpec b;
    CounterRng rng{5};
    int checked = 0;
    for (int k = 0; k < 3000; ++k) {
        double t = rng.uniform(3 * k, 1.0, 2.0);
        Vec2 x{rng.uniform(3 * k + 1, -2, 2), rng.uniform(3 * k + 2, -2, 2)};
        // stage boundaries are half-open mirrors; skip exact boundaries
        double s = 2.0 - t;
        if (s <= 0.0 || s >= 1.0) continue;
        Vec2 a = eval_field(b, t, x);
        Vec2 c = eval_field(b, s, x);
        CHECK(a.x == Approx(-c.x));
        CHECK(a.y == Approx(-c.y));
        ++checked;
    }
    CHECK(checked > 2500);
}

TEST_CASE("uniform bound |b| <= 2 on random samples") {
    FieldSpec variants[4] = {FieldSpec{}, truncate_time(FieldSpec{}, 2, 1),
                             truncate_time(FieldSpec{}, 3, 2),
                             truncate_space(FieldSpec{}, 2)};
    CounterRng rng{17};
    for (const auto& spec : variants) {
        for (int k = 0; k < 25000; ++k) {
            double t = rng.uniform(3 * k, -0.5, 2.5);
            Vec2 x{rng.uniform(3 * k + 1, -4, 4), rng.uniform(3 * k + 2, -4, 4)};
            CHECK(eval_field(spec, t, x).sup_norm() <= kFieldSup);
        }
    }
}

TEST_CASE("time truncations") {
    FieldSpec b;
    FieldSpec v2 = truncate_time(b, 2, 2);
    CHECK(v2.zero_interval->first == Dyadic(15, 4));
    CHECK(v2.zero_interval->second == Dyadic(17, 4));
    FieldSpec v1 = truncate_time(b, 2, 1);
    CHECK(v1.zero_interval->first == Dyadic(15, 4));
    CHECK(v1.zero_interval->second == Dyadic(5, 2));
    // degenerate variant-1 truncation at i=1: zero interval (3/4, 2)
    FieldSpec v11 = truncate_time(b, 1, 1);
    CHECK(v11.zero_interval->first == Dyadic(3, 2));
    CHECK(v11.zero_interval->second == Dyadic::from_int(2));
    CHECK_THROWS(truncate_time(b, 0, 1));
    CHECK_THROWS(truncate_time(b, -1, 2));
}

TEST_CASE("field-to-truncation L1 distance halves with i") {
    // |b - b^2_i| integrates |b| over the zeroed window: monotone, ~1/4 rate
    FieldSpec b;
    Window q1 = Window::centered(1);
    auto l1_gap = [&](int i) {
        FieldSpec trunc = truncate_time(b, i, 2);
        double sum = 0.0;
        int nt = 4096, nx = 24;
        for (int k = 0; k < nt; ++k) {
            double t = (k + 0.5) * 2.0 / nt;
            if (!b.zeroed_at(t) && !trunc.zeroed_at(t)) continue;  // fields equal
            double slab = 0.0;
            for (int jj = 0; jj < nx; ++jj)
                for (int ii = 0; ii < nx; ++ii) {
                    Vec2 p{-1.0 + (ii + 0.5) * 2.0 / nx, -1.0 + (jj + 0.5) * 2.0 / nx};
                    Vec2 d = eval_field(b, t, p) - eval_field(trunc, t, p);
                    slab += std::abs(d.x) + std::abs(d.y);
                }
            sum += slab * (2.0 / nx) * (2.0 / nx) * (2.0 / nt);
        }
        return sum;
    };
    double g1 = l1_gap(1), g2 = l1_gap(2), g3 = l1_gap(3);
    CHECK(g2 < g1);
    CHECK(g3 < g2);
    // the zeroed window halves twice per i; the integrand is O(1)
    CHECK(g2 / g1 < 0.6);
    CHECK(g3 / g2 < 0.6);
    // crude bound: 2 * |window| * sup * area
    CHECK(g1 <= 2.0 * std::ldexp(1.0, -1) * 2.0 * 4.0);
}

TEST_CASE("spatial truncation keeps whole cells and matches inside") {
    FieldSpec b = truncate_space(FieldSpec{}, 4);
    FieldSpec plain;
    CounterRng rng{23};
    for (int k = 0; k < 20000; ++k) {
        double t = rng.uniform(3 * k, 0.0, 2.0);
        Vec2 x{rng.uniform(3 * k + 1, -2.5, 2.5), rng.uniform(3 * k + 2, -2.5, 2.5)};
        // truncated and untruncated agree well inside (Q_{N/2})
        Vec2 a = eval_field(b, t, x), c = eval_field(plain, t, x);
        CHECK(a.x == c.x);
        CHECK(a.y == c.y);
    }
    // outside the stage window the field vanishes
    CHECK(eval_field(b, 0.25, {4.8, 0.1}).sup_norm() == 0.0);
    // stage-0 window reaches exactly to Q_{4+1/2}: the cell centered at
    // (4, 0) is kept
    CHECK(eval_field(b, 0.25, {4.3, 0.1}).y == Approx(1.2));
    // the cell centered at (5, 1) is cut
    CHECK(eval_field(b, 0.25, {5.3, 1.1}).sup_norm() == 0.0);
    CHECK_THROWS(truncate_space(FieldSpec{}, 0));
}

TEST_CASE("zero normal flux through vortex cell edges") {
    // the field is tangent to cell boundaries: quadrature of the normal
    // component along random edges vanishes identically
    FieldSpec b;
    CounterRng rng{29};
    for (int stage_n : {0, 1, 2}) {
        double t = stage_n == 0 ? 0.25 : (stage_n == 1 ? 0.6 : 0.8);
        double side = std::ldexp(1.0, -stage_n);
        for (int k = 0; k < 100; ++k) {
            // random cell center in 2^-n Lambda (even coordinate sum)
            std::uint64_t cbase = 4 * std::uint64_t(k) + std::uint64_t(stage_n) * 1000;
            auto a = std::int64_t(rng.uniform(cbase, -4, 4));
            auto bb = std::int64_t(rng.uniform(cbase + 1, -4, 4));
            if (((a + bb) & 1) != 0) bb += 1;
            Vec2 center{double(a) * side, double(bb) * side};
            int edge = int(rng.uniform(cbase + 2, 0, 4));
            double flux = 0.0;
            for (int q = 0; q < 64; ++q) {
                double s = (q + 0.5) / 64.0 - 0.5;  // along the edge
                Vec2 p, normal;
                switch (edge) {
                    case 0: p = {center.x + side / 2, center.y + s * side}; normal = {1, 0}; break;
                    case 1: p = {center.x - side / 2, center.y + s * side}; normal = {1, 0}; break;
                    case 2: p = {center.x + s * side, center.y + side / 2}; normal = {0, 1}; break;
                    default: p = {center.x + s * side, center.y - side / 2}; normal = {0, 1}; break;
                }
                Vec2 v = eval_field(b, t, p);
                flux += v.x * normal.x + v.y * normal.y;
            }
            CHECK(flux == 0.0);  // identically zero, not just small
        }
    }
}

TEST_CASE("autonomous lift") {
    FieldSpec b = lift_autonomous(FieldSpec{});
    Vec3 v = eval_lifted(b, {0.25, 0.3, 0.1});
    CHECK(v.x == 1.0);
    CHECK(v.y == 0.0);
    CHECK(v.z == Approx(1.2));
    Vec3 z = eval_lifted(b, {-0.5, 0.3, 0.1});
    CHECK(z.x == 1.0);
    CHECK(z.z == 0.0);
    // sup bound of the lift
    CounterRng rng{31};
    double sup = 0.0;
    for (int k = 0; k < 10000; ++k) {
        Vec3 y{rng.uniform(3 * k, -1, 3), rng.uniform(3 * k + 1, -2, 2),
               rng.uniform(3 * k + 2, -2, 2)};
        sup = std::max(sup, eval_lifted(b, y).norm());
    }
    CHECK(sup <= std::sqrt(1.0 + kFieldSup * kFieldSup));
}

TEST_CASE("lifted initial data") {
    CHECK(theta_in({-0.5, 0.5, 0.5}) == 0.0);
    CHECK(theta_in({-0.5, 1.5, 0.5}) == 1.0);
    CHECK(theta_in({0.5, 1.5, 0.5}) == 0.0);
    CHECK(theta_in({-1.5, 1.5, 0.5}) == 0.0);
    CHECK(theta_in({-0.5, 4.5, 0.5}, 4) == 0.0);  // data truncation
}

TEST_CASE("spec serialization round trip") {
    FieldSpec spec = truncate_time(truncate_space(FieldSpec{}, 4), 2, 1);
    FieldSpec back = FieldSpec::deserialize(spec.serialize());
    CHECK(back.variant == 1);
    CHECK(back.trunc_i == 2);
    CHECK(back.space_n.value() == 4);
    CHECK(back.zero_interval->first == spec.zero_interval->first);
    CHECK(back.zero_interval->second == spec.zero_interval->second);
}
