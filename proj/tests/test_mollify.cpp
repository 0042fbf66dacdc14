#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "tnl/mollify.hpp"

using namespace tnl;
using doctest::Approx;

TEST_CASE("kernel normalizations") {
    // 1D mass on the full support is exactly 1 by construction
    CHECK(kernel::mass_1d(-1.0, 1.0) == Approx(1.0).epsilon(1e-10));
    CHECK(kernel::mass_1d(-2.0, 2.0) == Approx(1.0).epsilon(1e-10));
    // symmetric halves
    CHECK(kernel::mass_1d(-1.0, 0.0) == Approx(0.5).epsilon(1e-10));
    // radial 2D normalization integrates to 1 over the unit disk
    // (midpoint-ring reference at its own accuracy, plus a refinement check)
    auto ring_mass = [](int nr) {
        double mass = 0.0;
        for (int k = 0; k < nr; ++k) {
            double r = (k + 0.5) / nr;
            mass += 2.0 * M_PI * r * kernel::bump(r) / nr;
        }
        return mass;
    };
    CHECK(ring_mass(4000) / kernel::norm_2d() == Approx(1.0).epsilon(1e-6));
    CHECK(ring_mass(20000) / kernel::norm_2d() == Approx(1.0).epsilon(1e-8));
}

TEST_CASE("stencil is a symmetric probability measure") {
    Stencil2D st = Stencil2D::make(1.0 / 32);
    double mass = 0.0, mx = 0.0, my = 0.0;
    for (size_t k = 0; k < st.w.size(); ++k) {
        mass += st.w[k];
        mx += st.w[k] * st.dx[k];
        my += st.w[k] * st.dy[k];
    }
    CHECK(mass == Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(mx) < 1e-16);
    CHECK(std::abs(my) < 1e-16);
}

TEST_CASE("deep inside a cell the convolution reproduces the linear field") {
    // w is linear there and the stencil has unit mass and zero first moments
    Stencil2D st = Stencil2D::make(1.0 / 32);
    VortexLayout l0{0, 1, std::nullopt};
    for (Vec2 p : {Vec2{0.3, 0.1}, Vec2{-0.25, 0.05}, Vec2{0.05, -0.3}}) {
        Vec2 exact = eval_u(p, l0);
        double sx = 0, sy = 0;
        for (size_t k = 0; k < st.w.size(); ++k) {
            Vec2 q = eval_u({p.x - st.dx[k], p.y - st.dy[k]}, l0);
            sx += st.w[k] * q.x;
            sy += st.w[k] * q.y;
        }
        CHECK(std::abs(sx - exact.x) < 1e-8);
        CHECK(std::abs(sy - exact.y) < 1e-8);
    }
}

TEST_CASE("mollified field: stage weights and sup bound") {
    FieldSpec spec = truncate_space(FieldSpec{}, 2);
    const int j = 5;
    MollifiedField mf(spec, j, Window::centered(3), 0.0, 0.875, Dyadic::pow2(j + 2));

    // deep inside stage 0 in time and inside a cell in space: exact value
    auto slice = mf.at_time(0.25);
    Vec2 v = slice({0.3, 0.1});
    CHECK(v.y == Approx(1.2).epsilon(1e-9));
    CHECK(std::abs(v.x) < 1e-9);

    // at the stage boundary the two neighbors blend with weight 1/2 each
    auto blend = mf.at_time(0.5);
    Vec2 vb = blend({0.3, 0.1});
    VortexLayout l0{0, 1, 2}, l1{1, 1, 2};
    Vec2 expect{0.5 * (eval_u({0.3, 0.1}, l0).x + eval_u({0.3, 0.1}, l1).x),
                0.5 * (eval_u({0.3, 0.1}, l0).y + eval_u({0.3, 0.1}, l1).y)};
    CHECK(vb.x == Approx(expect.x).epsilon(1e-6));
    CHECK(vb.y == Approx(expect.y).epsilon(1e-6));

    // sup bound on random samples
    CounterRng rng{71};
    double sup = 0.0;
    for (int k = 0; k < 20000; ++k) {
        std::uint64_t c = 3 * std::uint64_t(k);
        double t = rng.uniform(c, 0.0, 0.875);
        Vec2 p{rng.uniform(c + 1, -2, 2), rng.uniform(c + 2, -2, 2)};
        sup = std::max(sup, mf.at_time(t)(p).sup_norm());
    }
    CHECK(sup <= kFieldSup + 1e-12);
}

TEST_CASE("mollifying the zero field gives zero") {
    FieldSpec spec = truncate_space(FieldSpec{}, 1);
    // the zero interval of b^2_1 covers (3/4, 5/4): the field is zero there
    FieldSpec z = truncate_time(spec, 1, 2);
    MollifiedField mf(z, 5, Window::centered(2), 0.95, 1.05, Dyadic::pow2(7));
    for (double t : {0.96, 1.0, 1.04}) {
        auto s = mf.at_time(t);
        CHECK(s({0.3, 0.1}).sup_norm() == 0.0);
        CHECK(s({-0.7, 0.4}).sup_norm() == 0.0);
    }
}

TEST_CASE("mollified data values") {
    MollifiedData md(4, 3);
    // far from edges: exact 0/1
    CHECK(md({0.5, 0.5}) == 0.0);
    CHECK(md({1.5, 0.5}) == 1.0);
    // on an edge, by symmetry: 1/2
    CHECK(md({1.0, 0.5}) == Approx(0.5).epsilon(1e-9));
    // range
    CounterRng rng{73};
    for (int k = 0; k < 5000; ++k) {
        Vec2 p{rng.uniform(2 * std::uint64_t(k), -4.5, 4.5),
               rng.uniform(2 * std::uint64_t(k) + 1, -4.5, 4.5)};
        double v = md(p);
        CHECK(v >= -1e-12);
        CHECK(v <= 1.0 + 1e-12);
    }
}

TEST_CASE("mollification preserves the data mass on a period cell") {
    // integral over [0,2]^2 of the mollified chessboard equals 2
    MollifiedData md(8, 4);
    int n = 256;
    double mass = 0.0;
    for (int jj = 0; jj < n; ++jj)
        for (int ii = 0; ii < n; ++ii)
            mass += md({(ii + 0.5) * 2.0 / n, (jj + 0.5) * 2.0 / n});
    mass *= (2.0 / n) * (2.0 / n);
    CHECK(mass == Approx(2.0).epsilon(1e-6));
}

TEST_CASE("mollify_field frames and the spacing precondition") {
    FieldSpec spec = truncate_space(FieldSpec{}, 1);
    GridDesc coarse = GridDesc::cover(Window::centered(1), Dyadic::pow2(4));
    CHECK_THROWS(mollify_field(spec, 4, coarse, {0.25}));  // h = 2^-4 > 2^-6
    GridDesc fine = GridDesc::cover(Window::centered(1), Dyadic::pow2(6));
    SampledField sf = mollify_field(spec, 4, fine, {0.25, 0.6});
    CHECK(sf.frames.size() == 2);
    CHECK(sf.frames[0].comps == 2);
    // interior sample matches the exact field
    GridDesc d = sf.frames[0].desc;
    auto i = std::int64_t(std::floor((0.3 - d.x0) / d.h));
    auto jj = std::int64_t(std::floor((0.1 - d.y0) / d.h));
    Vec2 exact = eval_field(spec, 0.25, {d.cx(i), d.cy(jj)});
    CHECK(sf.frames[0].at(i, jj, 1) == Approx(exact.y).epsilon(1e-8));
}

TEST_CASE("L1 distance of the mollified field to the field decreases in j") {
    FieldSpec spec = truncate_space(FieldSpec{}, 2);
    double prev = -1.0;
    for (int j : {3, 4, 5}) {
        MollifiedField mf(spec, j, Window::centered(2), 0.0, 0.75, Dyadic::pow2(j + 2));
        double dist = 0.0;
        int nt = 64, nx = 64;
        for (int k = 0; k < nt; ++k) {
            double t = (k + 0.5) * 0.75 / nt;
            auto s = mf.at_time(t);
            double slab = 0.0;
            for (int v = 0; v < nx; ++v)
                for (int u = 0; u < nx; ++u) {
                    Vec2 p{-1.0 + (u + 0.5) * 2.0 / nx, -1.0 + (v + 0.5) * 2.0 / nx};
                    Vec2 a = s(p);
                    Vec2 b = eval_field(spec, t, p);
                    slab += std::abs(a.x - b.x) + std::abs(a.y - b.y);
                }
            dist += slab * (2.0 / nx) * (2.0 / nx) * (0.75 / nt);
        }
        if (prev >= 0) CHECK(dist < 0.75 * prev);
        prev = dist;
    }
}

TEST_CASE("discrete divergence diagnostics") {
    // constant vector field: identically zero divergence
    GridDesc d = GridDesc::cover(Window::centered(1), Dyadic::pow2(5));
    GridField c(d, 2);
    for (auto& v : c.data) v = 1.5;
    GridField dv = discrete_divergence(c);
    CHECK(dv.min_value() == 0.0);
    CHECK(dv.max_value() == 0.0);

    // mollified field: divergence shrinks at least first-order in h
    FieldSpec spec = truncate_space(FieldSpec{}, 1);
    auto max_div = [&](int m) {
        GridDesc g = GridDesc::cover(Window::centered(1), Dyadic::pow2(m));
        SampledField sf = mollify_field(spec, 4, g, {0.25});
        GridField div = discrete_divergence(sf.frames[0]);
        return std::max(std::abs(div.min_value()), std::abs(div.max_value()));
    };
    double d7 = max_div(7), d8 = max_div(8);
    CHECK(d8 < 0.6 * d7);

    // the raw (unmollified) field has O(1/h) divergence on the jump set
    auto raw_div = [&](int m) {
        GridDesc g = GridDesc::cover(Window::centered(1), Dyadic::pow2(m));
        GridField f(g, 2);
        for (std::int64_t jj = 0; jj < g.ny; ++jj)
            for (std::int64_t ii = 0; ii < g.nx; ++ii) {
                Vec2 v = eval_field(spec, 0.25, {g.cx(ii), g.cy(jj)});
                f.at(ii, jj, 0) = v.x;
                f.at(ii, jj, 1) = v.y;
            }
        GridField div = discrete_divergence(f);
        return std::max(std::abs(div.min_value()), std::abs(div.max_value()));
    };
    double r7 = raw_div(7), r8 = raw_div(8);
    CHECK(r8 > 1.5 * r7);  // grows like 1/h
    CHECK(d8 < 0.05 * r8);
}

TEST_CASE("L1 contraction of the mollifier") {
    // |mollify(f) - mollify(g)|_L1 <= |f - g|_L1 on sampled estimates
    FieldSpec f = truncate_time(truncate_space(FieldSpec{}, 2), 1, 1);
    FieldSpec g = truncate_time(truncate_space(FieldSpec{}, 2), 1, 2);
    const int j = 4;
    Window dom = Window::centered(2);
    MollifiedField mf(f, j, dom, 0.0, 2.0, Dyadic::pow2(j + 2));
    MollifiedField mg(g, j, dom, 0.0, 2.0, Dyadic::pow2(j + 2));
    double lhs = 0.0, rhs = 0.0;
    int nt = 128, nx = 48;
    for (int k = 0; k < nt; ++k) {
        double t = (k + 0.5) * 2.0 / nt;
        auto sf = mf.at_time(t), sg = mg.at_time(t);
        double a = 0.0, b = 0.0;
        for (int v = 0; v < nx; ++v)
            for (int u = 0; u < nx; ++u) {
                Vec2 p{-1.0 + (u + 0.5) * 2.0 / nx, -1.0 + (v + 0.5) * 2.0 / nx};
                Vec2 d1 = sf(p), d2 = sg(p);
                a += std::abs(d1.x - d2.x) + std::abs(d1.y - d2.y);
                Vec2 e1 = eval_field(f, t, p), e2 = eval_field(g, t, p);
                b += std::abs(e1.x - e2.x) + std::abs(e1.y - e2.y);
            }
        lhs += a;
        rhs += b;
    }
    // quadrature noise allowance on both sides
    CHECK(lhs <= rhs * 1.05 + 1.0);
}
