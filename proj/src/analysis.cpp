#include "tnl/analysis.hpp"

#include <cmath>
#include <stdexcept>

#include "tnl/mollify.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tnl {

namespace {

// 16-point Gauss-Legendre on [0,1]
constexpr int kGL = 16;
constexpr double kGLNode[kGL] = {
    0.0052995325041750337, 0.0277124884633837,   0.06718439880608412,  0.1222977958224985,
    0.19106187779867811,   0.27099161117138324,  0.35919822461037054,  0.45249374508118123,
    0.5475062549188188,    0.6408017753896295,   0.7290083888286168,   0.8089381222013219,
    0.8777022041775015,    0.9328156011939159,   0.9722875115366163,   0.99470046749582497};
constexpr double kGLWeight[kGL] = {
    0.013576229705877047, 0.03112676196932395, 0.04757925584124639, 0.06231448562776694,
    0.07479799440828837,  0.08457825969750127, 0.09130170752246179, 0.0947253052275343,
    0.0947253052275343,   0.09130170752246179, 0.08457825969750127, 0.07479799440828837,
    0.06231448562776694,  0.04757925584124639, 0.03112676196932395, 0.013576229705877047};

double integrate_1d(double a, double b, int pieces, auto&& f) {
    double s = 0.0;
    for (int p = 0; p < pieces; ++p) {
        double lo = a + (b - a) * p / pieces;
        double hi = a + (b - a) * (p + 1) / pieces;
        for (int k = 0; k < kGL; ++k) s += (hi - lo) * kGLWeight[k] * f(lo + (hi - lo) * kGLNode[k]);
    }
    return s;
}

double bump_sup_deriv() {
    // max over z of |d/dz exp(-1/(1-z^2))|, located near z ~ 0.5; golden
    // section on |f'| computed analytically
    auto nd = [](double z) {
        double s = 1.0 - z * z;
        if (s <= 0) return 0.0;
        return std::exp(-1.0 / s) * 2.0 * z / (s * s);
    };
    double lo = 0.0, hi = 1.0;
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = hi - phi * (hi - lo), b = lo + phi * (hi - lo);
    for (int it = 0; it < 200; ++it) {
        if (nd(a) < nd(b)) lo = a; else hi = b;
        a = hi - phi * (hi - lo);
        b = lo + phi * (hi - lo);
    }
    return nd(0.5 * (lo + hi));
}

const double kBumpIntegral = integrate_1d(-1.0, 1.0, 32, [](double z) { return kernel::bump(z); });
const double kBumpSupDeriv = bump_sup_deriv();
const double kBumpSup = std::exp(-1.0);

}  // namespace

double Bump1D::value(double x) const { return kernel::bump((x - center) / width); }

double Bump1D::deriv(double x) const {
    double z = (x - center) / width;
    double s = 1.0 - z * z;
    if (s <= 0) return 0.0;
    return kernel::bump(z) * (-2.0 * z) / (s * s) / width;
}

double Bump1D::integral() const { return width * kBumpIntegral; }
double Bump1D::sup() const { return kBumpSup; }
double Bump1D::sup_deriv() const { return kBumpSupDeriv / width; }

TestFunction::TestFunction(Bump1D fx, Bump1D fy, double amplitude)
    : has_time_(false), fx_(fx), fy_(fy), amp_(amplitude) {}

TestFunction::TestFunction(Bump1D ft, Bump1D fx, Bump1D fy, double amplitude)
    : has_time_(true), ft_(ft), fx_(fx), fy_(fy), amp_(amplitude) {}

double TestFunction::value(Vec2 x) const {
    return amp_ * fx_.value(x.x) * fy_.value(x.y);
}

double TestFunction::value(double t, Vec2 x) const {
    double v = value(x);
    return has_time_ ? v * ft_.value(t) : v;
}

Vec2 TestFunction::grad(double t, Vec2 x) const {
    double ft = has_time_ ? ft_.value(t) : 1.0;
    return {amp_ * ft * fx_.deriv(x.x) * fy_.value(x.y),
            amp_ * ft * fx_.value(x.x) * fy_.deriv(x.y)};
}

double TestFunction::time_deriv(double t, Vec2 x) const {
    if (!has_time_) return 0.0;
    return amp_ * ft_.deriv(t) * fx_.value(x.x) * fy_.value(x.y);
}

double TestFunction::integral_space() const { return amp_ * fx_.integral() * fy_.integral(); }

double TestFunction::sup_grad() const {
    double ft = has_time_ ? kBumpSup : 1.0;
    double gx = fx_.sup_deriv() * fy_.sup();
    double gy = fx_.sup() * fy_.sup_deriv();
    return std::abs(amp_) * ft * std::max(gx, gy);
}

double TestFunction::sup_time_deriv() const {
    if (!has_time_) return 0.0;
    return std::abs(amp_) * ft_.sup_deriv() * fx_.sup() * fy_.sup();
}

Dyadic weak_gap_exact(const CellField& field, int level, Window window) {
    CellField local = field.restricted(window);
    CellField avg = cell_averages(local, level);
    // |v - 1/2| = |2 num - 2^e| / 2^(e+1)
    const int e = avg.value_exp();
    std::int64_t worst = 0;
    for (std::int64_t v : avg.numerators())
        worst = std::max(worst, std::abs(2 * v - (std::int64_t(1) << e)));
    return Dyadic(worst, e + 1);
}

double weak_gap(const CellField& field, int level, Window window) {
    return weak_gap_exact(field, level, window).to_double();
}

double weak_gap(const GridField& field, int level, Window window) {
    if (field.comps != 1) throw std::invalid_argument("weak gap needs a scalar field");
    const GridDesc& d = field.desc;
    double cell = std::ldexp(1.0, -level);
    double per = cell / d.h;
    if (per != std::floor(per) || per < 1)
        throw std::invalid_argument("grid does not resolve the averaging level");
    auto m = std::int64_t(per);
    double x0 = window.x0.to_double(), y0 = window.y0.to_double(), side = window.side.to_double();
    auto nc = std::int64_t(std::llround(side / cell));
    auto i_base = std::int64_t(std::llround((x0 - d.x0) / d.h));
    auto j_base = std::int64_t(std::llround((y0 - d.y0) / d.h));
    if (i_base < 0 || j_base < 0 || i_base + nc * m > d.nx || j_base + nc * m > d.ny)
        throw std::invalid_argument("window exceeds the grid");
    double worst = 0.0;
    for (std::int64_t cj = 0; cj < nc; ++cj)
        for (std::int64_t ci = 0; ci < nc; ++ci) {
            double sum = 0.0;
            for (std::int64_t j = 0; j < m; ++j)
                for (std::int64_t i = 0; i < m; ++i)
                    sum += field.at(i_base + ci * m + i, j_base + cj * m + j);
            worst = std::max(worst, std::abs(sum / double(m * m) - 0.5));
        }
    return worst;
}

double pair_integral(const CellField& field, const TestFunction& phi) {
    if (phi.space_time()) throw std::invalid_argument("pairing takes a space-only test function");
    const double cell = std::ldexp(1.0, -field.level());
    const Window& w = field.window();
    double wx0 = w.x0.to_double(), wy0 = w.y0.to_double(), side = w.side.to_double();
    // support escape check
    if (phi.fx().center - phi.fx().width < wx0 || phi.fx().center + phi.fx().width > wx0 + side ||
        phi.fy().center - phi.fy().width < wy0 || phi.fy().center + phi.fy().width > wy0 + side)
        throw std::invalid_argument("test function support escapes the field window");

    const std::int64_t nx = field.cells_x(), ny = field.cells_y();
    std::vector<double> ix(size_t(nx), 0.0);
    std::vector<double> iy(size_t(ny), 0.0);
    for (std::int64_t k = 0; k < nx; ++k) {
        double a = wx0 + double(k) * cell;
        ix[size_t(k)] = integrate_1d(a, a + cell, 1, [&](double x) { return phi.fx().value(x); });
    }
    for (std::int64_t l = 0; l < ny; ++l) {
        double a = wy0 + double(l) * cell;
        iy[size_t(l)] = integrate_1d(a, a + cell, 1, [&](double y) { return phi.fy().value(y); });
    }
    const double scale = std::ldexp(phi.amplitude(), -field.value_exp());
    std::vector<double> rows(size_t(ny), 0.0);
    for (std::int64_t l = 0; l < ny; ++l) {
        double s = 0.0;
        for (std::int64_t k = 0; k < nx; ++k) {
            std::int64_t v = field.at(field.origin_kx() + k, field.origin_ky() + l);
            if (v != 0) s += ix[size_t(k)] * double(v);
        }
        rows[size_t(l)] = s * iy[size_t(l)];
    }
    return pairwise_sum(rows) * scale;
}

namespace {

struct Segment {
    double a, b;
};

/// Time segments of the schedule, coarser than the cutoff, clipped to
/// [0, horizon] and to the beta gap.
std::vector<Segment> residual_segments(double cutoff, double horizon, double beta) {
    std::vector<Segment> segs;
    auto add = [&](double a, double b) {
        if (beta > 0) {
            if (a < 1.0 - beta && b > 1.0 - beta) b = 1.0 - beta;
            if (b > 1.0 + beta && a < 1.0 + beta) a = 1.0 + beta;
            if (a >= 1.0 - beta && b <= 1.0 + beta) return;
        }
        a = std::max(a, 0.0);
        b = std::min(b, horizon);
        if (b > a) segs.push_back({a, b});
    };
    for (int n = 0; n < 60; ++n) {
        StageSpan s = forward_stage(n);
        if (s.t_end.to_double() - s.t_begin.to_double() < cutoff) break;
        add(s.t_begin.to_double(), s.t_end.to_double());
    }
    std::vector<Segment> mirror;
    for (int n = 0; n < 60; ++n) {
        StageSpan s = mirrored_stage(n);
        if (s.t_end.to_double() - s.t_begin.to_double() < cutoff) break;
        mirror.push_back({s.t_begin.to_double(), s.t_end.to_double()});
    }
    for (auto it = mirror.rbegin(); it != mirror.rend(); ++it) add(it->a, it->b);
    return segs;
}

}  // namespace

double weak_residual(const std::function<double(double, Vec2)>& rho, const FieldSpec& spec,
                     const TestFunction& phi, ResidualOptions opt) {
    if (!phi.space_time()) throw std::invalid_argument("residual takes a space-time test function");
    const double dx = opt.dx;
    const double dtn = opt.dt_node > 0 ? opt.dt_node : dx;

    // space nodes covering the spatial support
    double sx0 = phi.fx().center - phi.fx().width, sx1 = phi.fx().center + phi.fx().width;
    double sy0 = phi.fy().center - phi.fy().width, sy1 = phi.fy().center + phi.fy().width;
    auto nxi = std::int64_t(std::ceil((sx1 - sx0) / dx));
    auto nyi = std::int64_t(std::ceil((sy1 - sy0) / dx));

    const double t_sup_end = phi.ft().center + phi.ft().width;
    const double horizon = std::min(2.0, t_sup_end);

    auto space_integral = [&](auto&& f) {
        std::vector<double> rows(size_t(nyi), 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (std::int64_t j = 0; j < nyi; ++j) {
            double s = 0.0;
            for (std::int64_t i = 0; i < nxi; ++i) {
                Vec2 p{sx0 + (double(i) + 0.5) * dx, sy0 + (double(j) + 0.5) * dx};
                s += f(p);
            }
            rows[size_t(j)] = s;
        }
        return pairwise_sum(rows) * dx * dx;
    };

    double total = 0.0;
    // initial term
    total += space_integral([&](Vec2 p) { return rho(0.0, p) * phi.value(0.0, p); });

    // interior: skip stages finer than half the node spacing
    for (const Segment& seg : residual_segments(0.5 * dtn, horizon, opt.gap_beta)) {
        int nt = std::max(1, int(std::ceil((seg.b - seg.a) / dtn)));
        double dt = (seg.b - seg.a) / nt;
        for (int k = 0; k < nt; ++k) {
            double t = seg.a + (k + 0.5) * dt;
            double slab = space_integral([&](Vec2 p) {
                double r = rho(t, p);
                if (r == 0.0) return 0.0;
                Vec2 b = eval_field(spec, t, p);
                Vec2 g = phi.grad(t, p);
                return r * (phi.time_deriv(t, p) + b.x * g.x + b.y * g.y);
            });
            total += slab * dt;
        }
    }

    // frozen tail past the schedule: rho constant, b = 0
    if (t_sup_end > 2.0 && opt.gap_beta < 1.0) {
        total -= space_integral([&](Vec2 p) { return rho(2.0, p) * phi.value(2.0, p); });
    }
    return std::abs(total);
}

double weak_residual(const BranchDensity& rho, const TestFunction& phi, ResidualOptions opt) {
    return weak_residual([&rho](double t, Vec2 x) { return rho(t, x); }, rho.spec(), phi, opt);
}

namespace {

/// Per-cell TV of the local vortex (unit cell, unscaled): quadrature of the
/// constant |Dw| over the four triangles plus line quadrature of the jumps.
double cell_tv_local() {
    // triangles: |Dw| = 4 on each of the four quarter-triangles (area 1/4)
    double ac = 0.0;
    const Vec2 apex{0, 0};
    const Vec2 corners[5] = {{0.5, -0.5}, {0.5, 0.5}, {-0.5, 0.5}, {-0.5, -0.5}, {0.5, -0.5}};
    for (int t = 0; t < 4; ++t) {
        Vec2 a = corners[t], b = corners[t + 1];
        // midpoint rule at the three edge midpoints: exact for affine data
        Vec2 m0{0.5 * (apex.x + a.x), 0.5 * (apex.y + a.y)};
        Vec2 m1{0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
        Vec2 m2{0.5 * (b.x + apex.x), 0.5 * (b.y + apex.y)};
        auto du = [](Vec2 p) {
            double ax = std::abs(p.x), ay = std::abs(p.y);
            if (ax > ay && ax < 0.5) return 4.0;
            if (ay > ax && ay < 0.5) return 4.0;
            return 0.0;
        };
        double area = 0.25;
        ac += area / 3.0 * (du(m0) + du(m1) + du(m2));
    }
    // diagonal jumps: |(0,4a) - (-4a,0)| = 4 sqrt(2) |a| along the diagonals
    double diag = 0.0;
    for (int half = 0; half < 4; ++half)
        diag += integrate_1d(0.0, 0.5, 1, [](double a) { return 4.0 * std::sqrt(2.0) * a; }) *
                std::sqrt(2.0);
    // cell-edge jumps: |w| = 2 along each of the four edges
    double edges = 0.0;
    for (int e = 0; e < 4; ++e)
        edges += integrate_1d(-0.5, 0.5, 1, [](double) { return 2.0; });
    return ac + diag + edges;
}

double cell_l1_local() {
    // integral of |w| = 4 max(|x1|,|x2|) restricted to its triangles
    // 3-point edge-midpoint rule per triangle, exact for affine integrands
    double s = 0.0;
    const Vec2 apex{0, 0};
    const Vec2 corners[5] = {{0.5, -0.5}, {0.5, 0.5}, {-0.5, 0.5}, {-0.5, -0.5}, {0.5, -0.5}};
    auto absw = [](Vec2 p) {
        Vec2 v = eval_w(p);
        return std::abs(v.x) + std::abs(v.y);  // one component is always 0
    };
    for (int t = 0; t < 4; ++t) {
        Vec2 a = corners[t], b = corners[t + 1];
        Vec2 m0{0.5 * (apex.x + a.x), 0.5 * (apex.y + a.y)};
        Vec2 m1{0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
        Vec2 m2{0.5 * (b.x + apex.x), 0.5 * (b.y + apex.y)};
        s += 0.25 / 3.0 * (absw(m0) + absw(m1) + absw(m2));
    }
    return s;
}

/// Enumerates filled-cell centers (lattice units) of the scale-m layout whose
/// cells lie inside the region; throws if the region cuts a cell.
std::vector<std::pair<std::int64_t, std::int64_t>> filled_cells(int scale, Window region) {
    double lam = std::ldexp(1.0, -scale);
    double x0 = region.x0.to_double(), y0 = region.y0.to_double(), side = region.side.to_double();
    std::vector<std::pair<std::int64_t, std::int64_t>> cells;
    auto lo_a = std::int64_t(std::floor(x0 / lam)) - 1;
    auto hi_a = std::int64_t(std::ceil((x0 + side) / lam)) + 1;
    auto lo_b = std::int64_t(std::floor(y0 / lam)) - 1;
    auto hi_b = std::int64_t(std::ceil((y0 + side) / lam)) + 1;
    for (std::int64_t b = lo_b; b <= hi_b; ++b)
        for (std::int64_t a = lo_a; a <= hi_a; ++a) {
            if (((a + b) & 1) != 0) continue;
            double cx = double(a) * lam, cy = double(b) * lam;
            bool inside = cx - 0.5 * lam >= x0 - 1e-12 && cx + 0.5 * lam <= x0 + side + 1e-12 &&
                          cy - 0.5 * lam >= y0 - 1e-12 && cy + 0.5 * lam <= y0 + side + 1e-12;
            bool outside = cx + 0.5 * lam <= x0 + 1e-12 || cx - 0.5 * lam >= x0 + side - 1e-12 ||
                           cy + 0.5 * lam <= y0 + 1e-12 || cy - 0.5 * lam >= y0 + side - 1e-12;
            if (inside)
                cells.emplace_back(a, b);
            else if (!outside)
                throw std::invalid_argument("region boundary cuts a vortex cell");
        }
    return cells;
}

}  // namespace

double tv_norm_layout(int scale, Window region) {
    // Per filled cell both parts scale linearly with the side lam = 2^-scale:
    // the a.c. part is 2^scale |Dw| lam^2 and the jump lengths carry one lam.
    static const double unit_cell_tv = cell_tv_local();
    double lam = std::ldexp(1.0, -scale);
    return unit_cell_tv * lam * double(filled_cells(scale, region).size());
}

double l1_norm_layout(int scale, Window region) {
    double lam = std::ldexp(1.0, -scale);
    double per_cell = cell_l1_local() * lam * lam;
    return per_cell * double(filled_cells(scale, region).size());
}

double tv_norm(const GridField& g) {
    if (g.comps != 1) throw std::invalid_argument("grid TV needs a scalar field");
    const GridDesc& d = g.desc;
    std::vector<double> rows(size_t(d.ny), 0.0);
    for (std::int64_t j = 0; j < d.ny; ++j) {
        double s = 0.0;
        for (std::int64_t i = 0; i + 1 < d.nx; ++i) s += std::abs(g.at(i + 1, j) - g.at(i, j));
        if (j + 1 < d.ny)
            for (std::int64_t i = 0; i < d.nx; ++i) s += std::abs(g.at(i, j + 1) - g.at(i, j));
        rows[size_t(j)] = s;
    }
    return pairwise_sum(rows) * d.h;
}

GagliardoResult gagliardoseminorm_impl(const std::function<Vec2(double, Vec2)>& f,
                                       const GagliardoOptions& opt) {
    if (!(opt.s > 0.0 && opt.s < 1.0)) throw std::invalid_argument("s must be in (0,1)");
    const double tlen = opt.t_hi - opt.t_lo;
    const double blen = 2.0 * opt.box_half;
    const double vol = tlen * blen * blen;
    const double rmax = std::sqrt(tlen * tlen + 2.0 * blen * blen);
    const int shells = opt.shells;
    const std::uint64_t per_shell = std::max<std::uint64_t>(1, opt.pairs / std::uint64_t(shells));
    CounterRng rng{opt.seed};

    GagliardoResult res;
    res.shell_contrib.assign(size_t(shells), 0.0);
    std::vector<double> shell_var(size_t(shells), 0.0);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
    for (int k = 0; k < shells; ++k) {
        double r1 = rmax * std::ldexp(1.0, -k);
        double r0 = 0.5 * r1;
        double shell_vol = 4.0 * M_PI / 3.0 * (r1 * r1 * r1 - r0 * r0 * r0);
        double sum = 0.0, sum2 = 0.0;
        for (std::uint64_t i = 0; i < per_shell; ++i) {
            std::uint64_t base = (std::uint64_t(k) * per_shell + i) * 8;
            double t = opt.t_lo + tlen * rng.uniform(base);
            double x = -opt.box_half + blen * rng.uniform(base + 1);
            double y = -opt.box_half + blen * rng.uniform(base + 2);
            double ct = 2.0 * rng.uniform(base + 3) - 1.0;  // cos polar angle
            double ph = 2.0 * M_PI * rng.uniform(base + 4);
            double u = rng.uniform(base + 5);
            double r = std::cbrt(r0 * r0 * r0 + u * (r1 * r1 * r1 - r0 * r0 * r0));
            double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
            double dt = r * ct, dxx = r * st * std::cos(ph), dyy = r * st * std::sin(ph);
            double t2 = t + dt, x2 = x + dxx, y2 = y + dyy;
            if (t2 < opt.t_lo || t2 > opt.t_hi || std::abs(x2) > opt.box_half ||
                std::abs(y2) > opt.box_half)
                continue;
            Vec2 fa = f(t, {x, y});
            Vec2 fb = f(t2, {x2, y2});
            double diff = std::hypot(fa.x - fb.x, fa.y - fb.y);
            if (diff == 0.0) continue;
            double g = diff / std::pow(r, 3.0 + opt.s);
            sum += g;
            sum2 += g * g;
        }
        double mean = sum / double(per_shell);
        double mean2 = sum2 / double(per_shell);
        double variance = std::max(0.0, mean2 - mean * mean) / double(per_shell);
        double factor = vol * shell_vol;
        res.shell_contrib[size_t(k)] = mean * factor;
        shell_var[size_t(k)] = variance * factor * factor;
    }

    res.estimate = pairwise_sum(res.shell_contrib);
    res.stderr_ = std::sqrt(pairwise_sum(shell_var));
    // geometric-tail bound for the truncated shells
    double last = res.shell_contrib[size_t(shells - 1)];
    double prev = res.shell_contrib[size_t(shells - 2)];
    double q = prev > 0 ? std::min(0.9, last / prev) : 0.5;
    res.tail_bound = last * q / (1.0 - q);
    return res;
}

GagliardoResult gagliardo_seminorm(const std::function<Vec2(double, Vec2)>& f,
                                   const GagliardoOptions& opt) {
    return gagliardoseminorm_impl(f, opt);
}

double interpolation_exponent(double s, double sigma) {
    if (!(s > 0.0 && s < sigma && sigma < 1.0))
        throw std::invalid_argument("need 0 < s < sigma < 1");
    return sigma / s;
}

std::vector<TestFunction> pairing_bumps() {
    return {
        TestFunction({0.0, 0.9}, {0.0, 0.9}),
        TestFunction({0.3, 0.5}, {-0.2, 0.6}, 1.5),
        TestFunction({-0.4, 0.45}, {0.35, 0.5}),
        TestFunction({0.15, 0.7}, {0.45, 0.4}, 0.75),
        TestFunction({-0.2, 0.55}, {-0.3, 0.65}, 1.25),
    };
}

std::vector<TestFunction> residual_bumps() {
    return {
        TestFunction({1.0, 1.25}, {0.0, 0.9}, {0.0, 0.9}),          // covers t=0 and t=2
        TestFunction({0.9, 1.0}, {0.3, 0.5}, {-0.2, 0.6}, 1.5),     // covers t=0, ends before 2
        TestFunction({1.2, 1.1}, {-0.4, 0.45}, {0.35, 0.5}),        // interior, past t=2
        TestFunction({1.0, 1.4}, {0.15, 0.7}, {0.45, 0.4}, 0.75),   // wide
        TestFunction({1.1, 0.8}, {-0.2, 0.55}, {-0.3, 0.65}, 1.25), // interior
    };
}

double fit_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("bad fit input");
    double n = double(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace tnl
