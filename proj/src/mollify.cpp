#include "tnl/mollify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tnl {

namespace kernel {

double bump(double z) {
    double s = 1.0 - z * z;
    if (s <= 0.0) return 0.0;
    return std::exp(-1.0 / s);
}

namespace {

// 16-point Gauss-Legendre nodes/weights on [0, 1]
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

double integrate_gl(double a, double b, auto&& f) {
    double s = 0.0;
    for (int k = 0; k < kGL; ++k) s += kGLWeight[k] * f(a + (b - a) * kGLNode[k]);
    return s * (b - a);
}

double integrate_subdivided(double a, double b, int pieces, auto&& f) {
    double s = 0.0;
    for (int p = 0; p < pieces; ++p)
        s += integrate_gl(a + (b - a) * p / pieces, a + (b - a) * (p + 1) / pieces, f);
    return s;
}

}  // namespace

double norm_1d() {
    static const double z = integrate_subdivided(-1.0, 1.0, 32, [](double t) { return bump(t); });
    return z;
}

double norm_2d() {
    // 2 pi int_0^1 r bump(r) dr
    static const double z = 2.0 * M_PI * integrate_subdivided(0.0, 1.0, 32, [](double r) {
        return r * bump(r);
    });
    return z;
}

double mass_1d(double a, double b) {
    a = std::max(a, -1.0);
    b = std::min(b, 1.0);
    if (a >= b) return 0.0;
    return integrate_subdivided(a, b, 8, [](double t) { return bump(t); }) / norm_1d();
}

}  // namespace kernel

Stencil2D Stencil2D::make(double eps, int subdivisions, int order) {
    if (order != 8) throw std::invalid_argument("stencil supports order 8 only");
    // 8-point Gauss-Legendre on [0,1]
    static const double node[8] = {0.019855071751231856, 0.10166676129318664, 0.2372337950418355,
                                   0.40828267875217505,  0.5917173212478251,  0.7627662049581645,
                                   0.8983332387068134,   0.9801449282487682};
    static const double weight[8] = {0.05061426814518813, 0.11119051722668724, 0.15685332293894366,
                                     0.18134189168918097, 0.18134189168918097, 0.15685332293894366,
                                     0.11119051722668724, 0.05061426814518813};
    Stencil2D st;
    const int per_axis = subdivisions * 8;
    std::vector<double> pos(size_t(per_axis), 0.0);
    std::vector<double> wt(size_t(per_axis), 0.0);
    for (int p = 0; p < subdivisions; ++p)
        for (int k = 0; k < 8; ++k) {
            double lo = -eps + 2.0 * eps * p / subdivisions;
            double len = 2.0 * eps / subdivisions;
            pos[size_t(p * 8 + k)] = lo + len * node[k];
            wt[size_t(p * 8 + k)] = len * weight[k];
        }
    double mass = 0.0;
    for (int iy = 0; iy < per_axis; ++iy)
        for (int ix = 0; ix < per_axis; ++ix) {
            double r = std::hypot(pos[size_t(ix)], pos[size_t(iy)]) / eps;
            double w = wt[size_t(ix)] * wt[size_t(iy)] * kernel::bump(r);
            if (w == 0.0) continue;
            st.dx.push_back(pos[size_t(ix)]);
            st.dy.push_back(pos[size_t(iy)]);
            st.w.push_back(w);
            mass += w;
        }
    for (auto& w : st.w) w /= mass;  // discrete probability measure
    return st;
}

namespace {

/// Distance from x to the jump set of the scale-n lattice field (cell edges
/// on odd multiples of 2^-n-1 and cell diagonals), conservatively including
/// empty cells.
double kink_distance(Vec2 x, int scale) {
    double s = std::ldexp(1.0, scale);
    double zx = x.x * s, zy = x.y * s;
    double cx = std::nearbyint(zx), cy = std::nearbyint(zy);
    double lx = zx - cx, ly = zy - cy;
    double edge = std::min(0.5 - std::abs(lx), 0.5 - std::abs(ly));
    double diag = std::abs(std::abs(lx) - std::abs(ly)) / std::sqrt(2.0);
    return std::min(edge, diag) / s;
}

// 8-point Gauss-Legendre on [0,1] (shared with the stencil construction)
constexpr double kNode8[8] = {0.019855071751231856, 0.10166676129318664, 0.2372337950418355,
                              0.40828267875217505,  0.5917173212478251,  0.7627662049581645,
                              0.8983332387068134,   0.9801449282487682};
constexpr double kWeight8[8] = {0.05061426814518813, 0.11119051722668724, 0.15685332293894366,
                                0.18134189168918097, 0.18134189168918097, 0.15685332293894366,
                                0.11119051722668724, 0.05061426814518813};

/// Cumulative radial moments of the bump: T0(p) = int_0^p s bump(s) ds and
/// T1(p) = int_0^p s^2 bump(s) ds, tabulated with exact-derivative Hermite
/// interpolation (the integrands are known in closed form).
struct RadialTables {
    static constexpr int kN = 4096;
    double t0[kN + 1], t1[kN + 1];

    RadialTables() {
        t0[0] = t1[0] = 0.0;
        for (int k = 1; k <= kN; ++k) {
            double a = double(k - 1) / kN, b = double(k) / kN;
            double s0 = 0.0, s1 = 0.0;
            for (int q = 0; q < 8; ++q) {
                double s = a + (b - a) * kNode8[q];
                double w = (b - a) * kWeight8[q] * kernel::bump(s);
                s0 += w * s;
                s1 += w * s * s;
            }
            t0[k] = t0[k - 1] + s0;
            t1[k] = t1[k - 1] + s1;
        }
    }

    static double hermite(double p, const double* tab, int deg) {
        double u = p * kN;
        int k = std::min(int(u), kN - 1);
        double f = u - k;
        double a = double(k) / kN, b = double(k + 1) / kN, h = 1.0 / kN;
        auto der = [&](double s) {
            double v = s * kernel::bump(s);
            return deg == 0 ? v : v * s;
        };
        double d0 = der(a), d1 = der(b);
        double y0 = tab[k], y1 = tab[k + 1];
        // cubic Hermite on [a, b]
        double f2 = f * f, f3 = f2 * f;
        return y0 * (2 * f3 - 3 * f2 + 1) + y1 * (-2 * f3 + 3 * f2) +
               h * (d0 * (f3 - 2 * f2 + f) + d1 * (f3 - f2));
    }

    double T0(double p) const { return p >= 1.0 ? t0[kN] : hermite(p, t0, 0); }
    double T1(double p) const { return p >= 1.0 ? t1[kN] : hermite(p, t1, 1); }
    double total0() const { return t0[kN]; }
};

const RadialTables& radial_tables() {
    static const RadialTables tables;
    return tables;
}

/// Signed fan moments of the radial kernel over the triangle (0, p, q):
/// M0 += int psi(|z|) dz, M1 += int z psi(|z|) dz. Parametrized along the
/// chord p -> q (d theta = (p x q)/|z|^2 dt), split at the closest approach
/// and at the kernel radius. Outside the radius the tables saturate and the
/// angle integrals are closed-form; inside, adaptive Gauss-Legendre panels
/// track the 1/|z|^2 peak.
void fan_moments(Vec2 p, Vec2 q, double eps, double& m0, double& m1x, double& m1y) {
    const double cross = p.x * q.y - p.y * q.x;
    if (cross == 0.0) return;
    const RadialTables& tab = radial_tables();
    Vec2 d{q.x - p.x, q.y - p.y};
    const double dlen = std::hypot(d.x, d.y);
    const double dd = d.x * d.x + d.y * d.y;
    const double pd = p.x * d.x + p.y * d.y;
    const double pp = p.x * p.x + p.y * p.y;

    double ts[6] = {0.0, 1.0};
    int nts = 2;
    if (dd > 0) {
        double tstar = -pd / dd;
        if (tstar > 0.0 && tstar < 1.0) ts[nts++] = tstar;
        // |z(t)| = eps crossings: dd t^2 + 2 pd t + pp - eps^2 = 0
        double disc = pd * pd - dd * (pp - eps * eps);
        if (disc > 0) {
            double rt = std::sqrt(disc);
            for (double r : {(-pd - rt) / dd, (-pd + rt) / dd})
                if (r > 0.0 && r < 1.0) ts[nts++] = r;
        }
    }
    std::sort(ts, ts + nts);

    const double e2 = eps * eps, e3 = e2 * eps;
    const double sat0 = e2 * tab.total0();
    const double sat1 = e3 * tab.t1[RadialTables::kN];
    auto zat = [&](double t) { return Vec2{p.x + t * d.x, p.y + t * d.y}; };

    auto panel = [&](double ta, double tb, auto&& self) -> void {
        Vec2 za = zat(ta), zb = zat(tb);
        double ra = za.norm(), rb = zb.norm();
        if (ra < 1e-15 || rb < 1e-15) return;  // chord through the origin
        // |z| is monotone on the panel (we split at the closest approach)
        if ((tb - ta) * dlen > 0.5 * std::min(ra, rb) && (tb - ta) > 1e-12) {
            double tm = 0.5 * (ta + tb);
            self(ta, tm, self);
            self(tm, tb, self);
            return;
        }
        for (int g = 0; g < 8; ++g) {
            double t = ta + (tb - ta) * kNode8[g];
            Vec2 z = zat(t);
            double r2 = z.x * z.x + z.y * z.y;
            double r = std::sqrt(r2);
            double rho = r / eps;
            double w = kWeight8[g] * (tb - ta) * cross / r2;
            m0 += w * e2 * tab.T0(rho);
            double f1 = w * e3 * tab.T1(rho) / r;
            m1x += f1 * z.x;
            m1y += f1 * z.y;
        }
    };

    for (int seg = 0; seg + 1 < nts; ++seg) {
        double ta = ts[seg], tb = ts[seg + 1];
        if (tb - ta < 1e-15) continue;
        Vec2 za = zat(ta), zb = zat(tb);
        double ra = za.norm(), rb = zb.norm();
        if (ra < 1e-15 || rb < 1e-15) continue;
        double rmid = zat(0.5 * (ta + tb)).norm();
        if (rmid >= eps && ra >= eps - 1e-15 && rb >= eps - 1e-15) {
            // fully saturated: closed-form angle integrals
            double ccross = za.x * zb.y - za.y * zb.x;
            double cdot = za.x * zb.x + za.y * zb.y;
            double dtheta = std::atan2(ccross, cdot);
            m0 += sat0 * dtheta;
            m1x += sat1 * (zb.y / rb - za.y / ra);
            m1y += sat1 * (za.x / ra - zb.x / rb);
        } else {
            panel(ta, tb, panel);
        }
    }
}

/// Exact piecewise structure of the convolution: u is linear on the four
/// triangles of each filled cell, so (psi_eps * u)(x) reduces to kernel
/// moments over triangles, evaluated by the fan decomposition above. The
/// radial tables saturate at the kernel radius, so no clipping is needed.
Vec2 convolve_at(Vec2 x, const VortexLayout& layout, double eps) {
    const double lam = std::ldexp(1.0, -layout.scale);  // cell side
    auto lo_a = std::int64_t(std::floor((x.x - eps) / lam - 0.5));
    auto hi_a = std::int64_t(std::ceil((x.x + eps) / lam + 0.5));
    auto lo_b = std::int64_t(std::floor((x.y - eps) / lam - 0.5));
    auto hi_b = std::int64_t(std::ceil((x.y + eps) / lam + 0.5));
    std::int64_t bound = layout.active_n ? (std::int64_t(*layout.active_n) << layout.scale) : -1;

    double sx = 0.0, sy = 0.0;
    const double slope = 4.0 / lam;
    for (std::int64_t b = lo_b; b <= hi_b; ++b)
        for (std::int64_t a = lo_a; a <= hi_a; ++a) {
            if (((a + b) & 1) != 0) continue;
            if (bound >= 0 && (std::abs(a) > bound || std::abs(b) > bound)) continue;
            Vec2 c{double(a) * lam - x.x, double(b) * lam - x.y};  // center in z-coords
            // skip cells whose sup-ball misses the kernel disk
            double reach = 0.5 * lam * std::sqrt(2.0) + eps;
            if (c.x * c.x + c.y * c.y > reach * reach) continue;
            double h = 0.5 * lam;
            Vec2 corner[5] = {{c.x + h, c.y - h},
                              {c.x + h, c.y + h},
                              {c.x - h, c.y + h},
                              {c.x - h, c.y - h},
                              {c.x + h, c.y - h}};
            for (int t = 0; t < 4; ++t) {
                double m0 = 0, m1x = 0, m1y = 0;
                fan_moments(c, corner[t], eps, m0, m1x, m1y);
                fan_moments(corner[t], corner[t + 1], eps, m0, m1x, m1y);
                fan_moments(corner[t + 1], c, eps, m0, m1x, m1y);
                // u on this triangle, in z-coordinates: t even (right/left)
                // gives (0, slope (z1 - c1)); t odd gives (-slope (z2 - c2), 0)
                if ((t & 1) == 0)
                    sy += slope * (m1x - c.x * m0);
                else
                    sx += -slope * (m1y - c.y * m0);
            }
        }
    const double norm = kernel::norm_2d() * eps * eps;
    double scale = double(layout.sign) / norm;
    return {sx * scale, sy * scale};
}

GridField mollify_stage(int scale, std::optional<int> active_n, Window domain, Dyadic grid_h,
                        double eps) {
    GridDesc desc = GridDesc::cover(domain, grid_h);
    GridField out(desc, 2);
    VortexLayout layout{scale, 1, active_n};
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 8)
#endif
    for (std::int64_t j = 0; j < desc.ny; ++j) {
        for (std::int64_t i = 0; i < desc.nx; ++i) {
            Vec2 p{desc.cx(i), desc.cy(j)};
            Vec2 v;
            if (kink_distance(p, scale) > eps) {
                // w is linear on the whole kernel support there and the
                // kernel is symmetric with unit mass: convolution is exact
                v = eval_u(p, layout);
            } else {
                v = convolve_at(p, layout, eps);
            }
            out.at(i, j, 0) = v.x;
            out.at(i, j, 1) = v.y;
        }
    }
    return out;
}

}  // namespace

MollifiedField::MollifiedField(const FieldSpec& spec, int j, Window domain, double t_lo,
                               double t_hi, Dyadic grid_h)
    : spec_(spec), eps_(std::ldexp(1.0, -j)) {
    if (grid_h.to_double() > std::ldexp(1.0, -j - 2))
        throw std::invalid_argument("grid spacing too coarse to resolve the kernel");
    spans_ = stages_overlapping(spec, t_lo - eps_, t_hi + eps_);
    for (const auto& span : spans_) {
        int idx = -1;
        for (size_t k = 0; k < scales_.size(); ++k)
            if (scales_[k] == span.scale) idx = int(k);
        if (idx < 0) {
            scales_.push_back(span.scale);
            grids_.push_back(mollify_stage(span.scale, spec.space_n, domain, grid_h, eps_));
            idx = int(scales_.size()) - 1;
        }
        span_grid_.push_back(idx);
    }
}

MollifiedField::Slice MollifiedField::at_time(double t) const {
    Slice s;
    s.field = this;
    s.count = 0;
    for (size_t k = 0; k < spans_.size(); ++k) {
        const auto& span = spans_[k];
        double b = span.t_begin.to_double(), e = span.t_end.to_double();
        if (t - eps_ >= e || t + eps_ <= b) continue;
        double w = kernel::mass_1d((t - e) / eps_, (t - b) / eps_);
        if (w == 0.0) continue;
        if (s.count >= 6) throw std::logic_error("too many overlapping stages in one kernel window");
        s.grid_index[s.count] = span_grid_[k];
        s.weight[s.count] = double(span.sign) * w;
        ++s.count;
    }
    return s;
}

Vec2 MollifiedField::Slice::operator()(Vec2 x) const {
    Vec2 v{0.0, 0.0};
    for (int k = 0; k < count; ++k) {
        const GridField& g = field->grids_[size_t(grid_index[k])];
        double u = (x.x - g.desc.x0) / g.desc.h - 0.5;
        double w = (x.y - g.desc.y0) / g.desc.h - 0.5;
        double fu = std::floor(u), fw = std::floor(w);
        auto i0 = std::int64_t(fu), j0 = std::int64_t(fw);
        double ax = u - fu, ay = w - fw;
        auto val = [&](std::int64_t i, std::int64_t j, int c) -> double {
            if (i < 0 || i >= g.desc.nx || j < 0 || j >= g.desc.ny) return 0.0;
            return g.at(i, j, c);
        };
        for (int c = 0; c < 2; ++c) {
            double b = (1 - ay) * ((1 - ax) * val(i0, j0, c) + ax * val(i0 + 1, j0, c)) +
                       ay * ((1 - ax) * val(i0, j0 + 1, c) + ax * val(i0 + 1, j0 + 1, c));
            (c == 0 ? v.x : v.y) += weight[k] * b;
        }
    }
    return v;
}

const GridField& MollifiedField::stage_grid(int scale) const {
    for (size_t k = 0; k < scales_.size(); ++k)
        if (scales_[k] == scale) return grids_[k];
    throw std::out_of_range("no grid for stage scale " + std::to_string(scale));
}

MollifiedData::MollifiedData(int data_n, int j)
    : data_n_(data_n), eps_(std::ldexp(1.0, -j)) {}

double MollifiedData::operator()(Vec2 x) const {
    auto raw = [this](Vec2 p) -> double {
        if (std::abs(p.x) > data_n_ || std::abs(p.y) > data_n_) return 0.0;
        return double(checkerboard_value(p));
    };
    double edge = std::min(std::abs(x.x - std::nearbyint(x.x)), std::abs(x.y - std::nearbyint(x.y)));
    double to_mask = std::min(std::abs(data_n_ - std::abs(x.x)), std::abs(data_n_ - std::abs(x.y)));
    if (std::min(edge, to_mask) > eps_) return raw(x);

    // the jump set of the data is axis-aligned (unit grid lines and the Q_N
    // mask): split the kernel box along them and use tensor Gauss-Legendre on
    // each rectangle, where the integrand is smooth
    auto breaks = [&](double lo, double hi) {
        std::vector<double> bs{lo};
        for (double v = std::ceil(lo); v < hi; v += 1.0)
            if (v > lo) bs.push_back(v);
        for (double m : {-double(data_n_), double(data_n_)})
            if (m > lo && m < hi) bs.push_back(m);
        bs.push_back(hi);
        std::sort(bs.begin(), bs.end());
        return bs;
    };
    auto with_panels = [&](const std::vector<double>& bs) {
        // split long pieces so panels stay below eps/2 (composite rules track
        // the kernel's flat support boundary better than higher order)
        std::vector<double> out;
        for (size_t k = 0; k + 1 < bs.size(); ++k) {
            out.push_back(bs[k]);
            double len = bs[k + 1] - bs[k];
            int parts = std::max(1, int(std::ceil(len / (0.5 * eps_))));
            for (int p = 1; p < parts; ++p) out.push_back(bs[k] + len * p / parts);
        }
        out.push_back(bs.back());
        return out;
    };
    std::vector<double> raw_bx = breaks(x.x - eps_, x.x + eps_);
    std::vector<double> raw_by = breaks(x.y - eps_, x.y + eps_);
    std::vector<double> bx = with_panels(raw_bx);
    std::vector<double> by = with_panels(raw_by);
    double total = 0.0, mass = 0.0;
    for (size_t ry = 0; ry + 1 < by.size(); ++ry)
        for (size_t rx = 0; rx + 1 < bx.size(); ++rx) {
            double v = raw({0.5 * (bx[rx] + bx[rx + 1]), 0.5 * (by[ry] + by[ry + 1])});
            double cell = 0.0;
            double wx = bx[rx + 1] - bx[rx], wy = by[ry + 1] - by[ry];
            for (int iu = 0; iu < 8; ++iu)
                for (int iv = 0; iv < 8; ++iv) {
                    double yx = bx[rx] + wx * kNode8[iu];
                    double yy = by[ry] + wy * kNode8[iv];
                    double r = std::hypot(x.x - yx, x.y - yy) / eps_;
                    cell += kWeight8[iu] * kWeight8[iv] * kernel::bump(r);
                }
            mass += cell * wx * wy;
            total += v * cell * wx * wy;
        }
    return mass > 0.0 ? total / mass : 0.0;
}

SampledField mollify_field(const FieldSpec& spec, int j, GridDesc grid,
                           const std::vector<double>& times) {
    if (grid.h > std::ldexp(1.0, -j - 2))
        throw std::invalid_argument("grid spacing too coarse to resolve the kernel");
    if (times.empty()) throw std::invalid_argument("no sample times");
    double t_lo = times.front(), t_hi = times.back();
    for (double t : times) {
        t_lo = std::min(t_lo, t);
        t_hi = std::max(t_hi, t);
    }
    Window domain{dyadic_from_double(grid.x0), dyadic_from_double(grid.y0),
                  dyadic_from_double(double(grid.nx) * grid.h)};
    MollifiedField mf(spec, j, domain, t_lo, t_hi, dyadic_from_double(grid.h));
    SampledField out;
    out.times = times;
    for (double t : times) {
        GridField frame(grid, 2);
        auto slice = mf.at_time(t);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (std::int64_t jj = 0; jj < grid.ny; ++jj)
            for (std::int64_t ii = 0; ii < grid.nx; ++ii) {
                Vec2 v = slice({grid.cx(ii), grid.cy(jj)});
                frame.at(ii, jj, 0) = v.x;
                frame.at(ii, jj, 1) = v.y;
            }
        out.frames.push_back(std::move(frame));
    }
    return out;
}

GridField mollify_data(int data_n, int j, GridDesc grid) {
    if (grid.h > std::ldexp(1.0, -j - 2))
        throw std::invalid_argument("grid spacing too coarse to resolve the kernel");
    MollifiedData md(data_n, j);
    GridField out(grid, 1);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 8)
#endif
    for (std::int64_t jj = 0; jj < grid.ny; ++jj)
        for (std::int64_t ii = 0; ii < grid.nx; ++ii)
            out.at(ii, jj) = md({grid.cx(ii), grid.cy(jj)});
    return out;
}

GridField discrete_divergence(const GridField& vec) {
    if (vec.comps != 2) throw std::invalid_argument("divergence needs a vector field");
    GridDesc d = vec.desc;
    GridDesc inner = d;
    inner.nx = d.nx - 2;
    inner.ny = d.ny - 2;
    inner.x0 = d.x0 + d.h;
    inner.y0 = d.y0 + d.h;
    GridField out(inner, 1);
    for (std::int64_t j = 1; j < d.ny - 1; ++j)
        for (std::int64_t i = 1; i < d.nx - 1; ++i)
            out.at(i - 1, j - 1) = (vec.at(i + 1, j, 0) - vec.at(i - 1, j, 0) +
                                    vec.at(i, j + 1, 1) - vec.at(i, j - 1, 1)) /
                                   (2.0 * d.h);
    return out;
}

}  // namespace tnl
