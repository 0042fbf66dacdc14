#include "tnl/advect.hpp"

#include <algorithm>
#include <cmath>

namespace tnl {

namespace detail {

void solve_step(const GridField& prev, GridField& next, const std::vector<Vec2>& feet) {
    const GridDesc& d = prev.desc;
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::int64_t j = 0; j < d.ny; ++j)
        for (std::int64_t i = 0; i < d.nx; ++i)
            next.at(i, j) = prev.sample(feet[size_t(j) * size_t(d.nx) + size_t(i)]);
}

CheckpointDiag snapshot_diag(double t, const GridField& g) {
    return {t, g.min_value(), g.max_value(), g.integral()};
}

void enforce_range(const GridField& g, double lo, double hi) {
    // Bilinear updates are convex combinations (with 0 admitted for exterior
    // samples), so the discrete range can never grow.
    double lo_eff = std::min(lo, 0.0), hi_eff = std::max(hi, 0.0);
    if (g.min_value() < lo_eff - 1e-12 || g.max_value() > hi_eff + 1e-12)
        throw std::logic_error("discrete max principle violated");
}

}  // namespace detail

namespace {

struct IndexBox {
    std::int64_t i0, i1, j0, j1;  // half-open
};

IndexBox window_box(const GridDesc& d, Window w) {
    double x0 = w.x0.to_double(), y0 = w.y0.to_double(), side = w.side.to_double();
    auto clamp = [](std::int64_t v, std::int64_t lo, std::int64_t hi) {
        return std::max(lo, std::min(v, hi));
    };
    IndexBox b;
    b.i0 = clamp(std::int64_t(std::llround((x0 - d.x0) / d.h)), 0, d.nx);
    b.i1 = clamp(std::int64_t(std::llround((x0 + side - d.x0) / d.h)), 0, d.nx);
    b.j0 = clamp(std::int64_t(std::llround((y0 - d.y0) / d.h)), 0, d.ny);
    b.j1 = clamp(std::int64_t(std::llround((y0 + side - d.y0) / d.h)), 0, d.ny);
    if (b.i0 >= b.i1 || b.j0 >= b.j1)
        throw std::invalid_argument("window does not meet the grid");
    return b;
}

}  // namespace

double l1_distance(const GridField& a, const GridField& b, Window window) {
    if (!(a.desc == b.desc)) throw std::invalid_argument("grids do not coincide");
    IndexBox box = window_box(a.desc, window);
    std::vector<double> rows(size_t(box.j1 - box.j0), 0.0);
    for (std::int64_t j = box.j0; j < box.j1; ++j) {
        double s = 0.0;
        for (std::int64_t i = box.i0; i < box.i1; ++i) s += std::abs(a.at(i, j) - b.at(i, j));
        rows[size_t(j - box.j0)] = s;
    }
    return pairwise_sum(rows) * a.desc.h * a.desc.h;
}

double l1_distance(const GridField& a, const CellField& b, Window window) {
    IndexBox box = window_box(a.desc, window);
    std::vector<double> rows(size_t(box.j1 - box.j0), 0.0);
    for (std::int64_t j = box.j0; j < box.j1; ++j) {
        double s = 0.0;
        for (std::int64_t i = box.i0; i < box.i1; ++i)
            s += std::abs(a.at(i, j) - b.value_at({a.desc.cx(i), a.desc.cy(j)}));
        rows[size_t(j - box.j0)] = s;
    }
    return pairwise_sum(rows) * a.desc.h * a.desc.h;
}

Dyadic l1_distance_exact(const CellField& a, const CellField& b, Window window) {
    const int level = std::max(a.level(), b.level());
    // iterate the window at the common refinement level
    CellField probe(level, window);  // used only for index ranges
    const int sa = level - a.level(), sb = level - b.level();
    auto check = [&](const CellField& f, int sh) {
        if (!f.contains_index(probe.origin_kx() >> sh, probe.origin_ky() >> sh) ||
            !f.contains_index((probe.origin_kx() + probe.cells_x() - 1) >> sh,
                              (probe.origin_ky() + probe.cells_y() - 1) >> sh))
            throw std::invalid_argument("window exceeds a cell field");
    };
    check(a, sa);
    check(b, sb);
    const int e = std::max(a.value_exp(), b.value_exp());
    std::int64_t total = 0;
    for (std::int64_t l = probe.origin_ky(); l < probe.origin_ky() + probe.cells_y(); ++l)
        for (std::int64_t k = probe.origin_kx(); k < probe.origin_kx() + probe.cells_x(); ++k) {
            std::int64_t va = a.at(k >> sa, l >> sa) << (e - a.value_exp());
            std::int64_t vb = b.at(k >> sb, l >> sb) << (e - b.value_exp());
            total += std::abs(va - vb);
        }
    return Dyadic(total, e + 2 * level);
}

double l1_distance(const CellField& a, const CellField& b, Window window) {
    return l1_distance_exact(a, b, window).to_double();
}

}  // namespace tnl
