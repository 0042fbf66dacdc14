#include "tnl/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tnl {

GridDesc cover_impl(Window window, Dyadic spacing) {
    GridDesc g;
    g.x0 = window.x0.to_double();
    g.y0 = window.y0.to_double();
    g.h = spacing.to_double();
    // side / spacing must be an integer (both dyadic)
    double n = window.side.to_double() / g.h;
    if (n != std::floor(n) || n <= 0)
        throw std::invalid_argument("grid spacing does not tile the window");
    g.nx = std::int64_t(n);
    g.ny = g.nx;
    return g;
}

GridDesc GridDesc::cover(Window window, Dyadic spacing) { return cover_impl(window, spacing); }

double GridField::sample(Vec2 p, int c) const {
    double u = (p.x - desc.x0) / desc.h - 0.5;
    double v = (p.y - desc.y0) / desc.h - 0.5;
    double fu = std::floor(u), fv = std::floor(v);
    auto i0 = std::int64_t(fu), j0 = std::int64_t(fv);
    double ax = u - fu, ay = v - fv;
    auto val = [&](std::int64_t i, std::int64_t j) -> double {
        if (i < 0 || i >= desc.nx || j < 0 || j >= desc.ny) return 0.0;
        return at(i, j, c);
    };
    double w00 = val(i0, j0), w10 = val(i0 + 1, j0);
    double w01 = val(i0, j0 + 1), w11 = val(i0 + 1, j0 + 1);
    return (1 - ay) * ((1 - ax) * w00 + ax * w10) + ay * ((1 - ax) * w01 + ax * w11);
}

Vec2 GridField::sample_vec(Vec2 p) const {
    return {sample(p, 0), sample(p, 1)};
}

double GridField::min_value() const {
    return data.empty() ? 0.0 : *std::min_element(data.begin(), data.end());
}

double GridField::max_value() const {
    return data.empty() ? 0.0 : *std::max_element(data.begin(), data.end());
}

double GridField::integral(int c) const {
    std::vector<double> rows(size_t(desc.ny), 0.0);
    for (std::int64_t j = 0; j < desc.ny; ++j) {
        double s = 0.0;
        for (std::int64_t i = 0; i < desc.nx; ++i) s += at(i, j, c);
        rows[size_t(j)] = s;
    }
    return pairwise_sum(rows) * desc.h * desc.h;
}

}  // namespace tnl
