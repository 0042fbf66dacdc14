#pragma once

#include <cstdint>
#include <vector>

#include "tnl/core.hpp"
#include "tnl/dyadic.hpp"

namespace tnl {

/// Uniform cell-centered grid: sample (i,j) sits at
/// (x0 + (i+1/2) h, y0 + (j+1/2) h). Spacing is a power of two so that grid
/// cells nest exactly inside dyadic windows.
struct GridDesc {
    double x0 = 0.0;
    double y0 = 0.0;
    double h = 1.0;
    std::int64_t nx = 0;
    std::int64_t ny = 0;

    static GridDesc cover(Window window, Dyadic spacing);

    double cx(std::int64_t i) const { return x0 + (double(i) + 0.5) * h; }
    double cy(std::int64_t j) const { return y0 + (double(j) + 0.5) * h; }

    bool operator==(const GridDesc&) const = default;
};

/// Dense scalar or vector samples on a GridDesc.
struct GridField {
    GridDesc desc;
    int comps = 1;
    std::vector<double> data;  // j slow, i fast, component fastest

    GridField() = default;
    GridField(GridDesc d, int c) : desc(d), comps(c) {
        data.assign(size_t(d.nx) * size_t(d.ny) * size_t(c), 0.0);
    }

    double& at(std::int64_t i, std::int64_t j, int c = 0) {
        return data[(size_t(j) * size_t(desc.nx) + size_t(i)) * size_t(comps) + size_t(c)];
    }
    double at(std::int64_t i, std::int64_t j, int c = 0) const {
        return data[(size_t(j) * size_t(desc.nx) + size_t(i)) * size_t(comps) + size_t(c)];
    }

    /// Bilinear interpolation between sample points; samples outside the grid
    /// count as 0 (the fields and densities here are compactly supported).
    double sample(Vec2 p, int c = 0) const;
    Vec2 sample_vec(Vec2 p) const;

    double min_value() const;
    double max_value() const;
    /// h^2-weighted sum (the window integral), deterministic reduction.
    double integral(int c = 0) const;
};

}  // namespace tnl
