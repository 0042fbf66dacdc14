#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "tnl/core.hpp"

namespace tnl {

/// Axis-aligned square region [x0, x0+side) x [y0, y0+side) with dyadic corners.
struct Window {
    Dyadic x0, y0, side;

    /// Q_N = [-N, N]^2 as a half-open window.
    static Window centered(Dyadic half_side) {
        return {-half_side, -half_side, half_side + half_side};
    }
    static Window centered(int n) { return centered(Dyadic::from_int(n)); }

    bool contains(double px, double py) const {
        double x = x0.to_double(), y = y0.to_double(), s = side.to_double();
        return px >= x && px < x + s && py >= y && py < y + s;
    }
};

/// One square of the subdivision S^parity_level: side 2^-level, lower-left
/// corner at offset + 2^-level * (kx, ky), where the parity-2 lattice is
/// offset by (2^-level-1, 2^-level-1).
struct DyadicSquare {
    int level = 0;
    int parity = 1;  // 1 or 2
    std::int64_t kx = 0;
    std::int64_t ky = 0;

    Dyadic offset() const { return parity == 2 ? Dyadic::pow2(level + 1) : Dyadic(); }
    Dyadic corner_x() const { return offset() + Dyadic(kx, 0) * Dyadic::pow2(level); }
    Dyadic corner_y() const { return offset() + Dyadic(ky, 0) * Dyadic::pow2(level); }
    Dyadic side() const { return Dyadic::pow2(level); }
    Dyadic center_x() const { return corner_x() + Dyadic::pow2(level + 1); }
    Dyadic center_y() const { return corner_y() + Dyadic::pow2(level + 1); }

    bool operator==(const DyadicSquare&) const = default;
};

/// Locates the unique square of S^parity_level whose half-open extent
/// [corner, corner+side)^2 contains the point. Points on cell boundaries
/// resolve deterministically by the half-open rule.
DyadicSquare cell_of(Vec2 point, int level, int parity);

/// Piecewise-constant density on the parity-1 lattice at one time. Values are
/// exact dyadic rationals sharing one denominator 2^val_exp, so averages of
/// {0,1} data stay exactly representable.
class CellField {
  public:
    CellField() = default;
    CellField(int level, Window window);

    int level() const { return level_; }
    const Window& window() const { return window_; }
    std::int64_t cells_x() const { return nx_; }
    std::int64_t cells_y() const { return ny_; }
    std::int64_t origin_kx() const { return k0_; }
    std::int64_t origin_ky() const { return l0_; }
    int value_exp() const { return val_exp_; }
    void set_value_exp(int e) { val_exp_ = e; }

    std::vector<std::int64_t>& numerators() { return num_; }
    const std::vector<std::int64_t>& numerators() const { return num_; }

    /// Numerator of the cell with absolute lattice index (kx, ky).
    std::int64_t& at(std::int64_t kx, std::int64_t ky) {
        return num_[size_t(ky - l0_) * size_t(nx_) + size_t(kx - k0_)];
    }
    std::int64_t at(std::int64_t kx, std::int64_t ky) const {
        return num_[size_t(ky - l0_) * size_t(nx_) + size_t(kx - k0_)];
    }

    Dyadic value(std::int64_t kx, std::int64_t ky) const {
        return Dyadic(at(kx, ky), val_exp_);
    }

    bool contains_index(std::int64_t kx, std::int64_t ky) const {
        return kx >= k0_ && kx < k0_ + nx_ && ky >= l0_ && ky < l0_ + ny_;
    }

    /// Half-open point lookup; the point must lie inside the window.
    double value_at(Vec2 p) const;
    Dyadic value_at_exact(Vec2 p) const;

    /// Restriction to a sub-window (must be aligned to this field's level).
    CellField restricted(Window sub) const;

    /// Divides out the largest common power of two so val_exp is minimal.
    void normalize();

    /// Exact equality of level, window, and cell values (as rationals).
    bool equals(const CellField& other) const;

    double min_value() const;
    double max_value() const;

  private:
    int level_ = 0;
    Window window_{};
    std::int64_t k0_ = 0, l0_ = 0;  // lattice index of the window corner
    std::int64_t nx_ = 0, ny_ = 0;
    int val_exp_ = 0;
    std::vector<std::int64_t> num_;
};

/// The rescaled chessboard rho_in(2^level x): cell (k,l) carries (k+l) mod 2,
/// vanishing when k+l is even. `rep_level >= level` selects the resolution of
/// the representation (each pattern cell spans 4^(rep_level-level) fine cells).
CellField checkerboard(int level, Window window, int rep_level = -1);

/// Pointwise chessboard evaluation rho_in(2^level x) at a point off the edge set.
int checkerboard_value(Vec2 p, int level = 0);

/// Zeroes every cell whose extent lies outside [-n, n]^2 (cells are never
/// split: the mask boundary must align with cell edges).
CellField zero_outside(const CellField& field, int n);

/// Exact arithmetic mean over 4^(field.level - target_level) fine cells per
/// coarse cell. The window must be aligned to the target level.
CellField cell_averages(const CellField& field, int target_level);

}  // namespace tnl
