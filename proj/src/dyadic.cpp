#include "tnl/dyadic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tnl {

namespace {

std::int64_t floor_div_pow2(std::int64_t a, int e) {
    return a >> e;  // arithmetic shift: floor division for two's complement
}

/// Lattice index of the window corner at the given level; throws if the
/// corner is not aligned.
std::int64_t aligned_index(Dyadic coord, int level) {
    if (coord.exp > level)
        throw std::invalid_argument("window corner not aligned to level " + std::to_string(level));
    return coord.num << (level - coord.exp);
}

std::int64_t aligned_count(Dyadic side, int level) {
    std::int64_t n = aligned_index(side, level);
    if (n <= 0) throw std::invalid_argument("window side must be positive");
    return n;
}

}  // namespace

DyadicSquare cell_of(Vec2 point, int level, int parity) {
    if (parity != 1 && parity != 2) throw std::invalid_argument("parity must be 1 or 2");
    double off = parity == 2 ? std::ldexp(1.0, -level - 1) : 0.0;
    double scale = std::ldexp(1.0, level);
    DyadicSquare s;
    s.level = level;
    s.parity = parity;
    s.kx = std::int64_t(std::floor((point.x - off) * scale));
    s.ky = std::int64_t(std::floor((point.y - off) * scale));
    return s;
}

CellField::CellField(int level, Window window) : level_(level), window_(window) {
    k0_ = aligned_index(window.x0, level);
    l0_ = aligned_index(window.y0, level);
    nx_ = aligned_count(window.side, level);
    ny_ = nx_;
    num_.assign(size_t(nx_) * size_t(ny_), 0);
}

double CellField::value_at(Vec2 p) const {
    return value_at_exact(p).to_double();
}

Dyadic CellField::value_at_exact(Vec2 p) const {
    double scale = std::ldexp(1.0, level_);
    auto kx = std::int64_t(std::floor(p.x * scale));
    auto ky = std::int64_t(std::floor(p.y * scale));
    if (!contains_index(kx, ky)) throw std::out_of_range("point outside cell field window");
    return value(kx, ky);
}

CellField CellField::restricted(Window sub) const {
    CellField out(level_, sub);
    if (out.k0_ < k0_ || out.l0_ < l0_ || out.k0_ + out.nx_ > k0_ + nx_ ||
        out.l0_ + out.ny_ > l0_ + ny_)
        throw std::invalid_argument("restriction window exceeds field window");
    out.val_exp_ = val_exp_;
    for (std::int64_t l = out.l0_; l < out.l0_ + out.ny_; ++l)
        for (std::int64_t k = out.k0_; k < out.k0_ + out.nx_; ++k)
            out.at(k, l) = at(k, l);
    return out;
}

void CellField::normalize() {
    int shift = val_exp_;
    for (std::int64_t v : num_) {
        if (v == 0) continue;
        int tz = 0;
        while (tz < shift && ((v >> tz) & 1) == 0) ++tz;
        shift = std::min(shift, tz);
        if (shift == 0) break;
    }
    if (shift == 0) return;
    bool any = false;
    for (std::int64_t v : num_)
        if (v != 0) { any = true; break; }
    if (!any) { val_exp_ = 0; return; }
    for (auto& v : num_) v >>= shift;
    val_exp_ -= shift;
}

bool CellField::equals(const CellField& other) const {
    if (level_ != other.level_ || k0_ != other.k0_ || l0_ != other.l0_ || nx_ != other.nx_ ||
        ny_ != other.ny_)
        return false;
    int e = std::max(val_exp_, other.val_exp_);
    for (size_t i = 0; i < num_.size(); ++i)
        if ((num_[i] << (e - val_exp_)) != (other.num_[i] << (e - other.val_exp_))) return false;
    return true;
}

double CellField::min_value() const {
    std::int64_t m = num_.empty() ? 0 : *std::min_element(num_.begin(), num_.end());
    return std::ldexp(double(m), -val_exp_);
}

double CellField::max_value() const {
    std::int64_t m = num_.empty() ? 0 : *std::max_element(num_.begin(), num_.end());
    return std::ldexp(double(m), -val_exp_);
}

CellField checkerboard(int level, Window window, int rep_level) {
    if (rep_level < 0) rep_level = level;
    if (rep_level < level)
        throw std::invalid_argument("representation level must be >= pattern level");
    CellField out(rep_level, window);
    const int shift = rep_level - level;
    for (std::int64_t l = out.origin_ky(); l < out.origin_ky() + out.cells_y(); ++l) {
        std::int64_t pl = floor_div_pow2(l, shift);
        for (std::int64_t k = out.origin_kx(); k < out.origin_kx() + out.cells_x(); ++k) {
            std::int64_t pk = floor_div_pow2(k, shift);
            out.at(k, l) = ((pk + pl) & 1);
        }
    }
    return out;
}

int checkerboard_value(Vec2 p, int level) {
    double scale = std::ldexp(1.0, level);
    auto kx = std::int64_t(std::floor(p.x * scale));
    auto ky = std::int64_t(std::floor(p.y * scale));
    return int((kx + ky) & 1);
}

CellField zero_outside(const CellField& field, int n) {
    // Mask boundary at +-n: integers align with every level >= 0.
    std::int64_t lo = -(std::int64_t(n) << field.level());
    std::int64_t hi = (std::int64_t(n) << field.level());
    CellField out = field;
    for (std::int64_t l = out.origin_ky(); l < out.origin_ky() + out.cells_y(); ++l)
        for (std::int64_t k = out.origin_kx(); k < out.origin_kx() + out.cells_x(); ++k)
            if (k < lo || k >= hi || l < lo || l >= hi) out.at(k, l) = 0;
    return out;
}

CellField cell_averages(const CellField& field, int target_level) {
    if (target_level > field.level())
        throw std::invalid_argument("target level must be <= field level");
    const int shift = field.level() - target_level;
    CellField out(target_level, field.window());
    out.set_value_exp(field.value_exp() + 2 * shift);
    for (std::int64_t l = out.origin_ky(); l < out.origin_ky() + out.cells_y(); ++l)
        for (std::int64_t k = out.origin_kx(); k < out.origin_kx() + out.cells_x(); ++k) {
            std::int64_t sum = 0;
            for (std::int64_t fl = l << shift; fl < (l + 1) << shift; ++fl)
                for (std::int64_t fk = k << shift; fk < (k + 1) << shift; ++fk)
                    sum += field.at(fk, fl);
            out.at(k, l) = sum;
        }
    out.normalize();
    return out;
}

}  // namespace tnl
