#include "tnl/field.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace tnl {

Vec2 eval_w(Vec2 x) {
    double a = std::abs(x.x), b = std::abs(x.y);
    if (a < 0.5 && a > b) return {0.0, 4.0 * x.x};
    if (b < 0.5 && b > a) return {-4.0 * x.y, 0.0};
    return {0.0, 0.0};
}

Vec2 eval_u(Vec2 x, const VortexLayout& layout) {
    double scale = std::ldexp(1.0, layout.scale);
    Vec2 z{x.x * scale, x.y * scale};
    double cx = std::nearbyint(z.x);
    double cy = std::nearbyint(z.y);
    auto a = std::int64_t(cx), b = std::int64_t(cy);
    if (((a + b) & 1) != 0) return {0.0, 0.0};
    if (layout.active_n) {
        std::int64_t bound = std::int64_t(*layout.active_n) << layout.scale;
        if (std::abs(a) > bound || std::abs(b) > bound) return {0.0, 0.0};
    }
    Vec2 w = eval_w({z.x - cx, z.y - cy});
    return {layout.sign * w.x, layout.sign * w.y};
}

StageSpan forward_stage(int n) {
    // (1 - 2^-n, 1 - 2^-n-1)
    StageSpan s;
    s.scale = n;
    s.sign = 1;
    s.t_begin = Dyadic::from_int(1) - Dyadic::pow2(n);
    s.t_end = Dyadic::from_int(1) - Dyadic::pow2(n + 1);
    return s;
}

StageSpan mirrored_stage(int n) {
    StageSpan s;
    s.scale = n;
    s.sign = -1;
    s.t_begin = Dyadic::from_int(1) + Dyadic::pow2(n + 1);
    s.t_end = Dyadic::from_int(1) + Dyadic::pow2(n);
    return s;
}

namespace {

/// Forward-schedule stage index for t in (0,1): the n with
/// 1-2^-n <= t < 1-2^-n-1 under the half-open convention.
int forward_stage_index(double t) {
    double u = 1.0 - t;  // in (0, 1)
    int e = std::ilogb(u);
    int n = -e;
    if (std::ldexp(1.0, e) != u) n -= 1;
    return n;
}

}  // namespace

std::optional<ActiveStage> stage_at(const FieldSpec& spec, double t) {
    if (spec.zeroed_at(t)) return std::nullopt;
    if (t <= 0.0 || t >= 2.0) {
        // extension by zero outside [0,2]; boundary values are measure zero
        return std::nullopt;
    }
    if (t < 1.0) return ActiveStage{forward_stage_index(t), 1};
    if (t == 1.0) return std::nullopt;
    double s = 2.0 - t;  // in (0, 1)
    return ActiveStage{forward_stage_index(s), -1};
}

std::vector<StageSpan> stages_overlapping(const FieldSpec& spec, double t_lo, double t_hi) {
    constexpr int kMaxStage = 50;
    std::vector<StageSpan> out;
    auto push_if = [&](const StageSpan& s) {
        double b = s.t_begin.to_double(), e = s.t_end.to_double();
        if (e <= t_lo || b >= t_hi) return;
        if (spec.zero_covers(s.t_begin, s.t_end)) return;
        if (spec.zero_interval) {
            // only whole-stage truncations appear in the constructible family
            double za = spec.zero_interval->first.to_double();
            double zb = spec.zero_interval->second.to_double();
            if (za < e && zb > b && !(za <= b && e <= zb))
                throw std::invalid_argument("zero interval splits a stage");
        }
        out.push_back(s);
    };
    bool terminated = t_lo >= 1.0;
    for (int n = 0; !terminated && n <= kMaxStage; ++n) {
        StageSpan s = forward_stage(n);
        if (s.t_begin.to_double() >= t_hi) { terminated = true; break; }
        if (spec.zero_covers(s.t_begin, s.t_end) &&
            spec.zero_interval->second >= Dyadic::from_int(1)) {
            terminated = true;  // all finer forward stages are zeroed too
            break;
        }
        push_if(s);
    }
    if (!terminated) throw std::invalid_argument("time range meets the stage accumulation at t=1");
    std::vector<StageSpan> mirrored;
    terminated = t_hi <= 1.0;
    for (int n = 0; !terminated && n <= kMaxStage; ++n) {
        StageSpan s = mirrored_stage(n);
        if (s.t_end.to_double() <= t_lo) { terminated = true; break; }
        if (spec.zero_covers(s.t_begin, s.t_end) &&
            spec.zero_interval->first <= Dyadic::from_int(1)) {
            terminated = true;  // all finer mirrored stages are zeroed too
            break;
        }
        mirrored.push_back(s);
    }
    if (!terminated) throw std::invalid_argument("time range meets the stage accumulation at t=1");
    // mirrored stages run in decreasing-n time order
    for (auto it = mirrored.rbegin(); it != mirrored.rend(); ++it) push_if(*it);
    return out;
}

Vec2 eval_field(const FieldSpec& spec, double t, Vec2 x) {
    auto st = stage_at(spec, t);
    if (!st) return {0.0, 0.0};
    VortexLayout layout{st->scale, st->sign, spec.space_n};
    return eval_u(x, layout);
}

Vec3 eval_lifted(const FieldSpec& spec, Vec3 y) {
    Vec2 b = eval_field(spec, y.x, {y.y, y.z});
    return {1.0, b.x, b.y};
}

FieldSpec truncate_time(const FieldSpec& base, int i, int variant) {
    if (i < 1) throw std::invalid_argument("truncation index must be >= 1");
    if (variant != 1 && variant != 2) throw std::invalid_argument("variant must be 1 or 2");
    if (base.zero_interval) throw std::invalid_argument("spec already time-truncated");
    FieldSpec out = base;
    Dyadic one = Dyadic::from_int(1);
    Dyadic lo = one - Dyadic::pow2(2 * i);
    Dyadic hi = variant == 2 ? one + Dyadic::pow2(2 * i) : one + Dyadic::pow2(2 * i - 2);
    if (hi > Dyadic::from_int(2)) hi = Dyadic::from_int(2);
    out.zero_interval = {lo, hi};
    out.variant = variant;
    out.trunc_i = i;
    return out;
}

FieldSpec truncate_space(const FieldSpec& base, int n) {
    if (n < 1) throw std::invalid_argument("truncation window N must be >= 1");
    FieldSpec out = base;
    out.space_n = n;
    return out;
}

FieldSpec lift_autonomous(const FieldSpec& base) {
    FieldSpec out = base;
    out.lifted = true;
    return out;
}

double theta_in(Vec3 y, std::optional<int> data_n) {
    if (y.x < -1.0 || y.x > 0.0) return 0.0;
    if (data_n) {
        double n = double(*data_n);
        if (std::abs(y.y) > n || std::abs(y.z) > n) return 0.0;
    }
    return double(checkerboard_value({y.y, y.z}));
}

std::string FieldSpec::serialize() const {
    std::ostringstream os;
    os << "variant = " << variant << "\n";
    os << "i = " << trunc_i << "\n";
    os << "space_n = " << (space_n ? *space_n : 0) << "\n";
    os << "lifted = " << (lifted ? 1 : 0) << "\n";
    os << "horizon = 2\n";
    return os.str();
}

FieldSpec FieldSpec::deserialize(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            size_t b = s.find_first_not_of(" \t");
            size_t e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    auto geti = [&](const std::string& key) {
        auto it = kv.find(key);
        if (it == kv.end()) throw std::invalid_argument("missing key: " + key);
        return std::stoi(it->second);
    };
    FieldSpec spec;
    int variant = geti("variant");
    int i = geti("i");
    int n = geti("space_n");
    if (n > 0) spec = truncate_space(spec, n);
    if (variant != 0) spec = truncate_time(spec, i, variant);
    if (geti("lifted") != 0) spec = lift_autonomous(spec);
    return spec;
}

}  // namespace tnl
