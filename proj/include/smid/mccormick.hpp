#pragma once

// McCormick envelopes of a bilinear term w = x * y over a box.

#include <array>

namespace smid::mccormick {

struct Box {
    Box(double lo, double hi);

    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }
    double width() const noexcept { return hi_ - lo_; }
    bool contains(double v) const noexcept { return lo_ <= v && v <= hi_; }
    bool contains(const Box& other) const noexcept { return lo_ <= other.lo_ && other.hi_ <= hi_; }

private:
    double lo_;
    double hi_;
};

/// Under-estimators read w >= ..., over-estimators w <= ...
enum class Side { Under, Over };

/// coeff_w * w + coeff_x * x + coeff_y * y  (>= for Under, <= for Over)  rhs
struct Inequality {
    double coeff_w = 1.0;
    double coeff_x = 0.0;
    double coeff_y = 0.0;
    Side side = Side::Under;
    double rhs = 0.0;

    double lhs(double w, double x, double y) const noexcept { return coeff_w * w + coeff_x * x + coeff_y * y; }
    /// Nonnegative when satisfied.
    double slack(double w, double x, double y) const noexcept {
        return side == Side::Under ? lhs(w, x, y) - rhs : rhs - lhs(w, x, y);
    }
    bool satisfied(double w, double x, double y, double tol = 0.0) const noexcept { return slack(w, x, y) >= -tol; }
    /// The bound this inequality puts on w at fixed (x, y); coeff_w is always 1.
    double w_bound(double x, double y) const noexcept { return rhs - coeff_x * x - coeff_y * y; }
};

/// Ordered: [0] w >= xL y + x yL - xL yL,  [1] w >= xU y + x yU - xU yU,
///          [2] w <= xU y + x yL - xU yL,  [3] w <= x yU + xL y - xL yU.
using EnvelopeConstraints = std::array<Inequality, 4>;

EnvelopeConstraints envelope(const Box& x_box, const Box& y_box);

/// Envelope of M = theta * eps with eps in [-delta_eps, delta_eps].
EnvelopeConstraints m_term_bounds(const Box& theta_box, double delta_eps);

struct WRange {
    double lo;
    double hi;
};

/// Interval of w admitted by the envelope at a fixed (x, y).
WRange admitted_w(const EnvelopeConstraints& env, double x, double y) noexcept;

}  // namespace smid::mccormick
