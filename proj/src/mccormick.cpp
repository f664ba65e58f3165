#include "smid/mccormick.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "smid/errors.hpp"

namespace smid::mccormick {

Box::Box(double lo, double hi) : lo_(lo), hi_(hi) {
    if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi)) throw ConfigError("box needs finite lo <= hi");
}

EnvelopeConstraints envelope(const Box& x_box, const Box& y_box) {
    const double xl = x_box.lo(), xu = x_box.hi();
    const double yl = y_box.lo(), yu = y_box.hi();
    // Each row is rearranged to  w - a*x - b*y  (sense)  -c.
    return {{
        {1.0, -yl, -xl, Side::Under, -xl * yl},
        {1.0, -yu, -xu, Side::Under, -xu * yu},
        {1.0, -yl, -xu, Side::Over, -xu * yl},
        {1.0, -yu, -xl, Side::Over, -xl * yu},
    }};
}

EnvelopeConstraints m_term_bounds(const Box& theta_box, double delta_eps) {
    if (!(delta_eps >= 0.0)) throw ConfigError("noise bound must be nonnegative");
    return envelope(theta_box, Box(-delta_eps, delta_eps));
}

WRange admitted_w(const EnvelopeConstraints& env, double x, double y) noexcept {
    WRange r{-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    for (const auto& ineq : env) {
        const double b = ineq.w_bound(x, y);
        if (ineq.side == Side::Under) r.lo = std::max(r.lo, b);
        else r.hi = std::min(r.hi, b);
    }
    return r;
}

}  // namespace smid::mccormick
