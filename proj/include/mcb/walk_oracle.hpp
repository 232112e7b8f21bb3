#pragma once

// Brute-force exit point of planar Brownian motion from the quadrant.
// Walk on discs: from x, jump to a uniform point on the largest circle
// centred at x that stays inside the quadrant; stop once a coordinate is
// within `tol` of its axis and project onto that axis. No conformal map is
// involved, so this is independent of harmonic_sample.

#include "mcb/geometry.hpp"
#include "mcb/random.hpp"

#include <cmath>
#include <numbers>

namespace mcb::oracle {

inline BoundaryPoint walk_exit(QuadrantPoint x, double tol, Rng& rng) {
    double a = x.x1;
    double b = x.x2;
    for (;;) {
        const double r = std::min(a, b);
        if (r <= tol) return a <= b ? BoundaryPoint::type2(b) : BoundaryPoint::type1(a);
        const double phi = 2.0 * std::numbers::pi * rng.uniform();
        a += r * std::cos(phi);
        b += r * std::sin(phi);
    }
}

// Absorption tolerance used by the oracle: 1e-3 of the starting distance to
// the nearer axis.
inline double walk_tolerance(const QuadrantPoint& x) { return 1e-3 * std::min(x.x1, x.x2); }

}  // namespace mcb::oracle
