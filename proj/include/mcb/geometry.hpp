#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace mcb {

// Plain vector in the plane. Used wherever a difference of states may leave
// the quadrant (duality remainders, displacements).
struct Vec2 {
    double x1 = 0.0;
    double x2 = 0.0;

    Vec2& operator+=(const Vec2& o) { x1 += o.x1; x2 += o.x2; return *this; }
    Vec2& operator-=(const Vec2& o) { x1 -= o.x1; x2 -= o.x2; return *this; }
    friend Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
    friend Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
    friend Vec2 operator*(double s, const Vec2& v) { return {s * v.x1, s * v.x2}; }
    friend bool operator==(const Vec2&, const Vec2&) = default;

    double norm() const { return std::hypot(x1, x2); }
};

struct QuadrantPoint {
    double x1 = 0.0;
    double x2 = 0.0;

    QuadrantPoint() = default;
    QuadrantPoint(double a, double b) : x1(a), x2(b) {
        if (!(a >= 0.0) || !(b >= 0.0))
            throw std::domain_error("QuadrantPoint: coordinates must be nonnegative");
    }

    Vec2 vec() const { return {x1, x2}; }
    operator Vec2() const { return vec(); }
    bool on_boundary() const { return x1 == 0.0 || x2 == 0.0; }
    bool interior() const { return x1 > 0.0 && x2 > 0.0; }

    friend bool operator==(const QuadrantPoint&, const QuadrantPoint&) = default;
};

// Convex combination a*p + b*q with a, b >= 0 stays in the quadrant.
inline QuadrantPoint combine(double a, const QuadrantPoint& p, double b, const QuadrantPoint& q) {
    QuadrantPoint r;
    r.x1 = a * p.x1 + b * q.x1;
    r.x2 = a * p.x2 + b * q.x2;
    return r;
}

enum class PointKind { Type1, Type2, Origin };

// A point of E, the boundary of the quadrant. The origin has one
// representation: kind Origin, magnitude 0.
class BoundaryPoint {
public:
    BoundaryPoint() = default;

    static BoundaryPoint origin() { return {}; }
    static BoundaryPoint type1(double m) { return of_type(1, m); }
    static BoundaryPoint type2(double m) { return of_type(2, m); }
    static BoundaryPoint of_type(int type, double m) {
        if (!(m >= 0.0) || !std::isfinite(m))
            throw std::domain_error("BoundaryPoint: magnitude must be finite and nonnegative");
        if (type != 1 && type != 2)
            throw std::domain_error("BoundaryPoint: type must be 1 or 2");
        BoundaryPoint p;
        if (m > 0.0) {
            p.kind_ = type == 1 ? PointKind::Type1 : PointKind::Type2;
            p.magnitude_ = m;
        }
        return p;
    }
    static BoundaryPoint from_quadrant(const QuadrantPoint& q) {
        if (q.x1 > 0.0 && q.x2 > 0.0)
            throw std::domain_error("BoundaryPoint: point is interior to the quadrant");
        return q.x2 == 0.0 ? type1(q.x1) : type2(q.x2);
    }

    PointKind kind() const { return kind_; }
    double magnitude() const { return magnitude_; }
    bool is_origin() const { return kind_ == PointKind::Origin; }
    // 1 or 2; 0 for the origin
    int type() const { return kind_ == PointKind::Type1 ? 1 : kind_ == PointKind::Type2 ? 2 : 0; }

    double coordinate(int i) const { return type() == i ? magnitude_ : 0.0; }
    QuadrantPoint to_quadrant() const {
        QuadrantPoint q;
        q.x1 = coordinate(1);
        q.x2 = coordinate(2);
        return q;
    }
    Vec2 vec() const { return {coordinate(1), coordinate(2)}; }
    operator Vec2() const { return vec(); }

    // Signed magnitude: positive for type 1, negative for type 2. A single
    // real summary used for one-dimensional distribution comparisons.
    double signed_magnitude() const { return type() == 2 ? -magnitude_ : magnitude_; }

    friend bool operator==(const BoundaryPoint&, const BoundaryPoint&) = default;

private:
    PointKind kind_ = PointKind::Origin;
    double magnitude_ = 0.0;
};

enum class Axis { Axis1, Axis2 };

struct JumpMark {
    Axis axis = Axis::Axis1;
    double value = 1.0;

    friend bool operator==(const JumpMark&, const JumpMark&) = default;
};

class TruncationWindow {
public:
    explicit TruncationWindow(double delta = 1e-3) : delta_(delta) {
        if (!(delta > 0.0 && delta < 1.0))
            throw std::invalid_argument("TruncationWindow: delta must lie in (0, 1)");
    }
    double delta() const { return delta_; }

private:
    double delta_;
};

std::string to_string(const BoundaryPoint& p);

}  // namespace mcb
