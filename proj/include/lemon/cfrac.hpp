#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace lemon {

// Values live on the projective line R ∪ {∞} with a single unsigned infinity.
// IEEE doubles represent it; ±inf are canonicalized to the same point.
using ProjValue = double;

namespace cf {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNearSingularB = 1e-12;
inline constexpr double kHuge = 1e12;

inline bool is_infinite(ProjValue v) { return std::isinf(v); }

// Collapse ±inf onto the single projective infinity.
inline ProjValue canon(ProjValue v) { return std::isinf(v) ? kInf : v; }

// 1/v on the projective line: recip(0) = ∞, recip(∞) = 0.
inline ProjValue recip(ProjValue v) {
    if (std::isinf(v)) return 0.0;
    if (v == 0.0) return kInf;
    return 1.0 / v;
}

// a + b with ∞ absorbing (the chains below never add two infinities).
inline ProjValue padd(ProjValue a, ProjValue b) {
    if (std::isinf(a) || std::isinf(b)) return kInf;
    return a + b;
}

// [a1, a2, ..., an] = 1/(a1 + [a2, ..., an]), empty chain = 0.
ProjValue eval_cf(std::span<const double> entries);

// a0 + [a1, ..., an].
ProjValue eval_cf_head(double head, std::span<const double> entries);

// [a1, ..., an, B]: the tail value B occupies its own final slot, i.e. the
// innermost accumulator starts at 1/B. Equivalent to appending B as an entry.
ProjValue eval_with_tail(std::span<const double> entries, ProjValue tail);

// [a1, ..., a(n-1), an + B]: the tail value adds onto the last written entry.
// This is the shape produced by one reflection: [tau, refl + B].
ProjValue eval_tail_add(std::span<const double> entries, ProjValue tail);

// Pre-reflection curvature transport through one collision and the following
// flight: B ↦ 1/(tau + 1/(refl + B)). refl = -2/d < 0 at the collision.
inline ProjValue curvature_step(ProjValue b, double tau, double refl) {
    return recip(padd(tau, recip(padd(refl, b))));
}

// Interior-triple rewrite: [x, a, b, c, y] = [x + A, B, C + y] with
// B = a + c + abc, A = bc/B, C = ab/B. Near-singular B is refused.
struct AbcCoefficients {
    double A = 0, B = 0, C = 0;
};
std::optional<AbcCoefficients> abc_reduce(double a, double b, double c);

// Transport through m+1 consecutive reflections on one circular arc (chord d,
// internal flights 2d each) plus the exit flight tauExit:
// result = [tauExit, R/2, -2 m d, R/2 + B] with R = -2/d.
ProjValue block_reduce_same_arc(long m, double d, double tauExit, ProjValue b);

// Möbius map t ↦ (a t + b)/(c t + d) on the projective line. Entry matrices
// compose left-to-right in chain order; renormalize when products run long.
struct Mobius {
    double a = 1, b = 0, c = 0, d = 1;

    static Mobius identity() { return {1, 0, 0, 1}; }
    // Consuming one chain entry e: t ↦ 1/(e + t).
    static Mobius entry(double e) { return {0, 1, 1, e}; }
    // t ↦ 1/t (det -1; a single inversion reverses circular order).
    static Mobius inversion() { return {0, 1, 1, 0}; }

    Mobius operator*(const Mobius& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d,
                c * o.a + d * o.c, c * o.b + d * o.d};
    }

    double det() const { return a * d - b * c; }

    ProjValue apply(ProjValue t) const {
        if (std::isinf(t)) {
            if (c == 0.0) return a == 0.0 ? 0.0 : kInf;
            return canon(a / c);
        }
        double num = a * t + b;
        double den = c * t + d;
        if (den == 0.0) return num == 0.0 ? 0.0 : kInf;  // 0/0: degenerate map
        return canon(num / den);
    }

    void renormalize() {
        double m = std::fabs(a);
        m = std::fmax(m, std::fabs(b));
        m = std::fmax(m, std::fabs(c));
        m = std::fmax(m, std::fabs(d));
        if (m > 0 && (m > 1e100 || m < 1e-100)) {
            a /= m; b /= m; c /= m; d /= m;
        }
    }
};

// Angle chart for the projective circle: t ↦ 2 atan t ∈ (-pi, pi], ∞ ↦ pi.
double circle_chart(ProjValue t);

// Metric on the projective circle through the chart (wraps around ∞).
double circle_dist(ProjValue x, ProjValue y);

// Relative closeness for moderate finite values, circle metric otherwise.
bool proj_close(ProjValue x, ProjValue y, double tol);

// Exact equality as projective points (both infinities coincide).
bool proj_equal(ProjValue x, ProjValue y);

// True iff walking counterclockwise (increasing chart angle) from a, the point
// b appears strictly before c. Throws std::invalid_argument on a degenerate
// (non-distinct) triple.
bool cyclic_order(ProjValue a, ProjValue b, ProjValue c);

}  // namespace cf
}  // namespace lemon
