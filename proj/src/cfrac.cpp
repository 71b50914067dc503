#include "lemon/cfrac.hpp"

#include <stdexcept>

#include "lemon/util.hpp"

namespace lemon::cf {

ProjValue eval_cf(std::span<const double> entries) {
    ProjValue acc = 0.0;
    for (size_t i = entries.size(); i-- > 0;) acc = recip(padd(entries[i], acc));
    return acc;
}

ProjValue eval_cf_head(double head, std::span<const double> entries) {
    return padd(head, eval_cf(entries));
}

ProjValue eval_with_tail(std::span<const double> entries, ProjValue tail) {
    ProjValue acc = recip(tail);
    for (size_t i = entries.size(); i-- > 0;) acc = recip(padd(entries[i], acc));
    return acc;
}

ProjValue eval_tail_add(std::span<const double> entries, ProjValue tail) {
    ProjValue acc = canon(tail);
    for (size_t i = entries.size(); i-- > 0;) acc = recip(padd(entries[i], acc));
    return acc;
}

std::optional<AbcCoefficients> abc_reduce(double a, double b, double c) {
    double bb = a + c + a * b * c;
    if (std::fabs(bb) < kNearSingularB) return std::nullopt;
    return AbcCoefficients{b * c / bb, bb, a * b / bb};
}

ProjValue block_reduce_same_arc(long m, double d, double tauExit, ProjValue b) {
    double half = -1.0 / d;  // R/2 with R = -2/d
    double entries[4] = {tauExit, half, -2.0 * static_cast<double>(m) * d, half};
    return eval_tail_add(entries, b);
}

double circle_chart(ProjValue t) {
    if (std::isinf(t)) return kPi;
    return 2.0 * std::atan(t);
}

double circle_dist(ProjValue x, ProjValue y) {
    double d = std::fabs(circle_chart(x) - circle_chart(y));
    return std::fmin(d, 2.0 * kPi - d);
}

bool proj_close(ProjValue x, ProjValue y, double tol) {
    if (std::isnan(x) || std::isnan(y)) return false;
    if (!std::isinf(x) && !std::isinf(y) && std::fabs(x) <= kHuge && std::fabs(y) <= kHuge) {
        double scale = std::fmax(1.0, std::fmax(std::fabs(x), std::fabs(y)));
        return std::fabs(x - y) <= tol * scale;
    }
    return circle_dist(x, y) <= tol;
}

bool proj_equal(ProjValue x, ProjValue y) {
    if (std::isinf(x) && std::isinf(y)) return true;
    return x == y;
}

bool cyclic_order(ProjValue a, ProjValue b, ProjValue c) {
    if (proj_equal(a, b) || proj_equal(b, c) || proj_equal(a, c))
        throw std::invalid_argument("cyclic_order: degenerate triple");
    double ta = circle_chart(a);
    auto forward = [ta](double t) {
        double d = t - ta;
        while (d <= 0) d += 2.0 * kPi;
        while (d > 2.0 * kPi) d -= 2.0 * kPi;
        return d;
    };
    return forward(circle_chart(b)) < forward(circle_chart(c));
}

}  // namespace lemon::cf
