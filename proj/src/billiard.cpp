#include "lemon/billiard.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lemon/util.hpp"

namespace lemon {

PhasePoint make_phase(const LemonTable& table, double s, double phi) {
    double sw = wrap_periodic(s, table.lenGamma);
    return {table.arc_of(sw), sw, phi};
}

double d_of(const LemonTable& table, const PhasePoint& x) {
    return table.arc_radius(x.arcId) * std::cos(x.phi);
}

double refl_of(const LemonTable& table, const PhasePoint& x) {
    return -2.0 / d_of(table, x);
}

namespace {

struct Candidate {
    bool valid = false;
    double t = std::numeric_limits<double>::infinity();
    ArcId arc = ArcId::Unit;
    Vec2 pos{0, 0};
    double angle = 0;  // polar angle about the owning center, membership-normalized
};

// Membership-normalized polar angle: Unit uses the atan2 principal value
// (the arc is |theta| <= alpha), Big shifts into [0, 2pi) (the arc is
// psiA <= psi <= 2pi - psiA).
double membership_angle(ArcId arc, Vec2 rel) {
    double a = std::atan2(rel.y, rel.x);
    if (arc == ArcId::Big && a < 0) a += 2.0 * kPi;
    return a;
}

bool angle_on_arc(const LemonTable& table, ArcId arc, double a, double slackAngle) {
    if (arc == ArcId::Unit) return std::fabs(a) <= table.alpha() + slackAngle;
    double psiA = table.psiA();
    return a >= psiA - slackAngle && a <= 2.0 * kPi - psiA + slackAngle;
}

}  // namespace

StepResult billiard_step(const LemonTable& table, const PhasePoint& x) {
    StepResult out;
    out.next = x;

    const double phiMax = kPi / 2.0 - kTangentialTol;
    if (std::fabs(x.phi) > phiMax) {
        out.error = StepError{StepError::Kind::Tangential, kPi / 2.0 - std::fabs(x.phi)};
        return out;
    }

    BoundaryPoint bp = arc_point(table, x.s);
    Vec2 p = bp.position;
    double cphi = std::cos(x.phi), sphi = std::sin(x.phi);
    Vec2 v{cphi * bp.inwardNormal.x + sphi * bp.tangent.x,
           cphi * bp.inwardNormal.y + sphi * bp.tangent.y};

    const double tMin = 1e-12;
    Candidate best;
    double nearestCornerMiss = std::numeric_limits<double>::infinity();

    for (ArcId arc : {ArcId::Unit, ArcId::Big}) {
        Vec2 c = table.arc_center(arc);
        double rho = table.arc_radius(arc);
        double slackAngle = kCornerTol / rho;
        Vec2 rel = p - c;
        double beta = dot(v, rel);
        double gamma = dot(rel, rel) - rho * rho;
        double disc = beta * beta - gamma;
        if (disc <= 0) continue;

        double roots[2];
        int nroots = 0;
        if (arc == x.arcId) {
            // Departing circle: t = 0 is a root by construction; the other one
            // is the full chord, computed without cancellation (beta = -d < 0).
            roots[nroots++] = -beta + std::sqrt(disc);
        } else {
            double sq = std::sqrt(disc);
            double q = -(beta + std::copysign(sq, beta));
            roots[nroots++] = q;
            if (q != 0.0) roots[nroots++] = gamma / q;
        }

        for (int i = 0; i < nroots; ++i) {
            double t = roots[i];
            if (!(t > tMin)) continue;
            Vec2 h{p.x + t * v.x, p.y + t * v.y};
            Vec2 relh = h - c;
            double nr = norm(relh);
            if (nr == 0) continue;
            Vec2 hp{c.x + rho * relh.x / nr, c.y + rho * relh.y / nr};  // snap to circle
            double ang = membership_angle(arc, hp - c);
            double cornerMiss = std::fmin(dist(hp, table.cornerA), dist(hp, table.cornerB));
            nearestCornerMiss = std::fmin(nearestCornerMiss, cornerMiss);
            if (!angle_on_arc(table, arc, ang, slackAngle)) continue;
            if (t < best.t) best = {true, t, arc, hp, ang};
        }
    }

    if (!best.valid) {
        out.error = StepError{StepError::Kind::CornerHit, nearestCornerMiss};
        return out;
    }

    double cornerMiss = std::fmin(dist(best.pos, table.cornerA), dist(best.pos, table.cornerB));
    if (cornerMiss < kCornerTol) {
        out.error = StepError{StepError::Kind::CornerHit, cornerMiss};
        return out;
    }

    // Reflect at the arrival point.
    double ca = std::cos(best.angle), sa = std::sin(best.angle);
    Vec2 n1{-ca, -sa};
    Vec2 t1{sa, -ca};
    double vn = dot(v, n1);
    Vec2 vr{v.x - 2.0 * vn * n1.x, v.y - 2.0 * vn * n1.y};
    double phi1 = std::atan2(dot(vr, t1), dot(vr, n1));
    if (std::fabs(phi1) > phiMax) {
        out.error = StepError{StepError::Kind::Tangential, kPi / 2.0 - std::fabs(phi1)};
        return out;
    }

    double s1 = table.s_of_polar(best.arc, best.arc == ArcId::Unit ? std::atan2(best.pos.y, best.pos.x)
                                                                   : best.angle);
    // Defensive clamp of roundoff at the arc seams.
    if (best.arc == ArcId::Unit) {
        s1 = std::clamp(s1, 0.0, std::nextafter(table.lenGamma1, 0.0));
    } else {
        s1 = std::clamp(s1, table.lenGamma1, std::nextafter(table.lenGamma, 0.0));
    }

    out.next = PhasePoint{best.arc, s1, phi1};
    out.event = CollisionEvent{x, best.t, d_of(table, x), refl_of(table, x)};
    return out;
}

Mat2 tangent_matrix(const LemonTable& table, const PhasePoint& x, const StepResult& res) {
    double kap = table.arc_curvature(x.arcId);
    double kap1 = table.arc_curvature(res.next.arcId);
    double cphi = std::cos(x.phi);
    double cphi1 = std::cos(res.next.phi);
    double tau = res.event.tau;
    double w = cphi - tau * kap;
    return {-w / cphi1, -tau / cphi1,
            kap + kap1 * w / cphi1, kap1 * tau / cphi1 - 1.0};
}

Vec2s tangent_step(const LemonTable& table, const PhasePoint& x, Vec2s v) {
    StepResult res = billiard_step(table, x);
    if (!res.ok()) throw std::runtime_error("tangent_step: singular collision step");
    Mat2 m = tangent_matrix(table, x, res);
    return {m.a11 * v.ds + m.a12 * v.dphi, m.a21 * v.ds + m.a22 * v.dphi};
}

StepResult billiard_step_back(const LemonTable& table, const PhasePoint& x) {
    StepResult r = billiard_step(table, time_reverse(x));
    StepResult out;
    out.next = x;
    if (!r.ok()) {
        out.error = r.error;
        return out;
    }
    out.next = time_reverse(r.next);
    out.event.point = out.next;
    out.event.tau = r.event.tau;
    out.event.d = d_of(table, out.next);
    out.event.refl = -2.0 / out.event.d;
    return out;
}

EtaResult eta(const LemonTable& table, const PhasePoint& x, long cap) {
    EtaResult out;
    PhasePoint y = x;
    while (out.count < cap) {
        StepResult r = billiard_step(table, y);
        if (!r.ok()) {
            out.error = r.error;
            return out;
        }
        if (r.next.arcId != y.arcId) return out;
        ++out.count;
        y = r.next;
    }
    out.exceeded = true;
    return out;
}

PhasePoint mu_sample(const LemonTable& table, SplitMix64& rng) {
    double s = rng.uniform01() * table.lenGamma;
    double u = 2.0 * rng.uniform01() - 1.0;
    u = std::clamp(u, -1.0 + 1e-15, 1.0 - 1e-15);
    return make_phase(table, s, std::asin(u));
}

}  // namespace lemon
