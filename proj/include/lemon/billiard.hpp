#pragma once

#include <optional>

#include "lemon/geometry.hpp"
#include "lemon/rng.hpp"

namespace lemon {

// A collision state: boundary arclength s in [0, lenGamma) and the reflection
// angle phi in (-pi/2, pi/2) between the outgoing ray and the inward normal
// (positive toward the traversal tangent). arcId is derived from s.
struct PhasePoint {
    ArcId arcId = ArcId::Unit;
    double s = 0;
    double phi = 0;
};

PhasePoint make_phase(const LemonTable& table, double s, double phi);

// Half-chord focus distance d = rho cos(phi) and mirror strength refl = -2/d
// at the departing point of a collision step.
double d_of(const LemonTable& table, const PhasePoint& x);
double refl_of(const LemonTable& table, const PhasePoint& x);

// Data describing the collision step that left `point`: flight length tau to
// the next collision, d and refl at the departure.
struct CollisionEvent {
    PhasePoint point;
    double tau = 0;
    double d = 0;
    double refl = 0;
};

struct StepError {
    enum class Kind { CornerHit, Tangential };
    Kind kind = Kind::CornerHit;
    double distance = 0;  // corner miss distance, or pi/2 - |phi| margin
};

struct StepResult {
    PhasePoint next;
    CollisionEvent event;
    std::optional<StepError> error;

    bool ok() const { return !error.has_value(); }
};

// One iteration of the billiard map. Orbits passing within cornerTol of a
// corner or within tangentialTol of grazing are refused (measure-zero set);
// `next`/`event` are only meaningful when ok().
StepResult billiard_step(const LemonTable& table, const PhasePoint& x);

inline constexpr double kCornerTol = 1e-9;
inline constexpr double kTangentialTol = 1e-9;

// Derivative of the billiard map in (s, phi) coordinates.
struct Mat2 {
    double a11 = 1, a12 = 0, a21 = 0, a22 = 1;

    Mat2 operator*(const Mat2& o) const {
        return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
                a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
    }
    double det() const { return a11 * a22 - a12 * a21; }
};

struct Vec2s {
    double ds = 0, dphi = 0;
};

// Analytic tangent matrix of the step recorded in `res` (departure x).
Mat2 tangent_matrix(const LemonTable& table, const PhasePoint& x, const StepResult& res);

// Push a phase-space tangent vector through one collision; computes the step
// internally. Throws std::runtime_error if the underlying step is singular.
Vec2s tangent_step(const LemonTable& table, const PhasePoint& x, Vec2s v);

// The involution conjugating the map to its inverse: (s, phi) ↦ (s, -phi).
inline PhasePoint time_reverse(const PhasePoint& x) { return {x.arcId, x.s, -x.phi}; }

// One iteration of the inverse map, implemented as reverse-step-reverse. The
// event reports the flight arriving at x: tau of that flight, d/refl at the
// returned (earlier) point.
StepResult billiard_step_back(const LemonTable& table, const PhasePoint& x);

// Number of further collisions on the current arc before the orbit crosses to
// the other arc, capped. exceeded=true means the cap was hit (candidate
// member of the discarded exceptional set).
struct EtaResult {
    long count = 0;
    bool exceeded = false;
    std::optional<StepError> error;

    bool ok() const { return !exceeded && !error.has_value(); }
};

inline constexpr long kDefaultEtaCap = 1000000;

EtaResult eta(const LemonTable& table, const PhasePoint& x, long cap = kDefaultEtaCap);

// Phase point distributed by the invariant measure cos(phi) ds dphi.
PhasePoint mu_sample(const LemonTable& table, SplitMix64& rng);

}  // namespace lemon
