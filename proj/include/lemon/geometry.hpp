#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace lemon {

struct Vec2 {
    double x = 0, y = 0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double k) const { return {x * k, y * k}; }
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double dist(Vec2 a, Vec2 b) { return norm(a - b); }

// Boundary arcs: the unit-circle lobe and the radius-R lobe.
enum class ArcId { Unit, Big };

// Table parameters reject b <= R-1 (big disk swallows the unit disk).
struct DegenerateFull : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
// Table parameters reject b >= R+1 (disks separate, empty intersection).
struct DegenerateEmpty : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Intersection of the unit disk centered at the origin with the disk of
// radius R > 1 centered at (b, 0). Nondegenerate iff R-1 < b < R+1.
//
// Boundary parametrization: arclength s, starting at corner A = (xc, +yc),
// traversing the unit arc through its apex (1, 0) down to corner B, then the
// big arc through its apex (b-R, 0) back to A. halfAngleSmall is the angular
// half-extent, seen from the origin, of the unit-circle portion removed by the
// big disk; the retained arc therefore subtends 2(pi - halfAngleSmall).
struct LemonTable {
    double b = 0, R = 0;
    Vec2 centerSmall{0, 0}, centerBig{0, 0};
    Vec2 cornerA{0, 0}, cornerB{0, 0};
    double chordAB = 0;
    double halfAngleSmall = 0, halfAngleBig = 0;
    double lenGamma1 = 0, lenGammaR = 0, lenGamma = 0;
    bool majorArc = false;

    // Polar half-extent of the retained unit arc: alpha = pi - halfAngleSmall.
    double alpha() const { return lenGamma1 / 2.0; }
    // Polar angle of corner A about centerBig (in (pi/2, pi)).
    double psiA() const { return kPiInternal - halfAngleBig; }

    double arc_radius(ArcId arc) const { return arc == ArcId::Unit ? 1.0 : R; }
    double arc_curvature(ArcId arc) const { return arc == ArcId::Unit ? 1.0 : 1.0 / R; }
    Vec2 arc_center(ArcId arc) const { return arc == ArcId::Unit ? centerSmall : centerBig; }

    // Which arc owns global arclength s (callers pass s already wrapped).
    ArcId arc_of(double s) const { return s < lenGamma1 ? ArcId::Unit : ArcId::Big; }

    // Polar angle about the owning center for a point at arclength s.
    double polar_of_s(ArcId arc, double s) const;
    // Inverse: global arclength from a polar angle about the owning center.
    double s_of_polar(ArcId arc, double angle) const;

  private:
    static constexpr double kPiInternal = 3.14159265358979323846;
};

// Build and validate a table; throws DegenerateFull / DegenerateEmpty /
// std::invalid_argument on bad parameters. Exact boundary values (b = R-1,
// b = R+1) are rejected on the corresponding side.
LemonTable build_table(double b, double R);

// Solve for the center distance that realizes a given corner-to-corner chord:
// b = sqrt(R^2 - c^2/4) - sqrt(1 - c^2/4). The result always carries the
// major-arc unit lobe. Requires 0 < chordAB < 2 and chordAB <= 2R.
LemonTable table_from_chord(double chordAB, double R);

// Boundary data at arclength s (s taken mod total length): position, the unit
// tangent along the traversal, the inward unit normal, and the arc identity.
struct BoundaryPoint {
    Vec2 position{0, 0};
    Vec2 tangent{0, 0};
    Vec2 inwardNormal{0, 0};
    double curvature = 0;
    ArcId arcId = ArcId::Unit;
    double s = 0;
};

BoundaryPoint arc_point(const LemonTable& table, double s);

// Membership with a uniform slack on both disks.
bool point_in_table(const LemonTable& table, Vec2 p, double slack = 0.0);

double chord_length(const LemonTable& table);

// One-line JSON summary: b, R, chordAB, lenGamma1, lenGammaR, corners, majorArc.
std::string json_summary(const LemonTable& table);

}  // namespace lemon
