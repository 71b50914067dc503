#include "lemon/geometry.hpp"

#include <cmath>

#include "json.hpp"
#include "lemon/util.hpp"

namespace lemon {

double LemonTable::polar_of_s(ArcId arc, double s) const {
    if (arc == ArcId::Unit) return alpha() - s;
    double u = s - lenGamma1;
    double psiB = 2.0 * kPi - psiA();
    return psiB - u / R;
}

double LemonTable::s_of_polar(ArcId arc, double angle) const {
    if (arc == ArcId::Unit) return alpha() - angle;
    double psiB = 2.0 * kPi - psiA();
    return lenGamma1 + (psiB - angle) * R;
}

LemonTable build_table(double b, double R) {
    if (!(R > 1.0)) throw std::invalid_argument("build_table: requires R > 1");
    if (!(b > 0.0)) throw std::invalid_argument("build_table: requires b > 0");
    if (!std::isfinite(b) || !std::isfinite(R))
        throw std::invalid_argument("build_table: parameters must be finite");
    if (b <= R - 1.0)
        throw DegenerateFull("build_table: b <= R - 1, unit disk contained in big disk");
    if (b >= R + 1.0)
        throw DegenerateEmpty("build_table: b >= R + 1, disks do not overlap");

    LemonTable t;
    t.b = b;
    t.R = R;
    t.centerSmall = {0.0, 0.0};
    t.centerBig = {b, 0.0};

    // Corner abscissa from the two circle equations; radical-axis form.
    double xc = (b * b + 1.0 - R * R) / (2.0 * b);
    double yc2 = 1.0 - xc * xc;
    double yc = std::sqrt(std::fmax(yc2, 0.0));
    t.cornerA = {xc, yc};
    t.cornerB = {xc, -yc};
    t.chordAB = 2.0 * yc;

    double alpha = std::atan2(yc, xc);          // in (0, pi)
    double psiA = std::atan2(yc, xc - b);       // in (pi/2, pi): xc < b always
    t.halfAngleSmall = kPi - alpha;
    t.halfAngleBig = kPi - psiA;
    t.lenGamma1 = 2.0 * alpha;
    t.lenGammaR = 2.0 * R * t.halfAngleBig;
    t.lenGamma = t.lenGamma1 + t.lenGammaR;
    // The retained unit lobe exceeds a half circle iff the corner chord lies
    // left of the origin, i.e. the small center sits on the lobe's side.
    t.majorArc = xc < 0.0;
    return t;
}

LemonTable table_from_chord(double chordAB, double R) {
    if (!(R > 1.0)) throw std::invalid_argument("table_from_chord: requires R > 1");
    if (!(chordAB > 0.0) || !(chordAB < 2.0))
        throw std::invalid_argument("table_from_chord: requires 0 < chordAB < 2");
    if (chordAB > 2.0 * R)
        throw std::invalid_argument("table_from_chord: chord exceeds big-disk diameter");
    double h = chordAB / 2.0;
    double b = std::sqrt(R * R - h * h) - std::sqrt(1.0 - h * h);
    return build_table(b, R);
}

BoundaryPoint arc_point(const LemonTable& table, double s) {
    double sw = wrap_periodic(s, table.lenGamma);
    ArcId arc = table.arc_of(sw);
    double a = table.polar_of_s(arc, sw);
    double rho = table.arc_radius(arc);
    Vec2 c = table.arc_center(arc);

    BoundaryPoint p;
    p.s = sw;
    p.arcId = arc;
    p.curvature = table.arc_curvature(arc);
    double ca = std::cos(a), sa = std::sin(a);
    p.position = {c.x + rho * ca, c.y + rho * sa};
    // Traversal runs clockwise about each owning center (angle decreases in s).
    p.tangent = {sa, -ca};
    p.inwardNormal = {-ca, -sa};
    return p;
}

bool point_in_table(const LemonTable& table, Vec2 p, double slack) {
    return norm(p) <= 1.0 + slack && dist(p, table.centerBig) <= table.R + slack;
}

double chord_length(const LemonTable& table) { return table.chordAB; }

std::string json_summary(const LemonTable& table) {
    nlohmann::json j;
    j["b"] = table.b;
    j["R"] = table.R;
    j["chordAB"] = table.chordAB;
    j["lenGamma1"] = table.lenGamma1;
    j["lenGammaR"] = table.lenGammaR;
    j["cornerA"] = {table.cornerA.x, table.cornerA.y};
    j["cornerB"] = {table.cornerB.x, table.cornerB.y};
    j["majorArc"] = table.majorArc;
    return j.dump();
}

}  // namespace lemon
