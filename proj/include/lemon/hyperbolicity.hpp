#pragma once

#include <cstdint>
#include <vector>

#include "lemon/induced.hpp"

namespace lemon {

// Blocks are grouped by the length of the big-arc run and the final small-arc
// run: X0 has a sliding big-arc run, X1 a single big-arc collision with a
// sliding final run, X2 a single collision on both.
enum class RegionX { X0, X1, X2 };

RegionX region_of(const ReturnBlock& blk);

// Geometric admissibility of the table: the big-arc radius dominates and the
// corner chord stays short enough for the window max{R-1, 1} < b < R.
struct A0Report {
    bool ok = false;
    double slack = 0;  // min(b - max(R-1, 1), R - b)
};
A0Report check_A0(const LemonTable& table);

// Region-specific flight-length assumption for one block (A1 on X0, A2 on X1,
// A3 on X2).  margin is the smallest inequality slack; NaN when the region's
// structural preconditions fail.
struct AssumptionReport {
    RegionX region = RegionX::X0;
    bool ok = false;
    double margin = 0;
};
AssumptionReport check_assumptions(const ReturnBlock& blk);

// Expansion bookkeeping for one return block.  The scalar chain g0 -> v -> sd
// feeds the dispersing-side test, g0p -> u -> sp the parallel-side test; thrF
// is the focusing threshold -d2/(2 i2).
struct ConditionReport {
    RegionX region = RegionX::X0;

    double g0 = 0, g0p = 0, g1 = 0;
    double u = 0, v = 0;
    double sd = 0, sp = 0, thrF = 0;
    double y0 = 0, yp = 0, h1 = 0;

    bool condD1 = false, condF1 = false;
    bool condD2 = false, condF2 = false;
    bool condP1 = false, condP2 = false;
    bool coneOk = false;

    // Case-by-case disjuncts; the aggregate tests must match their unions.
    bool d1a = false, d1b = false, d1c = false;
    bool f1a = false, f1b = false, f1c = false;
    bool d2a = false, d2b = false, d2c = false;
    bool f2a = false, f2b = false, f2c = false;
    bool p1a = false, p1b = false;
    bool detailAgrees = false;

    bool regionAssumption = false;
    bool nearTie = false;
    double minMargin = 0;
};

ConditionReport check_conditions(const ReturnBlock& blk);

// Direct image test of the invariant cone: transports the two extreme
// wavefronts through the block and checks 0 < bp < bd < 1/d2.
struct ConeCheck {
    bool ok = false;
    bool nearTie = false;
    double bp = 0, bd = 0, upper = 0;
    double minMargin = 0;
    bool agreesWithConditions = false;
    bool conditionsNearTie = false;
};
ConeCheck verify_cone(const ReturnBlock& blk);

// For blocks with a single big-arc collision the two transfer flights must
// exceed the two half-chords combined.
struct ChordGapReport {
    bool applicable = false;  // i1 == 0
    bool ok = false;
    double margin = 0;  // tau0 + tau1 - d0 - d2
};
ChordGapReport check_chord_gap(const ReturnBlock& blk);

// The two-bounce orbit through the arc apexes.
enum class Period2Class { Hyperbolic, Parabolic, Elliptic };
struct Period2Report {
    Period2Class cls = Period2Class::Hyperbolic;
    double trace = 0;
    double traceClosedForm = 0;
    double tau = 0;
    PhasePoint apexSmall, apexBig;
};
Period2Report period2_classify(const LemonTable& table);

enum class LyapunovMode { FullMap, ReturnMap };

struct LyapunovEstimate {
    double chi = 0;       // per collision (FullMap) or per return (ReturnMap)
    double ci95 = 0;      // batch-means half width
    long n = 0;           // collisions or returns actually used
    double meanReturnTime = 0;  // collisions per return (ReturnMap); 1 otherwise
    long blocks = 0;      // completed returns (ReturnMap)
    bool truncated = false;
};

LyapunovEstimate lyapunov(const LemonTable& table, const PhasePoint& x0, long n,
                          LyapunovMode mode, const WalkCaps& caps = {});

// Monotone image chain of the cone under increasing backward depth.
struct ConeSequenceResult {
    InducedStatus status = InducedStatus::Ok;
    int depth = 0;
    bool ok = false;
    double minIncrement = 0;  // worst forward step of the two monotone sequences
    double minGap = 0;        // worst bp/bd separation
    double minRange = 0;      // worst distance to the cone boundary (0, 1/d(x))
    std::vector<double> bp, bd;
};
ConeSequenceResult cone_sequence(const LemonTable& table, const PhasePoint& x, int depth,
                                 const WalkCaps& caps = {});

// Grid search for the smallest big-arc radius at which all sampled blocks pass
// the assumptions and the cone test.
struct RStarRow {
    double R = 0;
    double b = 0;
    bool a0ok = false;
    double a0slack = 0;
    long nBlocks = 0;
    long nAssumptionFail = 0;
    long nCondFail = 0;
    long nConeFail = 0;
    long nNearTie = 0;
    long nSingular = 0;
    long nUnresolved = 0;
    bool passed = false;
};

struct RStarDiagnostics {
    long nStar = 0;          // floor(pi / halfAngleSmall): depth of the corner cell ladder
    long nCornerBlocks = 0;  // excursions with d1 <= 4
    long nCornerNear = 0;    // ... whose small-arc exit lies within 0.05 of a corner
    long nExcursion = 0;
    long nExcursionOk = 0;  // excursion length <= chordAB + 0.05
    long nEntries = 0;
    long nEntryBig = 0;      // entries with cell index n >= nStar
    long nEntryPairs = 0;    // consecutive pairs with first n >= nStar
    long nEntryPairsOk = 0;  // ... whose successor keeps n >= nStar - 1
};

struct RStarResult {
    bool found = false;
    double Rstar = 0;
    double b = 0;
    std::vector<RStarRow> rows;
    RStarDiagnostics diagnostics;
};

RStarResult find_R_star(double chordAB, const std::vector<double>& Rgrid, long samples,
                        std::uint64_t seed);

}  // namespace lemon
