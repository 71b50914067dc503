#pragma once

#include <vector>

#include "lemon/billiard.hpp"
#include "lemon/cfrac.hpp"
#include "lemon/geometry.hpp"
#include "lemon/rng.hpp"

namespace lemon {

// Collision data of one excursion small-arc -> big-arc -> small-arc, reduced
// to the quantities the curvature calculus consumes.  j0/j1 count the
// *additional* same-arc collisions in each run (a run of j same-arc steps has
// j+1 collision points), tau0/tau1 are the two transfer flights, d0/d1 the
// half-chords rho*cos(phi) on each run (constant along a run).
struct ReturnBlockHat {
    long j0 = 0, j1 = 0;
    double tau0 = 0, tau1 = 0;
    double d0 = 0, d1 = 0;

    double hat_d0() const { return d0 / static_cast<double>(j0 + 1); }
    double hat_d1() const { return d1 / static_cast<double>(j1 + 1); }
    double hat_R0() const { return -2.0 / hat_d0(); }
    double hat_R1() const { return -2.0 / hat_d1(); }
    double hat_tau0() const { return tau0 - static_cast<double>(j0) * hat_d0() - static_cast<double>(j1) * hat_d1(); }
    double hat_tau1() const { return tau1 - static_cast<double>(j1) * hat_d1(); }
};

// Full return block of the induced map on M: i0 same-arc steps on the small
// arc before exit, i1 on the big arc, then entry into the next small-arc run
// and i2 further steps to reach its midpoint.  d2 is the half-chord of the
// final run.
struct ReturnBlock {
    long i0 = 0, i1 = 0, i2 = 0;
    double tau0 = 0, tau1 = 0;
    double d0 = 0, d1 = 0, d2 = 0;

    double hat_d0() const { return d0 / static_cast<double>(i0 + 1); }
    double hat_d1() const { return d1 / static_cast<double>(i1 + 1); }
    double hat_R0() const { return -2.0 / hat_d0(); }
    double hat_R1() const { return -2.0 / hat_d1(); }
    double hat_tau0() const { return tau0 - static_cast<double>(i0) * hat_d0() - static_cast<double>(i1) * hat_d1(); }
    double bar_tau1() const { return tau1 - static_cast<double>(i1) * hat_d1() - d2; }
};

// Cell address of a point inside a small-arc run: n is the run's total number
// of same-arc steps, phase how many of them lie behind the point.
struct CellIndex {
    long n = 0;
    long phase = 0;
};

enum class InducedStatus { Ok, Unresolved, Singular };

struct WalkCaps {
    long etaCap = kDefaultEtaCap;
    long walkCap = 2000000;
};

struct CellResult {
    InducedStatus status = InducedStatus::Ok;
    CellIndex cell;
    bool ok() const { return status == InducedStatus::Ok; }
};

struct MembershipResult {
    InducedStatus status = InducedStatus::Ok;
    bool inSet = false;
    bool ok() const { return status == InducedStatus::Ok; }
};

struct PointResult {
    InducedStatus status = InducedStatus::Ok;
    PhasePoint point;
    long steps = 0;
    bool ok() const { return status == InducedStatus::Ok; }
};

struct HatReturnResult {
    InducedStatus status = InducedStatus::Ok;
    ReturnBlockHat block;
    PhasePoint image;
    bool ok() const { return status == InducedStatus::Ok; }
};

struct ReturnResult {
    InducedStatus status = InducedStatus::Ok;
    ReturnBlock block;
    PhasePoint image;
    long collisions = 0;
    bool ok() const { return status == InducedStatus::Ok; }
};

struct CurvatureResult {
    InducedStatus status = InducedStatus::Ok;
    ProjValue value = 0;
    bool ok() const { return status == InducedStatus::Ok; }
};

struct BackwardCfResult {
    InducedStatus status = InducedStatus::Ok;
    double value = 0;
    int depthUsed = 0;
    bool converged = false;
    bool ok() const { return status == InducedStatus::Ok; }
};

struct BlockSample {
    std::vector<ReturnBlock> blocks;
    std::vector<PhasePoint> starts;
    long attempts = 0;
    long nSingular = 0;
    long nUnresolved = 0;
};

// Cell address of a small-arc point.  Throws std::invalid_argument when the
// point is not on the small arc.
CellResult classify_cell(const LemonTable& table, const PhasePoint& x, const WalkCaps& caps = {});

// First-entry set: small-arc points whose previous collision was on the big arc.
MembershipResult is_in_m1hat(const LemonTable& table, const PhasePoint& x);

// Midpoint section M: phase == (n+1)/2 within the run.
MembershipResult is_in_m(const LemonTable& table, const PhasePoint& x, const WalkCaps& caps = {});

// First big->small transition strictly after x; returns the landing point.
PointResult find_first_entry(const LemonTable& table, const PhasePoint& x, const WalkCaps& caps = {});

// Walks from x to the next first-entry point and advances to the run midpoint,
// producing a point of M.
PointResult find_m_point(const LemonTable& table, const PhasePoint& x, const WalkCaps& caps = {});

// One excursion starting at a first-entry point: walks the small-arc run, the
// big-arc run, and lands on the next first-entry point.
HatReturnResult hat_return(const LemonTable& table, const PhasePoint& x, const WalkCaps& caps = {});

// Full return map of M: from x in M to its image in M, with the block data.
ReturnResult return_map(const LemonTable& table, const PhasePoint& x, const WalkCaps& caps = {});

// Inverse walk: from x in M back to its predecessor y in M.  The returned
// block is the one mapping y forward onto x.
ReturnResult return_map_back(const LemonTable& table, const PhasePoint& x, const WalkCaps& caps = {});

// Transports an incoming wavefront curvature through nCollisions raw collision
// steps starting at x (independent of the reduced block forms).
CurvatureResult curvature_return_unreduced(const LemonTable& table, const PhasePoint& x,
                                           long nCollisions, ProjValue b);

// Reduced forms of the same transport, consuming block data only.
ProjValue curvature_hat_return(ProjValue b, const ReturnBlockHat& blk);
ProjValue curvature_return(ProjValue b, const ReturnBlock& blk);

// The return-block transport as a Moebius transformation (determinant +1).
cf::Mobius block_mobius_matrix(const ReturnBlock& blk);

// Unstable wavefront curvature at x from the backward orbit, as the limit of
// finite-depth truncations.
BackwardCfResult backward_cf(const LemonTable& table, const PhasePoint& x, int maxDepth = 200);

// Draws phase-space samples, projects each to M, and applies the return map,
// collecting up to `count` blocks with their start points.
BlockSample sample_return_blocks(const LemonTable& table, long count, std::uint64_t masterSeed,
                                 std::uint64_t streamIdx, const WalkCaps& caps = {},
                                 long maxAttemptsFactor = 50);

}  // namespace lemon
