#include "lemon/hyperbolicity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "lemon/util.hpp"

namespace lemon {

namespace {

constexpr double kTieTol = 1e-12;

double qnan() { return std::numeric_limits<double>::quiet_NaN(); }
double pinf() { return std::numeric_limits<double>::infinity(); }

// "sane" = usable for a strict sign decision: finite and not astronomically large.
bool sane(double x) { return std::isfinite(x) && std::fabs(x) <= cf::kHuge; }

// 95% half-width from batch means of serially correlated per-unit values.
double batch_ci95(const std::vector<double>& units) {
    const std::size_t nb = 50;
    if (units.size() < 2 * nb) return qnan();
    std::size_t bs = units.size() / nb;
    double means[nb];
    for (std::size_t b = 0; b < nb; ++b) {
        double s = 0;
        for (std::size_t i = b * bs; i < (b + 1) * bs; ++i) s += units[i];
        means[b] = s / static_cast<double>(bs);
    }
    double mean = 0;
    for (double m : means) mean += m;
    mean /= nb;
    double var = 0;
    for (double m : means) var += (m - mean) * (m - mean);
    var /= (nb - 1);
    return 1.96 * std::sqrt(var / nb);
}

}  // namespace

RegionX region_of(const ReturnBlock& blk) {
    if (blk.i1 >= 1) return RegionX::X0;
    if (blk.i2 >= 1) return RegionX::X1;
    return RegionX::X2;
}

A0Report check_A0(const LemonTable& table) {
    double lo = std::fmax(table.R - 1.0, 1.0);
    double slack = std::fmin(table.b - lo, table.R - table.b);
    return {slack > 0, slack};
}

AssumptionReport check_assumptions(const ReturnBlock& blk) {
    AssumptionReport out;
    out.region = region_of(blk);
    double i0 = static_cast<double>(blk.i0);
    double i1 = static_cast<double>(blk.i1);
    double i2 = static_cast<double>(blk.i2);
    switch (out.region) {
        case RegionX::X0: {
            if (blk.i0 < 1 || blk.i2 < 1) {
                out.ok = false;
                out.margin = qnan();
                break;
            }
            double share = i1 / (1.0 + i1) * blk.d1;
            double m1 = (1.0 - 1.0 / (2.0 * (1.0 + i0))) * blk.d0 + share - blk.tau0;
            double m2 = (1.0 - 1.0 / (2.0 * i2)) * blk.d2 + share - blk.tau1;
            out.margin = std::fmin(m1, m2);
            out.ok = out.margin > 0;
            break;
        }
        case RegionX::X1: {
            double m1 = blk.d1 - blk.d0 / (1.0 + i0);
            double m2 = (1.0 - 1.0 / (2.0 * (1.0 + i0))) * blk.d0 + blk.d1 +
                        (1.0 - 1.0 / (2.0 * i2)) * blk.d2 - (blk.tau0 + blk.tau1);
            out.margin = std::fmin(m1, m2);
            out.ok = out.margin > 0;
            break;
        }
        case RegionX::X2: {
            out.margin = blk.d1 / 2.0 - blk.tau0;
            out.ok = out.margin >= 0;
            break;
        }
    }
    return out;
}

ConditionReport check_conditions(const ReturnBlock& blk) {
    ConditionReport r;
    r.region = region_of(blk);

    double hatd0 = blk.hat_d0();
    double hatd1 = blk.hat_d1();
    double c = -2.0 / hatd1;
    bool hasF = blk.i2 >= 1;

    r.g0 = blk.tau0 - blk.d0 - static_cast<double>(blk.i1) * hatd1;
    r.g0p = r.g0 + hatd0 / 2.0;
    r.g1 = blk.bar_tau1();
    r.v = cf::recip(cf::padd(c, cf::recip(r.g0)));
    r.u = cf::recip(cf::padd(c, cf::recip(r.g0p)));
    r.sd = r.g1 + r.v;
    r.sp = r.g1 + r.u;
    r.thrF = hasF ? -blk.d2 / (2.0 * static_cast<double>(blk.i2)) : qnan();
    r.y0 = 1.0 / r.g0 - 2.0 / hatd1;
    r.yp = 1.0 / r.g0p - 2.0 / hatd1;
    r.h1 = hasF ? r.g1 + blk.d2 / (2.0 * static_cast<double>(blk.i2)) : pinf();

    r.condD1 = r.sd > 0;
    r.condF1 = hasF && r.sd < r.thrF;
    r.condD2 = r.sp > 0;
    r.condF2 = hasF && r.sp < r.thrF;
    r.condP1 = r.u > r.v;
    r.condP2 = r.condD1 && r.condF2;
    r.coneOk = (r.condD1 && r.condD2 && r.condP1) || (r.condF1 && r.condF2 && r.condP1) ||
               r.condP2;

    r.d1a = r.g1 > 0 && r.y0 > 0;
    r.d1b = r.g1 > 0 && r.y0 + 1.0 / r.g1 < 0;
    r.d1c = r.g1 < 0 && r.y0 + 1.0 / r.g1 < 0 && r.y0 > 0;
    r.f1a = r.h1 < 0 && r.y0 < 0;
    r.f1b = r.h1 < 0 && r.y0 + 1.0 / r.h1 > 0;
    r.f1c = r.h1 > 0 && r.y0 + 1.0 / r.h1 > 0 && r.y0 < 0;
    r.d2a = r.g1 > 0 && r.yp > 0;
    r.d2b = r.g1 > 0 && r.yp + 1.0 / r.g1 < 0;
    r.d2c = r.g1 < 0 && r.yp + 1.0 / r.g1 < 0 && r.yp > 0;
    r.f2a = r.h1 < 0 && r.yp < 0;
    r.f2b = r.h1 < 0 && r.yp + 1.0 / r.h1 > 0;
    r.f2c = r.h1 > 0 && r.yp + 1.0 / r.h1 > 0 && r.yp < 0;
    r.p1a = r.g0p < hatd1 / 2.0;
    r.p1b = r.g0 > hatd1 / 2.0;

    r.detailAgrees = r.condD1 == (r.d1a || r.d1b || r.d1c) &&
                     r.condF1 == (r.f1a || r.f1b || r.f1c) &&
                     r.condD2 == (r.d2a || r.d2b || r.d2c) &&
                     r.condF2 == (r.f2a || r.f2b || r.f2c) && r.condP1 == (r.p1a || r.p1b);

    r.regionAssumption = check_assumptions(blk).ok;

    double margin = pinf();
    auto fold = [&margin](double m) { margin = std::fmin(margin, std::fabs(m)); };
    fold(r.sd);
    fold(r.sp);
    fold(r.u - r.v);
    fold(r.g1);
    fold(r.y0);
    fold(r.yp);
    fold(r.y0 + 1.0 / r.g1);
    fold(r.yp + 1.0 / r.g1);
    fold(r.g0p - hatd1 / 2.0);
    fold(r.g0 - hatd1 / 2.0);
    fold(r.g0);
    fold(r.g0p);
    if (hasF) {
        fold(r.sd - r.thrF);
        fold(r.sp - r.thrF);
        fold(r.h1);
        fold(r.y0 + 1.0 / r.h1);
        fold(r.yp + 1.0 / r.h1);
    }
    r.minMargin = margin;

    bool allSane = sane(r.g0) && sane(r.g0p) && sane(r.g1) && sane(r.u) && sane(r.v) &&
                   sane(r.sd) && sane(r.sp) && sane(r.y0) && sane(r.yp) && (!hasF || sane(r.h1));
    r.nearTie = !allSane || margin < kTieTol;
    return r;
}

ConeCheck verify_cone(const ReturnBlock& blk) {
    ConeCheck out;
    out.bp = curvature_return(0.0, blk);
    out.bd = curvature_return(1.0 / blk.d0, blk);
    out.upper = 1.0 / blk.d2;
    bool finite = std::isfinite(out.bp) && std::isfinite(out.bd);
    out.minMargin = finite ? std::min({out.bp, out.bd - out.bp, out.upper - out.bd}) : qnan();
    out.ok = finite && out.bp > 0 && out.bd > out.bp && out.upper > out.bd;
    out.nearTie = !finite || std::fabs(out.minMargin) < kTieTol;
    ConditionReport cr = check_conditions(blk);
    out.conditionsNearTie = cr.nearTie;
    out.agreesWithConditions = out.ok == cr.coneOk;
    return out;
}

ChordGapReport check_chord_gap(const ReturnBlock& blk) {
    ChordGapReport out;
    out.applicable = blk.i1 == 0;
    out.margin = blk.tau0 + blk.tau1 - blk.d0 - blk.d2;
    out.ok = out.margin > 0;
    return out;
}

Period2Report period2_classify(const LemonTable& table) {
    Period2Report out;
    out.apexSmall = PhasePoint{ArcId::Unit, table.lenGamma1 / 2.0, 0.0};
    out.apexBig = PhasePoint{ArcId::Big, table.lenGamma1 + table.lenGammaR / 2.0, 0.0};
    out.tau = 1.0 + table.R - table.b;

    StepResult r1 = billiard_step(table, out.apexSmall);
    if (!r1.ok()) throw std::runtime_error("period2_classify: singular apex step");
    Mat2 m1 = tangent_matrix(table, out.apexSmall, r1);
    StepResult r2 = billiard_step(table, r1.next);
    if (!r2.ok()) throw std::runtime_error("period2_classify: singular apex step");
    Mat2 m2 = tangent_matrix(table, r1.next, r2);
    Mat2 m = m2 * m1;
    out.trace = m.a11 + m.a22;

    double gs = table.b - table.R;
    double gb = (table.b - 1.0) / table.R;
    out.traceClosedForm = 4.0 * gs * gb - 2.0;

    const double tol = 1e-9;
    double t = std::fabs(out.trace);
    out.cls = t > 2.0 + tol   ? Period2Class::Hyperbolic
              : t < 2.0 - tol ? Period2Class::Elliptic
                              : Period2Class::Parabolic;
    return out;
}

LyapunovEstimate lyapunov(const LemonTable& table, const PhasePoint& x0, long n,
                          LyapunovMode mode, const WalkCaps& caps) {
    LyapunovEstimate out;
    double ws = 1.0, wphi = 0.0;
    KahanSum logSum;
    std::vector<double> unitLogs;

    // Advances the persistent tangent vector through one collision; returns the
    // log growth, or NaN on a singular step.
    PhasePoint cur = x0;
    auto transport_one = [&](double& lg) -> bool {
        StepResult r = billiard_step(table, cur);
        if (!r.ok()) return false;
        Mat2 m = tangent_matrix(table, cur, r);
        double ns = m.a11 * ws + m.a12 * wphi;
        double nphi = m.a21 * ws + m.a22 * wphi;
        double g = std::hypot(ns, nphi);
        if (!(g > 0) || !std::isfinite(g)) return false;
        lg = std::log(g);
        ws = ns / g;
        wphi = nphi / g;
        cur = r.next;
        return true;
    };

    if (mode == LyapunovMode::FullMap) {
        unitLogs.reserve(static_cast<std::size_t>(n));
        for (long i = 0; i < n; ++i) {
            double lg;
            if (!transport_one(lg)) {
                out.truncated = true;
                break;
            }
            logSum.add(lg);
            unitLogs.push_back(lg);
        }
        out.n = static_cast<long>(unitLogs.size());
        out.meanReturnTime = 1.0;
        if (out.n < 100) {
            out.chi = qnan();
            out.ci95 = qnan();
            return out;
        }
        out.chi = logSum.value() / static_cast<double>(out.n);
        out.ci95 = batch_ci95(unitLogs);
        return out;
    }

    PointResult m0 = find_m_point(table, x0, caps);
    if (!m0.ok()) {
        out.truncated = true;
        out.chi = qnan();
        out.ci95 = qnan();
        return out;
    }
    cur = m0.point;
    unitLogs.reserve(static_cast<std::size_t>(n));
    long totalCollisions = 0;
    for (long k = 0; k < n; ++k) {
        ReturnResult ret = return_map(table, cur, caps);
        if (!ret.ok()) {
            out.truncated = true;
            break;
        }
        double retLog = 0;
        bool good = true;
        for (long j = 0; j < ret.collisions; ++j) {
            double lg;
            if (!transport_one(lg)) {
                good = false;
                break;
            }
            retLog += lg;
        }
        if (!good) {
            out.truncated = true;
            break;
        }
        totalCollisions += ret.collisions;
        logSum.add(retLog);
        unitLogs.push_back(retLog);
    }
    out.n = static_cast<long>(unitLogs.size());
    out.blocks = out.n;
    out.meanReturnTime = out.n > 0 ? static_cast<double>(totalCollisions) / static_cast<double>(out.n) : qnan();
    if (out.n < 100) {
        out.chi = qnan();
        out.ci95 = qnan();
        return out;
    }
    out.chi = logSum.value() / static_cast<double>(out.n);
    out.ci95 = batch_ci95(unitLogs);
    return out;
}

ConeSequenceResult cone_sequence(const LemonTable& table, const PhasePoint& x, int depth,
                                 const WalkCaps& caps) {
    ConeSequenceResult out;
    double upper = 1.0 / d_of(table, x);
    cf::Mobius m = cf::Mobius::identity();
    PhasePoint cur = x;
    double prevBp = 0, prevBd = 0;
    out.minIncrement = pinf();
    out.minGap = pinf();
    out.minRange = pinf();
    bool allFinite = true;
    for (int k = 1; k <= depth; ++k) {
        ReturnResult ret = return_map_back(table, cur, caps);
        if (!ret.ok()) {
            out.status = ret.status;
            break;
        }
        m = m * block_mobius_matrix(ret.block);
        m.renormalize();
        double bp = m.apply(0.0);
        double bd = m.apply(1.0 / ret.block.d0);
        allFinite = allFinite && std::isfinite(bp) && std::isfinite(bd);
        if (k >= 2) {
            out.minIncrement = std::fmin(out.minIncrement, std::fmin(bp - prevBp, prevBd - bd));
        }
        out.minGap = std::fmin(out.minGap, bd - bp);
        out.minRange = std::fmin(out.minRange, std::fmin(bp, upper - bd));
        out.bp.push_back(bp);
        out.bd.push_back(bd);
        prevBp = bp;
        prevBd = bd;
        cur = ret.image;
        out.depth = k;
    }
    const double floorTol = -1e-13;
    out.ok = out.depth >= 1 && allFinite && out.minIncrement >= floorTol &&
             out.minGap >= floorTol && out.minRange >= floorTol;
    return out;
}

namespace {

RStarDiagnostics rstar_diagnostics(const LemonTable& table, std::uint64_t seed) {
    RStarDiagnostics d;
    d.nStar = static_cast<long>(std::floor(kPi / table.halfAngleSmall));
    const double eps = 0.05;
    const long maxSteps = 500000;
    const long maxExcursions = 4000;
    WalkCaps caps;
    SplitMix64 rng{derive_stream(seed, 0xD1A6)};
    long steps = 0;
    long prevN = -1;

    auto fresh_entry = [&](PhasePoint& entry) -> bool {
        PointResult pe = find_first_entry(table, mu_sample(table, rng), caps);
        if (!pe.ok()) return false;
        steps += pe.steps;
        entry = pe.point;
        prevN = -1;
        return true;
    };

    PhasePoint entry;
    if (!fresh_entry(entry)) return d;

    for (long exc = 0; exc < maxExcursions && steps < maxSteps; ++exc) {
        // Small-arc run: count n, note the exit point and the transfer flight.
        long n = 0;
        PhasePoint p = entry;
        PhasePoint exitPoint = entry;
        double tau0 = 0;
        bool okRun = true;
        while (true) {
            StepResult r = billiard_step(table, p);
            ++steps;
            if (!r.ok() || steps >= maxSteps || n > caps.etaCap) {
                okRun = false;
                break;
            }
            if (r.next.arcId == ArcId::Big) {
                tau0 = r.event.tau;
                exitPoint = p;
                p = r.next;
                break;
            }
            ++n;
            p = r.next;
        }
        if (!okRun) {
            if (!fresh_entry(entry)) break;
            continue;
        }

        ++d.nEntries;
        if (n >= d.nStar) ++d.nEntryBig;
        if (prevN >= d.nStar) {
            ++d.nEntryPairs;
            if (n >= d.nStar - 1) ++d.nEntryPairsOk;
        }
        prevN = n;

        double cornerDist = std::fmin(exitPoint.s, table.lenGamma1 - exitPoint.s);

        // Big-arc run.
        double d1 = d_of(table, p);
        long i1 = 0;
        double tau1 = 0;
        while (true) {
            StepResult r = billiard_step(table, p);
            ++steps;
            if (!r.ok() || steps >= maxSteps || i1 > caps.etaCap) {
                okRun = false;
                break;
            }
            if (r.next.arcId == ArcId::Unit) {
                tau1 = r.event.tau;
                p = r.next;
                break;
            }
            ++i1;
            p = r.next;
        }
        if (!okRun) {
            if (!fresh_entry(entry)) break;
            continue;
        }

        if (d1 <= 4.0) {
            ++d.nCornerBlocks;
            if (cornerDist < eps) ++d.nCornerNear;
        }
        ++d.nExcursion;
        if (tau0 + 2.0 * static_cast<double>(i1) * d1 + tau1 <= table.chordAB + eps)
            ++d.nExcursionOk;

        entry = p;
    }
    return d;
}

}  // namespace

RStarResult find_R_star(double chordAB, const std::vector<double>& Rgrid, long samples,
                        std::uint64_t seed) {
    if (!(chordAB > 0.0) || !(chordAB < 1.0))
        throw std::invalid_argument("find_R_star: corner chord must lie in (0, 1)");
    if (Rgrid.empty()) throw std::invalid_argument("find_R_star: empty radius grid");
    for (double R : Rgrid)
        if (!(R > 2.0)) throw std::invalid_argument("find_R_star: grid radii must exceed 2");

    std::vector<double> grid = Rgrid;
    std::sort(grid.begin(), grid.end());

    RStarResult out;
    WalkCaps caps;
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
        RStarRow row;
        row.R = grid[gi];
        LemonTable table = table_from_chord(chordAB, row.R);
        row.b = table.b;
        A0Report a0 = check_A0(table);
        row.a0ok = a0.ok;
        row.a0slack = a0.slack;

        bool hardFail = !a0.ok;
        if (!hardFail) {
            SplitMix64 rng{derive_stream(seed, gi)};
            long attempts = 0;
            long maxAttempts = samples * 50;
            while (row.nBlocks < samples && attempts < maxAttempts) {
                ++attempts;
                PointResult mp = find_m_point(table, mu_sample(table, rng), caps);
                if (!mp.ok()) {
                    (mp.status == InducedStatus::Singular ? row.nSingular : row.nUnresolved)++;
                    continue;
                }
                ReturnResult ret = return_map(table, mp.point, caps);
                if (!ret.ok()) {
                    (ret.status == InducedStatus::Singular ? row.nSingular : row.nUnresolved)++;
                    continue;
                }
                ++row.nBlocks;
                AssumptionReport ar = check_assumptions(ret.block);
                ConeCheck cc = verify_cone(ret.block);
                if (cc.nearTie || cc.conditionsNearTie) {
                    ++row.nNearTie;
                    continue;
                }
                bool bad = false;
                if (!ar.ok) {
                    ++row.nAssumptionFail;
                    bad = true;
                }
                bool calculusOk = cc.ok == cc.agreesWithConditions;
                if (!calculusOk) ++row.nCondFail;
                if (!cc.ok) {
                    ++row.nConeFail;
                    bad = true;
                }
                if (bad) {
                    hardFail = true;
                    break;
                }
            }
        }
        row.passed = !hardFail && row.a0ok;
        out.rows.push_back(row);
        if (row.passed && !out.found) {
            out.found = true;
            out.Rstar = row.R;
            out.b = row.b;
        }
    }
    if (out.found) {
        LemonTable table = table_from_chord(chordAB, out.Rstar);
        out.diagnostics = rstar_diagnostics(table, seed);
    }
    return out;
}

}  // namespace lemon
