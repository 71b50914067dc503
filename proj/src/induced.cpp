#include "lemon/induced.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lemon {

namespace {

InducedStatus status_of(const StepError& e) {
    (void)e;
    return InducedStatus::Singular;
}

std::array<double, 5> hat_entries(const ReturnBlockHat& b) {
    return {b.hat_tau1(), b.hat_R1(), b.hat_tau0(), b.hat_R0(),
            -static_cast<double>(b.j0) * b.hat_d0()};
}

std::array<double, 7> return_entries(const ReturnBlock& b) {
    return {b.d2, 2.0 * static_cast<double>(b.i2) / b.d2, b.bar_tau1(), b.hat_R1(),
            b.hat_tau0(), b.hat_R0(), -static_cast<double>(b.i0) * b.hat_d0()};
}

}  // namespace

CellResult classify_cell(const LemonTable& table, const PhasePoint& x, const WalkCaps& caps) {
    if (x.arcId != ArcId::Unit)
        throw std::invalid_argument("classify_cell: point is not on the small arc");
    CellResult out;

    EtaResult fwd = eta(table, x, caps.etaCap);
    if (!fwd.ok()) {
        out.status = fwd.exceeded ? InducedStatus::Unresolved : InducedStatus::Singular;
        return out;
    }

    long k = 0;
    PhasePoint cur = x;
    while (k < caps.walkCap) {
        StepResult r = billiard_step_back(table, cur);
        if (!r.ok()) {
            out.status = status_of(*r.error);
            return out;
        }
        if (r.next.arcId != ArcId::Unit) break;
        ++k;
        cur = r.next;
    }
    if (k >= caps.walkCap) {
        out.status = InducedStatus::Unresolved;
        return out;
    }

    out.cell = CellIndex{k + fwd.count, k};
    return out;
}

MembershipResult is_in_m1hat(const LemonTable& table, const PhasePoint& x) {
    MembershipResult out;
    if (x.arcId != ArcId::Unit) return out;  // inSet = false
    StepResult r = billiard_step_back(table, x);
    if (!r.ok()) {
        out.status = status_of(*r.error);
        return out;
    }
    out.inSet = r.next.arcId == ArcId::Big;
    return out;
}

MembershipResult is_in_m(const LemonTable& table, const PhasePoint& x, const WalkCaps& caps) {
    MembershipResult out;
    if (x.arcId != ArcId::Unit) return out;
    CellResult c = classify_cell(table, x, caps);
    if (!c.ok()) {
        out.status = c.status;
        return out;
    }
    out.inSet = c.cell.phase == (c.cell.n + 1) / 2;
    return out;
}

PointResult find_first_entry(const LemonTable& table, const PhasePoint& x, const WalkCaps& caps) {
    PointResult out;
    PhasePoint cur = x;
    for (long step = 0; step < caps.walkCap; ++step) {
        StepResult r = billiard_step(table, cur);
        if (!r.ok()) {
            out.status = status_of(*r.error);
            out.steps = step;
            return out;
        }
        bool entry = cur.arcId == ArcId::Big && r.next.arcId == ArcId::Unit;
        cur = r.next;
        ++out.steps;
        if (entry) {
            out.point = cur;
            return out;
        }
    }
    out.status = InducedStatus::Unresolved;
    return out;
}

PointResult find_m_point(const LemonTable& table, const PhasePoint& x, const WalkCaps& caps) {
    PointResult entry = find_first_entry(table, x, caps);
    if (!entry.ok()) return entry;

    EtaResult run = eta(table, entry.point, caps.etaCap);
    if (!run.ok()) {
        entry.status = run.exceeded ? InducedStatus::Unresolved : InducedStatus::Singular;
        return entry;
    }
    long advance = (run.count + 1) / 2;
    PhasePoint cur = entry.point;
    for (long i = 0; i < advance; ++i) {
        StepResult r = billiard_step(table, cur);
        if (!r.ok()) {
            entry.status = status_of(*r.error);
            return entry;
        }
        cur = r.next;
        ++entry.steps;
    }
    entry.point = cur;
    return entry;
}

HatReturnResult hat_return(const LemonTable& table, const PhasePoint& x, const WalkCaps& caps) {
    if (x.arcId != ArcId::Unit)
        throw std::invalid_argument("hat_return: point is not on the small arc");
    HatReturnResult out;
    out.block.d0 = d_of(table, x);

    // Small-arc run: j0 further same-arc steps, then the transfer flight tau0.
    PhasePoint cur = x;
    long j0 = 0;
    while (true) {
        if (j0 > caps.etaCap) {
            out.status = InducedStatus::Unresolved;
            return out;
        }
        StepResult r = billiard_step(table, cur);
        if (!r.ok()) {
            out.status = status_of(*r.error);
            return out;
        }
        if (r.next.arcId == ArcId::Big) {
            out.block.tau0 = r.event.tau;
            cur = r.next;
            break;
        }
        ++j0;
        cur = r.next;
    }
    out.block.j0 = j0;
    out.block.d1 = d_of(table, cur);

    long j1 = 0;
    while (true) {
        if (j1 > caps.etaCap) {
            out.status = InducedStatus::Unresolved;
            return out;
        }
        StepResult r = billiard_step(table, cur);
        if (!r.ok()) {
            out.status = status_of(*r.error);
            return out;
        }
        if (r.next.arcId == ArcId::Unit) {
            out.block.tau1 = r.event.tau;
            cur = r.next;
            break;
        }
        ++j1;
        cur = r.next;
    }
    out.block.j1 = j1;
    out.image = cur;
    return out;
}

ReturnResult return_map(const LemonTable& table, const PhasePoint& x, const WalkCaps& caps) {
    if (x.arcId != ArcId::Unit)
        throw std::invalid_argument("return_map: point is not on the small arc");
    ReturnResult out;

    HatReturnResult hat = hat_return(table, x, caps);
    if (!hat.ok()) {
        out.status = hat.status;
        return out;
    }
    out.block.i0 = hat.block.j0;
    out.block.i1 = hat.block.j1;
    out.block.tau0 = hat.block.tau0;
    out.block.tau1 = hat.block.tau1;
    out.block.d0 = hat.block.d0;
    out.block.d1 = hat.block.d1;

    PhasePoint x2 = hat.image;
    out.block.d2 = d_of(table, x2);

    EtaResult run = eta(table, x2, caps.etaCap);
    if (!run.ok()) {
        out.status = run.exceeded ? InducedStatus::Unresolved : InducedStatus::Singular;
        return out;
    }
    long i2 = (run.count + 1) / 2;
    out.block.i2 = i2;

    PhasePoint cur = x2;
    for (long i = 0; i < i2; ++i) {
        StepResult r = billiard_step(table, cur);
        if (!r.ok()) {
            out.status = status_of(*r.error);
            return out;
        }
        cur = r.next;
    }
    out.image = cur;
    out.collisions = out.block.i0 + out.block.i1 + i2 + 2;
    return out;
}

ReturnResult return_map_back(const LemonTable& table, const PhasePoint& x, const WalkCaps& caps) {
    if (x.arcId != ArcId::Unit)
        throw std::invalid_argument("return_map_back: point is not on the small arc");
    ReturnResult out;
    out.block.d2 = d_of(table, x);

    // Back to the first-entry point of the current run.
    CellResult cell = classify_cell(table, x, caps);
    if (!cell.ok()) {
        out.status = cell.status;
        return out;
    }
    if (cell.cell.phase != (cell.cell.n + 1) / 2) {
        out.status = InducedStatus::Unresolved;  // x is not on the midpoint section
        return out;
    }
    out.block.i2 = cell.cell.phase;
    PhasePoint cur = x;
    for (long i = 0; i < cell.cell.phase; ++i) {
        StepResult r = billiard_step_back(table, cur);
        if (!r.ok()) {
            out.status = status_of(*r.error);
            return out;
        }
        cur = r.next;
    }

    // Back across the big-arc run.  The arriving flight is tau1.
    StepResult r = billiard_step_back(table, cur);
    if (!r.ok()) {
        out.status = status_of(*r.error);
        return out;
    }
    if (r.next.arcId != ArcId::Big) {
        out.status = InducedStatus::Unresolved;
        return out;
    }
    out.block.tau1 = r.event.tau;
    cur = r.next;
    out.block.d1 = d_of(table, cur);

    long i1 = 0;
    while (true) {
        if (i1 > caps.etaCap) {
            out.status = InducedStatus::Unresolved;
            return out;
        }
        StepResult rb = billiard_step_back(table, cur);
        if (!rb.ok()) {
            out.status = status_of(*rb.error);
            return out;
        }
        if (rb.next.arcId == ArcId::Unit) {
            out.block.tau0 = rb.event.tau;
            cur = rb.next;
            break;
        }
        ++i1;
        cur = rb.next;
    }
    out.block.i1 = i1;
    out.block.d0 = d_of(table, cur);

    // cur is the exit point of y's run; r more back-steps reach the run entry,
    // and y sits floor(r/2) back-steps behind the exit point.
    long rcount = 0;
    std::vector<PhasePoint> chain{cur};
    while (true) {
        if (rcount > caps.etaCap) {
            out.status = InducedStatus::Unresolved;
            return out;
        }
        StepResult rb = billiard_step_back(table, cur);
        if (!rb.ok()) {
            out.status = status_of(*rb.error);
            return out;
        }
        if (rb.next.arcId != ArcId::Unit) break;
        ++rcount;
        cur = rb.next;
        chain.push_back(cur);
    }
    out.block.i0 = rcount / 2;
    out.image = chain[static_cast<std::size_t>(rcount / 2)];
    out.collisions = out.block.i0 + out.block.i1 + out.block.i2 + 2;
    return out;
}

CurvatureResult curvature_return_unreduced(const LemonTable& table, const PhasePoint& x,
                                           long nCollisions, ProjValue b) {
    CurvatureResult out;
    out.value = cf::canon(b);
    PhasePoint cur = x;
    for (long i = 0; i < nCollisions; ++i) {
        StepResult r = billiard_step(table, cur);
        if (!r.ok()) {
            out.status = status_of(*r.error);
            return out;
        }
        out.value = cf::curvature_step(out.value, r.event.tau, r.event.refl);
        cur = r.next;
    }
    return out;
}

ProjValue curvature_hat_return(ProjValue b, const ReturnBlockHat& blk) {
    auto e = hat_entries(blk);
    return cf::eval_with_tail(std::span<const double>(e.data(), e.size()), b);
}

ProjValue curvature_return(ProjValue b, const ReturnBlock& blk) {
    auto e = return_entries(blk);
    return cf::eval_with_tail(std::span<const double>(e.data(), e.size()), b);
}

cf::Mobius block_mobius_matrix(const ReturnBlock& blk) {
    auto e = return_entries(blk);
    cf::Mobius m = cf::Mobius::identity();
    for (double v : e) m = m * cf::Mobius::entry(v);
    m = m * cf::Mobius::inversion();
    m.renormalize();
    return m;
}

BackwardCfResult backward_cf(const LemonTable& table, const PhasePoint& x, int maxDepth) {
    BackwardCfResult out;
    cf::Mobius m = cf::Mobius::identity();
    PhasePoint cur = x;
    double prev = std::numeric_limits<double>::quiet_NaN();
    int stable = 0;
    for (int depth = 1; depth <= maxDepth; ++depth) {
        StepResult r = billiard_step_back(table, cur);
        if (!r.ok()) {
            out.status = status_of(*r.error);
            return out;
        }
        m = m * cf::Mobius::entry(r.event.tau) * cf::Mobius::entry(r.event.refl);
        m.renormalize();
        cur = r.next;

        double trunc = m.apply(0.0);
        out.value = trunc;
        out.depthUsed = depth;
        if (std::isfinite(prev) || cf::is_infinite(prev)) {
            double delta = cf::circle_dist(cf::circle_chart(trunc), cf::circle_chart(prev));
            stable = delta < 1e-10 ? stable + 1 : 0;
            if (stable >= 3) {
                out.converged = true;
                return out;
            }
        }
        prev = trunc;
    }
    return out;
}

BlockSample sample_return_blocks(const LemonTable& table, long count, std::uint64_t masterSeed,
                                 std::uint64_t streamIdx, const WalkCaps& caps,
                                 long maxAttemptsFactor) {
    BlockSample out;
    out.blocks.reserve(static_cast<std::size_t>(count));
    out.starts.reserve(static_cast<std::size_t>(count));
    SplitMix64 rng{derive_stream(masterSeed, streamIdx)};
    long maxAttempts = count * maxAttemptsFactor;
    while (static_cast<long>(out.blocks.size()) < count && out.attempts < maxAttempts) {
        ++out.attempts;
        PhasePoint x0 = mu_sample(table, rng);
        PointResult m = find_m_point(table, x0, caps);
        if (!m.ok()) {
            (m.status == InducedStatus::Singular ? out.nSingular : out.nUnresolved)++;
            continue;
        }
        ReturnResult ret = return_map(table, m.point, caps);
        if (!ret.ok()) {
            (ret.status == InducedStatus::Singular ? out.nSingular : out.nUnresolved)++;
            continue;
        }
        out.blocks.push_back(ret.block);
        out.starts.push_back(m.point);
    }
    return out;
}

}  // namespace lemon
