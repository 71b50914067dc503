#include "lemon/scan.hpp"

#include <atomic>
#include <cmath>
#include <ctime>
#include <limits>
#include <thread>

#include "lemon/util.hpp"

namespace lemon {

namespace {

double qnan() { return std::numeric_limits<double>::quiet_NaN(); }

double grid_value(double lo, double hi, int count, int idx) {
    if (count <= 1) return lo;
    return lo + (hi - lo) * static_cast<double>(idx) / static_cast<double>(count - 1);
}

ScanCell compute_cell(const ScanConfig& cfg, int bi, int ri, long cellIdx) {
    ScanCell cell;
    cell.b = grid_value(cfg.bMin, cfg.bMax, cfg.bCount, bi);
    cell.R = grid_value(cfg.RMin, cfg.RMax, cfg.RCount, ri);

    LemonTable table;
    try {
        table = build_table(cell.b, cell.R);
    } catch (const std::invalid_argument&) {
        cell.verdict = ScanVerdict::Inconclusive;
        cell.fracA1 = cell.fracA2 = cell.fracA3 = cell.fracCone = qnan();
        cell.chi = cell.chiCI = cell.meanReturnTime = qnan();
        return cell;
    }

    A0Report a0 = check_A0(table);
    Period2Report p2 = period2_classify(table);

    WalkCaps caps;
    BlockSample sample = sample_return_blocks(table, cfg.samples, cfg.seed,
                                              static_cast<std::uint64_t>(cellIdx) * 4 + 1, caps);
    cell.nBlocks = static_cast<long>(sample.blocks.size());
    cell.nSingular = sample.nSingular;

    long nA1 = 0, nA1ok = 0, nA2 = 0, nA2ok = 0, nA3 = 0, nA3ok = 0;
    long nCone = 0, nConeOk = 0;
    double collisionSum = 0;
    for (const ReturnBlock& blk : sample.blocks) {
        collisionSum += static_cast<double>(blk.i0 + blk.i1 + blk.i2 + 2);
        ConeCheck cc = verify_cone(blk);
        if (cc.nearTie || cc.conditionsNearTie) {
            ++cell.nNearTie;
            continue;
        }
        AssumptionReport ar = check_assumptions(blk);
        switch (ar.region) {
            case RegionX::X0:
                ++nA1;
                nA1ok += ar.ok ? 1 : 0;
                break;
            case RegionX::X1:
                ++nA2;
                nA2ok += ar.ok ? 1 : 0;
                break;
            case RegionX::X2:
                ++nA3;
                nA3ok += ar.ok ? 1 : 0;
                break;
        }
        ++nCone;
        nConeOk += cc.ok ? 1 : 0;
    }
    cell.fracA1 = nA1 > 0 ? static_cast<double>(nA1ok) / static_cast<double>(nA1) : 1.0;
    cell.fracA2 = nA2 > 0 ? static_cast<double>(nA2ok) / static_cast<double>(nA2) : 1.0;
    cell.fracA3 = nA3 > 0 ? static_cast<double>(nA3ok) / static_cast<double>(nA3) : 1.0;
    cell.fracCone = nCone > 0 ? static_cast<double>(nConeOk) / static_cast<double>(nCone) : 1.0;
    cell.meanReturnTime =
        cell.nBlocks > 0 ? collisionSum / static_cast<double>(cell.nBlocks) : qnan();

    SplitMix64 rng{derive_stream(cfg.seed, static_cast<std::uint64_t>(cellIdx) * 4 + 2)};
    LyapunovEstimate lyap =
        lyapunov(table, mu_sample(table, rng), cfg.lyapunovSteps, LyapunovMode::FullMap, caps);
    cell.chi = lyap.chi;
    cell.chiCI = lyap.ci95;

    bool condAllPass = a0.ok && cell.nBlocks > 0 && cell.fracA1 == 1.0 && cell.fracA2 == 1.0 &&
                       cell.fracA3 == 1.0 && cell.fracCone == 1.0;
    bool chiPositive = std::isfinite(cell.chi) && std::isfinite(cell.chiCI) &&
                       cell.chi - cell.chiCI > 0;

    bool ellipticEvidence = false;
    if (p2.cls == Period2Class::Elliptic) {
        PhasePoint near =
            make_phase(table, table.lenGamma1 / 2.0 + 1e-3, 1e-3);
        LyapunovEstimate nearLyap =
            lyapunov(table, near, cfg.lyapunovSteps, LyapunovMode::FullMap, caps);
        ellipticEvidence = std::isfinite(nearLyap.chi) && std::fabs(nearLyap.chi) < 1e-2;
    }

    if (condAllPass && chiPositive) {
        cell.verdict = ScanVerdict::HyperbolicEvidence;
    } else if (ellipticEvidence) {
        cell.verdict = ScanVerdict::EllipticEvidence;
    } else if (!a0.ok || cell.fracA1 < 1.0 || cell.fracA2 < 1.0 || cell.fracA3 < 1.0 ||
               cell.fracCone < 1.0) {
        cell.verdict = ScanVerdict::ConditionFail;
    } else {
        cell.verdict = ScanVerdict::Inconclusive;
    }
    return cell;
}

}  // namespace

const char* verdict_name(ScanVerdict v) {
    switch (v) {
        case ScanVerdict::HyperbolicEvidence: return "HyperbolicEvidence";
        case ScanVerdict::EllipticEvidence: return "EllipticEvidence";
        case ScanVerdict::ConditionFail: return "ConditionFail";
        case ScanVerdict::Inconclusive: return "Inconclusive";
    }
    return "Inconclusive";
}

std::vector<ScanCell> run_scan(const ScanConfig& cfg) {
    long total = static_cast<long>(cfg.bCount) * static_cast<long>(cfg.RCount);
    std::vector<ScanCell> cells(static_cast<std::size_t>(total));
    int workers = std::max(1, cfg.workers);

    std::atomic<long> next{0};
    auto worker = [&]() {
        while (true) {
            long idx = next.fetch_add(1);
            if (idx >= total) break;
            int bi = static_cast<int>(idx / cfg.RCount);
            int ri = static_cast<int>(idx % cfg.RCount);
            cells[static_cast<std::size_t>(idx)] = compute_cell(cfg, bi, ri, idx);
        }
    };

    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }
    return cells;
}

void write_scan_csv(std::ostream& os, const ScanConfig& cfg, const std::vector<ScanCell>& cells) {
    os << "# tool=lemonbl version=1.0.0\n";
    os << "# config=bMin=" << fmt_g17(cfg.bMin) << ",bMax=" << fmt_g17(cfg.bMax)
       << ",bCount=" << cfg.bCount << ",RMin=" << fmt_g17(cfg.RMin)
       << ",RMax=" << fmt_g17(cfg.RMax) << ",RCount=" << cfg.RCount
       << ",samples=" << cfg.samples << ",lyapunovSteps=" << cfg.lyapunovSteps << "\n";
    os << "# seed=" << cfg.seed << "\n";
    std::time_t now = std::time(nullptr);
    char stamp[32] = "unknown";
    if (std::tm* tm = std::gmtime(&now)) std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", tm);
    os << "# generated=" << stamp << "\n";
    os << "b,R,verdict,fracA1,fracA2,fracA3,fracCone,chi,chiCI,meanReturnTime,nBlocks,nNearTie,"
          "nSingular\n";
    for (const ScanCell& c : cells) {
        os << fmt_g17(c.b) << ',' << fmt_g17(c.R) << ',' << verdict_name(c.verdict) << ','
           << fmt_g17(c.fracA1) << ',' << fmt_g17(c.fracA2) << ',' << fmt_g17(c.fracA3) << ','
           << fmt_g17(c.fracCone) << ',' << fmt_g17(c.chi) << ',' << fmt_g17(c.chiCI) << ','
           << fmt_g17(c.meanReturnTime) << ',' << c.nBlocks << ',' << c.nNearTie << ','
           << c.nSingular << '\n';
    }
}

}  // namespace lemon
