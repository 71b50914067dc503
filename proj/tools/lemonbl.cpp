// lemonbl: numerical toolkit for two-lobe circular billiard tables.
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lemon/hyperbolicity.hpp"
#include "lemon/scan.hpp"
#include "lemon/util.hpp"

namespace {

constexpr const char* kVersion = "1.0.0";

// Exit codes: 0 ok, 1 internal error, 2 usage, 3 degenerate table,
// 4 sampling exhaustion (singular orbits / caps prevented the request).
constexpr int kExitDegenerate = 3;
constexpr int kExitExhausted = 4;

std::string iso_now() {
    std::time_t now = std::time(nullptr);
    char stamp[32] = "unknown";
    if (std::tm* tm = std::gmtime(&now)) std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", tm);
    return stamp;
}

void write_meta(std::ostream& os, const std::string& cmd, std::uint64_t seed, bool withSeed) {
    os << "# tool=lemonbl version=" << kVersion << "\n";
    os << "# cmd=" << cmd << "\n";
    if (withSeed) os << "# seed=" << seed << "\n";
    os << "# generated=" << iso_now() << "\n";
}

// Output sink: file when --out given, else stdout.
struct Sink {
    std::ofstream file;
    std::ostream* os = &std::cout;

    bool open(const std::string& path) {
        if (path.empty()) return true;
        file.open(path);
        if (!file) {
            std::cerr << "lemonbl: cannot open output file: " << path << "\n";
            return false;
        }
        os = &file;
        return true;
    }
};

// "min:max:count" or a comma list of values.
std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> out;
    if (text.find(':') != std::string::npos) {
        double lo = 0, hi = 0;
        long count = 0;
        char c1 = 0, c2 = 0;
        std::istringstream in(text);
        if (!(in >> lo >> c1 >> hi >> c2 >> count) || c1 != ':' || c2 != ':' || count < 1)
            throw CLI::ValidationError("grid", "expected min:max:count, got '" + text + "'");
        for (long i = 0; i < count; ++i)
            out.push_back(count == 1 ? lo
                                     : lo + (hi - lo) * static_cast<double>(i) /
                                               static_cast<double>(count - 1));
        return out;
    }
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    if (out.empty()) throw CLI::ValidationError("grid", "no values in '" + text + "'");
    return out;
}

const char* arc_name(lemon::ArcId a) { return a == lemon::ArcId::Unit ? "unit" : "big"; }

const char* period2_name(lemon::Period2Class c) {
    switch (c) {
        case lemon::Period2Class::Hyperbolic: return "hyperbolic";
        case lemon::Period2Class::Parabolic: return "parabolic";
        case lemon::Period2Class::Elliptic: return "elliptic";
    }
    return "?";
}

int default_workers() {
    if (const char* env = std::getenv("LEMONBL_WORKERS")) {
        int w = std::atoi(env);
        if (w >= 1) return w;
    }
    return 1;
}

using lemon::fmt_g17;

int run_table(double b, double R, double chord, bool useChord) {
    lemon::LemonTable table =
        useChord ? lemon::table_from_chord(chord, R) : lemon::build_table(b, R);
    lemon::A0Report a0 = lemon::check_A0(table);
    lemon::Period2Report p2 = lemon::period2_classify(table);
    std::cout << lemon::json_summary(table) << "\n";
    std::cout << "{\"radiusWindowOk\":" << (a0.ok ? "true" : "false")
              << ",\"radiusWindowSlack\":" << fmt_g17(a0.slack)
              << ",\"period2\":\"" << period2_name(p2.cls) << "\""
              << ",\"period2Trace\":" << fmt_g17(p2.trace)
              << ",\"period2Tau\":" << fmt_g17(p2.tau) << "}\n";
    return 0;
}

int run_orbit(double b, double R, double s, double phi, long n, const std::string& outPath,
              std::uint64_t seed, bool randomStart) {
    lemon::LemonTable table = lemon::build_table(b, R);
    Sink sink;
    if (!sink.open(outPath)) return 1;
    write_meta(*sink.os, "orbit", seed, randomStart);
    *sink.os << "step,arcId,s,phi,tau,d\n";

    lemon::PhasePoint cur;
    if (randomStart) {
        lemon::SplitMix64 rng{lemon::derive_stream(seed, 0)};
        cur = lemon::mu_sample(table, rng);
    } else {
        cur = lemon::make_phase(table, s, phi);
    }
    for (long i = 0; i < n; ++i) {
        lemon::StepResult r = lemon::billiard_step(table, cur);
        if (!r.ok()) {
            *sink.os << "# terminated="
                     << (r.error->kind == lemon::StepError::Kind::CornerHit ? "corner"
                                                                            : "tangential")
                     << " step=" << i << "\n";
            return 0;
        }
        *sink.os << i << ',' << arc_name(cur.arcId) << ',' << fmt_g17(cur.s) << ','
                 << fmt_g17(cur.phi) << ',' << fmt_g17(r.event.tau) << ',' << fmt_g17(r.event.d)
                 << '\n';
        cur = r.next;
    }
    return 0;
}

int run_blocks(double b, double R, long count, std::uint64_t seed, const std::string& outPath) {
    lemon::LemonTable table = lemon::build_table(b, R);
    lemon::BlockSample sample = lemon::sample_return_blocks(table, count, seed, 0);
    Sink sink;
    if (!sink.open(outPath)) return 1;
    write_meta(*sink.os, "blocks", seed, true);
    *sink.os << "i0,i1,i2,tau0,tau1,d0,d1,d2,hatD0,hatD1,hatTau0,barTau1\n";
    for (const lemon::ReturnBlock& blk : sample.blocks) {
        *sink.os << blk.i0 << ',' << blk.i1 << ',' << blk.i2 << ',' << fmt_g17(blk.tau0) << ','
                 << fmt_g17(blk.tau1) << ',' << fmt_g17(blk.d0) << ',' << fmt_g17(blk.d1) << ','
                 << fmt_g17(blk.d2) << ',' << fmt_g17(blk.hat_d0()) << ',' << fmt_g17(blk.hat_d1())
                 << ',' << fmt_g17(blk.hat_tau0()) << ',' << fmt_g17(blk.bar_tau1()) << '\n';
    }
    if (static_cast<long>(sample.blocks.size()) < count) {
        std::cerr << "lemonbl: collected " << sample.blocks.size() << " of " << count
                  << " blocks (" << sample.nSingular << " singular, " << sample.nUnresolved
                  << " unresolved)\n";
        return kExitExhausted;
    }
    return 0;
}

int run_check(double b, double R, long count, std::uint64_t seed, const std::string& outPath) {
    lemon::LemonTable table = lemon::build_table(b, R);
    lemon::A0Report a0 = lemon::check_A0(table);
    lemon::BlockSample sample = lemon::sample_return_blocks(table, count, seed, 0);
    Sink sink;
    if (!sink.open(outPath)) return 1;
    write_meta(*sink.os, "check", seed, true);
    *sink.os << "i0,i1,i2,region,assumptionOk,assumptionMargin,coneOk,coneBp,coneBd,coneUpper,"
                "calculusConeOk,agrees,nearTie\n";
    long nAssumFail = 0, nConeFail = 0, nTie = 0, nDisagree = 0;
    for (const lemon::ReturnBlock& blk : sample.blocks) {
        lemon::AssumptionReport ar = lemon::check_assumptions(blk);
        lemon::ConditionReport cr = lemon::check_conditions(blk);
        lemon::ConeCheck cc = lemon::verify_cone(blk);
        int region = ar.region == lemon::RegionX::X0 ? 0 : ar.region == lemon::RegionX::X1 ? 1 : 2;
        bool tie = cc.nearTie || cr.nearTie;
        *sink.os << blk.i0 << ',' << blk.i1 << ',' << blk.i2 << ',' << region << ','
                 << (ar.ok ? 1 : 0) << ',' << fmt_g17(ar.margin) << ',' << (cc.ok ? 1 : 0) << ','
                 << fmt_g17(cc.bp) << ',' << fmt_g17(cc.bd) << ',' << fmt_g17(cc.upper) << ','
                 << (cr.coneOk ? 1 : 0) << ',' << (cc.agreesWithConditions ? 1 : 0) << ','
                 << (tie ? 1 : 0) << '\n';
        if (tie) {
            ++nTie;
            continue;
        }
        if (!ar.ok) ++nAssumFail;
        if (!cc.ok) ++nConeFail;
        if (!cc.agreesWithConditions) ++nDisagree;
    }
    std::ostream& os = *sink.os;
    os << "# summary nBlocks=" << sample.blocks.size() << " nAssumptionFail=" << nAssumFail
       << " nConeFail=" << nConeFail << " nDisagree=" << nDisagree << " nNearTie=" << nTie
       << " nSingular=" << sample.nSingular << " radiusWindowOk=" << (a0.ok ? 1 : 0) << "\n";
    if (static_cast<long>(sample.blocks.size()) < count) return kExitExhausted;
    return 0;
}

int run_lyapunov(double b, double R, long n, std::uint64_t seed, const std::string& modeName) {
    lemon::LemonTable table = lemon::build_table(b, R);
    lemon::LyapunovMode mode =
        modeName == "return" ? lemon::LyapunovMode::ReturnMap : lemon::LyapunovMode::FullMap;
    lemon::SplitMix64 rng{lemon::derive_stream(seed, 0)};
    lemon::PhasePoint x0 = lemon::mu_sample(table, rng);
    lemon::LyapunovEstimate est = lemon::lyapunov(table, x0, n, mode);
    std::cout << "{\"mode\":\"" << (mode == lemon::LyapunovMode::ReturnMap ? "return" : "full")
              << "\",\"chi\":" << fmt_g17(est.chi) << ",\"ci95\":" << fmt_g17(est.ci95)
              << ",\"n\":" << est.n << ",\"meanReturnTime\":" << fmt_g17(est.meanReturnTime)
              << ",\"blocks\":" << est.blocks
              << ",\"truncated\":" << (est.truncated ? "true" : "false") << "}\n";
    if (est.n < 100) return kExitExhausted;
    return 0;
}

int run_rstar(double chord, const std::string& gridText, long samples, std::uint64_t seed) {
    std::vector<double> grid = parse_grid(gridText);
    lemon::RStarResult res = lemon::find_R_star(chord, grid, samples, seed);
    for (const lemon::RStarRow& row : res.rows) {
        std::cout << "R=" << fmt_g17(row.R) << " b=" << fmt_g17(row.b)
                  << " radiusWindowOk=" << (row.a0ok ? 1 : 0) << " slack=" << fmt_g17(row.a0slack)
                  << " blocks=" << row.nBlocks << " assumptionFail=" << row.nAssumptionFail
                  << " coneFail=" << row.nConeFail << " calculusFail=" << row.nCondFail
                  << " nearTie=" << row.nNearTie << " singular=" << row.nSingular
                  << " passed=" << (row.passed ? 1 : 0) << "\n";
    }
    if (!res.found) {
        std::cout << "no radius in the grid passed\n";
        return kExitExhausted;
    }
    const lemon::RStarDiagnostics& d = res.diagnostics;
    std::cout << "Rstar=" << fmt_g17(res.Rstar) << " b=" << fmt_g17(res.b) << "\n";
    std::cout << "diagnostics nStar=" << d.nStar << " cornerBlocks=" << d.nCornerBlocks
              << " cornerNear=" << d.nCornerNear << " excursions=" << d.nExcursion
              << " excursionBoundOk=" << d.nExcursionOk << " entries=" << d.nEntries
              << " entriesDeep=" << d.nEntryBig << " deepPairs=" << d.nEntryPairs
              << " deepPairsKept=" << d.nEntryPairsOk << "\n";
    return 0;
}

int run_scan_cmd(const lemon::ScanConfig& cfg, const std::string& outPath) {
    std::vector<lemon::ScanCell> cells = lemon::run_scan(cfg);
    Sink sink;
    if (!sink.open(outPath)) return 1;
    lemon::write_scan_csv(*sink.os, cfg, cells);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical toolkit for two-lobe circular billiards"};
    app.set_version_flag("--version", std::string("lemonbl ") + kVersion);
    app.require_subcommand(1);

    // --- table ---
    auto* tableCmd = app.add_subcommand("table", "Print table geometry and the two-bounce orbit class");
    double tb = 1.5, tR = 2.0, tChord = 0.0;
    tableCmd->add_option("--b", tb, "Center distance");
    tableCmd->add_option("--R", tR, "Big-arc radius")->required();
    auto* chordOpt = tableCmd->add_option("--chord", tChord, "Corner chord (solves for b)");

    // --- orbit ---
    auto* orbitCmd = app.add_subcommand("orbit", "Trace a billiard orbit to CSV");
    double ob = 1.5, oR = 2.0, os = 0.5, ophi = 0.1;
    long on = 100;
    std::string oOut;
    std::uint64_t oSeed = 1;
    bool oRandom = false;
    orbitCmd->add_option("--b", ob, "Center distance")->required();
    orbitCmd->add_option("--R", oR, "Big-arc radius")->required();
    orbitCmd->add_option("--s", os, "Start arclength");
    orbitCmd->add_option("--phi", ophi, "Start reflection angle");
    orbitCmd->add_option("--n", on, "Number of collisions");
    orbitCmd->add_option("--seed", oSeed, "Seed for --random start");
    orbitCmd->add_flag("--random", oRandom, "Start from an invariant-measure sample");
    orbitCmd->add_option("--out", oOut, "Output CSV path (default stdout)");

    // --- blocks ---
    auto* blocksCmd = app.add_subcommand("blocks", "Sample return blocks to CSV");
    double bb = 1.5, bR = 2.0;
    long bCount = 1000;
    std::uint64_t bSeed = 1;
    std::string bOut;
    blocksCmd->add_option("--b", bb, "Center distance")->required();
    blocksCmd->add_option("--R", bR, "Big-arc radius")->required();
    blocksCmd->add_option("--count", bCount, "Blocks to collect");
    blocksCmd->add_option("--seed", bSeed, "Master seed");
    blocksCmd->add_option("--out", bOut, "Output CSV path (default stdout)");

    // --- check ---
    auto* checkCmd = app.add_subcommand("check", "Check cone conditions on sampled blocks");
    double cb = 1.5, cR = 2.0;
    long cCount = 1000;
    std::uint64_t cSeed = 1;
    std::string cOut;
    checkCmd->add_option("--b", cb, "Center distance")->required();
    checkCmd->add_option("--R", cR, "Big-arc radius")->required();
    checkCmd->add_option("--count", cCount, "Blocks to check");
    checkCmd->add_option("--seed", cSeed, "Master seed");
    checkCmd->add_option("--out", cOut, "Output CSV path (default stdout)");

    // --- lyapunov ---
    auto* lyapCmd = app.add_subcommand("lyapunov", "Estimate the top Lyapunov exponent");
    double lb = 1.5, lR = 2.0;
    long ln = 100000;
    std::uint64_t lSeed = 1;
    std::string lMode = "full";
    lyapCmd->add_option("--b", lb, "Center distance")->required();
    lyapCmd->add_option("--R", lR, "Big-arc radius")->required();
    lyapCmd->add_option("--n", ln, "Collisions (full) or returns (return)");
    lyapCmd->add_option("--seed", lSeed, "Master seed");
    lyapCmd->add_option("--mode", lMode, "full | return")
        ->check(CLI::IsMember({"full", "return"}));

    // --- rstar ---
    auto* rstarCmd = app.add_subcommand("rstar", "Find the smallest passing big-arc radius");
    double rChord = 0.9;
    std::string rGrid = "10,50,100,200,500";
    long rSamples = 10000;
    std::uint64_t rSeed = 1;
    rstarCmd->add_option("--chord", rChord, "Corner chord in (0,1)")->required();
    rstarCmd->add_option("--grid", rGrid, "Radius grid: comma list or min:max:count");
    rstarCmd->add_option("--samples", rSamples, "Blocks per radius");
    rstarCmd->add_option("--seed", rSeed, "Master seed");

    // --- scan ---
    auto* scanCmd = app.add_subcommand("scan", "Scan the (b, R) parameter plane to CSV");
    lemon::ScanConfig sc;
    sc.workers = default_workers();
    std::string sOut;
    scanCmd->add_option("--bmin", sc.bMin, "Smallest b");
    scanCmd->add_option("--bmax", sc.bMax, "Largest b");
    scanCmd->add_option("--bcount", sc.bCount, "Grid points in b");
    scanCmd->add_option("--rmin", sc.RMin, "Smallest R");
    scanCmd->add_option("--rmax", sc.RMax, "Largest R");
    scanCmd->add_option("--rcount", sc.RCount, "Grid points in R");
    scanCmd->add_option("--samples", sc.samples, "Return blocks per cell");
    scanCmd->add_option("--lyap-steps", sc.lyapunovSteps, "Collisions per cell for the exponent");
    scanCmd->add_option("--seed", sc.seed, "Master seed");
    scanCmd->add_option("--workers", sc.workers, "Worker threads (env LEMONBL_WORKERS)");
    scanCmd->add_option("--out", sOut, "Output CSV path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (tableCmd->parsed()) return run_table(tb, tR, tChord, chordOpt->count() > 0);
        if (orbitCmd->parsed()) return run_orbit(ob, oR, os, ophi, on, oOut, oSeed, oRandom);
        if (blocksCmd->parsed()) return run_blocks(bb, bR, bCount, bSeed, bOut);
        if (checkCmd->parsed()) return run_check(cb, cR, cCount, cSeed, cOut);
        if (lyapCmd->parsed()) return run_lyapunov(lb, lR, ln, lSeed, lMode);
        if (rstarCmd->parsed()) return run_rstar(rChord, rGrid, rSamples, rSeed);
        if (scanCmd->parsed()) return run_scan_cmd(sc, sOut);
    } catch (const lemon::DegenerateFull& e) {
        std::cerr << "lemonbl: degenerate table: " << e.what() << "\n";
        return kExitDegenerate;
    } catch (const lemon::DegenerateEmpty& e) {
        std::cerr << "lemonbl: degenerate table: " << e.what() << "\n";
        return kExitDegenerate;
    } catch (const std::invalid_argument& e) {
        std::cerr << "lemonbl: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "lemonbl: error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
