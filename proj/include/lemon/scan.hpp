#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "lemon/hyperbolicity.hpp"

namespace lemon {

struct ScanConfig {
    double bMin = 1.1, bMax = 1.9;
    int bCount = 9;
    double RMin = 2.0, RMax = 3.0;
    int RCount = 5;
    long samples = 200;          // return blocks per cell
    long lyapunovSteps = 20000;  // collisions for the per-cell exponent
    std::uint64_t seed = 1;
    int workers = 1;
};

enum class ScanVerdict { HyperbolicEvidence, EllipticEvidence, ConditionFail, Inconclusive };

const char* verdict_name(ScanVerdict v);

struct ScanCell {
    double b = 0, R = 0;
    ScanVerdict verdict = ScanVerdict::Inconclusive;
    double fracA1 = 1, fracA2 = 1, fracA3 = 1, fracCone = 1;
    double chi = 0, chiCI = 0;
    double meanReturnTime = 0;
    long nBlocks = 0, nNearTie = 0, nSingular = 0;
};

// Evaluates every grid cell; the result order (b-major, then R) and all cell
// values depend only on the config and seed, never on the worker count.
std::vector<ScanCell> run_scan(const ScanConfig& cfg);

// CSV with metadata headers; numbers in %.17g, '.' decimal point.
void write_scan_csv(std::ostream& os, const ScanConfig& cfg, const std::vector<ScanCell>& cells);

}  // namespace lemon
