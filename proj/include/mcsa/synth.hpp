#pragma once

#include "mcsa/types.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace mcsa {

struct BearingGeometry {
    int n_balls = 8;
    double ball_ratio = 0.3;   // ball diameter / pitch diameter
    double contact_cos = 1.0;  // cosine of the contact angle
};

/// Severity-scaled "general roughness" fault: weak ball-pass sidebands plus a
/// broadband noise-floor lift. severity 0 contributes nothing.
struct FaultProfile {
    double severity = 0.0;        // in [0, 1]
    double sideband_gain = 0.15;  // sideband amplitude relative to fundamental
    double roughness_gain = 0.4;  // noise floor lift at severity 1
    BearingGeometry geometry;
};

struct SynthConfig {
    int n_motors_per_class = 5;
    std::vector<WorkingCondition> conditions = {
        {250.0, 0.0}, {250.0, 1000.0}, {2000.0, 0.0}, {2000.0, 1000.0}};
    int record_len = 16384;
    double sample_rate_hz = 8192.0;
    int pole_pairs = 4;
    double noise_sigma = 0.12;
    double severity_min = 0.4;  // per-motor severity drawn from [min, max]
    double severity_max = 1.0;
    FaultProfile fault;  // severity field ignored; per-motor severity is drawn
    std::uint64_t seed = 1234;
};

struct BpfPair {
    double bpfo = 0.0;  // outer-race ball pass frequency
    double bpfi = 0.0;  // inner-race ball pass frequency
};

/// Standard kinematic ball-pass frequencies for a given shaft frequency.
BpfPair bpf_frequencies(double shaft_freq_hz, const BearingGeometry& g);

/// Electrical supply frequency of a PMSM at the given shaft speed.
inline double supply_freq_hz(double speed_rpm, int pole_pairs) {
    return speed_rpm / 60.0 * static_cast<double>(pole_pairs);
}

/// One three-phase record: fundamental at the supply frequency (amplitude
/// scaled affinely by radial force plus per-motor jitter), fault sidebands at
/// supply +- k*BPF for k=1,2, and white noise lifted by the roughness term.
/// Fully deterministic given (motor, condition, fault, cfg, stream_seed).
PhaseCurrentRecord generate_record(const MotorMetadata& motor, const WorkingCondition& condition,
                                   const FaultProfile& fault, const SynthConfig& cfg,
                                   std::uint64_t stream_seed);

/// One dataset per working condition, one record per (motor, condition),
/// class-balanced. Motor severities and amplitude jitters are drawn from
/// per-serial substreams so the serial is a genuine group factor.
std::map<WorkingCondition, Dataset> generate_dataset(const SynthConfig& cfg);

}  // namespace mcsa
