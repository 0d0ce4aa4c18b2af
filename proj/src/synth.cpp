#include "mcsa/synth.hpp"

#include "mcsa/rng.hpp"

#include <cmath>

namespace mcsa {

BpfPair bpf_frequencies(double shaft_freq_hz, const BearingGeometry& g) {
    if (g.n_balls < 3) throw Error("bpf_frequencies: n_balls must be >= 3");
    if (!(g.ball_ratio > 0.0 && g.ball_ratio < 1.0))
        throw Error("bpf_frequencies: ball_ratio must be in (0,1)");
    if (!(g.contact_cos > 0.0 && g.contact_cos <= 1.0))
        throw Error("bpf_frequencies: contact_cos must be in (0,1]");
    const double half_n = static_cast<double>(g.n_balls) / 2.0;
    const double mod = g.ball_ratio * g.contact_cos;
    return {half_n * shaft_freq_hz * (1.0 - mod), half_n * shaft_freq_hz * (1.0 + mod)};
}

PhaseCurrentRecord generate_record(const MotorMetadata& motor, const WorkingCondition& condition,
                                   const FaultProfile& fault, const SynthConfig& cfg,
                                   std::uint64_t stream_seed) {
    const double shaft_hz = condition.speed_rpm / 60.0;
    const double supply_hz = supply_freq_hz(condition.speed_rpm, motor.pole_pairs);
    const double dt = 1.0 / cfg.sample_rate_hz;

    // Per-motor amplitude and noise-floor jitter from the motor's own
    // substream, independent of the working condition, so one serial looks
    // alike across conditions and the serial is a genuine group factor.
    Rng motor_rng(derive_seed(cfg.seed, "motor_amp_" + motor.serial));
    const double jitter = 1.0 + 0.15 * (2.0 * motor_rng.uniform() - 1.0);
    const double noise_jitter = 1.0 + 0.4 * motor_rng.uniform();
    const double amplitude = jitter * (1.0 + 1e-4 * condition.radial_force_n);

    const BpfPair bpf = bpf_frequencies(shaft_hz, fault.geometry);
    const double sideband_amp = amplitude * fault.sideband_gain * fault.severity;
    // Noise floor grows with speed (vibration and EMI pickup), so floor-level
    // cues shift between working conditions like the spectral ones do.
    const double speed_factor = 0.85 + 0.15 * condition.speed_rpm / 1000.0;
    const double sigma = cfg.noise_sigma * noise_jitter * speed_factor *
                         (1.0 + fault.roughness_gain * fault.severity);

    Rng rng(stream_seed);
    const double phase0 = 2.0 * kPi * rng.uniform();

    PhaseCurrentRecord r;
    r.motor = motor;
    r.condition = condition;
    r.shaft_freq_hz = shaft_hz;
    r.sample_rate_hz = cfg.sample_rate_hz;
    r.channels.resize(3);
    for (auto& ch : r.channels) ch.resize(cfg.record_len);

    for (int p = 0; p < 3; ++p) {
        const double phase_shift = -2.0 * kPi / 3.0 * static_cast<double>(p);
        Vector& ch = r.channels[static_cast<std::size_t>(p)];
        for (int i = 0; i < cfg.record_len; ++i) {
            const double t = static_cast<double>(i) * dt;
            const double base = 2.0 * kPi * supply_hz * t + phase0 + phase_shift;
            double v = amplitude * std::sin(base);
            if (sideband_amp > 0.0) {
                for (int k = 1; k <= 2; ++k) {
                    const double a = sideband_amp / static_cast<double>(k);
                    for (double f : {bpf.bpfo, bpf.bpfi}) {
                        const double off = 2.0 * kPi * static_cast<double>(k) * f * t;
                        v += a * std::sin(base + off);
                        v += a * std::sin(base - off);
                    }
                }
            }
            ch[i] = v + sigma * rng.normal();
        }
    }
    return r;
}

std::map<WorkingCondition, Dataset> generate_dataset(const SynthConfig& cfg) {
    if (cfg.n_motors_per_class < 2)
        throw Error("generate_dataset: n_motors_per_class must be >= 2");
    if (cfg.conditions.empty()) throw Error("generate_dataset: no working conditions");
    if (cfg.record_len < 2) throw Error("generate_dataset: record_len must be >= 2");

    struct Motor {
        MotorMetadata meta;
        FaultProfile fault;
    };
    std::vector<Motor> motors;
    for (int i = 0; i < cfg.n_motors_per_class; ++i) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "H%02d", i + 1);
        motors.push_back({{buf, cfg.pole_pairs, Label::Healthy}, cfg.fault});
        motors.back().fault.severity = 0.0;
    }
    for (int i = 0; i < cfg.n_motors_per_class; ++i) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "F%02d", i + 1);
        Motor m{{buf, cfg.pole_pairs, Label::Faulty}, cfg.fault};
        Rng sev_rng(derive_seed(cfg.seed, "motor_severity_" + m.meta.serial));
        m.fault.severity =
            cfg.severity_min + (cfg.severity_max - cfg.severity_min) * sev_rng.uniform();
        motors.push_back(std::move(m));
    }

    std::map<WorkingCondition, Dataset> out;
    for (const auto& wc : cfg.conditions) {
        Dataset d;
        d.name = "wc_" + wc.describe();
        for (const auto& m : motors) {
            const std::uint64_t stream =
                derive_seed(cfg.seed, "record_" + m.meta.serial + "_" + wc.describe());
            d.records.push_back(generate_record(m.meta, wc, m.fault, cfg, stream));
        }
        validate_dataset(d);
        out.emplace(wc, std::move(d));
    }
    return out;
}

}  // namespace mcsa
