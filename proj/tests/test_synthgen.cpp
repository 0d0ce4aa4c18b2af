#include "mcsa/synth.hpp"
#include "mcsa/classifier.hpp"
#include "mcsa/io.hpp"
#include "mcsa/spectral.hpp"

#include <doctest.h>

#include <cmath>

using namespace mcsa;

namespace {

SynthConfig small_config() {
    SynthConfig cfg;
    cfg.n_motors_per_class = 3;
    cfg.record_len = 8192;
    return cfg;
}

double band_energy(const Spectrum& s, double f_lo, double f_hi) {
    double acc = 0.0;
    for (Index k = 0; k < s.values.size(); ++k) {
        const double f = static_cast<double>(k) * s.bin_hz;
        if (f >= f_lo && f <= f_hi) acc += s.values[k] * s.values[k];
    }
    return acc;
}

}  // namespace

TEST_CASE("bpf_frequencies") {
    BearingGeometry g{8, 0.3, 1.0};
    SUBCASE("worked example") {
        const auto bpf = bpf_frequencies(10.0, g);
        CHECK(bpf.bpfo == doctest::Approx(28.0));
        CHECK(bpf.bpfi == doctest::Approx(52.0));
    }
    SUBCASE("linear in shaft frequency") {
        const auto a = bpf_frequencies(7.5, g);
        const auto b = bpf_frequencies(15.0, g);
        CHECK(b.bpfo == doctest::Approx(2.0 * a.bpfo));
        CHECK(b.bpfi == doctest::Approx(2.0 * a.bpfi));
        const auto z = bpf_frequencies(0.0, g);
        CHECK(z.bpfo == 0.0);
        CHECK(z.bpfi == 0.0);
    }
    SUBCASE("geometry validation") {
        CHECK_THROWS_AS(bpf_frequencies(10.0, BearingGeometry{2, 0.3, 1.0}), Error);
        CHECK_THROWS_AS(bpf_frequencies(10.0, BearingGeometry{8, 1.5, 1.0}), Error);
        CHECK_THROWS_AS(bpf_frequencies(10.0, BearingGeometry{8, 0.3, 0.0}), Error);
    }
}

TEST_CASE("generate_record") {
    SynthConfig cfg = small_config();
    MotorMetadata healthy{"H01", 4, Label::Healthy};
    MotorMetadata faulty{"F01", 4, Label::Faulty};
    WorkingCondition wc{2000.0, 0.0};

    SUBCASE("healthy spectrum peaks only at the supply frequency") {
        FaultProfile none = cfg.fault;
        none.severity = 0.0;
        const auto r = generate_record(healthy, wc, none, cfg, 77);
        const Spectrum s = fft_magnitude(Signal{r.channels[0], r.sample_rate_hz});
        const double supply = supply_freq_hz(wc.speed_rpm, 4);
        CHECK(dominant_frequency(s) == doctest::Approx(supply).epsilon(0.01));
        // everything except the supply bin stays near the noise floor
        double second = 0.0;
        for (Index k = 1; k < s.values.size(); ++k) {
            const double f = static_cast<double>(k) * s.bin_hz;
            if (std::abs(f - supply) > 4.0 * s.bin_hz) second = std::max(second, s.values[k]);
        }
        CHECK(second < 0.2 * s.values.maxCoeff());
    }

    SUBCASE("full-severity fault raises BPFO sidebands at least 6 dB over the floor") {
        FaultProfile fault = cfg.fault;
        fault.severity = 1.0;
        const auto r = generate_record(faulty, wc, fault, cfg, 78);
        const Spectrum s = fft_magnitude(Signal{r.channels[0], r.sample_rate_hz});
        const double supply = supply_freq_hz(wc.speed_rpm, 4);
        const double bpfo = bpf_frequencies(wc.speed_rpm / 60.0, fault.geometry).bpfo;
        for (double f : {supply - bpfo, supply + bpfo}) {
            const auto bin = static_cast<Index>(std::llround(f / s.bin_hz));
            double peak = 0.0;
            for (Index k = bin - 1; k <= bin + 1; ++k) peak = std::max(peak, s.values[k]);
            // local noise median from a neighborhood excluding the peak
            std::vector<double> neighborhood;
            for (Index k = std::max<Index>(1, bin - 30); k < bin + 30; ++k)
                if (std::abs(k - bin) > 3) neighborhood.push_back(s.values[k]);
            std::sort(neighborhood.begin(), neighborhood.end());
            const double median = neighborhood[neighborhood.size() / 2];
            CHECK(20.0 * std::log10(peak / median) >= 6.0);
        }
    }

    SUBCASE("deterministic for identical stream seeds") {
        FaultProfile fault = cfg.fault;
        fault.severity = 0.7;
        const auto a = generate_record(faulty, wc, fault, cfg, 123);
        const auto b = generate_record(faulty, wc, fault, cfg, 123);
        CHECK(a == b);
        const auto c = generate_record(faulty, wc, fault, cfg, 124);
        CHECK_FALSE(a == c);
    }

    SUBCASE("three phases, 120 degrees apart") {
        FaultProfile none = cfg.fault;
        none.severity = 0.0;
        const auto r = generate_record(healthy, wc, none, cfg, 5);
        REQUIRE(r.channels.size() == 3);
        // phase b lags a by a third of a period, so the positive-lag
        // correlation peak sits at two thirds of a period
        const double supply = supply_freq_hz(wc.speed_rpm, 4);
        const double period = cfg.sample_rate_hz / supply;
        const int expected_lag = static_cast<int>(std::llround(2.0 * period / 3.0));
        double best = -1.0;
        int best_lag = 0;
        for (int lag = 0; lag < static_cast<int>(period); ++lag) {
            double acc = 0.0;
            for (Index i = 0; i + lag < r.channels[0].size(); ++i)
                acc += r.channels[0][i + lag] * r.channels[1][i];
            if (acc > best) {
                best = acc;
                best_lag = lag;
            }
        }
        CHECK(std::abs(best_lag - expected_lag) <= 2);
    }
}

TEST_CASE("generate_dataset") {
    SynthConfig cfg = small_config();

    SUBCASE("one dataset per condition, balanced classes") {
        const auto by_condition = generate_dataset(cfg);
        REQUIRE(by_condition.size() == 4);
        const std::vector<WorkingCondition> expected = {
            {250.0, 0.0}, {250.0, 1000.0}, {2000.0, 0.0}, {2000.0, 1000.0}};
        for (const auto& wc : expected) CHECK(by_condition.count(wc) == 1);
        for (const auto& [wc, d] : by_condition) {
            CHECK(d.records.size() == 6);
            CHECK(d.serials_with(Label::Healthy).size() == 3);
            CHECK(d.serials_with(Label::Faulty).size() == 3);
        }
    }

    SUBCASE("byte-identical regeneration, different seeds differ") {
        const auto a = generate_dataset(cfg);
        const auto b = generate_dataset(cfg);
        for (const auto& [wc, d] : a)
            CHECK(dataset_fingerprint(d) == dataset_fingerprint(b.at(wc)));
        SynthConfig other = cfg;
        other.seed = cfg.seed + 1;
        const auto c = generate_dataset(other);
        bool any_diff = false;
        for (const auto& [wc, d] : a)
            any_diff |= dataset_fingerprint(d) != dataset_fingerprint(c.at(wc));
        CHECK(any_diff);
    }

    SUBCASE("covariate shift: dominant bin of a healthy record differs across speeds") {
        const auto by_condition = generate_dataset(cfg);
        const auto& slow = by_condition.at({250.0, 0.0});
        const auto& fast = by_condition.at({2000.0, 0.0});
        const auto slow_s =
            fft_magnitude(Signal{slow.records[0].channels[0], slow.records[0].sample_rate_hz});
        const auto fast_s =
            fft_magnitude(Signal{fast.records[0].channels[0], fast.records[0].sample_rate_hz});
        Index slow_bin = 0, fast_bin = 0;
        slow_s.values.tail(slow_s.values.size() - 1).maxCoeff(&slow_bin);
        fast_s.values.tail(fast_s.values.size() - 1).maxCoeff(&fast_bin);
        CHECK(slow_bin != fast_bin);
    }

    SUBCASE("same spectral peak locations across seeds") {
        SynthConfig other = cfg;
        other.seed = cfg.seed + 99;
        const auto a = generate_dataset(cfg).at({2000.0, 0.0});
        const auto b = generate_dataset(other).at({2000.0, 0.0});
        const auto sa = fft_magnitude(Signal{a.records[0].channels[0], a.records[0].sample_rate_hz});
        const auto sb = fft_magnitude(Signal{b.records[0].channels[0], b.records[0].sample_rate_hz});
        CHECK(dominant_frequency(sa) == doctest::Approx(dominant_frequency(sb)));
    }
}

TEST_CASE("label-signal link: band-energy probe separates classes within a condition") {
    SynthConfig cfg;
    cfg.n_motors_per_class = 5;
    cfg.record_len = 16384;
    const auto by_condition = generate_dataset(cfg);

    for (const auto& [wc, d] : by_condition) {
        const double shaft = wc.speed_rpm / 60.0;
        const double supply = supply_freq_hz(wc.speed_rpm, cfg.pole_pairs);
        const auto bpf = bpf_frequencies(shaft, cfg.fault.geometry);

        // Window-level probe on the upper BPF sidebands (the lower ones sit
        // on top of the supply bin at low speed with these window lengths).
        std::vector<int> labels;
        std::vector<double> features;
        for (const auto& r : d.records) {
            const Signal ch{r.channels[0], r.sample_rate_hz};
            const auto ws = make_windows(ch, WindowingParams{4096, 0});
            for (const auto& w : ws.windows) {
                const Spectrum s = fft_magnitude(w);
                const double half_band = 2.0 * s.bin_hz;
                double e =
                    band_energy(s, supply + bpf.bpfo - half_band, supply + bpf.bpfo + half_band) +
                    band_energy(s, supply + bpf.bpfi - half_band, supply + bpf.bpfi + half_band);
                features.push_back(std::log(e + 1e-12));
                labels.push_back(r.motor.label == Label::Faulty ? 1 : 0);
            }
        }
        Matrix x(static_cast<Index>(features.size()), 1);
        for (std::size_t i = 0; i < features.size(); ++i)
            x(static_cast<Index>(i), 0) = features[i];
        const Vector w = fit_logistic_weights(x, labels, 1e-3, 50);
        Index hit = 0;
        for (Index i = 0; i < x.rows(); ++i) {
            const double z = w[1] + x(i, 0) * w[0];
            hit += (z >= 0.0 ? 1 : 0) == labels[static_cast<std::size_t>(i)];
        }
        const double acc = static_cast<double>(hit) / static_cast<double>(x.rows());
        INFO("condition ", wc.describe());
        CHECK(acc >= 0.90);
    }
}
