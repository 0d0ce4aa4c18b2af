#include "mcsa/types.hpp"

#include <cmath>
#include <sstream>

namespace mcsa {

Label label_from_string(const std::string& s) {
    if (s == "healthy") return Label::Healthy;
    if (s == "faulty") return Label::Faulty;
    throw Error("unknown label '" + s + "' (expected 'healthy' or 'faulty')");
}

std::string WorkingCondition::describe() const {
    std::ostringstream os;
    os << speed_rpm << "rpm_" << radial_force_n << "N";
    return os.str();
}

std::vector<std::string> Dataset::serials() const {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& r : records)
        if (seen.insert(r.motor.serial).second) out.push_back(r.motor.serial);
    return out;
}

std::set<std::string> Dataset::serials_with(Label l) const {
    std::set<std::string> out;
    for (const auto& r : records)
        if (r.motor.label == l) out.insert(r.motor.serial);
    return out;
}

Dataset Dataset::subset_by_serial(const std::set<std::string>& keep) const {
    Dataset out;
    out.name = name;
    for (const auto& r : records)
        if (keep.count(r.motor.serial)) out.records.push_back(r);
    return out;
}

void validate_record(const PhaseCurrentRecord& r, std::size_t record_index) {
    auto fail = [&](const std::string& field, const std::string& why) {
        throw Error("record " + std::to_string(record_index) + ": field '" + field + "' " + why);
    };
    if (r.motor.serial.empty()) fail("serial", "is empty");
    if (r.motor.pole_pairs < 1) fail("pole_pairs", "must be >= 1");
    if (r.channels.empty() || r.channels.size() > 3)
        fail("channels", "must hold 1-3 phases, got " + std::to_string(r.channels.size()));
    const Index len = r.channels.front().size();
    if (len < 2) fail("channels", "must have length >= 2");
    for (std::size_t c = 0; c < r.channels.size(); ++c) {
        if (r.channels[c].size() != len)
            fail("channels", "channel " + std::to_string(c) + " length differs");
        if (!r.channels[c].allFinite())
            fail("channels", "channel " + std::to_string(c) + " contains NaN/Inf");
    }
    if (!(r.sample_rate_hz > 0.0)) fail("sample_rate_hz", "must be > 0");
    if (!(r.shaft_freq_hz > 0.0)) fail("shaft_freq_hz", "must be > 0");
    if (!(r.sample_rate_hz > 2.0 * r.shaft_freq_hz))
        fail("sample_rate_hz", "must exceed 2x shaft_freq_hz");
    if (!(r.condition.speed_rpm > 0.0)) fail("speed_rpm", "must be > 0");
    if (r.condition.radial_force_n < 0.0) fail("radial_force_n", "must be >= 0");
}

void validate_dataset(const Dataset& d) {
    if (d.records.empty()) throw Error("empty dataset");
    for (std::size_t i = 0; i < d.records.size(); ++i) validate_record(d.records[i], i);
}

bool operator==(const PhaseCurrentRecord& a, const PhaseCurrentRecord& b) {
    if (a.channels.size() != b.channels.size()) return false;
    for (std::size_t c = 0; c < a.channels.size(); ++c)
        if (a.channels[c].size() != b.channels[c].size() || a.channels[c] != b.channels[c])
            return false;
    return a.sample_rate_hz == b.sample_rate_hz && a.shaft_freq_hz == b.shaft_freq_hz &&
           a.motor.serial == b.motor.serial && a.motor.pole_pairs == b.motor.pole_pairs &&
           a.motor.label == b.motor.label && a.condition == b.condition;
}

bool operator==(const Dataset& a, const Dataset& b) {
    return a.name == b.name && a.records == b.records;
}

}  // namespace mcsa
