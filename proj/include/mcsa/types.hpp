#pragma once

#include "mcsa/common.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace mcsa {

enum class Label { Healthy, Faulty };

inline const char* to_string(Label l) { return l == Label::Healthy ? "healthy" : "faulty"; }
Label label_from_string(const std::string& s);

/// One (shaft speed, radial load) operating point. Equality is exact on both
/// fields; ordering makes the type usable as a map key.
struct WorkingCondition {
    double speed_rpm = 0.0;
    double radial_force_n = 0.0;

    bool operator==(const WorkingCondition& o) const {
        return speed_rpm == o.speed_rpm && radial_force_n == o.radial_force_n;
    }
    bool operator<(const WorkingCondition& o) const {
        if (speed_rpm != o.speed_rpm) return speed_rpm < o.speed_rpm;
        return radial_force_n < o.radial_force_n;
    }
    std::string describe() const;
};

struct MotorMetadata {
    std::string serial;
    int pole_pairs = 1;
    Label label = Label::Healthy;
};

/// One labeled multi-phase current acquisition. All channels share one sample
/// rate and length; shaft_freq_hz is the mechanical rotation frequency.
struct PhaseCurrentRecord {
    std::vector<Vector> channels;  // 1-3 phases, amperes
    double sample_rate_hz = 0.0;
    MotorMetadata motor;
    WorkingCondition condition;
    double shaft_freq_hz = 0.0;

    Index length() const { return channels.empty() ? 0 : channels.front().size(); }
};

struct Dataset {
    std::vector<PhaseCurrentRecord> records;
    std::string name;

    std::vector<std::string> serials() const;          // distinct, first-seen order
    std::set<std::string> serials_with(Label l) const;
    Dataset subset_by_serial(const std::set<std::string>& keep) const;
};

/// One repeat of a grouped k-fold assignment. Every serial maps to exactly one
/// fold; records of one motor never straddle a train/test boundary.
struct GroupedSplit {
    std::map<std::string, int> fold_assignments;
    int k = 0;
    int repeat_seed = 0;

    std::set<std::string> fold_serials(int fold) const;
};

/// Throws Error naming the record index and field on the first violated
/// invariant (channel lengths, NaN/Inf, sample-rate bounds, ...).
void validate_record(const PhaseCurrentRecord& r, std::size_t record_index);
void validate_dataset(const Dataset& d);

bool operator==(const PhaseCurrentRecord& a, const PhaseCurrentRecord& b);
bool operator==(const Dataset& a, const Dataset& b);

}  // namespace mcsa
