#include "mcsa/io.hpp"

#include <json.hpp>

#include <fstream>

namespace mcsa {

using nlohmann::json;

Dataset load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open dataset file: " + path.string());
    Dataset d;
    d.name = path.stem().string();
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw Error("parse error at line " + std::to_string(line_no) + ": " + e.what());
        }
        try {
            PhaseCurrentRecord r;
            r.motor.serial = j.at("serial").get<std::string>();
            r.motor.pole_pairs = j.at("pole_pairs").get<int>();
            r.motor.label = label_from_string(j.at("label").get<std::string>());
            r.condition.speed_rpm = j.at("speed_rpm").get<double>();
            r.condition.radial_force_n = j.at("radial_force_n").get<double>();
            r.shaft_freq_hz = j.at("shaft_freq_hz").get<double>();
            r.sample_rate_hz = j.at("sample_rate_hz").get<double>();
            for (const auto& ch : j.at("channels")) {
                Vector v(ch.size());
                Index i = 0;
                for (const auto& x : ch) v[i++] = x.get<double>();
                r.channels.push_back(std::move(v));
            }
            d.records.push_back(std::move(r));
        } catch (const json::exception& e) {
            throw Error("bad record at line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    validate_dataset(d);
    return d;
}

void save_dataset(const Dataset& d, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write dataset file: " + path.string());
    for (const auto& r : d.records) {
        json j;
        j["serial"] = r.motor.serial;
        j["pole_pairs"] = r.motor.pole_pairs;
        j["label"] = to_string(r.motor.label);
        j["speed_rpm"] = r.condition.speed_rpm;
        j["radial_force_n"] = r.condition.radial_force_n;
        j["shaft_freq_hz"] = r.shaft_freq_hz;
        j["sample_rate_hz"] = r.sample_rate_hz;
        json chans = json::array();
        for (const auto& ch : r.channels) {
            json c = json::array();
            for (Index i = 0; i < ch.size(); ++i) c.push_back(ch[i]);
            chans.push_back(std::move(c));
        }
        j["channels"] = std::move(chans);
        out << j.dump() << '\n';
    }
    if (!out) throw Error("I/O failure writing " + path.string());
}

void export_split(const GroupedSplit& split, const std::filesystem::path& path) {
    json j;
    j["k"] = split.k;
    j["repeat_seed"] = split.repeat_seed;
    json folds = json::object();
    for (const auto& [serial, fold] : split.fold_assignments) folds[serial] = fold;
    j["fold_assignments"] = std::move(folds);
    std::ofstream out(path);
    if (!out) throw Error("cannot write split file: " + path.string());
    out << j.dump(2) << '\n';
}

std::uint64_t dataset_fingerprint(const Dataset& d) {
    std::uint64_t h = fnv1a(d.name);
    for (const auto& r : d.records) {
        h = fnv1a(r.motor.serial, h);
        double pp = r.motor.pole_pairs;
        h = fnv1a(pp, h);
        h = fnv1a(std::string(to_string(r.motor.label)), h);
        h = fnv1a(r.condition.speed_rpm, h);
        h = fnv1a(r.condition.radial_force_n, h);
        h = fnv1a(r.shaft_freq_hz, h);
        h = fnv1a(r.sample_rate_hz, h);
        for (const auto& ch : r.channels)
            h = fnv1a(ch.data(), static_cast<std::size_t>(ch.size()) * sizeof(double), h);
    }
    return h;
}

}  // namespace mcsa
