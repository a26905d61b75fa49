#include "imgep/history_io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "imgep/png_io.hpp"

namespace imgep::history_io {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

std::string observation_id(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%06zu", index);
    return buf;
}

ordered_json entry_to_json(const explorer::HistoryEntry& e) {
    ordered_json params = ordered_json::object();
    const auto values = e.params.values();
    const auto& names = e.params.space().names;
    for (std::size_t i = 0; i < values.size(); ++i) params[names[i]] = values[i];

    ordered_json behavior = {
        {"hu", e.behavior.hu}, {"mean_pixel", e.behavior.mean_pixel}, {"volume", e.behavior.volume}};
    ordered_json cf = ordered_json::object();
    for (auto name : features::ConstraintFeatures::names()) cf[std::string(name)] = e.constraint_features.get(name);

    return ordered_json{{"index", e.index},
                        {"params", std::move(params)},
                        {"behavior", std::move(behavior)},
                        {"constraint_features", std::move(cf)},
                        {"classification", e.classification == 1 ? 1 : -1},
                        {"observation_id", observation_id(e.index)},
                        {"random_sample", e.random_sample},
                        {"invalid", e.invalid},
                        {"homogeneous", e.homogeneous},
                        {"haralick", e.haralick}};
}

void write_jsonl(std::ostream& out, const explorer::History& history) {
    for (const auto& e : history) out << entry_to_json(e).dump() << '\n';
}

void write_jsonl(const fs::path& path, const explorer::History& history) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write_jsonl(out, history);
}

void write_observations(const fs::path& dir, const explorer::History& history) {
    fs::create_directories(dir);
    for (const auto& e : history)
        if (e.observation) write_png((dir / (observation_id(e.index) + ".png")).string(), *e.observation);
}

Record record_from_json(const json& j) {
    Record r;
    r.index = j.at("index").get<std::size_t>();
    for (const auto& [name, value] : j.at("params").items()) {
        r.param_names.push_back(name);
        r.params.push_back(value.get<double>());
    }
    const json& b = j.at("behavior");
    r.behavior.hu = b.at("hu").get<features::HuMoments>();
    r.behavior.mean_pixel = b.at("mean_pixel").get<double>();
    r.behavior.volume = b.at("volume").get<double>();
    const json& cf = j.at("constraint_features");
    r.constraint_features.volume = cf.at("volume").get<double>();
    r.constraint_features.mean_pixel = cf.at("mean_pixel").get<double>();
    r.constraint_features.tamura_coarseness = cf.at("tamura_coarseness").get<double>();
    r.constraint_features.tamura_contrast = cf.at("tamura_contrast").get<double>();
    r.constraint_features.tamura_directionality = cf.at("tamura_directionality").get<double>();
    r.classification = j.at("classification").get<int>();
    r.observation_id = j.at("observation_id").get<std::string>();
    r.random_sample = j.value("random_sample", false);
    r.invalid = j.value("invalid", false);
    r.homogeneous = j.value("homogeneous", false);
    if (j.contains("haralick")) r.haralick = j.at("haralick").get<features::HaralickVector>();
    return r;
}

std::vector<Record> read_jsonl(std::istream& in) {
    std::vector<Record> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            out.push_back(record_from_json(json::parse(line)));
        } catch (const json::exception& ex) {
            throw std::runtime_error("history line " + std::to_string(line_no) + ": " + ex.what());
        }
    }
    return out;
}

std::vector<Record> read_jsonl(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    return read_jsonl(in);
}

}  // namespace imgep::history_io
