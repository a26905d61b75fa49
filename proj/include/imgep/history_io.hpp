#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "imgep/explorer.hpp"
#include "imgep/features.hpp"

namespace imgep::history_io {

// Observation ids are the zero-padded index; the PNG lives at "<id>.png".
std::string observation_id(std::size_t index);

nlohmann::ordered_json entry_to_json(const explorer::HistoryEntry& entry);

// One JSON object per line: index, params (name -> value), behavior, constraint_features,
// classification (-1/1), observation_id, random_sample, invalid, homogeneous, haralick.
void write_jsonl(std::ostream& out, const explorer::History& history);
void write_jsonl(const std::filesystem::path& path, const explorer::History& history);

// Writes <dir>/<observation_id>.png for each entry that still holds its observation.
void write_observations(const std::filesystem::path& dir, const explorer::History& history);

// What a JSONL line carries; observations are not loaded.
struct Record {
    std::size_t index = 0;
    std::vector<std::string> param_names;
    std::vector<double> params;
    features::BehaviorVector behavior;
    features::ConstraintFeatures constraint_features;
    int classification = -1;
    std::string observation_id;
    bool random_sample = false;
    bool invalid = false;
    bool homogeneous = false;
    features::HaralickVector haralick{};
};

Record record_from_json(const nlohmann::json& j);

// Throws std::runtime_error with the line number on malformed input.
std::vector<Record> read_jsonl(std::istream& in);
std::vector<Record> read_jsonl(const std::filesystem::path& path);

}  // namespace imgep::history_io
