#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "netdiff/geometry.hpp"

namespace netdiff {

// One graph of the interchange format: scenario plus its topology.
struct DatasetRecord {
  NodeSet nodes;
  Topology topology;
};

// Datasets are newline-delimited JSON documents, one graph per line:
//   {"n":..,"positions":[[x,y],..],"rotations":[..],"parity":[..],"edges":[[i,j],..]}
// An optional first line {"netdiff_header":{...}} carries the resolved run
// config and seed; readers skip it transparently.
nlohmann::json record_to_json(const DatasetRecord& record);
DatasetRecord record_from_json(const nlohmann::json& doc);

void write_dataset(const std::string& path, const std::vector<DatasetRecord>& records,
                   const std::optional<nlohmann::json>& header = std::nullopt);

struct DatasetFile {
  std::vector<DatasetRecord> records;
  std::optional<nlohmann::json> header;
};

DatasetFile read_dataset(const std::string& path);

}  // namespace netdiff
