#include "netdiff/io.hpp"

#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace netdiff {

using nlohmann::json;

json record_to_json(const DatasetRecord& record) {
  const NodeSet& nodes = record.nodes;
  const Topology& topo = record.topology;
  json doc;
  doc["n"] = nodes.count();
  json positions = json::array();
  for (const Point& p : nodes.positions) positions.push_back({p.x, p.y});
  doc["positions"] = std::move(positions);
  doc["rotations"] = nodes.rotations;
  doc["parity"] = topo.parity;
  json edges = json::array();
  for (const auto& [i, j] : topo.edge_list()) edges.push_back({i, j});
  doc["edges"] = std::move(edges);
  return doc;
}

DatasetRecord record_from_json(const json& doc) {
  DatasetRecord record;
  const int n = doc.at("n").get<int>();
  if (n < 1) throw std::invalid_argument("record: n must be >= 1");
  const auto& positions = doc.at("positions");
  const auto& rotations = doc.at("rotations");
  if (static_cast<int>(positions.size()) != n || static_cast<int>(rotations.size()) != n) {
    throw std::invalid_argument("record: positions/rotations length mismatch");
  }
  record.nodes.positions.reserve(n);
  for (const auto& pair : positions) {
    record.nodes.positions.push_back({pair.at(0).get<double>(), pair.at(1).get<double>()});
  }
  record.nodes.rotations = rotations.get<std::vector<double>>();
  record.nodes.validate();

  record.topology = Topology(n);
  if (doc.contains("parity")) {
    const auto parity = doc.at("parity").get<std::vector<int>>();
    if (static_cast<int>(parity.size()) != n) {
      throw std::invalid_argument("record: parity length mismatch");
    }
    for (int i = 0; i < n; ++i) {
      if (parity[i] != 0 && parity[i] != 1) {
        throw std::invalid_argument("record: parity entry not in {0,1}");
      }
      record.topology.parity[i] = static_cast<uint8_t>(parity[i]);
    }
  }
  if (doc.contains("edges")) {
    for (const auto& pair : doc.at("edges")) {
      const int i = pair.at(0).get<int>();
      const int j = pair.at(1).get<int>();
      record.topology.set_edge(i, j, true);
    }
  }
  record.topology.validate();
  return record;
}

void write_dataset(const std::string& path, const std::vector<DatasetRecord>& records,
                   const std::optional<json>& header) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_dataset: cannot open " + path);
  if (header) {
    json line;
    line["netdiff_header"] = *header;
    out << line.dump() << '\n';
  }
  for (const DatasetRecord& record : records) {
    out << record_to_json(record).dump() << '\n';
  }
  if (!out) throw std::runtime_error("write_dataset: write failed for " + path);
}

DatasetFile read_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_dataset: cannot open " + path);
  DatasetFile file;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::parse_error& err) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + err.what());
    }
    if (line_no == 1 && doc.is_object() && doc.contains("netdiff_header")) {
      file.header = doc.at("netdiff_header");
      continue;
    }
    file.records.push_back(record_from_json(doc));
  }
  return file;
}

}  // namespace netdiff
