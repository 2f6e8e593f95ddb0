#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>  // nlohmann/json, vendored

#include "panoview/error.hpp"
#include "panoview/metrics.hpp"
#include "panoview/reporting.hpp"
#include "panoview/rps.hpp"

// File formats: sequence JSON/CSV, ground-truth scanpath JSON/CSV,
// score reports and metric tables.

namespace panoview {

using Json = nlohmann::ordered_json;

inline std::string readText(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void writeText(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out << text;
  if (!out.flush()) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

inline Json toJson(const SphereCoord& c) { return Json::array({c.lat(), c.lon()}); }

inline Json configToJson(const RpsConfig& cfg) {
  Json j;
  j["n"] = cfg.numSequences;
  j["m"] = cfg.seqLength;
  j["step"] = Json::array({cfg.step.dLat, cfg.step.dLon});
  if (cfg.fov.horizontal == cfg.fov.vertical) {
    j["fov"] = cfg.fov.horizontal;
  } else {
    j["fov"] = Json::array({cfg.fov.horizontal, cfg.fov.vertical});
  }
  j["size"] = cfg.viewportSize;
  j["gamma"] = cfg.gamma;
  j["beta"] = cfg.beta;
  j["sigma"] = cfg.equatorStd;
  return j;
}

/// { "seed", "config", "sequences": [ { "start", "centers", "chosen" } ] }
inline Json sequencesToJson(const RpsConfig& cfg, std::span<const ViewportSequence> sequences) {
  Json root;
  root["seed"] = cfg.seed;
  root["config"] = configToJson(cfg);
  Json list = Json::array();
  for (const auto& seq : sequences) {
    Json s;
    s["start"] = toJson(seq.start);
    Json centers = Json::array();
    for (const auto& c : seq.centers) centers.push_back(toJson(c));
    s["centers"] = std::move(centers);
    s["chosen"] = seq.chosenIndices;
    list.push_back(std::move(s));
  }
  root["sequences"] = std::move(list);
  return root;
}

/// One row per viewport: seq_id,t,lat,lon,chosen_idx (empty on the last row
/// of each sequence).
inline std::string sequencesToCsv(std::span<const ViewportSequence> sequences) {
  std::ostringstream out;
  out.precision(17);
  out << "seq_id,t,lat,lon,chosen_idx\n";
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    const auto& seq = sequences[i];
    for (std::size_t t = 0; t < seq.centers.size(); ++t) {
      out << i << ',' << t << ',' << seq.centers[t].lat() << ',' << seq.centers[t].lon() << ',';
      if (t < seq.chosenIndices.size()) out << seq.chosenIndices[t];
      out << '\n';
    }
  }
  return out.str();
}

namespace detail {

inline SphereCoord coordFromJson(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw Error(ErrorKind::SchemaError, "coordinate must be [lat, lon]");
  }
  try {
    return SphereCoord(j[0].get<double>(), j[1].get<double>());
  } catch (const Error& e) {
    throw Error(ErrorKind::SchemaError, e.what());
  }
}

inline Json parseJson(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::SchemaError, origin + ": " + e.what());
  }
}

inline std::vector<std::string> splitCsvLine(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    cells.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

inline double parseNumber(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::SchemaError, "bad " + what + " value '" + s + "'");
  }
}

}  // namespace detail

struct SequenceFile {
  std::uint64_t seed = 0;
  RpsConfig config;
  std::vector<ViewportSequence> sequences;
};

inline RpsConfig configFromJson(const Json& j) {
  RpsConfig cfg;
  try {
    if (j.contains("n")) cfg.numSequences = j.at("n").get<int>();
    if (j.contains("m")) cfg.seqLength = j.at("m").get<int>();
    if (j.contains("step")) cfg.step = {j.at("step").at(0).get<double>(), j.at("step").at(1).get<double>()};
    if (j.contains("fov")) {
      const auto& f = j.at("fov");
      cfg.fov = f.is_array() ? FieldOfView{f.at(0).get<double>(), f.at(1).get<double>()}
                             : FieldOfView{f.get<double>(), f.get<double>()};
    }
    if (j.contains("size")) cfg.viewportSize = j.at("size").get<int>();
    if (j.contains("gamma")) cfg.gamma = j.at("gamma").get<double>();
    if (j.contains("beta")) cfg.beta = j.at("beta").get<double>();
    if (j.contains("sigma")) cfg.equatorStd = j.at("sigma").get<double>();
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::SchemaError, std::string("config block: ") + e.what());
  }
  return cfg;
}

inline SequenceFile sequencesFromJson(const Json& root) {
  if (!root.is_object() || !root.contains("sequences") || !root["sequences"].is_array()) {
    throw Error(ErrorKind::SchemaError, "sequence file needs a \"sequences\" array");
  }
  SequenceFile file;
  try {
    if (root.contains("seed")) file.seed = root.at("seed").get<std::uint64_t>();
    if (root.contains("config")) file.config = configFromJson(root.at("config"));
    file.config.seed = file.seed;
    for (const auto& s : root.at("sequences")) {
      ViewportSequence seq;
      for (const auto& c : s.at("centers")) seq.centers.push_back(detail::coordFromJson(c));
      seq.start = s.contains("start") ? detail::coordFromJson(s.at("start"))
                                      : (seq.centers.empty() ? SphereCoord{} : seq.centers.front());
      if (s.contains("chosen")) seq.chosenIndices = s.at("chosen").get<std::vector<int>>();
      for (int k : seq.chosenIndices) {
        if (k < 0 || k >= kNumDirections) throw Error(ErrorKind::SchemaError, "chosen index out of range");
      }
      file.sequences.push_back(std::move(seq));
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::SchemaError, std::string("sequence file: ") + e.what());
  }
  return file;
}

inline SequenceFile loadSequences(const std::filesystem::path& path) {
  return sequencesFromJson(detail::parseJson(readText(path), path.string()));
}

inline Scanpath toScanpath(const ViewportSequence& seq, std::string label) {
  return Scanpath{seq.centers, std::move(label)};
}

inline std::vector<Scanpath> toScanpaths(std::span<const ViewportSequence> sequences) {
  std::vector<Scanpath> out;
  for (std::size_t i = 0; i < sequences.size(); ++i) out.push_back(toScanpath(sequences[i], "seq-" + std::to_string(i)));
  return out;
}

/// Keeps points round(k (L - 1) / (count - 1)), k = 0..count-1. Paths with
/// at most `count` points are returned unchanged.
inline Scanpath subsample(const Scanpath& path, std::size_t count) {
  const std::size_t len = path.points.size();
  if (count < 2 || len <= count) return path;
  Scanpath out{{}, path.label};
  out.points.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double pos = static_cast<double>(k) * static_cast<double>(len - 1) / static_cast<double>(count - 1);
    out.points.push_back(path.points[static_cast<std::size_t>(std::lround(pos))]);
  }
  return out;
}

/// Ground-truth JSON: { "image", "paths": [ { "label", "points": [[lat, lon], ...] } ] }.
/// A sequence file is accepted too, each sequence becoming one path.
inline std::vector<Scanpath> scanpathsFromJson(const Json& root) {
  if (root.is_object() && root.contains("sequences")) return toScanpaths(sequencesFromJson(root).sequences);
  if (!root.is_object() || !root.contains("paths") || !root["paths"].is_array()) {
    throw Error(ErrorKind::SchemaError, "scanpath file needs a \"paths\" array");
  }
  std::vector<Scanpath> out;
  try {
    for (const auto& p : root.at("paths")) {
      Scanpath path;
      path.label = p.contains("label") ? p.at("label").get<std::string>() : "path-" + std::to_string(out.size());
      for (const auto& c : p.at("points")) path.points.push_back(detail::coordFromJson(c));
      if (path.points.empty()) throw Error(ErrorKind::SchemaError, "path '" + path.label + "' has no points");
      out.push_back(std::move(path));
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::SchemaError, std::string("scanpath file: ") + e.what());
  }
  return out;
}

/// CSV rows label,t,lat,lon; a header row is optional. Points are ordered by t.
inline std::vector<Scanpath> scanpathsFromCsv(const std::string& text) {
  std::vector<Scanpath> out;
  std::vector<std::vector<std::pair<double, SphereCoord>>> staged;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto cells = detail::splitCsvLine(line);
    if (first) {
      first = false;
      if (cells.size() >= 4 && cells[2] == "lat") continue;
    }
    if (cells.size() < 4) throw Error(ErrorKind::SchemaError, "CSV row needs label,t,lat,lon: " + line);
    const double t = detail::parseNumber(cells[1], "t");
    const double lat = detail::parseNumber(cells[2], "lat");
    const double lon = detail::parseNumber(cells[3], "lon");
    std::size_t idx = 0;
    while (idx < out.size() && out[idx].label != cells[0]) ++idx;
    if (idx == out.size()) {
      out.push_back(Scanpath{{}, cells[0]});
      staged.emplace_back();
    }
    try {
      staged[idx].emplace_back(t, SphereCoord(lat, lon));
    } catch (const Error& e) {
      throw Error(ErrorKind::SchemaError, e.what());
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::stable_sort(staged[i].begin(), staged[i].end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [t, c] : staged[i]) out[i].points.push_back(c);
  }
  return out;
}

inline std::vector<Scanpath> loadScanpaths(const std::filesystem::path& path,
                                           std::optional<std::size_t> subsampleTo = std::nullopt) {
  const std::string text = readText(path);
  const auto firstChar = text.find_first_not_of(" \t\r\n");
  std::vector<Scanpath> paths = (firstChar != std::string::npos && (text[firstChar] == '{' || text[firstChar] == '['))
                                    ? scanpathsFromJson(detail::parseJson(text, path.string()))
                                    : scanpathsFromCsv(text);
  if (paths.empty()) throw Error(ErrorKind::SchemaError, path.string() + " contains no scanpaths");
  if (subsampleTo) {
    for (auto& p : paths) p = subsample(p, *subsampleTo);
  }
  return paths;
}

/// { "image", "finalScore", "perSequence": [ { "sequenceId", "value" } ], "density": [72] }
inline Json scoreReportToJson(const std::string& image, double finalScore, std::span<const SequenceScore> scores,
                              const DensityGrid& density) {
  Json root;
  root["image"] = image;
  root["finalScore"] = finalScore;
  Json per = Json::array();
  for (const auto& s : scores) per.push_back(Json{{"sequenceId", s.sequenceId}, {"value", s.value}});
  root["perSequence"] = std::move(per);
  root["density"] = density.counts;
  return root;
}

inline Json densityToJson(const std::string& image, const DensityGrid& density) {
  Json root;
  root["image"] = image;
  root["rows"] = kRegionRows;
  root["cols"] = kRegionCols;
  root["total"] = density.total;
  root["density"] = density.counts;
  return root;
}

inline Json metricRowToJson(const std::string& method, const MetricValues& v) {
  return Json{{"method", method}, {"lev", v.lev}, {"dtw", v.dtw}, {"rec", v.rec}};
}

}  // namespace panoview
