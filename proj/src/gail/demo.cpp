#include "gail/demo.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <stdexcept>

#include "common/errors.hpp"
#include "json.hpp"

namespace ssilkc::gail {

namespace {

using nlohmann::json;

template <std::size_t N>
std::array<double, N> fixed_array(const json& j, const char* key) {
  const auto v = j.at(key).get<std::vector<double>>();
  if (v.size() != N) throw std::runtime_error(std::string("demo record: field ") + key + " has the wrong length");
  std::array<double, N> out{};
  std::copy(v.begin(), v.end(), out.begin());
  return out;
}

}  // namespace

std::vector<std::vector<DemoRecord>> DemoFile::sequences() const {
  std::vector<std::vector<DemoRecord>> out;
  std::map<int, std::size_t> slot;
  for (const auto& r : records) {
    auto it = slot.find(r.sequence);
    if (it == slot.end()) {
      it = slot.emplace(r.sequence, out.size()).first;
      out.emplace_back();
    }
    out[it->second].push_back(r);
  }
  return out;
}

std::string demo_header() { return json{{"format", kDemoFormat}, {"version", kDemoVersion}}.dump(); }

std::string format_demo_record(const DemoRecord& r) {
  json j;
  j["t"] = r.t;
  j["chamber_lengths"] = r.chamber_lengths;
  j["spring_lengths"] = r.spring_lengths;
  j["f_sensor"] = r.f_sensor;
  j["pose"] = r.pose.to_array();
  j["goal"] = r.goal.to_array();
  j["scene_id"] = r.scene_id;
  j["source"] = r.source;
  j["sequence"] = r.sequence;
  return j.dump();
}

void write_demo(std::ostream& out, const std::vector<DemoRecord>& records) {
  out << demo_header() << '\n';
  for (const auto& r : records) out << format_demo_record(r) << '\n';
}

DemoFile read_demo(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("demo file: missing header line");
  const json header = json::parse(line);
  if (header.value("format", "") != kDemoFormat)
    throw IoError("demo file: not a demo file (header " + line + ")");
  if (header.value("version", 0) != kDemoVersion)
    throw IoError("demo file: unsupported version in header " + line);
  DemoFile file;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      DemoRecord r;
      r.t = j.at("t").get<double>();
      r.chamber_lengths = fixed_array<9>(j, "chamber_lengths");
      r.spring_lengths = fixed_array<9>(j, "spring_lengths");
      r.f_sensor = fixed_array<9>(j, "f_sensor");
      r.pose = Pose6D::from_array(fixed_array<6>(j, "pose"));
      r.goal = Pose6D::from_array(fixed_array<6>(j, "goal"));
      r.scene_id = j.at("scene_id").get<std::string>();
      r.source = j.at("source").get<std::string>();
      r.sequence = j.value("sequence", 0);
      file.records.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw IoError("demo file line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return file;
}

DemoFile load_demo(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open demo file " + path);
  return read_demo(in);
}

void save_demo(const std::string& path, const std::vector<DemoRecord>& records) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write demo file " + path);
  write_demo(out, records);
}

DemoDataset relabel_demos(const std::vector<std::vector<DemoRecord>>& sequences, const rl::RLConfig& cfg,
                          const rl::ActionCodec& codec) {
  DemoDataset out;
  for (const auto& seq : sequences) {
    if (seq.size() < 2) {
      std::cerr << "warning: skipping demo sequence with fewer than two records\n";
      ++out.skipped_sequences;
      continue;
    }
    if (out.source.empty()) out.source = seq.front().source;
    for (std::size_t t = 0; t + 1 < seq.size(); ++t) {
      DemoTransition d;
      d.goal = seq[t + 1].pose;
      d.s = rl::build_state(seq[t].pose, d.goal, cfg);
      const auto lo = codec.band().lo, hi = codec.band().hi;
      ChamberVec f = seq[t + 1].f_sensor;
      for (double& v : f) v = std::clamp(v, lo, hi);
      d.action_u = codec.to_normalized(f);
      out.records.push_back(d);
    }
  }
  return out;
}

}  // namespace ssilkc::gail
