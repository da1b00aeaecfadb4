#include "arm/pipe_scene.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "common/errors.hpp"

namespace ssilkc::arm {

namespace {

double cylinder_inner_distance(const Cylinder& c, const Eigen::Vector3d& p) {
  const Eigen::Vector3d rel = p - c.origin;
  const double axial = rel.dot(c.direction);
  const double radial = (rel - axial * c.direction).norm();
  const double to_side = c.radius - radial;
  const double to_cap = c.half_length - std::abs(axial);
  if (std::isinf(to_side) && std::isinf(to_cap)) return std::numeric_limits<double>::infinity();
  return std::min(to_side, to_cap);
}

}  // namespace

void PipeScene::validate() const {
  if (cylinders.empty()) throw std::domain_error("pipe scene has no cylinders");
  for (std::size_t i = 0; i < cylinders.size(); ++i) {
    const auto& c = cylinders[i];
    if (!(c.radius > arm_body_radius))
      throw std::domain_error("cylinder " + std::to_string(i) + " radius must exceed the arm body radius");
    if (!(c.half_length > 0))
      throw std::domain_error("cylinder " + std::to_string(i) + " half length must be positive");
    if (std::abs(c.direction.norm() - 1.0) > 1e-9)
      throw std::domain_error("cylinder " + std::to_string(i) + " axis must be a unit vector");
  }
}

double PipeScene::signed_wall_distance(const Eigen::Vector3d& p) const {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& c : cylinders) best = std::max(best, cylinder_inner_distance(c, p));
  return best;
}

std::vector<Eigen::Vector3d> centerline_samples(std::span<const double> lengths, const ArmParams& params,
                                                int n_samples) {
  if (lengths.size() != kChambers) throw std::invalid_argument("centerline_samples: expected 9 lengths");
  if (n_samples < 2) throw std::domain_error("centerline_samples: need at least 2 samples");
  std::array<SectionArc, kSections> arcs{};
  double total = 0;
  for (std::size_t s = 0; s < kSections; ++s) {
    arcs[s] = section_arc_unchecked(lengths[3 * s], lengths[3 * s + 1], lengths[3 * s + 2],
                                    params.chamber_offset_radius);
    total += arcs[s].arc_length;
  }
  std::vector<Eigen::Vector3d> out;
  out.reserve(static_cast<std::size_t>(n_samples));
  Frame base;
  std::size_t section = 0;
  double consumed = 0;
  for (int k = 0; k < n_samples; ++k) {
    const double s = total * static_cast<double>(k) / static_cast<double>(n_samples - 1);
    while (section + 1 < kSections && s > consumed + arcs[section].arc_length) {
      const Frame end = arc_frame(arcs[section], arcs[section].arc_length);
      base.position += base.rotation * end.position;
      base.rotation = base.rotation * end.rotation;
      consumed += arcs[section].arc_length;
      ++section;
    }
    const double local_s = std::clamp(s - consumed, 0.0, arcs[section].arc_length);
    const Frame f = arc_frame(arcs[section], local_s);
    out.push_back(base.position + base.rotation * f.position);
  }
  return out;
}

CollisionReport collision_check(std::span<const double> lengths, const PipeScene& scene,
                                const ArmParams& params, int n_samples) {
  if (n_samples < 10) throw std::domain_error("collision_check: n_samples must be at least 10");
  scene.validate();
  CollisionReport rep;
  rep.worst_clearance = std::numeric_limits<double>::infinity();
  for (const auto& p : centerline_samples(lengths, params, n_samples)) {
    const double clearance = scene.signed_wall_distance(p) - scene.arm_body_radius;
    rep.worst_clearance = std::min(rep.worst_clearance, clearance);
  }
  rep.collides = rep.worst_clearance < 0.0;
  return rep;
}

PipeScene parse_scene(std::istream& in) {
  PipeScene scene;
  scene.cylinders.clear();
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string keyword;
    if (!(ls >> keyword)) continue;
    if (keyword == "cylinder") {
      Cylinder c;
      double dx, dy, dz;
      if (!(ls >> c.origin.x() >> c.origin.y() >> c.origin.z() >> dx >> dy >> dz >> c.radius >> c.half_length))
        throw std::runtime_error("scene line " + std::to_string(line_no) + ": expected 8 numbers after 'cylinder'");
      Eigen::Vector3d dir(dx, dy, dz);
      if (dir.norm() == 0.0) throw std::runtime_error("scene line " + std::to_string(line_no) + ": zero axis");
      c.direction = dir.normalized();
      scene.cylinders.push_back(c);
    } else if (keyword == "arm_body_radius") {
      if (!(ls >> scene.arm_body_radius))
        throw std::runtime_error("scene line " + std::to_string(line_no) + ": expected a radius");
    } else if (keyword == "id") {
      ls >> scene.id;
    } else {
      throw std::runtime_error("scene line " + std::to_string(line_no) + ": unknown keyword '" + keyword + "'");
    }
  }
  scene.validate();
  return scene;
}

PipeScene load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scene file " + path);
  return parse_scene(in);
}

std::string format_scene(const PipeScene& scene) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "id " << scene.id << "\n";
  os << "arm_body_radius " << scene.arm_body_radius << "\n";
  for (const auto& c : scene.cylinders) {
    os << "cylinder " << c.origin.x() << ' ' << c.origin.y() << ' ' << c.origin.z() << ' '
       << c.direction.x() << ' ' << c.direction.y() << ' ' << c.direction.z() << ' ' << c.radius << ' '
       << c.half_length << "\n";
  }
  return os.str();
}

PipeScene cross_pipe_scene(double diameter, double cross_height, double body_radius) {
  const double r = 0.5 * diameter;
  PipeScene scene;
  scene.id = "cross" + std::to_string(static_cast<int>(diameter));
  scene.arm_body_radius = body_radius;
  // Trunk: from well behind the base up past the crossing to the far outlet.
  const double trunk_bottom = -150.0;
  const double trunk_top = cross_height + r + 200.0;
  Cylinder trunk;
  trunk.origin = {0.0, 0.0, 0.5 * (trunk_bottom + trunk_top)};
  trunk.direction = Eigen::Vector3d::UnitZ();
  trunk.radius = r;
  trunk.half_length = 0.5 * (trunk_top - trunk_bottom);
  Cylinder branch;
  branch.origin = {0.0, 0.0, cross_height};
  branch.direction = Eigen::Vector3d::UnitX();
  branch.radius = r;
  branch.half_length = r + 250.0;
  scene.cylinders = {trunk, branch};
  return scene;
}

PipeScene open_scene() {
  PipeScene scene;
  scene.id = "open";
  Cylinder c;
  c.radius = std::numeric_limits<double>::infinity();
  c.half_length = std::numeric_limits<double>::infinity();
  scene.cylinders = {c};
  return scene;
}

}  // namespace ssilkc::arm
