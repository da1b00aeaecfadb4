#include "control/trajectory_log.hpp"

#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace ssilkc::control {

void TrajectoryLog::append(const TrajectorySample& sample) {
  if (!samples_.empty() && !(sample.t > samples_.back().t))
    throw std::logic_error("TrajectoryLog: time stamps must increase strictly");
  samples_.push_back(sample);
}

void TrajectoryLog::write_csv(std::ostream& out) const {
  out << "t_s,x_mm,y_mm,z_mm,yaw_deg,pitch_deg,roll_deg";
  for (int i = 0; i < 9; ++i) out << ",spring" << i << "_mm";
  for (int i = 0; i < 9; ++i) out << ",f_sensor" << i << "_hz";
  for (int i = 0; i < 9; ++i) out << ",pressure" << i << "_kpa";
  for (int i = 0; i < 9; ++i) out << ",saturated" << i;
  out << ",goal_x_mm,goal_y_mm,goal_z_mm,goal_yaw_deg,goal_pitch_deg,goal_roll_deg,scaled_error_norm\n";
  out << std::setprecision(10);
  for (const auto& s : samples_) {
    out << s.t;
    for (double v : s.pose.to_array()) out << ',' << v;
    for (double v : s.spring_lengths) out << ',' << v;
    for (double v : s.f_sensor) out << ',' << v;
    for (double v : s.pressures) out << ',' << v;
    for (bool b : s.saturation_flags) out << ',' << (b ? 1 : 0);
    for (double v : s.goal.to_array()) out << ',' << v;
    out << ',' << s.scaled_error_norm << '\n';
  }
}

std::string TrajectoryLog::to_csv() const {
  std::ostringstream os;
  write_csv(os);
  return os.str();
}

}  // namespace ssilkc::control
