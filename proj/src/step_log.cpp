#include "dronesim/step_log.hpp"

namespace dronesim {

std::string_view step_log_header() {
  return "step,t,drone,x,y,z,qw,qx,qy,qz,roll,pitch,yaw,vx,vy,vz,wx,wy,wz,"
         "rpm0,rpm1,rpm2,rpm3,cmd0,cmd1,cmd2,cmd3,reward";
}

StepLogWriter::StepLogWriter(std::ostream& out) : out_(out) { out_ << step_log_header() << '\n'; }

void StepLogWriter::write(const Env& env, const std::map<int, double>& rewards) {
  const auto step = env.step_count() == 0 ? 0 : env.step_count() - 1;
  const std::string t = format_double17(env.sim_time());
  for (std::size_t i = 0; i < env.num_drones(); ++i) {
    std::string line = std::to_string(step);
    line += ',';
    line += t;
    line += ',';
    line += std::to_string(i);
    for (double v : state_vector(env.states()[i])) {
      line += ',';
      line += format_double17(v);
    }
    const Rpm4& cmd = env.commanded_rpms()[i];
    for (int k = 0; k < 4; ++k) {
      line += ',';
      line += format_double17(cmd[k]);
    }
    line += ',';
    if (auto it = rewards.find(static_cast<int>(i)); it != rewards.end()) {
      line += format_double17(it->second);
    }
    out_ << line << '\n';
    ++rows_;
  }
}

}  // namespace dronesim
