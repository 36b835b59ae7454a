#include "funcito/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "funcito/errors.hpp"

namespace funcito {

bool ExperimentReport::pass() const {
  for (const auto& m : metrics)
    if (!m.pass) return false;
  return true;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string report_csv(const ExperimentReport& rep) {
  std::ostringstream os;
  os << "experiment,quantity,mean,stderr,n\n";
  for (const auto& r : rep.rows)
    os << rep.experiment << ',' << r.quantity << ',' << format_double(r.mean) << ','
       << format_double(r.stderr_) << ',' << r.n << '\n';
  for (const auto& m : rep.metrics)
    os << rep.experiment << ",metric:" << m.name << ',' << format_double(m.value) << ','
       << format_double(m.tolerance) << ',' << (m.pass ? 1 : 0) << '\n';
  return os.str();
}

std::string report_json(const ExperimentReport& rep) {
  nlohmann::json j;
  j["experiment"] = rep.experiment;
  j["seed"] = rep.seed;
  j["pass"] = rep.pass();
  j["wall_ms"] = rep.wall_ms;
  j["rows"] = nlohmann::json::array();
  for (const auto& r : rep.rows)
    j["rows"].push_back({{"quantity", r.quantity}, {"mean", r.mean}, {"stderr", r.stderr_}, {"n", r.n}});
  j["metrics"] = nlohmann::json::array();
  for (const auto& m : rep.metrics)
    j["metrics"].push_back(
        {{"name", m.name}, {"value", m.value}, {"tolerance", m.tolerance}, {"pass", m.pass}});
  return j.dump(2) + "\n";
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open for writing: " + tmp.string());
    out << content;
    if (!out) throw ConfigError("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw ConfigError("cannot rename " + tmp.string() + " to " + path + ": " + ec.message());
}

}  // namespace funcito
