#include "fman/report.hpp"

#include <algorithm>
#include <cstdio>
#include <json.hpp>

namespace fman {

double Report::max_residual() const {
  double m = 0.0;
  for (const auto& it : items) m = std::max(m, it.residual);
  return m;
}

Report& Report::add(std::string name, double residual) {
  items.push_back({std::move(name), residual});
  return *this;
}

Report& Report::finish() {
  verdict = max_residual() <= tol;
  return *this;
}

namespace {

nlohmann::json report_json(const Report& r) {
  nlohmann::json items = nlohmann::json::array();
  for (const auto& it : r.items) items.push_back({{"name", it.name}, {"residual", it.residual}});
  nlohmann::json j{{"check", r.check},        {"items", items},
                   {"verdict", r.verdict},    {"point", r.point},
                   {"order", r.order},        {"tolerance", r.tol},
                   {"convention_notes", r.convention_notes}};
  if (!r.values.empty()) j["values"] = r.values;
  return j;
}

}  // namespace

std::string report_to_json(const Report& r) { return report_json(r).dump(2); }

std::string reports_to_json(const std::vector<Report>& rs, const std::map<std::string, std::string>& meta) {
  nlohmann::json reports = nlohmann::json::array();
  bool all = true;
  for (const auto& r : rs) {
    reports.push_back(report_json(r));
    all = all && r.verdict;
  }
  nlohmann::json j;
  for (const auto& [k, v] : meta) j[k] = v;
  j["reports"] = reports;
  j["verdict"] = all;
  return j.dump(2);
}

std::string report_to_text(const Report& r) {
  std::string out = "check: " + r.check + "\n";
  char buf[64];
  for (const auto& it : r.items) {
    std::snprintf(buf, sizeof(buf), "%.17g", it.residual);
    out += "  " + it.name + std::string(std::max<int>(1, 28 - static_cast<int>(it.name.size())), ' ') + buf + "\n";
  }
  for (const auto& [k, v] : r.values) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out += "  [" + k + "] " + buf + "\n";
  }
  std::snprintf(buf, sizeof(buf), "%.3g", r.tol);
  out += std::string("  verdict: ") + (r.verdict ? "pass" : "FAIL") + " (tol " + buf + ")\n";
  if (!r.convention_notes.empty()) out += "  note: " + r.convention_notes + "\n";
  return out;
}

}  // namespace fman
