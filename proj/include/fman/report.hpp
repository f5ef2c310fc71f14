#pragma once

#include <map>
#include <string>
#include <vector>

namespace fman {

struct ReportItem {
  std::string name;
  double residual = 0.0;
};

/// Structured residual/verdict record emitted by every check operation.
/// Residuals stored in items are normalized (scale-free); auxiliary raw
/// quantities go into `values`. For residual-style checks the verdict is
/// max residual <= tol; check_cyclic inverts this (see convention_notes).
struct Report {
  std::string check;
  std::vector<ReportItem> items;
  bool verdict = false;
  std::vector<double> point;
  int order = 0;
  double tol = 0.0;
  std::string convention_notes;
  std::map<std::string, double> values;

  double max_residual() const;
  Report& add(std::string name, double residual);
  /// Sets verdict = max residual <= tol.
  Report& finish();
};

std::string report_to_json(const Report& r);
std::string reports_to_json(const std::vector<Report>& rs, const std::map<std::string, std::string>& meta);

/// Text rendering used by the CLI and error messages in tests.
std::string report_to_text(const Report& r);

}  // namespace fman
