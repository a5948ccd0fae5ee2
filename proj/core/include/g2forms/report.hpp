#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "g2forms/quadrature.hpp"

namespace g2f {

inline constexpr const char* kLibraryVersion = "0.1.0";
inline constexpr const char* kReportSchemaVersion = "1";

/// Machine-readable record of one verification run.  Deterministic modes
/// reproduce every value bit-exactly under the same parameters and seed.
class Report {
public:
  Report(std::string command, const QuadratureSpec& spec);

  void set_parameter(const std::string& key, const nlohmann::json& v);
  void add_value(const std::string& name, double value, double error = 0.0);
  void add_verdict(const std::string& name, bool pass, double tolerance, double measured);
  void add_note(const std::string& note);
  void set_wall_time_ms(double ms);

  bool all_pass() const;
  nlohmann::json json() const;
  void write(const std::string& path) const;

private:
  nlohmann::json j_;
  bool all_pass_ = true;
};

/// Plot-ready CSV: one header row then data rows.
struct CsvWriter {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  void write(const std::string& path) const;
};

}  // namespace g2f
