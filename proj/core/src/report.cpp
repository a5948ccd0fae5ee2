#include "g2forms/report.hpp"

#include <fstream>

#include "g2forms/error.hpp"

namespace g2f {

Report::Report(std::string command, const QuadratureSpec& spec) {
  j_["schema_version"] = kReportSchemaVersion;
  j_["library_version"] = kLibraryVersion;
  j_["command"] = std::move(command);
  j_["parameters"] = nlohmann::json::object();
  j_["quadrature"] = {{"method", quad_method_name(spec.method)},
                      {"samples", spec.samples},
                      {"seed", spec.seed},
                      {"nodes", spec.nodes},
                      {"sphere_degree", spec.sphere_degree},
                      {"tolerance", spec.tolerance}};
  j_["values"] = nlohmann::json::array();
  j_["verdicts"] = nlohmann::json::array();
  j_["notes"] = nlohmann::json::array();
  j_["wall_time_ms"] = 0.0;
}

void Report::set_parameter(const std::string& key, const nlohmann::json& v) {
  j_["parameters"][key] = v;
}

void Report::add_value(const std::string& name, double value, double error) {
  j_["values"].push_back({{"name", name}, {"value", value}, {"error", error}});
}

void Report::add_verdict(const std::string& name, bool pass, double tolerance, double measured) {
  j_["verdicts"].push_back(
      {{"name", name}, {"pass", pass}, {"tolerance", tolerance}, {"measured", measured}});
  if (!pass) all_pass_ = false;
}

void Report::add_note(const std::string& note) { j_["notes"].push_back(note); }

void Report::set_wall_time_ms(double ms) { j_["wall_time_ms"] = ms; }

bool Report::all_pass() const { return all_pass_; }

nlohmann::json Report::json() const { return j_; }

void Report::write(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw Error("Report: cannot open '" + path + "' for writing");
  os << j_.dump(2) << "\n";
}

void CsvWriter::write(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw Error("CsvWriter: cannot open '" + path + "' for writing");
  for (size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << "\n";
  os.precision(17);
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << "\n";
  }
}

}  // namespace g2f
