#pragma once

#include <json.hpp>
#include <string>

#include "g2forms/const_form.hpp"
#include "g2forms/metric.hpp"

namespace g2f {

/// Parse a textual form literal: signed rational coefficients against basis
/// monomials "dx[i,j,...]", e.g. "dx[1,2,3] + 3/2 dx[1,4,5] - dx[2,5,7]".
FormQ parse_form(const std::string& text);

std::string form_str(const FormQ& f);
std::string form_str(const FormD& f, double drop_tol = 0.0);

}  // namespace g2f

// json serialization lives next to the types (nlohmann ADL)
namespace g2f {
void to_json(nlohmann::json& j, const FormD& f);
void to_json(nlohmann::json& j, const Metric7& m);
}  // namespace g2f
