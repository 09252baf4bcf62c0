#pragma once

#include <string>

#include <json.hpp>

#include "cdplan/errors.hpp"
#include "cdplan/geometry.hpp"
#include "cdplan/dynamics.hpp"

namespace cdplan::io {

using json = nlohmann::json;

// Field access that reports the offending path on a type or presence error.
const json& field(const json& j, const char* key, const std::string& where);
double number(const json& j, const std::string& where);
double number_at(const json& j, const char* key, const std::string& where);
double number_or(const json& j, const char* key, double fallback, const std::string& where);
int integer_at(const json& j, const char* key, const std::string& where);
bool boolean_or(const json& j, const char* key, bool fallback, const std::string& where);
std::string string_or(const json& j, const char* key, const std::string& fallback,
                      const std::string& where);

json point(Point2 p);
Point2 point(const json& j, const std::string& where);
std::vector<Point2> loop(const json& j, const std::string& where);

json circle(const Circle& c);
Circle circle(const json& j, const std::string& where);

json shape(const Shape& s);
Shape shape(const json& j, const std::string& where);

json state(const RobotState& x);
RobotState state(const json& j, const std::string& where);

json control(const Control& u);
Control control(const json& j, const std::string& where);

/// Parses text, turning syntax errors into ParseError with line and column.
json parse(const std::string& text, const std::string& source);

}  // namespace cdplan::io
