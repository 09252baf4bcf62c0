#include "json_io.hpp"

#include <algorithm>

namespace cdplan::io {

const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + ": expected an object");
  const auto it = j.find(key);
  if (it == j.end()) throw ValidationError(where + "." + key + ": missing");
  return *it;
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ValidationError(where + ": expected a number");
  return j.get<double>();
}

double number_at(const json& j, const char* key, const std::string& where) {
  return number(field(j, key, where), where + "." + key);
}

double number_or(const json& j, const char* key, double fallback, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return number(j.at(key), where + "." + key);
}

int integer_at(const json& j, const char* key, const std::string& where) {
  const json& v = field(j, key, where);
  if (!v.is_number_integer()) throw ValidationError(where + "." + key + ": expected an integer");
  return v.get<int>();
}

bool boolean_or(const json& j, const char* key, bool fallback, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  if (!j.at(key).is_boolean()) throw ValidationError(where + "." + key + ": expected true or false");
  return j.at(key).get<bool>();
}

std::string string_or(const json& j, const char* key, const std::string& fallback,
                      const std::string& where) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  if (!j.at(key).is_string()) throw ValidationError(where + "." + key + ": expected a string");
  return j.at(key).get<std::string>();
}

json point(Point2 p) { return json::array({p.x, p.y}); }

Point2 point(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) throw ValidationError(where + ": expected [x, y]");
  return {number(j[0], where + "[0]"), number(j[1], where + "[1]")};
}

std::vector<Point2> loop(const json& j, const std::string& where) {
  if (!j.is_array()) throw ValidationError(where + ": expected a list of [x, y]");
  std::vector<Point2> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(point(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

json circle(const Circle& c) {
  return {{"cx", c.center().x}, {"cy", c.center().y}, {"r", c.radius()}};
}

Circle circle(const json& j, const std::string& where) {
  const Point2 c{number_at(j, "cx", where), number_at(j, "cy", where)};
  const double r = number_at(j, "r", where);
  try {
    return Circle(c, r);
  } catch (const InvalidGeometry& e) {
    throw ValidationError(where + ": " + e.what());
  }
}

json shape(const Shape& s) {
  if (const auto* c = std::get_if<Circle>(&s)) return {{"circle", circle(*c)}};
  json pts = json::array();
  for (Point2 p : std::get<ConvexPolygon>(s).vertices()) pts.push_back(point(p));
  return {{"polygon", pts}};
}

Shape shape(const json& j, const std::string& where) {
  if (j.contains("circle")) return circle(j.at("circle"), where + ".circle");
  if (j.contains("polygon")) {
    try {
      return ConvexPolygon(loop(j.at("polygon"), where + ".polygon"));
    } catch (const InvalidGeometry& e) {
      throw ValidationError(where + ".polygon: " + e.what());
    }
  }
  throw ValidationError(where + ": needs a polygon or a circle");
}

json state(const RobotState& x) { return json::array({x.x, x.y, x.theta}); }

RobotState state(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) throw ValidationError(where + ": expected [x, y, theta]");
  return {number(j[0], where + "[0]"), number(j[1], where + "[1]"), number(j[2], where + "[2]")};
}

json control(const Control& u) { return json::array({u[0], u[1], u[2]}); }

Control control(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) throw ValidationError(where + ": expected three values");
  return {number(j[0], where + "[0]"), number(j[1], where + "[1]"), number(j[2], where + "[2]")};
}

json parse(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n');
    const auto nl = text.rfind('\n', upto == 0 ? 0 : upto - 1);
    const auto col = nl == std::string::npos ? upto + 1 : upto - nl;
    throw ParseError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " +
                     e.what());
  }
}

}  // namespace cdplan::io
