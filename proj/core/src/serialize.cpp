#include "willslab/serialize.hpp"

#include <json.hpp>

#include "willslab/errors.hpp"
#include "willslab/numeric.hpp"

namespace wills {

namespace {

using nlohmann::json;

Eigen::VectorXd vector_from(const json& j, const char* field) {
  if (!j.contains(field) || !j[field].is_array())
    throw_error(ErrorKind::input,
                std::string("body JSON: missing array field '") + field + "'");
  const auto& arr = j[field];
  Eigen::VectorXd v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number())
      throw_error(ErrorKind::input,
                  std::string("body JSON: non-numeric entry in '") + field +
                      "'");
    v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
  }
  return v;
}

json to_array(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

} // namespace

std::string body_to_json(const ConvexBody& body) {
  json j;
  j["dim"] = body.dim();
  switch (body.kind()) {
    case BodyKind::box: {
      const auto& b = body.as_box();
      j["kind"] = "box";
      j["center"] = to_array(b.center);
      j["half_widths"] = to_array(b.half_widths);
      break;
    }
    case BodyKind::ball: {
      const auto& b = body.as_ball();
      j["kind"] = "ball";
      j["center"] = to_array(b.center);
      j["radius"] = b.radius;
      if (b.degenerate) j["degenerate"] = true;
      break;
    }
    case BodyKind::hpolytope: {
      const auto& p = body.as_hpolytope();
      j["kind"] = "hpolytope";
      json normals = json::array();
      for (Eigen::Index r = 0; r < p.normals.rows(); ++r)
        normals.push_back(to_array(p.normals.row(r).transpose()));
      j["normals"] = normals;
      j["offsets"] = to_array(p.offsets);
      j["interior_point"] = to_array(p.interior_point);
      if (p.enclosing_radius) j["enclosing_radius"] = *p.enclosing_radius;
      break;
    }
  }
  return j.dump(2);
}

ConvexBody body_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw_error(ErrorKind::input,
                std::string("body JSON: parse failure: ") + e.what());
  }
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw_error(ErrorKind::input, "body JSON: missing string field 'kind'");
  const std::string kind = j["kind"].get<std::string>();

  ConvexBody body = [&]() -> ConvexBody {
    if (kind == "box")
      return ConvexBody::box(vector_from(j, "center"),
                             vector_from(j, "half_widths"));
    if (kind == "ball") {
      const bool degenerate =
          j.value("degenerate", false) || j.value("radius", 0.0) == 0.0;
      if (degenerate) return ConvexBody::point(vector_from(j, "center"));
      if (!j.contains("radius") || !j["radius"].is_number())
        throw_error(ErrorKind::input, "body JSON: ball needs a radius");
      return ConvexBody::ball(vector_from(j, "center"),
                              j["radius"].get<double>());
    }
    if (kind == "hpolytope") {
      if (!j.contains("normals") || !j["normals"].is_array() ||
          j["normals"].empty())
        throw_error(ErrorKind::input,
                    "body JSON: hpolytope needs a nonempty 'normals' array");
      const auto& rows = j["normals"];
      const std::size_t m = rows.size();
      const std::size_t d = rows[0].is_array() ? rows[0].size() : 0;
      if (d == 0)
        throw_error(ErrorKind::input, "body JSON: malformed 'normals' rows");
      Eigen::MatrixXd normals(m, d);
      for (std::size_t r = 0; r < m; ++r) {
        if (!rows[r].is_array() || rows[r].size() != d)
          throw_error(ErrorKind::input, "body JSON: ragged 'normals' rows");
        for (std::size_t cidx = 0; cidx < d; ++cidx)
          normals(static_cast<Eigen::Index>(r),
                  static_cast<Eigen::Index>(cidx)) =
              rows[r][cidx].get<double>();
      }
      std::optional<double> radius;
      if (j.contains("enclosing_radius"))
        radius = j["enclosing_radius"].get<double>();
      return ConvexBody::hpolytope(std::move(normals),
                                   vector_from(j, "offsets"),
                                   vector_from(j, "interior_point"), radius);
    }
    throw_error(ErrorKind::input, "body JSON: unknown kind '" + kind + "'");
  }();

  if (j.contains("dim") && j["dim"].is_number_integer() &&
      j["dim"].get<int>() != body.dim())
    throw_error(ErrorKind::input,
                "body JSON: 'dim' disagrees with the vector lengths");
  return body;
}

std::string profile_to_json(const IntrinsicProfile& profile) {
  json j;
  j["d"] = profile.dim();
  json arr = json::array();
  for (double lv : profile.log_values()) {
    if (lv == kNegInf)
      arr.push_back(nullptr); // JSON has no -inf; null marks an exact zero
    else
      arr.push_back(lv);
  }
  j["log_v"] = arr;
  return j.dump(2);
}

IntrinsicProfile profile_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw_error(ErrorKind::input,
                std::string("profile JSON: parse failure: ") + e.what());
  }
  if (!j.contains("d") || !j.contains("log_v") || !j["log_v"].is_array())
    throw_error(ErrorKind::input, "profile JSON: need fields 'd' and 'log_v'");
  const int d = j["d"].get<int>();
  const auto& arr = j["log_v"];
  if (static_cast<int>(arr.size()) != d + 1)
    throw_error(ErrorKind::input, "profile JSON: log_v must have d+1 entries");
  std::vector<double> log_v(arr.size());
  for (std::size_t k = 0; k < arr.size(); ++k)
    log_v[k] = arr[k].is_null() ? kNegInf : arr[k].get<double>();
  return IntrinsicProfile::from_log_values(std::move(log_v));
}

} // namespace wills
