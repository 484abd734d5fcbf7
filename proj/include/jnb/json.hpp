#pragma once

// JSON encodings of piecewise functions, moment reports, syntheses and check
// reports. Doubles use nlohmann's shortest round-trip form; non-finite values
// are written as the strings "inf", "-inf" and "nan".

#include <cmath>
#include <limits>
#include <string>

#include <nlohmann/json.hpp>

#include "jnb/errors.hpp"
#include "jnb/optimizers.hpp"
#include "jnb/piecewise.hpp"
#include "jnb/verify.hpp"

namespace jnb {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "jn-bellman/1";

inline Json real_to_json(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

inline double real_from_json(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw DomainError("expected a number, got " + j.dump());
}

namespace detail {

inline const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) throw DomainError("expected a JSON object, got " + j.dump());
  const auto it = j.find(key);
  if (it == j.end()) throw DomainError(std::string("missing field '") + key + "'");
  return *it;
}

}  // namespace detail

inline Json to_json(const Piece& p) {
  return {{"a", p.a}, {"b", p.b}, {"c0", p.c0}, {"c1", p.c1}, {"reversed", p.reversed}};
}

inline Piece piece_from_json(const Json& j) {
  const Json& rev = detail::field(j, "reversed");
  if (!rev.is_boolean()) throw DomainError("field 'reversed' must be a boolean");
  return Piece{real_from_json(detail::field(j, "a")), real_from_json(detail::field(j, "b")),
               real_from_json(detail::field(j, "c0")), real_from_json(detail::field(j, "c1")), rev.get<bool>()};
}

inline Json to_json(const PiecewiseLogAffine& f) {
  Json out = Json::array();
  for (const auto& p : f.pieces()) out.push_back(to_json(p));
  return out;
}

inline PiecewiseLogAffine function_from_json(const Json& j) {
  if (!j.is_array()) throw DomainError("a piecewise function is a JSON array of pieces");
  std::vector<Piece> pieces;
  pieces.reserve(j.size());
  for (const auto& e : j) pieces.push_back(piece_from_json(e));
  return PiecewiseLogAffine(std::move(pieces));
}

/// Parses text produced by `to_json(f).dump()`.
inline PiecewiseLogAffine function_from_string(const std::string& text) {
  try {
    return function_from_json(Json::parse(text));
  } catch (const Json::exception& e) {
    throw DomainError(std::string("malformed JSON: ") + e.what());
  }
}

inline Json to_json(const MomentReport& r) {
  return {{"mean", real_to_json(r.mean)},
          {"second", real_to_json(r.second)},
          {"exp_abs", real_to_json(r.exp_abs)},
          {"bmo_norm_lb", real_to_json(r.bmo_norm_lb)}};
}

inline MomentReport moment_report_from_json(const Json& j) {
  return {real_from_json(detail::field(j, "mean")), real_from_json(detail::field(j, "second")),
          real_from_json(detail::field(j, "exp_abs")), real_from_json(detail::field(j, "bmo_norm_lb"))};
}

inline Json to_json(const Synthesis& s) {
  return {{"eps", s.spec.eps.value()},
          {"x1", s.spec.target.x1},
          {"x2", s.spec.target.x2},
          {"region", s.spec.region},
          {"construction", std::string(to_string(s.spec.construction))},
          {"mirrored", s.spec.mirrored},
          {"B", real_to_json(s.bellman)},
          {"pieces", to_json(s.function)},
          {"report", to_json(s.report)},
          {"errors",
           {{"mean", real_to_json(s.mean_error)},
            {"second", real_to_json(s.second_error)},
            {"exp_abs_rel", real_to_json(s.exp_abs_rel_error)},
            {"bmo_excess", real_to_json(s.bmo_excess)}}},
          {"verified", s.verified()}};
}

inline Json to_json(const CheckReport& r) {
  Json offenders = Json::array();
  for (const auto& o : r.offenders) {
    offenders.push_back({{"label", o.label}, {"x1", o.p.x1}, {"x2", o.p.x2}, {"error", real_to_json(o.error)}});
  }
  Json metrics = Json::object();
  for (const auto& [k, v] : r.metrics) metrics[k] = real_to_json(v);
  return {{"check", r.check},
          {"eps", r.eps},
          {"samples", r.samples},
          {"worst", real_to_json(r.worst)},
          {"tol", r.tol},
          {"pass", r.pass},
          {"offenders", offenders},
          {"metrics", metrics}};
}

}  // namespace jnb
