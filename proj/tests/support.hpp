#pragma once

#include <string>

#include "ectaks/io.hpp"
#include "oracles.hpp"

namespace support {

inline ectaks::CurveParams curve(const std::string& name) {
  return ectaks::io::curve_from_json(ectaks::io::read_json(oracle::fixture("curves/" + name + ".json")));
}

inline oracle::Curve naive(const ectaks::CurveParams& c) { return {c.q, c.a, c.b}; }

inline oracle::Pt naive(const ectaks::CurvePoint& p) { return {p.infinity, p.x, p.y}; }

}  // namespace support
