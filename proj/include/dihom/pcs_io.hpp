#pragma once

#include <sstream>
#include <string>

#include <json.hpp>

#include "pcs.hpp"

namespace dihom {

inline nlohmann::json to_json(const PrecubicalSet& C) {
  nlohmann::json j;
  auto counts = C.counts();
  j["dim"] = C.dim();
  j["cells"] = counts;
  nlohmann::json neg = nlohmann::json::array(), pos = nlohmann::json::array();
  for (std::size_t n = 0; n + 1 < counts.size(); ++n) {
    nlohmann::json ln = nlohmann::json::array(), lp = nlohmann::json::array();
    for (std::size_t i = 0; i <= n; ++i) {
      std::vector<std::size_t> a, b;
      for (std::size_t c = 0; c < C.count(n + 1); ++c) {
        a.push_back(C.face(n + 1, c, i, Sign::minus));
        b.push_back(C.face(n + 1, c, i, Sign::plus));
      }
      ln.push_back(a);
      lp.push_back(b);
    }
    neg.push_back(ln);
    pos.push_back(lp);
  }
  j["faces"] = {{"neg", neg}, {"pos", pos}};
  if (C.has_labels()) {
    nlohmann::json labels = nlohmann::json::object();
    for (std::size_t e = 0; e < C.count(1); ++e)
      if (C.label(e)) labels[std::to_string(e)] = *C.label(e);
    j["labels"] = labels;
  }
  return j;
}

/// Reads the fixture schema; throws InvalidComplex on malformed input or broken face relations.
inline PrecubicalSet pcs_from_json(const nlohmann::json& j) {
  PrecubicalSet C;
  try {
    auto counts = j.at("cells").get<std::vector<std::size_t>>();
    const auto& neg = j.at("faces").at("neg");
    const auto& pos = j.at("faces").at("pos");
    C.ensure_levels(1);
    for (std::size_t v = 0; v < (counts.empty() ? 0 : counts[0]); ++v) C.add_vertex();
    for (std::size_t n = 1; n < counts.size(); ++n)
      for (std::size_t c = 0; c < counts[n]; ++c) {
        std::vector<std::size_t> a, b;
        for (std::size_t i = 0; i < n; ++i) {
          a.push_back(neg.at(n - 1).at(i).at(c).get<std::size_t>());
          b.push_back(pos.at(n - 1).at(i).at(c).get<std::size_t>());
        }
        C.add_cube(n, a, b);
      }
    if (j.contains("labels"))
      for (auto& [k, v] : j.at("labels").items()) {
        std::size_t e = std::stoul(k);
        if (e >= C.count(1)) throw InvalidComplex("label on unknown edge " + k);
        C.set_label(e, v.get<std::string>());
      }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidComplex(std::string("malformed complex: ") + e.what());
  }
  auto bad = validate(C);
  if (!bad.empty())
    throw InvalidComplex("face relation violated at cell " + std::to_string(bad.front().cell) + " of dimension " +
                         std::to_string(bad.front().n + 2));
  return C;
}

/// 1-skeleton as a DOT digraph; squares are listed as comments.
inline std::string to_dot(const PrecubicalSet& C, const std::string& name = "C") {
  std::ostringstream os;
  os << "digraph " << name << " {\n";
  for (std::size_t v = 0; v < C.vertices(); ++v) os << "  v" << v << ";\n";
  for (std::size_t e = 0; e < C.count(1); ++e) {
    os << "  v" << C.source(e) << " -> v" << C.target(e) << " [label=\"e" << e;
    if (C.label(e)) os << ":" << *C.label(e);
    os << "\"];\n";
  }
  for (std::size_t x = 0; x < C.count(2); ++x)
    os << "  // square " << x << ": d0- e" << C.face(2, x, 0, Sign::minus) << ", d0+ e" << C.face(2, x, 0, Sign::plus)
       << ", d1- e" << C.face(2, x, 1, Sign::minus) << ", d1+ e" << C.face(2, x, 1, Sign::plus) << "\n";
  os << "}\n";
  return os.str();
}

}  // namespace dihom
