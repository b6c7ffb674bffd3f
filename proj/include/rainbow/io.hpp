#pragma once

// JSON form of a coloured instance, shared by `sample` and `search`.

#include "rainbow/colouring.hpp"
#include "rainbow/config_model.hpp"
#include "rainbow/errors.hpp"
#include "rainbow/harness.hpp"

#include "json.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace rainbow {

/// Pairing lines straight from the half-edge ids stored on the edges. Edge
/// ids follow the sorted line order.
inline std::vector<std::string> pairing_lines(const Multigraph& g) {
  std::vector<std::string> out;
  out.reserve(g.edge_count());
  for (const auto& e : g.edges) {
    const auto a = locate(e.hu, g.d), b = locate(e.hv, g.d);
    out.push_back(std::to_string(a.cell) + "." + std::to_string(a.slot) + "-" + std::to_string(b.cell) + "." +
                  std::to_string(b.slot));
  }
  return out;
}

inline nlohmann::json instance_json(const mc::Instance& inst, mc::Model model, int n, std::uint64_t seed) {
  nlohmann::json edges = nlohmann::json::array();
  for (std::size_t e = 0; e < inst.graph.edge_count(); ++e)
    edges.push_back({{"id", e},
                     {"u", inst.graph.edges[e].u},
                     {"v", inst.graph.edges[e].v},
                     {"colour", inst.colouring.colour[e]}});
  return {{"model", mc::to_string(model)},
          {"n", n},
          {"d", inst.graph.d},
          {"seed", seed},
          {"vertices", inst.graph.n},
          {"colours", inst.colouring.colours},
          {"per_colour", inst.colouring.q},
          {"pairing", pairing_lines(inst.graph)},
          {"edges", edges}};
}

inline mc::Instance parse_instance_json(const nlohmann::json& j) {
  try {
    const int vertices = j.at("vertices").get<int>();
    const int d = j.at("d").get<int>();
    const auto lines = j.at("pairing").get<std::vector<std::string>>();
    mc::Instance inst;
    inst.graph = project_multigraph(parse_pairing(DegreeSpec{vertices, d}, lines));
    inst.colouring.colours = j.at("colours").get<int>();
    inst.colouring.q = j.at("per_colour").get<int>();
    const auto& edges = j.at("edges");
    if (edges.size() != inst.graph.edge_count()) throw ParameterError("edge list does not match pairing");
    for (std::size_t e = 0; e < edges.size(); ++e) {
      if (edges[e].at("id").get<std::size_t>() != e) throw ParameterError("edges must be listed in id order");
      inst.colouring.colour.push_back(edges[e].at("colour").get<int>());
    }
    inst.colouring.validate(inst.graph.edge_count());
    return inst;
  } catch (const nlohmann::json::exception& ex) {
    throw ParameterError(std::string("malformed instance: ") + ex.what());
  }
}

inline mc::Instance sample_instance(mc::Model model, int n, int d, std::uint64_t seed) {
  Stream rng(seed, 0);
  switch (model) {
    case mc::Model::hamilton:
      if (d < 4 || d % 2) throw ParameterError("hamilton model needs even d >= 4");
      return mc::sample_hamilton_instance(n, d, rng);
    case mc::Model::matching: return mc::sample_matching_instance(n, d, rng);
    case mc::Model::planted: return mc::sample_planted_instance(n, d, rng);
  }
  throw ParameterError("unknown model");
}

}  // namespace rainbow
