#include <fstream>
#include <iomanip>
#include <ostream>
#include <string>

#include <json.hpp>

#include "pfem/errors.hpp"
#include "pfem/mesh.hpp"

namespace pfem {

using nlohmann::json;

MeshDocument read_mesh_json(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("mesh document: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("vertices") || !doc.contains("elements")) {
    throw ConfigError("mesh document: expected an object with 'vertices' and 'elements'");
  }
  std::vector<Point> vertices;
  std::vector<std::array<int, 4>> elements;
  std::vector<int> degrees;
  try {
    for (const auto& v : doc.at("vertices")) {
      if (!v.is_array() || v.size() != 2) throw ConfigError("mesh document: vertex must be [x, y]");
      vertices.emplace_back(v[0].get<double>(), v[1].get<double>());
    }
    for (const auto& e : doc.at("elements")) {
      if (!e.is_array() || e.size() != 4) {
        throw ConfigError("mesh document: element must list 4 vertex indices");
      }
      elements.push_back({e[0].get<int>(), e[1].get<int>(), e[2].get<int>(), e[3].get<int>()});
    }
    if (doc.contains("degrees")) degrees = doc.at("degrees").get<std::vector<int>>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("mesh document: ") + e.what());
  }
  if (!degrees.empty() && degrees.size() != elements.size()) {
    throw ConfigError("mesh document: 'degrees' must have one entry per element");
  }
  return {ParallelogramMesh(std::move(vertices), std::move(elements)), std::move(degrees)};
}

MeshDocument read_mesh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open mesh file '" + path + "'");
  return read_mesh_json(in);
}

void write_mesh_json(std::ostream& out, const ParallelogramMesh& mesh,
                     const std::vector<int>& degrees) {
  out << std::setprecision(17) << "{\n  \"vertices\": [";
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    out << (v ? ",\n    " : "\n    ") << '[' << mesh.vertex(v).x() << ", " << mesh.vertex(v).y()
        << ']';
  }
  out << "\n  ],\n  \"elements\": [";
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const auto& e = mesh.element(k);
    out << (k ? ",\n    " : "\n    ") << '[' << e[0] << ", " << e[1] << ", " << e[2] << ", "
        << e[3] << ']';
  }
  out << "\n  ]";
  if (!degrees.empty()) {
    out << ",\n  \"degrees\": [";
    for (std::size_t k = 0; k < degrees.size(); ++k) out << (k ? ", " : "") << degrees[k];
    out << ']';
  }
  out << "\n}\n";
}

}  // namespace pfem
