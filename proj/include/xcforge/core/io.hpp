#pragma once

#include "xcforge/core/types.hpp"

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace xcforge {

using json = nlohmann::json;

// write to a sibling temp file, then rename over the target
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::ParseError, "cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out) throw Error(ErrorCode::ParseError, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json point_to_json(const Point& p) {
  json a = json::array();
  for (Eigen::Index i = 0; i < p.size(); ++i) a.push_back(p(i));
  return a;
}

inline Point point_from_json(const json& j) {
  Point p(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) p(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return p;
}

inline json polytope_to_json(const Polytope& P) {
  json j;
  j["dim"] = P.dim;
  j["vertices"] = json::array();
  for (const auto& v : P.vertices) j["vertices"].push_back(point_to_json(v));
  j["facets"] = json::array();
  for (const auto& f : P.facets)
    j["facets"].push_back({{"normal", point_to_json(f.plane.normal)},
                           {"offset", f.plane.offset},
                           {"incident", f.incident}});
  return j;
}

inline Polytope polytope_from_json(const json& j) {
  try {
    Polytope P;
    P.dim = j.at("dim").get<int>();
    for (const auto& v : j.at("vertices")) P.vertices.push_back(point_from_json(v));
    for (const auto& f : j.at("facets")) {
      Facet F;
      F.plane.normal = point_from_json(f.at("normal"));
      F.plane.offset = f.at("offset").get<double>();
      F.incident = f.at("incident").get<std::vector<int>>();
      P.facets.push_back(std::move(F));
    }
    return P;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("polytope json: ") + e.what());
  }
}

inline std::string matrix_to_csv(const Matrix& M, const std::vector<std::string>& col_ids = {}) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (Eigen::Index j = 0; j < M.cols(); ++j) {
    if (j) os << ',';
    os << (col_ids.empty() ? std::to_string(j) : col_ids[static_cast<std::size_t>(j)]);
  }
  os << '\n';
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      if (j) os << ',';
      os << M(i, j);
    }
    os << '\n';
  }
  return os.str();
}

inline Matrix matrix_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::ParseError, "empty csv");
  std::size_t cols = line.empty() ? 0 : static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> r;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      try {
        std::size_t used = 0;
        r.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        throw Error(ErrorCode::ParseError, "bad csv cell '" + cell + "'");
      }
    }
    if (r.size() != cols) throw Error(ErrorCode::ParseError, "ragged csv row");
    rows.push_back(std::move(r));
  }
  Matrix M(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j) M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return M;
}

}  // namespace xcforge
