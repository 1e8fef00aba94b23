#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace xcforge {

using Point = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double tol_geom = 1e-9;

enum class ErrorCode {
  DegenerateInput,
  DimensionTooLarge,
  NegativeSlack,
  NotOnSphere,
  NoIntersection,
  ShapeMismatch,
  BadRadius,
  NoCapFits,
  UnsupportedDimension,
  PreconditionViolated,
  NotInCone,
  EncapsulationViolated,
  NegativeK,
  CapOverflow,
  NotSorted,
  TooFew,
  ColorOverflow,
  RankTargetMissed,
  RouteMismatch,
  BadR,
  TooLarge,
  ZeroRow,
  ParseError,
  ConfigInvalid,
};

inline const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::NegativeSlack: return "NegativeSlack";
    case ErrorCode::NotOnSphere: return "NotOnSphere";
    case ErrorCode::NoIntersection: return "NoIntersection";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::BadRadius: return "BadRadius";
    case ErrorCode::NoCapFits: return "NoCapFits";
    case ErrorCode::UnsupportedDimension: return "UnsupportedDimension";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::NotInCone: return "NotInCone";
    case ErrorCode::EncapsulationViolated: return "EncapsulationViolated";
    case ErrorCode::NegativeK: return "NegativeK";
    case ErrorCode::CapOverflow: return "CapOverflow";
    case ErrorCode::NotSorted: return "NotSorted";
    case ErrorCode::TooFew: return "TooFew";
    case ErrorCode::ColorOverflow: return "ColorOverflow";
    case ErrorCode::RankTargetMissed: return "RankTargetMissed";
    case ErrorCode::RouteMismatch: return "RouteMismatch";
    case ErrorCode::BadR: return "BadR";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::ZeroRow: return "ZeroRow";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// feasible side is normal . x <= offset
struct Hyperplane {
  Point normal;
  double offset = 0.0;

  double slack(const Point& x) const { return offset - normal.dot(x); }
};

struct Facet {
  Hyperplane plane;
  std::vector<int> incident;
};

struct Polytope {
  int dim = 0;
  std::vector<Point> vertices;
  std::vector<Facet> facets;
  // index of each vertex in the point list the hull was built from (empty if not applicable)
  std::vector<int> source_index;

  std::size_t num_vertices() const { return vertices.size(); }
  std::size_t num_facets() const { return facets.size(); }
};

struct Cap {
  Point center;
  double radius = 0.0;
};

}  // namespace xcforge
