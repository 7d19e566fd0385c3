#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <variant>

namespace wills {

enum class BodyKind { box, ball, hpolytope };

struct BoxShape {
  Eigen::VectorXd center;
  Eigen::VectorXd half_widths; // all > 0
};

struct BallShape {
  Eigen::VectorXd center;
  double radius = 0.0;   // > 0 unless degenerate
  bool degenerate = false;
};

struct HPolytopeShape {
  Eigen::MatrixXd normals;       // one unit row per halfspace <a_j, x> <= b_j
  Eigen::VectorXd offsets;       // b_j
  Eigen::VectorXd interior_point;
  std::optional<double> enclosing_radius; // user-supplied hint, validated
};

/// A compact convex set with nonempty interior (box, ball or H-polytope).
/// The point body {c}, needed as the Gaussian baseline, is only constructible
/// through the dedicated `point` factory and is flagged degenerate.
class ConvexBody {
public:
  static ConvexBody box(Eigen::VectorXd center, Eigen::VectorXd half_widths);
  /// Cube [center - t, center + t]^d.
  static ConvexBody cube(int dim, double half_width, double center = 0.0);
  static ConvexBody ball(Eigen::VectorXd center, double radius);
  static ConvexBody point(Eigen::VectorXd center);
  /// Rows of `normals` are normalized (offsets rescaled accordingly);
  /// `interior_point` must satisfy every constraint strictly.
  static ConvexBody hpolytope(Eigen::MatrixXd normals, Eigen::VectorXd offsets,
                              Eigen::VectorXd interior_point,
                              std::optional<double> enclosing_radius = {});

  int dim() const { return dim_; }
  BodyKind kind() const;
  bool degenerate() const;

  const BoxShape& as_box() const;
  const BallShape& as_ball() const;
  const HPolytopeShape& as_hpolytope() const;

  /// Center for boxes and balls, interior point for polytopes. Enclosing
  /// radii and sampling boxes are anchored here.
  const Eigen::VectorXd& reference_point() const;

  bool contains(const Eigen::VectorXd& x, double tol = 0.0) const;

private:
  ConvexBody(int dim, std::variant<BoxShape, BallShape, HPolytopeShape> shape)
      : dim_(dim), shape_(std::move(shape)) {}

  int dim_;
  std::variant<BoxShape, BallShape, HPolytopeShape> shape_;
};

struct ProjectionResult {
  Eigen::VectorXd point;
  double distance = 0.0;
  /// Dimension of the face whose relative interior contains the projection;
  /// nullopt marks the smooth-boundary case (ball projected from outside).
  std::optional<int> face_dim;
  int iterations = 0; // 0 on closed-form paths
};

struct ProjectionOptions {
  double tol = 1e-10;
  int max_iter = 100000;
};

/// Metric projection onto the body. Nonexpansive and idempotent; for
/// H-polytopes realized by Dykstra's alternating projections.
ProjectionResult project(const ConvexBody& body, const Eigen::VectorXd& x,
                         const ProjectionOptions& opts = {});

/// Distance only; skips face classification.
double distance_to(const ConvexBody& body, const Eigen::VectorXd& x,
                   const ProjectionOptions& opts = {});

/// Dykstra's alternating projection onto an intersection of halfspaces
/// {x : <a_j, x> <= b_j} with unit rows a_j. Stops when the per-sweep
/// correction increment drops below tol; diverging corrections signal an
/// empty intersection.
Eigen::VectorXd dykstra_project(const Eigen::MatrixXd& normals,
                                const Eigen::VectorXd& offsets,
                                const Eigen::VectorXd& x, double tol,
                                int max_iter, int* iterations = nullptr);

/// Trace of the projection Jacobian at x. For boxes and polytopes this is the
/// integer dimension of the face region containing x (constraint j is active
/// iff b_j - <a_j, P(x)> <= tol * (1 + |b_j|), rank through a column-pivoted
/// QR with pivot threshold tol); points within tol of a region boundary raise
/// a boundary_case error so the caller can resample. For balls the map is
/// smooth: R (d-1) / ||x - c|| outside, d inside.
double trace_projection_jacobian(const ConvexBody& body,
                                 const Eigen::VectorXd& x, double tol = 1e-9);

/// Radius R with K contained in reference_point + R * ball. Exact for boxes
/// and balls; a certified upper bound from support optimization in the +-e_i
/// directions for H-polytopes.
double enclosing_radius(const ConvexBody& body);

/// Short human-readable tag, e.g. "box(d=4,T=0.5)".
std::string describe(const ConvexBody& body);

} // namespace wills
