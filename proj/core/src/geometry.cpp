#include "willslab/geometry.hpp"

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "lp.hpp"
#include "willslab/errors.hpp"

namespace wills {

namespace {

void check_dim(const ConvexBody& body, const Eigen::VectorXd& x,
               const char* where) {
  if (x.size() != body.dim())
    throw_error(ErrorKind::input,
                std::string(where) + ": point dimension mismatch");
}

} // namespace

ConvexBody ConvexBody::box(Eigen::VectorXd center,
                           Eigen::VectorXd half_widths) {
  if (center.size() == 0 || center.size() != half_widths.size())
    throw_error(ErrorKind::input, "box: center/half_widths size mismatch");
  if (!(half_widths.array() > 0.0).all())
    throw_error(ErrorKind::input, "box: all half_widths must be > 0");
  const int d = static_cast<int>(center.size());
  return ConvexBody(d, BoxShape{std::move(center), std::move(half_widths)});
}

ConvexBody ConvexBody::cube(int dim, double half_width, double center) {
  if (dim < 1) throw_error(ErrorKind::input, "cube: dim must be >= 1");
  return box(Eigen::VectorXd::Constant(dim, center),
             Eigen::VectorXd::Constant(dim, half_width));
}

ConvexBody ConvexBody::ball(Eigen::VectorXd center, double radius) {
  if (center.size() == 0)
    throw_error(ErrorKind::input, "ball: empty center");
  if (!(radius > 0.0))
    throw_error(ErrorKind::input,
                "ball: radius must be > 0 (use ConvexBody::point for {c})");
  const int d = static_cast<int>(center.size());
  return ConvexBody(d, BallShape{std::move(center), radius, false});
}

ConvexBody ConvexBody::point(Eigen::VectorXd center) {
  if (center.size() == 0)
    throw_error(ErrorKind::input, "point: empty center");
  const int d = static_cast<int>(center.size());
  return ConvexBody(d, BallShape{std::move(center), 0.0, true});
}

ConvexBody ConvexBody::hpolytope(Eigen::MatrixXd normals,
                                 Eigen::VectorXd offsets,
                                 Eigen::VectorXd interior_point,
                                 std::optional<double> enclosing_radius) {
  const int m = static_cast<int>(normals.rows());
  const int d = static_cast<int>(normals.cols());
  if (m == 0 || d == 0)
    throw_error(ErrorKind::input, "hpolytope: empty constraint system");
  if (offsets.size() != m || interior_point.size() != d)
    throw_error(ErrorKind::input, "hpolytope: shape mismatch");
  for (int j = 0; j < m; ++j) {
    const double norm = normals.row(j).norm();
    if (!(norm > 0.0))
      throw_error(ErrorKind::input, "hpolytope: zero normal row");
    normals.row(j) /= norm;
    offsets[j] /= norm;
  }
  const Eigen::VectorXd slack = offsets - normals * interior_point;
  for (int j = 0; j < m; ++j) {
    if (!(slack[j] > 1e-12 * (1.0 + std::abs(offsets[j]))))
      throw_error(ErrorKind::input,
                  "hpolytope: interior_point does not satisfy constraint " +
                      std::to_string(j) + " strictly");
  }
  return ConvexBody(d, HPolytopeShape{std::move(normals), std::move(offsets),
                                      std::move(interior_point),
                                      enclosing_radius});
}

BodyKind ConvexBody::kind() const {
  if (std::holds_alternative<BoxShape>(shape_)) return BodyKind::box;
  if (std::holds_alternative<BallShape>(shape_)) return BodyKind::ball;
  return BodyKind::hpolytope;
}

bool ConvexBody::degenerate() const {
  const auto* ball = std::get_if<BallShape>(&shape_);
  return ball != nullptr && ball->degenerate;
}

const BoxShape& ConvexBody::as_box() const {
  const auto* s = std::get_if<BoxShape>(&shape_);
  if (!s) throw_error(ErrorKind::input, "body is not a box");
  return *s;
}

const BallShape& ConvexBody::as_ball() const {
  const auto* s = std::get_if<BallShape>(&shape_);
  if (!s) throw_error(ErrorKind::input, "body is not a ball");
  return *s;
}

const HPolytopeShape& ConvexBody::as_hpolytope() const {
  const auto* s = std::get_if<HPolytopeShape>(&shape_);
  if (!s) throw_error(ErrorKind::input, "body is not an H-polytope");
  return *s;
}

const Eigen::VectorXd& ConvexBody::reference_point() const {
  switch (kind()) {
    case BodyKind::box:
      return as_box().center;
    case BodyKind::ball:
      return as_ball().center;
    case BodyKind::hpolytope:
    default:
      return as_hpolytope().interior_point;
  }
}

bool ConvexBody::contains(const Eigen::VectorXd& x, double tol) const {
  check_dim(*this, x, "contains");
  switch (kind()) {
    case BodyKind::box: {
      const auto& b = as_box();
      return ((x - b.center).cwiseAbs().array() <=
              b.half_widths.array() + tol)
          .all();
    }
    case BodyKind::ball: {
      const auto& b = as_ball();
      return (x - b.center).norm() <= b.radius + tol;
    }
    case BodyKind::hpolytope:
    default: {
      const auto& p = as_hpolytope();
      return ((p.normals * x - p.offsets).array() <= tol).all();
    }
  }
}

Eigen::VectorXd dykstra_project(const Eigen::MatrixXd& normals,
                                const Eigen::VectorXd& offsets,
                                const Eigen::VectorXd& x, double tol,
                                int max_iter, int* iterations) {
  const int m = static_cast<int>(normals.rows());
  if (m == 0)
    throw_error(ErrorKind::input, "dykstra_project: no halfspaces");
  if (normals.cols() != x.size() || offsets.size() != m)
    throw_error(ErrorKind::input, "dykstra_project: shape mismatch");
  if (!(tol > 0.0))
    throw_error(ErrorKind::input, "dykstra_project: tol must be > 0");

  // For halfspaces each Dykstra correction is a nonnegative multiple of the
  // (unit) outward normal, so a scalar per constraint suffices.
  Eigen::VectorXd current = x;
  Eigen::VectorXd corr = Eigen::VectorXd::Zero(m);
  const double divergence_cap =
      1e4 * (1.0 + x.norm() + offsets.cwiseAbs().maxCoeff());

  for (int sweep = 1; sweep <= max_iter; ++sweep) {
    double increment2 = 0.0;
    for (int j = 0; j < m; ++j) {
      const double along = normals.row(j).dot(current) + corr[j];
      const double violation = along - offsets[j];
      const double updated = violation > 0.0 ? violation : 0.0;
      if (updated != corr[j]) {
        current += (corr[j] - updated) * normals.row(j).transpose();
        const double delta = updated - corr[j];
        increment2 += delta * delta;
        corr[j] = updated;
      }
    }
    if (std::sqrt(increment2) <= tol) {
      if (iterations) *iterations = sweep;
      return current;
    }
    if (corr.sum() > divergence_cap)
      throw_error(ErrorKind::infeasible,
                  "dykstra_project: corrections diverge; intersection is "
                  "likely empty");
  }
  throw_error(ErrorKind::convergence,
              "dykstra_project: no convergence within max_iter=" +
                  std::to_string(max_iter) + " sweeps");
}

namespace {

ProjectionResult project_box(const BoxShape& box, const Eigen::VectorXd& x) {
  ProjectionResult r;
  r.point = x;
  int inside = 0;
  for (int i = 0; i < x.size(); ++i) {
    const double lo = box.center[i] - box.half_widths[i];
    const double hi = box.center[i] + box.half_widths[i];
    if (x[i] <= lo)
      r.point[i] = lo;
    else if (x[i] >= hi)
      r.point[i] = hi;
    else
      ++inside;
  }
  r.distance = (x - r.point).norm();
  r.face_dim = inside;
  return r;
}

ProjectionResult project_ball(const BallShape& ball, const Eigen::VectorXd& x) {
  ProjectionResult r;
  if (ball.degenerate) {
    r.point = ball.center;
    r.distance = (x - ball.center).norm();
    r.face_dim = 0;
    return r;
  }
  const Eigen::VectorXd v = x - ball.center;
  const double norm = v.norm();
  if (norm <= ball.radius) {
    r.point = x;
    r.distance = 0.0;
    r.face_dim = static_cast<int>(x.size());
  } else {
    r.point = ball.center + (ball.radius / norm) * v;
    r.distance = norm - ball.radius;
    r.face_dim = std::nullopt; // smooth boundary
  }
  return r;
}

/// Face dimension from the active set at a (projected) point: d minus the
/// rank of the active constraint normals.
int hpolytope_face_dim(const HPolytopeShape& poly, const Eigen::VectorXd& p,
                       double activity_tol, double pivot_tol,
                       double ambiguity_factor = 0.0,
                       bool* ambiguous = nullptr) {
  const int m = static_cast<int>(poly.normals.rows());
  const int d = static_cast<int>(poly.normals.cols());
  const Eigen::VectorXd residual = poly.offsets - poly.normals * p;
  std::vector<int> active;
  active.reserve(m);
  for (int j = 0; j < m; ++j) {
    const double scale = 1.0 + std::abs(poly.offsets[j]);
    if (residual[j] <= activity_tol * scale) {
      active.push_back(j);
    } else if (ambiguity_factor > 0.0 &&
               residual[j] <= ambiguity_factor * activity_tol * scale) {
      if (ambiguous) *ambiguous = true;
    }
  }
  if (active.empty()) return d;
  Eigen::MatrixXd rows(static_cast<int>(active.size()), d);
  for (std::size_t k = 0; k < active.size(); ++k)
    rows.row(static_cast<int>(k)) = poly.normals.row(active[k]);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(rows);
  qr.setThreshold(pivot_tol);
  return d - static_cast<int>(qr.rank());
}

} // namespace

ProjectionResult project(const ConvexBody& body, const Eigen::VectorXd& x,
                         const ProjectionOptions& opts) {
  check_dim(body, x, "project");
  switch (body.kind()) {
    case BodyKind::box:
      return project_box(body.as_box(), x);
    case BodyKind::ball:
      return project_ball(body.as_ball(), x);
    case BodyKind::hpolytope:
    default: {
      const auto& poly = body.as_hpolytope();
      ProjectionResult r;
      if (body.contains(x, 0.0)) {
        r.point = x;
        r.distance = 0.0;
        r.iterations = 0;
      } else {
        r.point = dykstra_project(poly.normals, poly.offsets, x, opts.tol,
                                  opts.max_iter, &r.iterations);
        r.distance = (x - r.point).norm();
      }
      const double activity_tol = std::max(1e4 * opts.tol, 1e-9);
      r.face_dim =
          hpolytope_face_dim(poly, r.point, activity_tol, activity_tol);
      return r;
    }
  }
}

double distance_to(const ConvexBody& body, const Eigen::VectorXd& x,
                   const ProjectionOptions& opts) {
  check_dim(body, x, "distance_to");
  switch (body.kind()) {
    case BodyKind::box: {
      const auto& b = body.as_box();
      const Eigen::ArrayXd excess =
          ((x - b.center).cwiseAbs() - b.half_widths).array().max(0.0);
      return std::sqrt((excess * excess).sum());
    }
    case BodyKind::ball: {
      const auto& b = body.as_ball();
      return std::max(0.0, (x - b.center).norm() - b.radius);
    }
    case BodyKind::hpolytope:
    default: {
      if (body.contains(x, 0.0)) return 0.0;
      const auto& poly = body.as_hpolytope();
      const Eigen::VectorXd p = dykstra_project(poly.normals, poly.offsets, x,
                                                opts.tol, opts.max_iter);
      return (x - p).norm();
    }
  }
}

double trace_projection_jacobian(const ConvexBody& body,
                                 const Eigen::VectorXd& x, double tol) {
  check_dim(body, x, "trace_projection_jacobian");
  if (!(tol > 0.0))
    throw_error(ErrorKind::input, "trace_projection_jacobian: tol must be > 0");
  switch (body.kind()) {
    case BodyKind::box: {
      const auto& b = body.as_box();
      int inside = 0;
      for (int i = 0; i < x.size(); ++i) {
        const double u = std::abs(x[i] - b.center[i]);
        const double h = b.half_widths[i];
        if (std::abs(u - h) <= tol * (1.0 + h))
          throw_error(ErrorKind::boundary_case,
                      "trace_projection_jacobian: coordinate " +
                          std::to_string(i) +
                          " lies on a face-region boundary; resample");
        if (u < h) ++inside;
      }
      return inside;
    }
    case BodyKind::ball: {
      const auto& b = body.as_ball();
      if (b.degenerate) return 0.0; // constant projection
      const double r = (x - b.center).norm();
      if (std::abs(r - b.radius) <= tol * (1.0 + b.radius))
        throw_error(ErrorKind::boundary_case,
                    "trace_projection_jacobian: point on the sphere; resample");
      if (r < b.radius) return static_cast<double>(body.dim());
      return b.radius * (body.dim() - 1) / r;
    }
    case BodyKind::hpolytope:
    default: {
      const auto& poly = body.as_hpolytope();
      ProjectionOptions popts;
      popts.tol = std::min(1e-10, tol * 1e-3);
      const ProjectionResult proj = project(body, x, popts);
      bool ambiguous = false;
      const int face = hpolytope_face_dim(poly, proj.point, tol, tol,
                                          /*ambiguity_factor=*/10.0,
                                          &ambiguous);
      if (ambiguous)
        throw_error(ErrorKind::boundary_case,
                    "trace_projection_jacobian: ambiguous activity pattern at "
                    "tol scale; resample");
      return face;
    }
  }
}

double enclosing_radius(const ConvexBody& body) {
  switch (body.kind()) {
    case BodyKind::box:
      return body.as_box().half_widths.norm();
    case BodyKind::ball:
      return body.as_ball().radius;
    case BodyKind::hpolytope:
    default: {
      const auto& poly = body.as_hpolytope();
      const int d = body.dim();
      const Eigen::VectorXd& ref = poly.interior_point;
      Eigen::VectorXd reach = Eigen::VectorXd::Zero(d);
      double vertex_lower = 0.0; // largest distance actually attained
      for (int i = 0; i < d; ++i) {
        for (double sign : {1.0, -1.0}) {
          Eigen::VectorXd c = Eigen::VectorXd::Zero(d);
          c[i] = sign;
          const auto lp =
              detail::maximize_linear(poly.normals, poly.offsets, c, ref);
          reach[i] = std::max(reach[i], std::abs(lp.value - c.dot(ref)));
          vertex_lower = std::max(vertex_lower, (lp.maximizer - ref).norm());
        }
      }
      const double certified = reach.norm();
      if (poly.enclosing_radius) {
        const double supplied = *poly.enclosing_radius;
        if (supplied < vertex_lower * (1.0 - 1e-9))
          throw_error(ErrorKind::input,
                      "enclosing_radius: supplied radius is smaller than an "
                      "attained support point");
        return std::min(supplied, certified);
      }
      return certified;
    }
  }
}

std::string describe(const ConvexBody& body) {
  std::ostringstream out;
  switch (body.kind()) {
    case BodyKind::box: {
      const auto& b = body.as_box();
      const double lo = b.half_widths.minCoeff(), hi = b.half_widths.maxCoeff();
      out << "box(d=" << body.dim() << ",T=" << lo;
      if (hi != lo) out << ".." << hi;
      out << ")";
      break;
    }
    case BodyKind::ball: {
      const auto& b = body.as_ball();
      if (b.degenerate)
        out << "point(d=" << body.dim() << ")";
      else
        out << "ball(d=" << body.dim() << ",R=" << b.radius << ")";
      break;
    }
    case BodyKind::hpolytope:
      out << "hpolytope(d=" << body.dim() << ",m="
          << body.as_hpolytope().normals.rows() << ")";
      break;
  }
  return out.str();
}

} // namespace wills
