#include "patchwarp/geometry.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

#include "patchwarp/error.hpp"

namespace patchwarp {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DegenerateQuad: return "DegenerateQuad";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::PointAtInfinity: return "PointAtInfinity";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::MissingJoint: return "MissingJoint";
    case ErrorCode::DegenerateLayout: return "DegenerateLayout";
    case ErrorCode::RoleMismatch: return "RoleMismatch";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::EmptyAlignedRegion: return "EmptyAlignedRegion";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Parse: return "Parse";
  }
  return "Unknown";
}

double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

std::string_view to_string(PatchRole role) noexcept {
  switch (role) {
    case PatchRole::Torso: return "torso";
    case PatchRole::Neck: return "neck";
    case PatchRole::LUpperArm: return "l_upper_arm";
    case PatchRole::RUpperArm: return "r_upper_arm";
    case PatchRole::LLowerArm: return "l_lower_arm";
    case PatchRole::RLowerArm: return "r_lower_arm";
    case PatchRole::LHip: return "l_hip";
    case PatchRole::RHip: return "r_hip";
    case PatchRole::Waist: return "waist";
    case PatchRole::LUpperLeg: return "l_upper_leg";
    case PatchRole::RUpperLeg: return "r_upper_leg";
    case PatchRole::LLowerLeg: return "l_lower_leg";
    case PatchRole::RLowerLeg: return "r_lower_leg";
    case PatchRole::Seat: return "seat";
    case PatchRole::Template: return "template";
  }
  return "unknown";
}

bool is_arm(PatchRole role) noexcept {
  return role == PatchRole::LUpperArm || role == PatchRole::RUpperArm ||
         role == PatchRole::LLowerArm || role == PatchRole::RLowerArm;
}

namespace {

double cross(Point2 o, Point2 a, Point2 b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

double segment_distance(Point2 p, Point2 a, Point2 b) {
  const Point2 ab = b - a;
  const double len2 = ab.x * ab.x + ab.y * ab.y;
  double t = len2 > 0.0 ? ((p.x - a.x) * ab.x + (p.y - a.y) * ab.y) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return distance(p, a + t * ab);
}

}  // namespace

double signed_area(const Quad& q) {
  double twice = 0.0;
  for (int i = 0; i < 4; ++i) {
    const Point2 a = q.corners[i];
    const Point2 b = q.corners[(i + 1) % 4];
    twice += a.x * b.y - b.x * a.y;
  }
  return 0.5 * twice;
}

void validate_quad(const Quad& q) {
  for (const Point2& c : q.corners) {
    if (!std::isfinite(c.x) || !std::isfinite(c.y)) {
      throw Error(ErrorCode::DegenerateQuad, "non-finite corner in " + std::string(to_string(q.role)));
    }
  }
  const double area = signed_area(q);
  if (!(area >= kDegenerateArea)) {
    throw Error(ErrorCode::DegenerateQuad,
                std::string(to_string(q.role)) + " area " + std::to_string(area) + " is not positive");
  }
  for (int skip = 0; skip < 4; ++skip) {
    std::array<Point2, 3> t{};
    for (int i = 0, k = 0; i < 4; ++i) {
      if (i != skip) t[k++] = q.corners[i];
    }
    if (std::abs(0.5 * cross(t[0], t[1], t[2])) < kDegenerateArea) {
      throw Error(ErrorCode::DegenerateQuad, std::string(to_string(q.role)) + " has collinear corners");
    }
  }
}

bool contains(const Quad& q, Point2 p, double tolerance) {
  bool inside = false;
  for (int i = 0, j = 3; i < 4; j = i++) {
    const Point2 a = q.corners[i];
    const Point2 b = q.corners[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_at = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_at) inside = !inside;
    }
  }
  if (inside) return true;
  for (int i = 0; i < 4; ++i) {
    if (segment_distance(p, q.corners[i], q.corners[(i + 1) % 4]) <= tolerance) return true;
  }
  return false;
}

Quad square_quad(double size, PatchRole role) {
  return Quad{{Point2{0.0, 0.0}, Point2{size, 0.0}, Point2{size, size}, Point2{0.0, size}}, role};
}

Homography::Homography() : m_{1, 0, 0, 0, 1, 0, 0, 0, 1} {}

Homography::Homography(const Matrix& m) : m_(m) {
  for (double v : m_) {
    if (!std::isfinite(v)) throw Error(ErrorCode::SingularMatrix, "non-finite homography entry");
  }
  if (std::abs(m_[8]) > 1e-9) {
    const double s = 1.0 / m_[8];
    for (double& v : m_) v *= s;
    m_[8] = 1.0;
  } else {
    double norm = 0.0;
    for (double v : m_) norm += v * v;
    norm = std::sqrt(norm);
    if (norm == 0.0) throw Error(ErrorCode::SingularMatrix, "zero matrix");
    for (double& v : m_) v /= norm;
    frobenius_ = true;
  }
  if (!(std::abs(determinant()) > kMinDeterminant)) {
    throw Error(ErrorCode::SingularMatrix, "determinant " + std::to_string(determinant()));
  }
}

Homography Homography::translation(double tx, double ty) {
  return Homography(Matrix{1, 0, tx, 0, 1, ty, 0, 0, 1});
}

double Homography::determinant() const noexcept {
  const auto& a = m_;
  return a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6]) +
         a[2] * (a[3] * a[7] - a[4] * a[6]);
}

namespace {

using Mat3 = Eigen::Matrix3d;

Mat3 to_eigen(const Homography& h) {
  Mat3 m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m(r, c) = h(r, c);
  return m;
}

Homography from_eigen(const Mat3& m) {
  Homography::Matrix out{};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) out[r * 3 + c] = m(r, c);
  return Homography(out);
}

// Similarity moving the centroid to the origin with mean distance sqrt(2).
Mat3 conditioning(const std::array<Point2, 4>& pts) {
  Point2 c{};
  for (const Point2& p : pts) c = c + 0.25 * p;
  double mean = 0.0;
  for (const Point2& p : pts) mean += 0.25 * distance(p, c);
  const double s = std::sqrt(2.0) / mean;
  Mat3 t;
  t << s, 0, -s * c.x, 0, s, -s * c.y, 0, 0, 1;
  return t;
}

Point2 transform(const Mat3& t, Point2 p) {
  return {t(0, 0) * p.x + t(0, 1) * p.y + t(0, 2), t(1, 0) * p.x + t(1, 1) * p.y + t(1, 2)};
}

}  // namespace

Homography estimate_homography(const Quad& src, const Quad& dst) {
  validate_quad(src);
  validate_quad(dst);

  const Mat3 ts = conditioning(src.corners);
  const Mat3 td = conditioning(dst.corners);

  Eigen::Matrix<double, 8, 9> a;
  for (int i = 0; i < 4; ++i) {
    const Point2 s = transform(ts, src.corners[i]);
    const Point2 d = transform(td, dst.corners[i]);
    a.row(2 * i) << s.x, s.y, 1, 0, 0, 0, -d.x * s.x, -d.x * s.y, -d.x;
    a.row(2 * i + 1) << 0, 0, 0, s.x, s.y, 1, -d.y * s.x, -d.y * s.y, -d.y;
  }

  Eigen::Matrix<double, 9, 1> h;
  const Eigen::Matrix<double, 8, 8> lhs = a.leftCols<8>();
  const Eigen::Matrix<double, 8, 1> rhs = -a.col(8);
  const auto qr = lhs.colPivHouseholderQr();
  if (qr.rank() == 8) {
    h.head<8>() = qr.solve(rhs);
    h(8) = 1.0;
  } else {
    // h33 = 0 in the conditioned frame; take the null space instead.
    const Eigen::JacobiSVD<Eigen::Matrix<double, 8, 9>> svd(a, Eigen::ComputeFullV);
    if (svd.singularValues()(7) < 1e-12 * svd.singularValues()(0)) {
      throw Error(ErrorCode::SingularSystem, "correspondence system has rank < 8");
    }
    h = svd.matrixV().col(8);
  }
  if (!h.allFinite()) throw Error(ErrorCode::SingularSystem, "non-finite solution");

  Mat3 hn;
  hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
  return from_eigen(td.inverse() * hn * ts);
}

Point2 apply_homography(const Homography& h, Point2 p) {
  const double w = h(2, 0) * p.x + h(2, 1) * p.y + h(2, 2);
  if (!(std::abs(w) > kMinW)) throw Error(ErrorCode::PointAtInfinity, "w' = " + std::to_string(w));
  return {(h(0, 0) * p.x + h(0, 1) * p.y + h(0, 2)) / w, (h(1, 0) * p.x + h(1, 1) * p.y + h(1, 2)) / w};
}

Homography invert(const Homography& h) {
  const auto& a = h.matrix();
  const double det = h.determinant();
  if (!(std::abs(det) > kMinDeterminant)) throw Error(ErrorCode::SingularMatrix, "determinant too small");
  const Homography::Matrix adj{
      a[4] * a[8] - a[5] * a[7], a[2] * a[7] - a[1] * a[8], a[1] * a[5] - a[2] * a[4],
      a[5] * a[6] - a[3] * a[8], a[0] * a[8] - a[2] * a[6], a[2] * a[3] - a[0] * a[5],
      a[3] * a[7] - a[4] * a[6], a[1] * a[6] - a[0] * a[7], a[0] * a[4] - a[1] * a[3]};
  Homography::Matrix inv{};
  for (int i = 0; i < 9; ++i) inv[i] = adj[i] / det;
  return Homography(inv);
}

Homography compose(const Homography& second, const Homography& first) {
  return from_eigen(to_eigen(second) * to_eigen(first));
}

}  // namespace patchwarp
