#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace patchwarp {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
  friend bool operator==(Point2, Point2) = default;
};

double distance(Point2 a, Point2 b);

/// Semantic role of a garment patch. The first eight are the upper-garment
/// roles; the rest belong to the lower-body extension.
enum class PatchRole : std::uint8_t {
  Torso,
  Neck,
  LUpperArm,
  RUpperArm,
  LLowerArm,
  RLowerArm,
  LHip,
  RHip,
  Waist,
  LUpperLeg,
  RUpperLeg,
  LLowerLeg,
  RLowerLeg,
  Seat,
  Template,
};

inline constexpr int kPatchRoleCount = 15;

std::string_view to_string(PatchRole role) noexcept;
bool is_arm(PatchRole role) noexcept;

/// Four corners in fixed winding order: top-left, top-right, bottom-right,
/// bottom-left in the patch's local frame (image coordinates, y down).
struct Quad {
  std::array<Point2, 4> corners{};
  PatchRole role = PatchRole::Template;
};

/// Shoelace area; positive for the TL, TR, BR, BL order in y-down coordinates.
double signed_area(const Quad& q);

/// Throws DegenerateQuad when the area is not strictly positive (>= 1e-9)
/// or any three corners are collinear.
void validate_quad(const Quad& q);

/// Closed point-in-quad test with a small tolerance on the edges.
bool contains(const Quad& q, Point2 p, double tolerance = 1e-9);

/// Axis-aligned square [0, size] x [0, size].
Quad square_quad(double size, PatchRole role = PatchRole::Template);

inline constexpr double kDegenerateArea = 1e-9;

/// 3x3 projective transform, row-major. Maps (x, y, 1) to
/// (h11 x + h12 y + h13, h21 x + h22 y + h23, h31 x + h32 y + h33).
class Homography {
 public:
  using Matrix = std::array<double, 9>;

  /// Identity.
  Homography();

  /// Normalizes so that h33 = 1, or to unit Frobenius norm when |h33| is
  /// below 1e-9 (recorded by `frobenius_normalized()`). Throws SingularMatrix
  /// if the normalized determinant is not above 1e-12 in magnitude.
  explicit Homography(const Matrix& m);

  static Homography translation(double tx, double ty);

  const Matrix& matrix() const noexcept { return m_; }
  double operator()(int row, int col) const noexcept { return m_[row * 3 + col]; }
  bool frobenius_normalized() const noexcept { return frobenius_; }
  double determinant() const noexcept;

 private:
  Matrix m_{};
  bool frobenius_ = false;
};

inline constexpr double kMinDeterminant = 1e-12;
inline constexpr double kMinW = 1e-12;

/// Exact four-correspondence DLT: solves the 8x8 linear system for h11..h32
/// with h33 fixed to 1. Falls back to the h33 = 0 system when that one is
/// singular.
Homography estimate_homography(const Quad& src, const Quad& dst);

/// Throws PointAtInfinity when |w'| <= 1e-12.
Point2 apply_homography(const Homography& h, Point2 p);

Homography invert(const Homography& h);

/// second * first: apply `first`, then `second`.
Homography compose(const Homography& second, const Homography& first);

}  // namespace patchwarp
