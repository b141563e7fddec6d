#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "patchwarp/geometry.hpp"
#include "patchwarp/kernels.hpp"
#include "patchwarp/raster.hpp"

namespace patchwarp {

enum class Joint : std::uint8_t {
  Nose,
  Neck,
  LShoulder,
  RShoulder,
  LElbow,
  RElbow,
  LWrist,
  RWrist,
  LHip,
  RHip,
  LKnee,
  RKnee,
  LAnkle,
  RAnkle,
};

inline constexpr int kJointCount = 14;

std::string_view to_string(Joint j) noexcept;
std::optional<Joint> joint_from_string(std::string_view name) noexcept;

struct Keypoint {
  Point2 position;
  double confidence = 0.0;
};

/// Body joints keyed by name. Absent joints have confidence 0.
class PoseKeypoints {
 public:
  void set(Joint j, Point2 p, double confidence = 1.0);
  const std::optional<Keypoint>& get(Joint j) const { return joints_[static_cast<int>(j)]; }

  /// Throws MissingJoint(name) when absent or below `min_confidence`.
  Point2 require(Joint j, double min_confidence) const;

  PoseKeypoints translated(double dx, double dy) const;

  /// Throws InvalidArgument when a present joint lies outside the canvas
  /// extended by 25% of its size on every side.
  void check_bounds(int width, int height) const;

 private:
  std::array<std::optional<Keypoint>, kJointCount> joints_{};
};

enum class GarmentKind { Upper, Lower, Full };

std::string_view to_string(GarmentKind k) noexcept;
std::optional<GarmentKind> garment_kind_from_string(std::string_view name) noexcept;

struct LayoutParams {
  /// Limb rectangle width as a fraction of the limb length.
  double width_factor = 0.45;
  double min_confidence = 0.1;
  double neck_width = 0.6;    // x shoulder distance
  double neck_height = 0.35;  // x shoulder distance
  double hip_width = 0.5;     // x hip distance
  double hip_height = 0.4;    // x torso height
  double waist_width = 1.2;   // x hip distance
  double waist_height = 0.3;  // x hip distance
  double seat_depth = 0.4;    // fraction of hip-to-knee
};

struct LayoutEntry {
  PatchRole role;
  Quad quad;
};

using PatchLayout = std::vector<LayoutEntry>;

inline constexpr int kTemplateSize = 64;

/// Upper: torso, neck, l/r upper arm, l/r lower arm, l/r hip (8 patches).
/// Lower: waist, l/r upper leg, l/r lower leg, seat (6 patches).
/// Full: upper followed by lower.
PatchLayout build_patch_layout(const PoseKeypoints& pose, GarmentKind kind, const LayoutParams& params = {});

/// Oriented rectangle along a -> b, total width width_factor * |ab|, with the
/// a-end on the left edge of the local frame.
Quad limb_quad(Point2 a, Point2 b, double width_factor, PatchRole role);

struct NormalizedPatch {
  PatchRole role = PatchRole::Template;
  RasterImage pixels;
  BinaryMask validity;
  Homography source_to_template;
};

/// A normalized patch re-rendered into the target canvas.
struct RolePatch {
  PatchRole role = PatchRole::Template;
  WarpedRaster raster;
  Homography template_to_target;
};

inline constexpr std::uint8_t kNoRole = 0xFF;
using ProvenanceMap = Grid<std::uint8_t>;

struct WarpedGarment {
  RasterImage image;
  BinaryMask mask;
  /// Role index (PatchRole value) of the topmost contributing patch, or kNoRole.
  ProvenanceMap provenance;
};

/// Stitch stacking rank; higher ranks are drawn later.
int stitch_rank(PatchRole role) noexcept;

std::vector<NormalizedPatch> extract_and_normalize(const RasterImage& garment, const BinaryMask& garment_mask,
                                                   const PatchLayout& layout, Exec exec = Exec::Parallel);

std::vector<RolePatch> denormalize_patches(const std::vector<NormalizedPatch>& patches,
                                           const PatchLayout& target_layout, int canvas_width, int canvas_height,
                                           Exec exec = Exec::Parallel);

WarpedGarment stitch(const std::vector<RolePatch>& warped);

struct GarmentWarp {
  WarpedGarment garment;
  std::vector<NormalizedPatch> patches;
  std::vector<RolePatch> warped;
  PatchLayout source_layout;
  PatchLayout target_layout;
};

GarmentWarp warp_garment(const RasterImage& source, const BinaryMask& source_mask, const PoseKeypoints& source_pose,
                         const PoseKeypoints& target_pose, GarmentKind kind, const LayoutParams& params = {},
                         Exec exec = Exec::Parallel);

/// Pixels whose centers fall inside at least one layout quad.
BinaryMask layout_union_mask(const PatchLayout& layout, int width, int height);

/// M_t = 1 exactly where alpha > 0, and provenance is set exactly on M_t.
bool is_coherent(const WarpedGarment& g);

}  // namespace patchwarp
