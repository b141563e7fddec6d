#pragma once

#include <cstdint>
#include <optional>

#include "patchwarp/patching.hpp"
#include "patchwarp/raster.hpp"

namespace patchwarp {

/// Random-walk brush strokes stamped as discs.
struct StrokeParams {
  int min_strokes = 1;
  int max_strokes = 4;
  int min_vertices = 4;
  int max_vertices = 12;
  double min_step = 8.0;
  double max_step = 32.0;
  double min_width = 6.0;
  double max_width = 24.0;
};

struct EraseConfig {
  double alpha1 = 0.2;  // drop one arm patch
  double alpha2 = 0.9;  // subtract a free-form stroke mask
  std::uint64_t seed = 0;
  StrokeParams strokes;

  /// Throws InvalidArgument for probabilities outside [0, 1] or inverted ranges.
  void validate() const;
};

/// Streams drawn from the erase seed, one per decision.
enum class EraseStream : std::uint64_t { ArmDecision = 0, ArmChoice = 1, FreeFormDecision = 2, StrokeGeometry = 3 };

struct EraseOutcome {
  WarpedGarment garment;
  std::optional<PatchRole> dropped_arm;
  bool free_form_applied = false;
  BinaryMask stroke_mask;
};

/// Strokes start inside the bounding box of `anchor` (whole canvas if empty).
BinaryMask generate_stroke_mask(int width, int height, const BinaryMask& anchor, const StrokeParams& params,
                                std::uint64_t seed);

EraseOutcome random_erase_detailed(const WarpedGarment& g, const EraseConfig& cfg);

/// With probability alpha1 clears one uniformly chosen arm role present in
/// the provenance map; with probability alpha2 subtracts a stroke mask.
WarpedGarment random_erase(const WarpedGarment& g, const EraseConfig& cfg);

}  // namespace patchwarp
