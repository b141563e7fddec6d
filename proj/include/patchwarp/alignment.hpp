#pragma once

#include "patchwarp/kernels.hpp"
#include "patchwarp/raster.hpp"

namespace patchwarp {

struct AlignmentMasks {
  BinaryMask aligned;     // M_g AND M_t
  BinaryMask misaligned;  // M_g AND NOT aligned
};

/// Throws DimensionMismatch when the masks differ in size.
AlignmentMasks compute_alignment(const BinaryMask& m_g, const BinaryMask& m_t);

/// Resamples a pixel mask onto a width x height grid: a cell is set when at
/// least half of the source area it covers is set. Integer upscaling reduces
/// to nearest neighbour.
BinaryMask resample_mask(const BinaryMask& m, int width, int height);

/// Resamples both masks to the feature grid first and then partitions, so
/// the result is an exact partition at feature resolution.
AlignmentMasks compute_alignment_at(const BinaryMask& m_g, const BinaryMask& m_t, int width, int height);

/// G_t with every pixel outside m_g zeroed, alpha included.
RasterImage mask_garment(const RasterImage& g_t, const BinaryMask& m_g);

/// Keeps f_raw outside the misaligned region and fills every misaligned
/// location of channel c with the mean of channel c over the aligned region.
/// Throws EmptyAlignedRegion when misaligned is non-empty but aligned is
/// empty, DimensionMismatch when the masks do not match the feature grid.
FeatureMap inpaint_features(const FeatureMap& f_raw, const AlignmentMasks& masks, Exec exec = Exec::Parallel);

/// Per-channel mean of f over the set cells of `region`.
std::vector<double> masked_channel_mean(const FeatureMap& f, const BinaryMask& region, Exec exec = Exec::Parallel);

}  // namespace patchwarp
