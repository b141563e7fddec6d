#include <cmath>
#include <string>

#include "patchwarp/error.hpp"
#include "patchwarp/kernels.hpp"

namespace patchwarp {

void ConvParams::validate() const {
  if (kernel != 1 && kernel != 3 && kernel != 5) {
    throw Error(ErrorCode::InvalidArgument, "kernel size " + std::to_string(kernel) + " not in {1,3,5}");
  }
  if (out_channels <= 0 || in_channels <= 0) throw Error(ErrorCode::InvalidArgument, "channel counts must be positive");
  const std::size_t expected = static_cast<std::size_t>(out_channels) * in_channels * kernel * kernel;
  if (weights.size() != expected || bias.size() != static_cast<std::size_t>(out_channels)) {
    throw Error(ErrorCode::InvalidArgument, "weight/bias sizes do not match dimensions");
  }
  for (float w : weights) {
    if (!std::isfinite(w)) throw Error(ErrorCode::InvalidArgument, "non-finite weight");
  }
  for (float b : bias) {
    if (!std::isfinite(b)) throw Error(ErrorCode::InvalidArgument, "non-finite bias");
  }
}

namespace kernels {

namespace {

template <typename T>
void conv_row(const Tensor3<T>& in, const ConvParams& p, Tensor3<T>& out, int o, int y) {
  const int r = p.kernel / 2;
  const int h = in.height();
  const int w = in.width();
  for (int x = 0; x < w; ++x) {
    double acc = p.bias[o];
    for (int i = 0; i < p.in_channels; ++i) {
      for (int ky = 0; ky < p.kernel; ++ky) {
        const int sy = y + ky - r;
        if (sy < 0 || sy >= h) continue;
        for (int kx = 0; kx < p.kernel; ++kx) {
          const int sx = x + kx - r;
          if (sx < 0 || sx >= w) continue;
          acc += static_cast<double>(p.weight(o, i, ky, kx)) * static_cast<double>(in.at(i, sy, sx));
        }
      }
    }
    out.at(o, y, x) = static_cast<T>(acc);
  }
}

}  // namespace

template <typename T>
Tensor3<T> conv2d_same(const Tensor3<T>& input, const ConvParams& params, Exec exec) {
  params.validate();
  if (params.in_channels != input.channels()) {
    throw Error(ErrorCode::ShapeMismatch, "conv expects " + std::to_string(params.in_channels) +
                                              " input channels, got " + std::to_string(input.channels()));
  }
  Tensor3<T> out(params.out_channels, input.height(), input.width());
  const int rows = params.out_channels * input.height();
  if (exec == Exec::Serial) {
    for (int t = 0; t < rows; ++t) conv_row(input, params, out, t / input.height(), t % input.height());
  } else {
#pragma omp parallel for schedule(static)
    for (int t = 0; t < rows; ++t) conv_row(input, params, out, t / input.height(), t % input.height());
  }
  return out;
}

template Tensor3<float> conv2d_same<float>(const Tensor3<float>&, const ConvParams&, Exec);
template Tensor3<double> conv2d_same<double>(const Tensor3<double>&, const ConvParams&, Exec);

}  // namespace kernels
}  // namespace patchwarp
