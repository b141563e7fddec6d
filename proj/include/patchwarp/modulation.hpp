#pragma once

#include "patchwarp/kernels.hpp"
#include "patchwarp/raster.hpp"

namespace patchwarp {

inline constexpr double kDefaultModulationEps = 1e-5;

template <typename T>
struct BasicAffineParams {
  Tensor3<T> gamma;
  Tensor3<T> beta;
};

using AffineParams = BasicAffineParams<float>;
using AffineParams64 = BasicAffineParams<double>;

template <typename T>
struct ModulationGrads {
  Tensor3<T> grad_h;
  Tensor3<T> grad_gamma;
  Tensor3<T> grad_beta;
};

using kernels::ChannelStats;

/// Population mean and (biased) standard deviation of each channel.
template <typename T>
ChannelStats channel_stats(const Tensor3<T>& h, Exec exec = Exec::Parallel) {
  return kernels::channel_stats(h, exec);
}

/// out = gamma * (h - mu_c) / (sigma_c + eps) + beta, per element.
/// Throws ShapeMismatch when gamma/beta differ in shape from h, and
/// InvalidArgument for negative eps (eps = 0 is accepted for testing).
template <typename T>
Tensor3<T> spade_modulate(const Tensor3<T>& h, const BasicAffineParams<T>& params, double eps = kDefaultModulationEps,
                          Exec exec = Exec::Parallel);

/// Analytic gradients of spade_modulate with respect to h, gamma and beta,
/// including the dependence of mu and sigma on h. Where sigma is 0 the
/// sigma term is dropped.
template <typename T>
ModulationGrads<T> spade_backward(const Tensor3<T>& h, const BasicAffineParams<T>& params, double eps,
                                  const Tensor3<T>& upstream, Exec exec = Exec::Parallel);

/// gamma = conv_gamma(f_g), beta = conv_beta(f_g), same padding, stride 1.
template <typename T>
BasicAffineParams<T> affine_from_features(const Tensor3<T>& f_g, const ConvParams& conv_gamma,
                                          const ConvParams& conv_beta, Exec exec = Exec::Parallel);

/// Seeded uniform(-scale, scale) weights and biases; the fixture initializer.
ConvParams random_conv_params(int out_channels, int in_channels, int kernel, std::uint64_t seed, float scale = 0.2f);

}  // namespace patchwarp
