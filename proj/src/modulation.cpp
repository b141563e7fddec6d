#include "patchwarp/modulation.hpp"

#include <string>
#include <vector>

#include "patchwarp/error.hpp"
#include "patchwarp/rng.hpp"

namespace patchwarp {

namespace {

template <typename T>
void require_same_shape(const Tensor3<T>& a, const Tensor3<T>& b, const char* what) {
  if (!a.same_shape(b)) {
    throw Error(ErrorCode::ShapeMismatch,
                std::string(what) + ": " + std::to_string(b.channels()) + "x" + std::to_string(b.height()) + "x" +
                    std::to_string(b.width()) + " vs " + std::to_string(a.channels()) + "x" +
                    std::to_string(a.height()) + "x" + std::to_string(a.width()));
  }
}

template <typename F>
void for_channels(int channels, Exec exec, F&& f) {
  if (exec == Exec::Serial) {
    for (int c = 0; c < channels; ++c) f(c);
  } else {
#pragma omp parallel for schedule(static)
    for (int c = 0; c < channels; ++c) f(c);
  }
}

}  // namespace

template <typename T>
Tensor3<T> spade_modulate(const Tensor3<T>& h, const BasicAffineParams<T>& params, double eps, Exec exec) {
  require_same_shape(h, params.gamma, "gamma");
  require_same_shape(h, params.beta, "beta");
  if (!(eps >= 0.0)) throw Error(ErrorCode::InvalidArgument, "eps must be non-negative");

  const ChannelStats stats = kernels::channel_stats(h, exec);
  Tensor3<T> out(h.channels(), h.height(), h.width());
  for_channels(h.channels(), exec, [&](int c) {
    const auto x = h.plane(c);
    const auto g = params.gamma.plane(c);
    const auto b = params.beta.plane(c);
    auto o = out.plane(c);
    const double mu = stats.mean[c];
    const double inv = 1.0 / (stats.stddev[c] + eps);
    for (std::size_t i = 0; i < x.size(); ++i) {
      o[i] = static_cast<T>(static_cast<double>(g[i]) * ((static_cast<double>(x[i]) - mu) * inv) +
                            static_cast<double>(b[i]));
    }
  });
  return out;
}

template <typename T>
ModulationGrads<T> spade_backward(const Tensor3<T>& h, const BasicAffineParams<T>& params, double eps,
                                  const Tensor3<T>& upstream, Exec exec) {
  require_same_shape(h, params.gamma, "gamma");
  require_same_shape(h, params.beta, "beta");
  require_same_shape(h, upstream, "upstream gradient");
  if (!(eps >= 0.0)) throw Error(ErrorCode::InvalidArgument, "eps must be non-negative");

  const ChannelStats stats = kernels::channel_stats(h, exec);
  ModulationGrads<T> grads{Tensor3<T>(h.channels(), h.height(), h.width()), Tensor3<T>(h.channels(), h.height(), h.width()),
                           upstream};
  const double n = static_cast<double>(h.plane_size());

  for_channels(h.channels(), exec, [&](int c) {
    const auto x = h.plane(c);
    const auto g = params.gamma.plane(c);
    const auto up = upstream.plane(c);
    auto gh = grads.grad_h.plane(c);
    auto gg = grads.grad_gamma.plane(c);
    const double mu = stats.mean[c];
    const double sigma = stats.stddev[c];
    const double s = sigma + eps;

    // d = dL/dx_hat, x_hat = (h - mu) / s
    std::vector<double> d(x.size());
    std::vector<double> d_centered(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double centered = static_cast<double>(x[i]) - mu;
      d[i] = static_cast<double>(up[i]) * static_cast<double>(g[i]);
      d_centered[i] = d[i] * centered;
      gg[i] = static_cast<T>(static_cast<double>(up[i]) * centered / s);
    }
    const double mean_d = kernels::pairwise_sum(d) / n;
    const double sum_dc = kernels::pairwise_sum(d_centered);
    const double sigma_term = sigma > 0.0 ? sum_dc / (n * sigma * s * s) : 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double centered = static_cast<double>(x[i]) - mu;
      gh[i] = static_cast<T>((d[i] - mean_d) / s - centered * sigma_term);
    }
  });
  return grads;
}

template <typename T>
BasicAffineParams<T> affine_from_features(const Tensor3<T>& f_g, const ConvParams& conv_gamma,
                                          const ConvParams& conv_beta, Exec exec) {
  if (conv_gamma.out_channels != conv_beta.out_channels) {
    throw Error(ErrorCode::ShapeMismatch, "gamma and beta convolutions disagree on output channels");
  }
  return {kernels::conv2d_same(f_g, conv_gamma, exec), kernels::conv2d_same(f_g, conv_beta, exec)};
}

ConvParams random_conv_params(int out_channels, int in_channels, int kernel, std::uint64_t seed, float scale) {
  ConvParams p;
  p.out_channels = out_channels;
  p.in_channels = in_channels;
  p.kernel = kernel;
  SplitMix64 rng(seed);
  p.weights.resize(static_cast<std::size_t>(out_channels) * in_channels * kernel * kernel);
  for (float& w : p.weights) w = static_cast<float>(rng.uniform(-scale, scale));
  p.bias.resize(out_channels);
  for (float& b : p.bias) b = static_cast<float>(rng.uniform(-scale, scale));
  p.validate();
  return p;
}

template Tensor3<float> spade_modulate(const Tensor3<float>&, const BasicAffineParams<float>&, double, Exec);
template Tensor3<double> spade_modulate(const Tensor3<double>&, const BasicAffineParams<double>&, double, Exec);
template ModulationGrads<float> spade_backward(const Tensor3<float>&, const BasicAffineParams<float>&, double,
                                               const Tensor3<float>&, Exec);
template ModulationGrads<double> spade_backward(const Tensor3<double>&, const BasicAffineParams<double>&, double,
                                                const Tensor3<double>&, Exec);
template BasicAffineParams<float> affine_from_features(const Tensor3<float>&, const ConvParams&, const ConvParams&,
                                                       Exec);
template BasicAffineParams<double> affine_from_features(const Tensor3<double>&, const ConvParams&, const ConvParams&,
                                                        Exec);

}  // namespace patchwarp
