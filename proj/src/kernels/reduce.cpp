#include <cmath>

#include "patchwarp/kernels.hpp"

namespace patchwarp::kernels {

namespace {

template <typename T, typename F>
double pairwise(std::span<const T> v, F f) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (const T& x : v) s += f(x);
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise(v.first(half), f) + pairwise(v.subspan(half), f);
}

}  // namespace

double pairwise_sum(std::span<const double> values) {
  return pairwise(values, [](double x) { return x; });
}

template <typename T>
double pairwise_sum_of(std::span<const T> values) {
  return pairwise(values, [](T x) { return static_cast<double>(x); });
}

template double pairwise_sum_of<float>(std::span<const float>);
template double pairwise_sum_of<double>(std::span<const double>);

template <typename T>
ChannelStats channel_stats(const Tensor3<T>& h, Exec exec) {
  const int channels = h.channels();
  ChannelStats s{std::vector<double>(channels, 0.0), std::vector<double>(channels, 0.0)};
  const double n = static_cast<double>(h.plane_size());
  if (h.plane_size() == 0) return s;

  auto one = [&](int c) {
    const auto plane = h.plane(c);
    const double mu = pairwise(plane, [](T x) { return static_cast<double>(x); }) / n;
    const double var = pairwise(plane, [mu](T x) {
                         const double d = static_cast<double>(x) - mu;
                         return d * d;
                       }) / n;
    s.mean[c] = mu;
    s.stddev[c] = std::sqrt(var);
  };

  if (exec == Exec::Serial) {
    for (int c = 0; c < channels; ++c) one(c);
  } else {
#pragma omp parallel for schedule(static)
    for (int c = 0; c < channels; ++c) one(c);
  }
  return s;
}

template ChannelStats channel_stats<float>(const Tensor3<float>&, Exec);
template ChannelStats channel_stats<double>(const Tensor3<double>&, Exec);

}  // namespace patchwarp::kernels
