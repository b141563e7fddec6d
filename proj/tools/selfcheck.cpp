#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "commands.hpp"
#include "patchwarp/alignment.hpp"
#include "patchwarp/error.hpp"
#include "patchwarp/fixtures.hpp"
#include "patchwarp/io.hpp"
#include "patchwarp/metrics.hpp"
#include "patchwarp/modulation.hpp"

namespace patchwarp::cli {

namespace {

namespace fx = fixtures;

// A check returns an empty string on success, otherwise a short reason.
using Check = std::function<std::string()>;

std::string fmt(const char* f, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string check_homography_fit(std::uint64_t seed) {
  SplitMix64 rng(derive_seed(seed, 10));
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const Quad a = fx::random_convex_quad(rng), b = fx::random_convex_quad(rng);
    const Homography h = estimate_homography(a, b);
    for (int k = 0; k < 4; ++k) worst = std::max(worst, distance(apply_homography(h, a.corners[k]), b.corners[k]));
  }
  return worst < 1e-6 ? "" : fmt("corner residual %.3g", worst);
}

std::string check_homography_round_trip(std::uint64_t seed) {
  SplitMix64 rng(derive_seed(seed, 11));
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const Quad a = fx::random_convex_quad(rng), b = fx::random_convex_quad(rng);
    const Homography h = estimate_homography(a, b);
    const Homography hi = invert(h);
    for (int k = 0; k < 4; ++k) {
      const Point2 p{rng.uniform(0, 400), rng.uniform(0, 400)};
      worst = std::max(worst, distance(apply_homography(hi, apply_homography(h, a.corners[k])), a.corners[k]));
      worst = std::max(worst, distance(apply_homography(compose(hi, h), p), p));
    }
  }
  return worst < 1e-6 ? "" : fmt("round-trip residual %.3g", worst);
}

std::string check_composition(std::uint64_t seed) {
  SplitMix64 rng(derive_seed(seed, 12));
  const Quad tmpl = square_quad(kTemplateSize);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const Quad s = fx::random_convex_quad(rng), t = fx::random_convex_quad(rng);
    const Homography s_to_n = estimate_homography(s, tmpl);
    const Homography n_to_t = estimate_homography(tmpl, t);
    const Homography s_to_t = compose(n_to_t, s_to_n);
    for (int k = 0; k < 4; ++k) {
      const Point2 two_step = apply_homography(n_to_t, apply_homography(s_to_n, s.corners[k]));
      worst = std::max(worst, distance(apply_homography(s_to_t, s.corners[k]), two_step));
    }
  }
  return worst < 1e-6 ? "" : fmt("combined vs sequential %.3g", worst);
}

std::string check_homography_oracle(std::uint64_t seed) {
  SplitMix64 rng(derive_seed(seed, 13));
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const Quad a = fx::random_convex_quad(rng), b = fx::random_convex_quad(rng);
    const Homography h = estimate_homography(a, b);
    const fx::Mat3 o = fx::oracle_homography(a, b);
    for (int k = 0; k < 8; ++k) {
      const Point2 p{rng.uniform(0, 400), rng.uniform(0, 400)};
      worst = std::max(worst, distance(apply_homography(h, p), fx::oracle_apply(o, p)));
    }
  }
  return worst < 1e-6 ? "" : fmt("oracle disagreement %.3g px", worst);
}

std::string check_warp_oracle(std::uint64_t seed) {
  const fx::GarmentFixture g = fx::make_tpose_fixture(seed);
  SplitMix64 rng(derive_seed(seed, 14));
  for (int i = 0; i < 4; ++i) {
    Quad src = fx::random_convex_quad(rng, 60.0);
    const Quad tmpl = square_quad(kTemplateSize);
    const Homography n_to_s = estimate_homography(tmpl, src);
    const WarpedRaster serial =
        kernels::warp_perspective(g.image, g.mask, n_to_s, src, kTemplateSize, kTemplateSize,
                                  {0, 0, kTemplateSize, kTemplateSize}, Exec::Serial);
    const WarpedRaster parallel =
        kernels::warp_perspective(g.image, g.mask, n_to_s, src, kTemplateSize, kTemplateSize,
                                  {0, 0, kTemplateSize, kTemplateSize}, Exec::Parallel);
    if (!(serial.image == parallel.image) || !(serial.validity == parallel.validity)) {
      return "serial and parallel warps differ";
    }
    const WarpedRaster oracle =
        fx::oracle_resample(g.image, g.mask, n_to_s.matrix(), src, kTemplateSize, kTemplateSize);
    std::size_t disagree = 0;
    double worst = 0.0;
    for (int y = 0; y < kTemplateSize; ++y)
      for (int x = 0; x < kTemplateSize; ++x) {
        if (serial.validity.at(x, y) != oracle.validity.at(x, y)) {
          ++disagree;
          continue;
        }
        for (int c = 0; c < 4; ++c)
          worst = std::max(worst, static_cast<double>(std::abs(serial.image.at(x, y)[c] - oracle.image.at(x, y)[c])));
      }
    // Validity may only differ on pixel centers sitting on the quad boundary.
    if (disagree > 2 * kTemplateSize) return "validity disagrees with oracle on " + std::to_string(disagree) + " px";
    if (worst > 1e-5) return fmt("resampled value differs from oracle by %.3g", worst);
  }
  return "";
}

std::string check_channel_stats(std::uint64_t seed) {
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const FeatureMap h = fx::random_features(8, 16, 16, derive_seed(seed, 200 + i));
    const ChannelStats s = channel_stats(h, Exec::Parallel);
    const ChannelStats s_serial = channel_stats(h, Exec::Serial);
    if (s.mean != s_serial.mean || s.stddev != s_serial.stddev) return "serial and parallel stats differ";
    const fx::OracleStats o = fx::oracle_channel_stats(h);
    for (int c = 0; c < h.channels(); ++c) {
      worst = std::max({worst, std::abs(s.mean[c] - o.mean[c]), std::abs(s.stddev[c] - o.stddev[c])});
    }
  }
  return worst < 1e-9 ? "" : fmt("stats differ from oracle by %.3g", worst);
}

std::string check_modulation(std::uint64_t seed) {
  for (int i = 0; i < 20; ++i) {
    const FeatureMap h = fx::random_features(8, 16, 16, derive_seed(seed, 300 + i));
    const AffineParams unit{FeatureMap(8, 16, 16, 1.0f), FeatureMap(8, 16, 16, 0.0f)};
    const FeatureMap out = spade_modulate(h, unit);
    const ChannelStats s = channel_stats(out, Exec::Serial);
    for (int c = 0; c < 8; ++c) {
      if (std::abs(s.mean[c]) >= 1e-5) return fmt("normalized mean %.3g", s.mean[c]);
      if (std::abs(s.stddev[c] - 1.0) >= 1e-4) return fmt("normalized stddev %.6g", s.stddev[c]);
    }
    const AffineParams p{fx::random_features(8, 16, 16, derive_seed(seed, 400 + i)),
                         fx::random_features(8, 16, 16, derive_seed(seed, 500 + i))};
    const FeatureMap got = spade_modulate(h, p);
    const FeatureMap want = fx::oracle_modulate(h, p.gamma, p.beta, kDefaultModulationEps);
    for (std::size_t k = 0; k < got.size(); ++k) {
      if (std::abs(got.values()[k] - want.values()[k]) >= 1e-5) return "modulation differs from oracle";
    }
  }
  return "";
}

std::string check_gradients(std::uint64_t seed) {
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) worst = std::max(worst, fx::spade_gradient_check(2, 4, 4, derive_seed(seed, 600 + i)).worst());
  return worst < 1e-3 ? "" : fmt("finite-difference relative error %.3g", worst);
}

std::string check_conv(std::uint64_t seed) {
  for (int k : {1, 3, 5}) {
    const ConvParams p = random_conv_params(4, 3, k, derive_seed(seed, 700 + k));
    const FeatureMap in = fx::random_features(3, 12, 10, derive_seed(seed, 710 + k));
    const FeatureMap got = kernels::conv2d_same(in, p, Exec::Parallel);
    if (!(got == kernels::conv2d_same(in, p, Exec::Serial))) return "serial and parallel conv differ";
    const FeatureMap want = fx::oracle_conv2d(in, p);
    for (std::size_t i = 0; i < got.size(); ++i) {
      if (std::abs(got.values()[i] - want.values()[i]) >= 1e-5) return "conv differs from oracle (k=" + std::to_string(k) + ")";
    }
  }
  return "";
}

std::string check_alignment(std::uint64_t seed) {
  for (int i = 0; i < 200; ++i) {
    const BinaryMask g = fx::random_mask(32, 24, 0.5, derive_seed(seed, 800 + i));
    const BinaryMask t = fx::random_mask(32, 24, 0.5, derive_seed(seed, 1800 + i));
    const AlignmentMasks m = compute_alignment(g, t);
    for (std::size_t k = 0; k < g.size(); ++k) {
      const bool a = m.aligned.values()[k], mis = m.misaligned.values()[k];
      if (a && mis) return "aligned and misaligned overlap";
      if ((a || mis) != static_cast<bool>(g.values()[k])) return "aligned and misaligned do not cover M_g";
    }
  }
  return "";
}

std::string check_inpainting(std::uint64_t seed) {
  for (int i = 0; i < 100; ++i) {
    const FeatureMap f = fx::random_features(4, 16, 16, derive_seed(seed, 900 + i));
    const BinaryMask g = fx::random_mask(16, 16, 0.6, derive_seed(seed, 1900 + i));
    BinaryMask t = fx::random_mask(16, 16, 0.6, derive_seed(seed, 2900 + i));
    const AlignmentMasks m = compute_alignment(g, t);
    if (count(m.aligned) == 0) continue;
    const FeatureMap got = inpaint_features(f, m);
    const FeatureMap want = fx::oracle_inpaint(f, m.aligned, m.misaligned);
    for (int c = 0; c < f.channels(); ++c)
      for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 16; ++x) {
          if (!m.misaligned.at(x, y) && got.at(c, y, x) != f.at(c, y, x)) return "values outside misalignment changed";
          if (std::abs(got.at(c, y, x) - want.at(c, y, x)) > 1e-6) return "inpainting differs from oracle";
        }
  }
  return "";
}

std::string check_loss_constants() {
  const double v = total_loss({0.0, 1.0, 1.0, 1.0});
  return v == 180.0 ? "" : fmt("total_loss(0,1,1,1) = %.17g", v);
}

std::string check_round_trip_warp(std::uint64_t seed) {
  const fx::GarmentFixture g = fx::make_tpose_fixture(seed);
  const GarmentWarp w = warp_garment(g.image, g.mask, g.pose, g.pose, GarmentKind::Upper);
  if (w.patches.size() != 8) return "expected 8 patches, got " + std::to_string(w.patches.size());
  for (const auto& p : w.patches) {
    if (p.pixels.width() != kTemplateSize || p.pixels.height() != kTemplateSize) return "patch is not 64x64";
  }
  if (!is_coherent(w.garment)) return "warped image, mask and provenance disagree";
  BinaryMask reference = layout_union_mask(w.source_layout, g.mask.width(), g.mask.height());
  for (std::size_t i = 0; i < reference.size(); ++i) reference.values()[i] &= g.mask.values()[i];
  const double v = iou(w.garment.mask, reference);
  return v >= 0.85 ? "" : fmt("identity warp IoU %.4f", v);
}

std::string fixture_failure(const std::filesystem::path& dir) {
  using nlohmann::json;
  const io::Bytes meta_raw = io::read_file(dir / "fixture.json");
  const json meta = json::parse(meta_raw.begin(), meta_raw.end(), nullptr, false);
  if (meta.is_discarded() || !meta.contains("content_hash")) return "fixture.json: unreadable manifest";
  for (const char* name : {"conv_gamma.bin", "conv_beta.bin"}) {
    try {
      io::read_conv_params(dir / name).validate();
    } catch (const Error& e) {
      return std::string(name) + ": " + e.what();
    }
  }
  RasterImage image;
  BinaryMask mask;
  try {
    image = io::read_png_rgba(dir / "source.png");
  } catch (const Error& e) {
    return std::string("source.png: ") + e.what();
  }
  try {
    mask = io::read_png_mask(dir / "source_mask.png");
  } catch (const Error& e) {
    return std::string("source_mask.png: ") + e.what();
  }
  for (const char* name : {"source_pose.json", "target_pose.json"}) {
    try {
      io::read_pose_json(dir / name);
    } catch (const Error& e) {
      return std::string(name) + ": " + e.what();
    }
  }
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fx::content_hash(image, mask)));
  if (meta.at("content_hash") != hash) return "source.png/source_mask.png: content hash mismatch";
  if (meta.contains("seed")) {
    const fx::GarmentFixture regen = fx::make_tpose_fixture(meta.at("seed").get<std::uint64_t>());
    // PNG quantizes to 8 bits, so compare the re-encoded regeneration.
    const RasterImage requant = io::decode_png_rgba(io::encode_png_rgba(regen.image));
    if (!(requant == image) || !(regen.mask == mask)) return "source.png: does not match regenerated fixture";
  }
  return "";
}

}  // namespace

std::vector<CheckResult> run_selfcheck(const SelfcheckOptions& options) {
  const std::uint64_t seed = options.seed;
  std::vector<std::pair<std::string, Check>> checks = {
      {"homography_corner_fit", [=] { return check_homography_fit(seed); }},
      {"homography_round_trip", [=] { return check_homography_round_trip(seed); }},
      {"homography_composition", [=] { return check_composition(seed); }},
      {"homography_oracle", [=] { return check_homography_oracle(seed); }},
      {"warp_oracle_serial_parallel", [=] { return check_warp_oracle(seed); }},
      {"identity_pose_warp", [=] { return check_round_trip_warp(seed); }},
      {"channel_stats", [=] { return check_channel_stats(seed); }},
      {"modulation_normalization", [=] { return check_modulation(seed); }},
      {"modulation_gradient", [=] { return check_gradients(seed); }},
      {"conv_oracle", [=] { return check_conv(seed); }},
      {"alignment_partition", [=] { return check_alignment(seed); }},
      {"inpainting_contract", [=] { return check_inpainting(seed); }},
      {"loss_constants", [] { return check_loss_constants(); }},
  };
  if (options.fixture_dir) {
    const auto dir = *options.fixture_dir;
    checks.emplace_back("fixture_bundle", [dir] { return fixture_failure(dir); });
  }

  std::vector<CheckResult> results;
  for (auto& [name, fn] : checks) {
    CheckResult r;
    r.name = name;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      r.detail = fn();
      r.passed = r.detail.empty();
    } catch (const std::exception& e) {
      r.detail = e.what();
    }
    r.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    results.push_back(std::move(r));
  }
  return results;
}

int cmd_selfcheck(const SelfcheckOptions& options, std::ostream& out, std::ostream& err) {
  const auto results = run_selfcheck(options);
  int failed = 0;
  nlohmann::json summary = nlohmann::json::array();
  for (const auto& r : results) {
    out << (r.passed ? "PASS  " : "FAIL  ") << std::left << std::setw(30) << r.name << std::right << std::fixed
        << std::setprecision(1) << std::setw(9) << r.elapsed_ms << " ms";
    if (!r.passed) out << "  " << r.detail;
    out << "\n";
    summary.push_back({{"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
    failed += r.passed ? 0 : 1;
  }
  out << results.size() - failed << "/" << results.size() << " checks passed\n";
  out << "summary: " << summary.dump() << "\n";
  if (failed) err << failed << " selfcheck failure(s)\n";
  return failed ? kExitFailure : kExitOk;
}

}  // namespace patchwarp::cli
