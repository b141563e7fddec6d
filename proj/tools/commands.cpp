#include "commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <iostream>
#include <map>

#include "patchwarp/alignment.hpp"
#include "patchwarp/error.hpp"
#include "patchwarp/fixtures.hpp"
#include "patchwarp/io.hpp"

namespace patchwarp::cli {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingJoint:
    case ErrorCode::DegenerateLayout:
    case ErrorCode::DegenerateQuad:
    case ErrorCode::SingularSystem:
    case ErrorCode::SingularMatrix:
    case ErrorCode::PointAtInfinity:
    case ErrorCode::RoleMismatch: return kExitGeometry;
    case ErrorCode::Io:
    case ErrorCode::Parse:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::ShapeMismatch:
    case ErrorCode::InvalidArgument:
    case ErrorCode::EmptyAlignedRegion: return kExitInputError;
  }
  return kExitFailure;
}

const std::array<io::Rgb8, kPatchRoleCount + 1>& provenance_palette() {
  static const std::array<io::Rgb8, kPatchRoleCount + 1> palette = {{
      {0, 0, 0},       // none
      {230, 25, 75},   // torso
      {60, 180, 75},   // neck
      {255, 225, 25},  // l_upper_arm
      {0, 130, 200},   // r_upper_arm
      {245, 130, 48},  // l_lower_arm
      {145, 30, 180},  // r_lower_arm
      {70, 240, 240},  // l_hip
      {240, 50, 230},  // r_hip
      {210, 245, 60},  // waist
      {250, 190, 212}, // l_upper_leg
      {0, 128, 128},   // r_upper_leg
      {220, 190, 255}, // l_lower_leg
      {170, 110, 40},  // r_lower_leg
      {255, 250, 200}, // seat
      {128, 128, 128}, // template
  }};
  return palette;
}

json matrix_json(const Homography& h) { return json(h.matrix()); }

template <typename T>
void read_opt(const json& j, const char* key, T& dst) {
  if (j.contains(key)) dst = j.at(key).get<T>();
}

struct PendingFile {
  std::string name;
  io::Bytes bytes;
};

}  // namespace

JobConfig load_job_config(const std::filesystem::path& path) {
  const io::Bytes raw = io::read_file(path);
  JobConfig cfg;
  try {
    const json j = json::parse(raw.begin(), raw.end());
    if (!j.is_object()) throw Error(ErrorCode::Parse, "config must be a JSON object");
    auto path_opt = [&](const char* key, std::filesystem::path& dst) {
      if (j.contains(key)) dst = j.at(key).get<std::string>();
    };
    path_opt("source_image", cfg.source_image);
    path_opt("source_mask", cfg.source_mask);
    path_opt("source_pose", cfg.source_pose);
    path_opt("target_pose", cfg.target_pose);
    path_opt("output_dir", cfg.output_dir);
    if (j.contains("garment_kind")) {
      const auto kind = garment_kind_from_string(j.at("garment_kind").get<std::string>());
      if (!kind) throw Error(ErrorCode::Parse, "garment_kind must be upper, lower or full");
      cfg.kind = *kind;
    }
    read_opt(j, "seed", cfg.seed);
    read_opt(j, "diagnostics", cfg.diagnostics);
    read_opt(j, "record_timings", cfg.record_timings);
    if (j.contains("layout")) {
      const json& l = j.at("layout");
      read_opt(l, "width_factor", cfg.layout.width_factor);
      read_opt(l, "min_confidence", cfg.layout.min_confidence);
      read_opt(l, "neck_width", cfg.layout.neck_width);
      read_opt(l, "neck_height", cfg.layout.neck_height);
      read_opt(l, "hip_width", cfg.layout.hip_width);
      read_opt(l, "hip_height", cfg.layout.hip_height);
      read_opt(l, "waist_width", cfg.layout.waist_width);
      read_opt(l, "waist_height", cfg.layout.waist_height);
      read_opt(l, "seat_depth", cfg.layout.seat_depth);
    }
    if (j.contains("erase")) {
      const json& e = j.at("erase");
      read_opt(e, "enabled", cfg.augment);
      read_opt(e, "alpha1", cfg.erase.alpha1);
      read_opt(e, "alpha2", cfg.erase.alpha2);
      if (e.contains("strokes")) {
        const json& s = e.at("strokes");
        auto& p = cfg.erase.strokes;
        read_opt(s, "min_strokes", p.min_strokes);
        read_opt(s, "max_strokes", p.max_strokes);
        read_opt(s, "min_vertices", p.min_vertices);
        read_opt(s, "max_vertices", p.max_vertices);
        read_opt(s, "min_step", p.min_step);
        read_opt(s, "max_step", p.max_step);
        read_opt(s, "min_width", p.min_width);
        read_opt(s, "max_width", p.max_width);
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, path.string() + ": " + e.what());
  }
  return cfg;
}

int cmd_warp(const JobConfig& config, std::ostream& out, std::ostream& err) {
  std::map<std::string, double> timings;
  std::vector<PendingFile> files;
  json manifest;
  try {
    auto t0 = Clock::now();
    const RasterImage source = io::read_png_rgba(config.source_image);
    const BinaryMask mask = io::read_png_mask(config.source_mask);
    const PoseKeypoints source_pose = io::read_pose_json(config.source_pose);
    const PoseKeypoints target_pose = io::read_pose_json(config.target_pose);
    if (!same_size(source, mask)) {
      throw Error(ErrorCode::DimensionMismatch, "source image and mask differ in size");
    }
    config.erase.validate();
    timings["load"] = ms_since(t0);

    t0 = Clock::now();
    GarmentWarp warp = warp_garment(source, mask, source_pose, target_pose, config.kind, config.layout);
    timings["warp"] = ms_since(t0);

    json erase_report = {{"enabled", config.augment}};
    if (config.augment) {
      t0 = Clock::now();
      EraseConfig ecfg = config.erase;
      ecfg.seed = config.seed;
      EraseOutcome outcome = random_erase_detailed(warp.garment, ecfg);
      warp.garment = std::move(outcome.garment);
      erase_report["dropped_arm"] =
          outcome.dropped_arm ? json(std::string(to_string(*outcome.dropped_arm))) : json(nullptr);
      erase_report["free_form"] = outcome.free_form_applied;
      timings["erase"] = ms_since(t0);
    }

    t0 = Clock::now();
    json per_patch = json::array();
    for (std::size_t i = 0; i < warp.patches.size(); ++i) {
      const auto& p = warp.patches[i];
      const std::string role(to_string(p.role));
      files.push_back({"normalized_" + role + ".png", io::encode_png_rgba(p.pixels)});
      per_patch.push_back({{"role", role},
                           {"H_s_to_n", matrix_json(p.source_to_template)},
                           {"H_n_to_t", matrix_json(warp.warped[i].template_to_target)},
                           {"H_s_to_t", matrix_json(compose(warp.warped[i].template_to_target, p.source_to_template))},
                           {"valid_template_pixels", count(p.validity)}});
    }
    files.push_back({"warped_garment.png", io::encode_png_rgba(warp.garment.image)});
    files.push_back({"warped_mask.png", io::encode_png_mask(warp.garment.mask)});
    Grid<std::uint8_t> indices(warp.garment.provenance.width(), warp.garment.provenance.height());
    for (std::size_t i = 0; i < indices.size(); ++i) {
      const std::uint8_t r = warp.garment.provenance.values()[i];
      indices.values()[i] = r == kNoRole ? 0 : static_cast<std::uint8_t>(r + 1);
    }
    files.push_back({"provenance.png", io::encode_png_indexed(indices, provenance_palette())});
    if (config.diagnostics) {
      files.push_back({"source_layout_mask.png",
                       io::encode_png_mask(layout_union_mask(warp.source_layout, source.width(), source.height()))});
      files.push_back({"target_layout_mask.png",
                       io::encode_png_mask(layout_union_mask(warp.target_layout, source.width(), source.height()))});
    }
    timings["encode"] = ms_since(t0);

    json outputs = json::array();
    for (const auto& f : files) outputs.push_back(f.name);
    outputs.push_back("manifest.json");
    json palette = json::object();
    for (int r = 0; r < kPatchRoleCount; ++r) palette[std::to_string(r + 1)] = to_string(static_cast<PatchRole>(r));

    manifest = {
        {"inputs",
         {{"source_image", config.source_image.string()},
          {"source_mask", config.source_mask.string()},
          {"source_pose", config.source_pose.string()},
          {"target_pose", config.target_pose.string()},
          {"garment_kind", to_string(config.kind)},
          {"width_factor", config.layout.width_factor},
          {"canvas", {source.width(), source.height()}}}},
        {"seed", config.seed},
        {"per_patch", per_patch},
        {"erase", erase_report},
        {"provenance_palette", palette},
        {"warped_pixels", count(warp.garment.mask)},
        {"outputs", outputs},
        {"timings_ms", config.record_timings ? json(timings) : json::object()},
    };
  } catch (const Error& e) {
    const int code = exit_code_for(e.code());
    err << (code == kExitGeometry ? "geometry failure: " : "input error: ") << e.what() << "\n";
    return code;
  }

  try {
    std::filesystem::create_directories(config.output_dir);
    for (const auto& f : files) io::write_file_atomic(config.output_dir / f.name, f.bytes);
    io::write_file_atomic(config.output_dir / "manifest.json", manifest.dump(2) + "\n");
  } catch (const std::exception& e) {
    err << "output error: " << e.what() << "\n";
    return kExitFailure;
  }
  out << "wrote " << files.size() + 1 << " files to " << config.output_dir.string() << "\n";
  return kExitOk;
}

int cmd_align(const std::filesystem::path& garment_mask, const std::filesystem::path& warped_mask,
              const std::filesystem::path& output_dir, std::ostream& out, std::ostream& err) {
  io::Bytes aligned_png, misaligned_png, overlay_png;
  std::size_t n_aligned = 0, n_misaligned = 0, n_removed = 0;
  try {
    const BinaryMask m_g = io::read_png_mask(garment_mask);
    const BinaryMask m_t = io::read_png_mask(warped_mask);
    const AlignmentMasks masks = compute_alignment(m_g, m_t);
    // Black background, gray aligned, orange to inpaint, green to remove.
    RasterImage overlay(m_g.width(), m_g.height());
    for (int y = 0; y < m_g.height(); ++y) {
      for (int x = 0; x < m_g.width(); ++x) {
        Rgba c{0, 0, 0, 1};
        if (masks.aligned.at(x, y)) {
          c = {0.75f, 0.75f, 0.75f, 1};
        } else if (masks.misaligned.at(x, y)) {
          c = {1.0f, 0.5f, 0.0f, 1};
        } else if (m_t.at(x, y)) {
          c = {0.0f, 0.75f, 0.0f, 1};
          ++n_removed;
        }
        overlay.at(x, y) = c;
      }
    }
    n_aligned = count(masks.aligned);
    n_misaligned = count(masks.misaligned);
    aligned_png = io::encode_png_mask(masks.aligned);
    misaligned_png = io::encode_png_mask(masks.misaligned);
    overlay_png = io::encode_png_rgb(overlay);
  } catch (const Error& e) {
    err << "input error: " << e.what() << "\n";
    return exit_code_for(e.code());
  }
  try {
    std::filesystem::create_directories(output_dir);
    io::write_file_atomic(output_dir / "aligned.png", aligned_png);
    io::write_file_atomic(output_dir / "misaligned.png", misaligned_png);
    io::write_file_atomic(output_dir / "alignment_overlay.png", overlay_png);
  } catch (const std::exception& e) {
    err << "output error: " << e.what() << "\n";
    return kExitFailure;
  }
  out << "aligned " << n_aligned << " px, misaligned (inpaint) " << n_misaligned << " px, removed " << n_removed
      << " px\n";
  return kExitOk;
}

int cmd_make_fixture(const std::filesystem::path& dir, std::uint64_t seed, double target_shift_x, std::ostream& out,
                     std::ostream& err) {
  try {
    fixtures::write_bundle(dir, seed, target_shift_x);
  } catch (const std::exception& e) {
    err << "output error: " << e.what() << "\n";
    return kExitFailure;
  }
  out << "fixture bundle written to " << dir.string() << "\n";
  return kExitOk;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"patchwarp: patch-routed garment warping toolkit"};
  app.require_subcommand(1);

  JobConfig job;
  std::string config_path;
  std::string kind = "upper";
  auto* warp = app.add_subcommand("warp", "Normalize garment patches and warp them to a target pose");
  warp->add_option("--config", config_path, "JSON job description (flags override it)");
  warp->add_option("--source-image", job.source_image, "Source garment RGBA PNG");
  warp->add_option("--source-mask", job.source_mask, "Source garment mask PNG (gray, threshold 128)");
  warp->add_option("--source-pose", job.source_pose, "Source keypoint JSON");
  warp->add_option("--target-pose", job.target_pose, "Target keypoint JSON");
  warp->add_option("--kind", kind, "Garment kind: upper, lower or full");
  warp->add_option("--width-factor", job.layout.width_factor, "Limb patch width relative to limb length");
  warp->add_option("--out", job.output_dir, "Output directory");
  warp->add_option("--seed", job.seed, "Random seed for augmentation");
  warp->add_flag("--augment", job.augment, "Apply random erasing to the warped garment");
  warp->add_flag("--diagnostics", job.diagnostics, "Also write layout union masks");
  bool no_timings = false;
  warp->add_flag("--no-timings", no_timings, "Leave timings_ms empty so manifests are byte-reproducible");

  std::filesystem::path m_g, m_t, align_out = "out";
  auto* align = app.add_subcommand("align", "Split the predicted garment mask into aligned and misaligned parts");
  align->add_option("--garment-mask", m_g, "Predicted garment mask M_g")->required();
  align->add_option("--warped-mask", m_t, "Warped garment mask M_t")->required();
  align->add_option("--out", align_out, "Output directory");

  SelfcheckOptions sc;
  std::string fixture_dir;
  auto* selfcheck = app.add_subcommand("selfcheck", "Run the embedded invariant suite");
  selfcheck->add_option("--fixture-dir", fixture_dir, "Also verify a fixture bundle");
  selfcheck->add_option("--seed", sc.seed, "Seed for randomized checks");

  std::filesystem::path fixture_out;
  std::uint64_t fixture_seed = 0;
  double shift = 0.0;
  auto* make_fixture = app.add_subcommand("make-fixture", "Write a synthetic T-pose fixture bundle");
  make_fixture->add_option("--out", fixture_out, "Bundle directory")->required();
  make_fixture->add_option("--seed", fixture_seed, "Fixture seed");
  make_fixture->add_option("--target-shift-x", shift, "Horizontal offset of the target pose");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "argument error: " << e.what() << "\n";
    return kExitInputError;
  }

  if (*warp) {
    JobConfig cfg;
    if (!config_path.empty()) {
      try {
        cfg = load_job_config(config_path);
      } catch (const Error& e) {
        err << "input error: " << e.what() << "\n";
        return kExitInputError;
      }
    }
    if (!job.source_image.empty()) cfg.source_image = job.source_image;
    if (!job.source_mask.empty()) cfg.source_mask = job.source_mask;
    if (!job.source_pose.empty()) cfg.source_pose = job.source_pose;
    if (!job.target_pose.empty()) cfg.target_pose = job.target_pose;
    if (warp->count("--kind")) {
      const auto k = garment_kind_from_string(kind);
      if (!k) {
        err << "argument error: --kind must be upper, lower or full\n";
        return kExitInputError;
      }
      cfg.kind = *k;
    }
    if (warp->count("--width-factor")) cfg.layout.width_factor = job.layout.width_factor;
    if (warp->count("--out")) cfg.output_dir = job.output_dir;
    if (warp->count("--seed")) cfg.seed = job.seed;
    if (job.augment) cfg.augment = true;
    if (job.diagnostics) cfg.diagnostics = true;
    if (no_timings) cfg.record_timings = false;
    for (const auto* p : {&cfg.source_image, &cfg.source_mask, &cfg.source_pose, &cfg.target_pose}) {
      if (p->empty()) {
        err << "argument error: source image, source mask, source pose and target pose are required\n";
        return kExitInputError;
      }
    }
    return cmd_warp(cfg, out, err);
  }
  if (*align) return cmd_align(m_g, m_t, align_out, out, err);
  if (*selfcheck) {
    if (!fixture_dir.empty()) sc.fixture_dir = fixture_dir;
    return cmd_selfcheck(sc, out, err);
  }
  if (*make_fixture) return cmd_make_fixture(fixture_out, fixture_seed, shift, out, err);
  return kExitInputError;
}

}  // namespace patchwarp::cli
