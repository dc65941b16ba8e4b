// Command-line front end: align / drag / eval / synth / perspective.
//
// Exit codes: 0 success, 1 any case failure (pipeline error or a drag that
// missed its target), 2 usage error.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "panodrag/error.hpp"
#include "panodrag/harness.hpp"

namespace fs = std::filesystem;
using namespace panodrag;
using harness::SuiteConfig;
using repro::DragCase;

namespace {

constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) fail(ErrorKind::kIo, "cannot write " + p.string());
  return out;
}

int cmd_align(const std::string& case_dir, double target_lon_deg,
              bool keep_lat, const std::string& out_dir) {
  DragCase c = harness::load_case(case_dir);
  auto [aligned, rec] =
      repro::align_case(c, target_lon_deg * kDegToRad, keep_lat);
  // Manifests store integer pixels; rotated points are continuous, so the
  // saved case snaps them to the grid (< 0.5 px, the raster resampled on
  // the exact shift). alignment.json keeps the exact record.
  for (repro::PointPair& p : aligned.pairs) {
    for (double* v : {&p.handle.i, &p.handle.j, &p.target.i, &p.target.j})
      *v = std::floor(*v + 0.5);
    p.handle.i = std::fmod(p.handle.i + aligned.image.width,
                           static_cast<double>(aligned.image.width));
    p.target.i = std::fmod(p.target.i + aligned.image.width,
                           static_cast<double>(aligned.image.width));
    p.handle.j = std::min(p.handle.j, aligned.image.height - 1.0);
    p.target.j = std::min(p.target.j, aligned.image.height - 1.0);
    if (p.handle.i == p.target.i && p.handle.j == p.target.j)
      fail(ErrorKind::kDegenerateInput,
           "drag is shorter than one pixel after alignment");
  }
  fs::create_directories(out_dir);
  harness::save_case(aligned, out_dir);

  std::ofstream out = open_out(fs::path(out_dir) / "alignment.json");
  out << "{\n";
  out << "  \"target_lon_deg\": " << fmt17(target_lon_deg) << ",\n";
  out << "  \"keep_lat\": " << (keep_lat ? "true" : "false") << ",\n";
  out << "  \"midpoint_before\": [" << fmt17(rec.midpoint_before.lat) << ", "
      << fmt17(rec.midpoint_before.lon) << "],\n";
  out << "  \"midpoint_after\": [" << fmt17(rec.midpoint_after.lat) << ", "
      << fmt17(rec.midpoint_after.lon) << "],\n";
  out << "  \"rotation\": [";
  for (int k = 0; k < 9; ++k)
    out << (k ? ", " : "") << fmt17(rec.rotation.m[static_cast<size_t>(k)]);
  out << "]\n}\n";

  std::cout << "aligned " << c.id << " -> " << out_dir << " (midpoint lon "
            << fmt17(rec.midpoint_after.lon) << " rad)\n";
  return 0;
}

int cmd_drag(const std::string& case_dir, const SuiteConfig& cfg,
             const std::string& out_dir) {
  DragCase c = harness::load_case(case_dir);
  fs::create_directories(out_dir);

  std::ofstream trace = open_out(fs::path(out_dir) / "trace.jsonl");
  int pair_index = -1;
  drag::TraceSink sink = [&](const drag::TraceRecord& t) {
    if (t.k == 0) ++pair_index;
    trace << "{\"pair\": " << pair_index << ", \"k\": " << t.k
          << ", \"handle\": [" << fmt17(t.handle.i) << ", " << fmt17(t.handle.j)
          << "], \"loss\": " << fmt17(t.loss) << ", \"direction\": ["
          << fmt17(t.direction.di) << ", " << fmt17(t.direction.dj) << "]}\n";
  };

  harness::CaseOutcome outcome = harness::run_case(c, cfg, &sink);
  img::save_ppm(outcome.edited, (fs::path(out_dir) / "edited.ppm").string());

  const harness::CaseResult& r = outcome.result;
  std::ofstream res = open_out(fs::path(out_dir) / "result.json");
  res << "{\n";
  res << "  \"id\": \"" << r.id << "\",\n";
  res << "  \"ok\": " << (r.ok ? "true" : "false") << ",\n";
  res << "  \"iterations\": " << r.iterations << ",\n";
  res << "  \"final_err_cells\": " << fmt17(r.final_err_cells) << ",\n";
  res << "  \"success_cells\": " << fmt17(cfg.success_cells) << "\n";
  res << "}\n";

  std::cout << r.id << ": " << (r.ok ? "ok" : "missed target") << ", "
            << r.iterations << " iterations, final error "
            << fmt17(r.final_err_cells) << " cells\n";
  return r.ok ? 0 : 1;
}

int cmd_eval(const std::vector<std::string>& case_dirs, SuiteConfig cfg,
             const std::string& report_path) {
  std::vector<DragCase> cases;
  for (const std::string& d : case_dirs) cases.push_back(harness::load_case(d));

  harness::SuiteReport rep = harness::run_suite(cases, cfg);
  harness::save_report(rep, report_path);

  int failed = 0;
  for (const harness::CaseResult& r : rep.cases) {
    if (r.failed) {
      ++failed;
      std::cerr << r.id << ": " << r.error << "\n";
    }
  }
  std::cout << "evaluated " << rep.cases.size() << " cases, success rate "
            << fmt17(rep.success_rate) << ", IF " << fmt17(rep.metrics.if_score)
            << ", FID " << fmt17(rep.metrics.fid) << " -> " << report_path
            << "\n";
  return failed > 0 ? 1 : 0;
}

int cmd_synth(std::uint64_t seed, int n, const std::string& family,
              const std::string& out_dir) {
  harness::SynthParams p =
      harness::family_params(harness::family_from_name(family));
  for (int k = 0; k < n; ++k) {
    DragCase c = harness::generate_synthetic_case(seed + k, p);
    fs::path dir = fs::path(out_dir) / c.id;
    harness::save_case(c, dir.string());
    std::cout << c.id << " -> " << dir.string() << "\n";
  }
  return 0;
}

int cmd_perspective(const std::string& image_path, double lat_deg,
                    double lon_deg, double fov_deg, int size,
                    const std::string& out_path) {
  img::ErpImage pano = img::load_ppm(image_path);
  repro::PerspectiveSpec spec;
  spec.center = {lat_deg * kDegToRad, lon_deg * kDegToRad};
  spec.fov_deg = fov_deg;
  spec.out_size = size;
  repro::PlanarImage view = repro::extract_perspective(pano, spec);

  img::ErpImage packed;
  packed.width = view.size;
  packed.height = view.size;
  packed.channels = view.channels;
  packed.data = std::move(view.data);
  img::save_ppm(packed, out_path);
  std::cout << "wrote " << out_path << " (" << size << "x" << size << ", fov "
            << fmt17(fov_deg) << " deg)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spherical drag-editing toolkit"};
  app.require_subcommand(1);
  int rc = 0;

  // align
  std::string al_case, al_out;
  double al_lon = 0.0;
  bool al_keep_lat = true;
  CLI::App* align = app.add_subcommand(
      "align", "Recenter a case so the drag midpoint sits at a longitude");
  align->add_option("case_dir", al_case, "case directory")->required();
  align->add_option("--target-lon", al_lon, "target longitude, degrees")
      ->capture_default_str();
  align->add_flag("--keep-lat,!--full-recenter", al_keep_lat,
                  "rotate longitude only (default) or also zero the latitude");
  align->add_option("--out", al_out, "output case directory")->required();
  align->callback([&] { rc = cmd_align(al_case, al_lon, al_keep_lat, al_out); });

  // drag
  std::string dr_case, dr_out;
  SuiteConfig dr_cfg;
  double dr_r = dr_cfg.drag.r_base;
  bool dr_no_ar = false, dr_no_gcta = false, dr_no_ssrt = false;
  CLI::App* dragc = app.add_subcommand(
      "drag", "Run the drag loop on one case and write the edited panorama");
  dragc->add_option("case_dir", dr_case, "case directory")->required();
  dragc->add_option("--lambda", dr_cfg.drag.lambda, "preservation weight")
      ->capture_default_str();
  dragc->add_option("--lr", dr_cfg.drag.lr, "gradient step size")
      ->capture_default_str();
  dragc->add_option("--r", dr_r, "base tracking radius, field cells")
      ->capture_default_str();
  dragc->add_option("--max-iter", dr_cfg.drag.max_iter, "iteration budget")
      ->capture_default_str();
  dragc->add_flag("--no-ar", dr_no_ar, "skip adaptive reprojection");
  dragc->add_flag("--no-gcta", dr_no_gcta, "planar motion directions");
  dragc->add_flag("--no-ssrt", dr_no_ssrt, "fixed square search region");
  dragc->add_option("--out", dr_out, "output directory")->required();
  dragc->callback([&] {
    dr_cfg.drag.r_base = dr_r;
    dr_cfg.drag.r0 = dr_r;
    dr_cfg.ablation.ar = !dr_no_ar;
    dr_cfg.ablation.gcta = !dr_no_gcta;
    dr_cfg.ablation.ssrt = !dr_no_ssrt;
    rc = cmd_drag(dr_case, dr_cfg, dr_out);
  });

  // eval
  std::vector<std::string> ev_cases;
  std::string ev_report;
  SuiteConfig ev_cfg;
  bool ev_no_ar = false, ev_no_gcta = false, ev_no_ssrt = false;
  CLI::App* eval = app.add_subcommand(
      "eval", "Run the benchmark suite over case directories");
  eval->add_option("cases", ev_cases, "case directories")->required();
  eval->add_option("--fov", ev_cfg.fovs_deg, "evaluation FOVs, degrees")
      ->delimiter(',')
      ->capture_default_str();
  eval->add_option("--seed", ev_cfg.seed, "metric projection seed")
      ->capture_default_str();
  eval->add_option("--report", ev_report, "report file to write")->required();
  eval->add_option("--metric-size", ev_cfg.metric_out_size,
                   "perspective view resolution")
      ->capture_default_str();
  eval->add_flag("--no-ar", ev_no_ar, "skip adaptive reprojection");
  eval->add_flag("--no-gcta", ev_no_gcta, "planar motion directions");
  eval->add_flag("--no-ssrt", ev_no_ssrt, "fixed square search region");
  eval->add_flag("--dry-run", ev_cfg.dry_run,
                 "full pipeline with the drag disabled");
  eval->callback([&] {
    ev_cfg.ablation.ar = !ev_no_ar;
    ev_cfg.ablation.gcta = !ev_no_gcta;
    ev_cfg.ablation.ssrt = !ev_no_ssrt;
    rc = cmd_eval(ev_cases, ev_cfg, ev_report);
  });

  // synth
  std::uint64_t sy_seed = 0;
  int sy_n = 1;
  std::string sy_family, sy_out;
  CLI::App* synth =
      app.add_subcommand("synth", "Generate synthetic benchmark cases");
  synth->add_option("--seed", sy_seed, "first seed")->capture_default_str();
  synth->add_option("--n", sy_n, "number of cases (consecutive seeds)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  synth
      ->add_option("--family", sy_family,
                   "equatorial, seam, highlat, or oblique")
      ->required()
      ->check(CLI::IsMember({"equatorial", "seam", "highlat", "oblique"}));
  synth->add_option("--out", sy_out, "directory for the case directories")
      ->required();
  synth->callback([&] { rc = cmd_synth(sy_seed, sy_n, sy_family, sy_out); });

  // perspective
  std::string pe_image, pe_out = "view.ppm";
  double pe_lat = 0.0, pe_lon = 0.0, pe_fov = 90.0;
  int pe_size = 512;
  CLI::App* persp = app.add_subcommand(
      "perspective", "Extract a pinhole view from an equirectangular PPM");
  persp->add_option("image", pe_image, "panorama (PPM)")->required();
  persp->add_option("--lat", pe_lat, "view center latitude, degrees")
      ->capture_default_str();
  persp->add_option("--lon", pe_lon, "view center longitude, degrees")
      ->capture_default_str();
  persp->add_option("--fov", pe_fov, "field of view, degrees")
      ->capture_default_str();
  persp->add_option("--size", pe_size, "output resolution")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  persp->add_option("--out", pe_out, "output PPM path")
      ->capture_default_str();
  persp->callback(
      [&] { rc = cmd_perspective(pe_image, pe_lat, pe_lon, pe_fov, pe_size, pe_out); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}
