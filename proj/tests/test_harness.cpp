#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "panodrag/error.hpp"
#include "panodrag/harness.hpp"

using namespace panodrag;
using namespace panodrag::harness;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& leaf) {
  fs::path d = fs::temp_directory_path() / ("panodrag_harness_" + leaf);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  out << s;
}

bool same_pairs(const DragCase& a, const DragCase& b) {
  if (a.pairs.size() != b.pairs.size()) return false;
  for (std::size_t k = 0; k < a.pairs.size(); ++k) {
    if (a.pairs[k].handle.i != b.pairs[k].handle.i) return false;
    if (a.pairs[k].handle.j != b.pairs[k].handle.j) return false;
    if (a.pairs[k].target.i != b.pairs[k].target.i) return false;
    if (a.pairs[k].target.j != b.pairs[k].target.j) return false;
  }
  return true;
}

SynthParams small_params(CaseFamily f) {
  SynthParams p = family_params(f);
  p.width = 512;
  return p;
}

// A manifest that points at the rasters save_case wrote into dir; the pairs
// fragment is spliced in so each corruption needs only one line.
std::string manifest_with_pairs(const std::string& pairs) {
  return std::string("{\"id\":\"t\",\"width\":512,\"height\":256,") +
         "\"image_path\":\"image.ppm\",\"mask_path\":\"mask.pgm\"," +
         "\"pairs\":" + pairs + "}";
}

int mask_row_width(const img::MaskImage& m, int j) {
  int n = 0;
  for (int i = 0; i < m.width; ++i) n += m.at(i, j) != 0 ? 1 : 0;
  return n;
}

int mask_row_extent(const img::MaskImage& m) {
  int n = 0;
  for (int j = 0; j < m.height; ++j) n += mask_row_width(m, j) > 0 ? 1 : 0;
  return n;
}

}  // namespace

TEST_CASE("fnv1a matches the published test vectors") {
  CHECK(fnv1a(nullptr, 0) == 14695981039346656037ull);
  CHECK(fnv1a("a", 1) == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a("foobar", 6) == 0x85944171f73967e8ull);
  // Chaining equals hashing the concatenation.
  CHECK(fnv1a("bar", 3, fnv1a("foo", 3)) == fnv1a("foobar", 6));
}

TEST_CASE("generation is deterministic per seed and varies across seeds") {
  SynthParams p = small_params(CaseFamily::kEquatorial);
  DragCase a = generate_synthetic_case(42, p);
  DragCase b = generate_synthetic_case(42, p);
  CHECK(a.id == b.id);
  CHECK(a.image.data == b.image.data);
  CHECK(a.mask.data == b.mask.data);
  CHECK(same_pairs(a, b));

  DragCase c = generate_synthetic_case(43, p);
  CHECK(a.image.data != c.image.data);

  CHECK(a.image.width == 512);
  CHECK(a.image.height == 256);
  CHECK(a.pairs.size() == 1u);
  CHECK(a.id == "equatorial-42");
}

TEST_CASE("generator rejects invalid parameters") {
  SynthParams p = small_params(CaseFamily::kEquatorial);

  SynthParams zero = p;
  zero.drag_cells = 0.0;
  CHECK_THROWS_AS(generate_synthetic_case(1, zero), Error);

  SynthParams wide = p;
  wide.drag_cells = 40.0;  // does not fit inside a hemisphere at width 512
  CHECK_THROWS_AS(generate_synthetic_case(1, wide), Error);

  SynthParams odd = p;
  odd.width = 100;
  CHECK_THROWS_AS(generate_synthetic_case(1, odd), Error);

  SynthParams polar = p;
  polar.handle_lat_deg = 85.0;
  CHECK_THROWS_AS(generate_synthetic_case(1, polar), Error);

  SynthParams flat = p;
  flat.handle_sigma_deg = 0.0;
  CHECK_THROWS_AS(generate_synthetic_case(1, flat), Error);

  SynthParams neg = p;
  neg.blob_count = -1;
  CHECK_THROWS_AS(generate_synthetic_case(1, neg), Error);
}

TEST_CASE("family names round trip and presets target their bands") {
  for (CaseFamily f : {CaseFamily::kEquatorial, CaseFamily::kSeam,
                       CaseFamily::kHighlat, CaseFamily::kOblique}) {
    CHECK(family_from_name(family_name(f)) == f);
    CHECK(family_params(f).family == f);
  }
  CHECK_THROWS_AS(family_from_name("diagonal"), Error);
  CHECK(family_params(CaseFamily::kEquatorial).handle_lat_deg == 0.0);
  CHECK(family_params(CaseFamily::kHighlat).handle_lat_deg >
        family_params(CaseFamily::kOblique).handle_lat_deg);
}

TEST_CASE("blob footprints stretch with latitude like the projection") {
  SynthParams p = family_params(CaseFamily::kEquatorial);
  p.blob_count = 0;
  p.handle_sigma_deg = 4.0;  // narrow blob: the mask disk stays far from a pole

  DragCase low = generate_synthetic_case(7, p);
  p.handle_lat_deg = 70.0;
  DragCase high = generate_synthetic_case(7, p);

  int w_low = mask_row_width(low.mask, static_cast<int>(low.pairs[0].handle.j));
  int w_high =
      mask_row_width(high.mask, static_cast<int>(high.pairs[0].handle.j));
  REQUIRE(w_low > 0);
  // The same angular disk is about 1/cos(70 deg) = 2.92x wider at that band.
  double ratio = static_cast<double>(w_high) / w_low;
  CHECK(ratio >= 2.6);
  CHECK(ratio <= 3.3);

  // Latitude extent is projection-invariant, so row coverage stays put.
  double rows = static_cast<double>(mask_row_extent(high.mask)) /
                mask_row_extent(low.mask);
  CHECK(rows >= 0.85);
  CHECK(rows <= 1.15);
}

TEST_CASE("save and load round trip a case byte for byte") {
  SynthParams p = small_params(CaseFamily::kSeam);
  DragCase c = generate_synthetic_case(42, p);

  fs::path a = temp_dir("roundtrip_a");
  save_case(c, a.string());
  DragCase loaded = load_case(a.string());
  CHECK(loaded.id == c.id);
  CHECK(loaded.image.data == c.image.data);
  CHECK(loaded.mask.data == c.mask.data);
  CHECK(same_pairs(loaded, c));

  fs::path b = temp_dir("roundtrip_b");
  save_case(loaded, b.string());
  CHECK(read_text(a / "manifest.json") == read_text(b / "manifest.json"));
  CHECK(read_text(a / "image.ppm") == read_text(b / "image.ppm"));
  CHECK(read_text(a / "mask.pgm") == read_text(b / "mask.pgm"));
}

TEST_CASE("save_case rejects fractional pair coordinates") {
  SynthParams p = small_params(CaseFamily::kEquatorial);
  DragCase c = generate_synthetic_case(5, p);
  c.pairs[0].handle.i += 0.5;
  fs::path d = temp_dir("fractional");
  CHECK_THROWS_WITH_AS(save_case(c, d.string()),
                       doctest::Contains("integer"), Error);
}

TEST_CASE("load_case reports distinct diagnostics") {
  fs::path d = temp_dir("diagnostics");

  // No manifest at all.
  CHECK_THROWS_AS(load_case(d.string()), Error);
  try {
    load_case(d.string());
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kIo);
  }

  // Malformed JSON names the file and the parse error.
  write_text(d / "manifest.json", "{\"id\": ");
  CHECK_THROWS_WITH_AS(load_case(d.string()),
                       doctest::Contains("parse error"), Error);

  write_text(d / "manifest.json", "[1, 2]");
  CHECK_THROWS_WITH_AS(load_case(d.string()),
                       doctest::Contains("object"), Error);

  // Missing and mistyped fields are named.
  write_text(d / "manifest.json", "{\"width\": 512}");
  CHECK_THROWS_WITH_AS(load_case(d.string()), doctest::Contains("'id'"), Error);
  write_text(d / "manifest.json", "{\"id\": \"t\", \"width\": \"wide\"}");
  CHECK_THROWS_WITH_AS(load_case(d.string()),
                       doctest::Contains("'width'"), Error);

  // Rasters to validate against.
  SynthParams p = small_params(CaseFamily::kEquatorial);
  save_case(generate_synthetic_case(9, p), d.string());

  // Declared size disagrees with the raster on disk.
  std::string good = read_text(d / "manifest.json");
  std::string bad = good;
  bad.replace(bad.find("\"width\": 512"), 12, "\"width\": 640");
  write_text(d / "manifest.json", bad);
  try {
    load_case(d.string());
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kDimensionMismatch);
    CHECK(std::string(e.what()).find("640") != std::string::npos);
  }

  // Pair diagnostics name the offending pair.
  write_text(d / "manifest.json", manifest_with_pairs("[]"));
  CHECK_THROWS_WITH_AS(load_case(d.string()), doctest::Contains("no handle"),
                       Error);
  write_text(d / "manifest.json", manifest_with_pairs("[[[8,8],[9]]]"));
  CHECK_THROWS_WITH_AS(load_case(d.string()),
                       doctest::Contains("pair 0 must be"), Error);
  write_text(d / "manifest.json", manifest_with_pairs("[[[8.5,8],[16,8]]]"));
  CHECK_THROWS_WITH_AS(load_case(d.string()), doctest::Contains("integer"),
                       Error);
  write_text(d / "manifest.json", manifest_with_pairs("[[[8,8],[8000,8]]]"));
  CHECK_THROWS_WITH_AS(load_case(d.string()), doctest::Contains("outside"),
                       Error);
  write_text(d / "manifest.json", manifest_with_pairs("[[[8,8],[8,8]]]"));
  CHECK_THROWS_WITH_AS(load_case(d.string()),
                       doctest::Contains("zero drag"), Error);

  // A mask whose raster no longer matches the image.
  fs::path other = temp_dir("diagnostics_mask");
  SynthParams ps = small_params(CaseFamily::kEquatorial);
  ps.width = 256;
  save_case(generate_synthetic_case(9, ps), other.string());
  write_text(d / "manifest.json", good);
  fs::copy_file(other / "mask.pgm", d / "mask.pgm",
                fs::copy_options::overwrite_existing);
  try {
    load_case(d.string());
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kDimensionMismatch);
    CHECK(std::string(e.what()).find("mask") != std::string::npos);
  }
}

TEST_CASE("run_suite tracks the equatorial family end to end") {
  SynthParams p = family_params(CaseFamily::kEquatorial);
  std::vector<DragCase> cases = {generate_synthetic_case(1, p),
                                 generate_synthetic_case(2, p)};
  SuiteConfig cfg;
  cfg.fovs_deg = {60};
  cfg.metric_out_size = 64;

  SuiteReport rep = run_suite(cases, cfg);
  CHECK(rep.version == std::string(kToolkitVersion));
  REQUIRE(rep.cases.size() == 2u);
  for (const CaseResult& r : rep.cases) {
    CHECK(!r.failed);
    CHECK(r.ok);
    CHECK(r.iterations > 0);
    CHECK(r.iterations <= cfg.drag.max_iter);
    CHECK(r.final_err_cells <= cfg.success_cells);
    REQUIRE(r.if_per_fov.count(60) == 1u);
    CHECK(r.if_per_fov.at(60) > 0.9);
    CHECK(r.if_per_fov.at(60) <= 1.0);
  }
  CHECK(rep.success_rate == 1.0);
  CHECK(rep.metrics.per_fov.count(60) == 1u);
  CHECK(rep.metrics.fid >= 0.0);

  // Bitwise-stable serialization across identical runs.
  SuiteReport again = run_suite(cases, cfg);
  CHECK(report_to_json(rep) == report_to_json(again));

  fs::path out = temp_dir("report") / "report.json";
  save_report(rep, out.string());
  CHECK(read_text(out) == report_to_json(rep));
}

TEST_CASE("dry run reproduces the input bit for bit") {
  SynthParams p = family_params(CaseFamily::kEquatorial);
  std::vector<DragCase> cases = {generate_synthetic_case(1, p),
                                 generate_synthetic_case(2, p)};
  SuiteConfig cfg;
  cfg.fovs_deg = {60};
  cfg.metric_out_size = 64;
  cfg.dry_run = true;

  SuiteReport rep = run_suite(cases, cfg);
  CHECK(rep.success_rate == 1.0);
  for (const CaseResult& r : rep.cases) {
    CHECK(!r.failed);
    CHECK(r.iterations == 0);
    CHECK(r.if_per_fov.at(60) == 1.0);
  }
  CHECK(rep.metrics.if_score == 1.0);
  CHECK(rep.metrics.fid == 0.0);
  CHECK(rep.metrics.sfid == 0.0);
  CHECK(rep.metrics.per_fov.at(60).fid == 0.0);
}

TEST_CASE("ablation flags change only their module's stage hashes") {
  std::vector<DragCase> cases = {
      generate_synthetic_case(3, family_params(CaseFamily::kOblique)),
      generate_synthetic_case(4, family_params(CaseFamily::kHighlat))};
  SuiteConfig cfg;
  cfg.fovs_deg = {60};
  cfg.metric_out_size = 64;
  cfg.dry_run = true;  // hashes are taken before the drag runs

  SuiteReport base = run_suite(cases, cfg);

  SuiteConfig goff = cfg;
  goff.ablation.gcta = false;
  SuiteReport g = run_suite(cases, goff);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(g.cases[k].hashes.input == base.cases[k].hashes.input);
    CHECK(g.cases[k].hashes.aligned == base.cases[k].hashes.aligned);
    CHECK(g.cases[k].hashes.field0 == base.cases[k].hashes.field0);
    CHECK(g.cases[k].hashes.region == base.cases[k].hashes.region);
  }
  // The oblique drag bends: disabling the great-circle step changes the
  // first direction. (The highlat drag runs down a meridian, where the
  // planar and great-circle directions coincide, so row 1 is not asserted.)
  CHECK(g.cases[0].hashes.direction != base.cases[0].hashes.direction);

  SuiteConfig soff = cfg;
  soff.ablation.ssrt = false;
  SuiteReport s = run_suite(cases, soff);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(s.cases[k].hashes.input == base.cases[k].hashes.input);
    CHECK(s.cases[k].hashes.aligned == base.cases[k].hashes.aligned);
    CHECK(s.cases[k].hashes.field0 == base.cases[k].hashes.field0);
    CHECK(s.cases[k].hashes.direction == base.cases[k].hashes.direction);
  }
  // At 45 deg the scaled vertical radius is 4, not the base 3.
  CHECK(s.cases[1].hashes.region != base.cases[1].hashes.region);

  SuiteConfig aoff = cfg;
  aoff.ablation.ar = false;
  SuiteReport a = run_suite(cases, aoff);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(a.cases[k].hashes.input == base.cases[k].hashes.input);
    CHECK(a.cases[k].hashes.aligned != base.cases[k].hashes.aligned);
  }
}

TEST_CASE("run_suite validates its inputs and records per-case failures") {
  CHECK_THROWS_AS(run_suite({}, SuiteConfig{}), Error);

  SynthParams p = family_params(CaseFamily::kEquatorial);
  std::vector<DragCase> one = {generate_synthetic_case(1, p)};
  SuiteConfig cfg;
  cfg.fovs_deg = {60};
  cfg.metric_out_size = 64;
  cfg.dry_run = true;

  SuiteConfig badf = cfg;
  badf.field_factor = 0;
  CHECK_THROWS_AS(run_suite(one, badf), Error);

  // Distribution metrics need at least two processed cases.
  try {
    run_suite(one, cfg);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kInsufficientSamples);
  }

  // A broken case is recorded on its row; the rest of the suite completes.
  DragCase broken = generate_synthetic_case(3, p);
  broken.pairs.clear();
  std::vector<DragCase> mixed = {generate_synthetic_case(1, p),
                                 generate_synthetic_case(2, p), broken};
  SuiteReport rep = run_suite(mixed, cfg);
  REQUIRE(rep.cases.size() == 3u);
  CHECK(!rep.cases[0].failed);
  CHECK(!rep.cases[1].failed);
  CHECK(rep.cases[2].failed);
  CHECK(!rep.cases[2].ok);
  CHECK(!rep.cases[2].error.empty());
  CHECK(rep.success_rate == doctest::Approx(2.0 / 3.0));
}
