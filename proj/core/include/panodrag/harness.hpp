// Benchmark harness: case IO, synthetic scene generation, and the
// end-to-end drag suite.
//
// A case directory holds manifest.json plus the PPM image and PGM mask it
// references. The suite pipeline per case: validate -> align (optional) ->
// build the feature field -> run the drag per pair -> lift the field edits
// back to pixel resolution -> rotate the residual into the input frame ->
// score edited against input with perspective metrics.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "panodrag/drag.hpp"
#include "panodrag/metrics.hpp"
#include "panodrag/reproject.hpp"

namespace panodrag::harness {

using repro::DragCase;

inline constexpr const char* kToolkitVersion = "0.1.0";

// Reads manifest.json from dir and loads the referenced rasters. Distinct
// diagnostics for a missing manifest, malformed JSON, missing or mistyped
// fields, shape mismatches, and out-of-range pairs (the pair index is
// named in the message).
DragCase load_case(const std::string& dir);

// Writes manifest.json, image.ppm, and mask.pgm into dir (created if
// needed). save_case restores exactly what load_case read: round trips
// are byte-for-byte modulo manifest key ordering.
void save_case(const DragCase& c, const std::string& dir);

enum class CaseFamily { kEquatorial, kSeam, kHighlat, kOblique };

// Names used in case ids and the CLI: equatorial, seam, highlat, oblique.
std::string family_name(CaseFamily f);
CaseFamily family_from_name(const std::string& name);

struct SynthParams {
  CaseFamily family = CaseFamily::kEquatorial;
  int blob_count = 4;             // decorative blobs besides the handle blob
  double handle_lat_deg = 0.0;    // latitude band the handle is drawn in
  double handle_sigma_deg = 40.0; // handle blob spread (wide = shallow flank)
  double drag_cells = 10.0;       // drag arc length in field cells
  int width = 1024;               // ERP width; height = width / 2
};

// Band and direction presets per family; seed still varies the geometry.
SynthParams family_params(CaseFamily f);

// Deterministic synthetic scene: smooth per-axis ramps plus blobs with
// spherical footprints, quantized to the 8-bit grid so the in-memory case
// equals its disk round trip, one drag pair whose corridor sits on the
// ramp carrier, mask = dilated handle-blob support. Antipodal endpoints
// retry with a rotated direction; zero-length drags are rejected.
DragCase generate_synthetic_case(std::uint64_t seed, const SynthParams& p);

struct AblationFlags {
  bool ar = true;    // adaptive reprojection before the drag
  bool gcta = true;  // great-circle trajectory adjustment
  bool ssrt = true;  // spherical search-region tracking
};

struct SuiteConfig {
  drag::DragConfig drag;
  AblationFlags ablation;
  std::vector<int> fovs_deg = {30, 60, 90};
  std::uint64_t seed = 0;       // feature-projection seed for the metrics
  int field_factor = 8;         // image-to-field downsample ratio
  int metric_out_size = 512;    // perspective view resolution
  double success_cells = 2.0;   // pass bound on final handle-target error
  bool dry_run = false;         // full pipeline with the drag disabled
};

// FNV-1a 64 over raw bytes; chain by passing the previous hash as h.
std::uint64_t fnv1a(const void* data, std::size_t n,
                    std::uint64_t h = 14695981039346656037ull);

// Stage hashes taken at module boundaries. Toggling an ablation flag must
// change only its own stage and later ones: ar -> aligned onward, gcta ->
// direction, ssrt -> region.
struct StageHashes {
  std::uint64_t input = 0;      // case image + mask + pairs
  std::uint64_t aligned = 0;    // image handed to the field builder
  std::uint64_t field0 = 0;     // initial feature field
  std::uint64_t direction = 0;  // first motion direction, first pair
  std::uint64_t region = 0;     // first search region, first pair
};

struct CaseResult {
  std::string id;
  bool ok = false;      // every pair ended within success_cells
  bool failed = false;  // pipeline error; see error
  std::string error;
  int iterations = 0;             // summed over pairs
  double final_err_cells = 0.0;   // worst pair
  StageHashes hashes;
  std::map<int, double> if_per_fov;
};

// One case through the pipeline: the report row (fidelity scores are the
// suite's job, so if_per_fov is left empty here), the edited panorama in
// the input frame, and the alignment used to get there.
struct CaseOutcome {
  CaseResult result;
  img::ErpImage edited;
  repro::AlignmentRecord record;
};

// validate -> align -> build field -> drag per pair -> composite the field
// edit back onto the input. Throws on pipeline errors; run_suite catches
// them per row. An optional trace sink sees every drag iteration (the
// iteration counter restarts at each pair).
CaseOutcome run_case(const DragCase& input, const SuiteConfig& cfg,
                     const drag::TraceSink* trace = nullptr);

// Suite output: per-case rows plus metrics pooled across the edited set.
// Fidelity scores per FOV live in both places; the distribution distances
// need several cases to be defined, so they are suite-level only.
struct SuiteReport {
  std::string version;
  SuiteConfig config;
  std::vector<CaseResult> cases;
  double success_rate = 0.0;  // ok cases over all cases
  metrics::MetricReport metrics;
};

// Runs every case through the pipeline. Per-case errors are recorded on
// the row, not thrown; an empty case list is an error.
SuiteReport run_suite(const std::vector<DragCase>& cases, const SuiteConfig& cfg);

// Fixed key order, floats with 17 significant digits, hashes as hex
// strings; identical inputs serialize bit-identically.
std::string report_to_json(const SuiteReport& r);
void save_report(const SuiteReport& r, const std::string& path);

}  // namespace panodrag::harness
