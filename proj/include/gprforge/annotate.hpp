#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gprforge/radargram.hpp"
#include "gprforge/scene.hpp"

namespace gprforge::annotate {

// Axis-aligned pixel-space box, inclusive-exclusive [xmin,xmax) x [ymin,ymax).
struct BBox {
  double xmin = 0, ymin = 0, xmax = 0, ymax = 0;
  int class_id = 0;
  std::optional<double> score;

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  double area() const { return width() > 0 && height() > 0 ? width() * height() : 0.0; }
  double cx() const { return 0.5 * (xmin + xmax); }
  double cy() const { return 0.5 * (ymin + ymax); }
};

// v = c / sqrt(eps_r).
double wave_velocity(double eps_r);

// Two-way travel time of a point scatterer at lateral position x0 and depth d,
// zero-offset approximation: t = 2*sqrt(d^2 + (x-x0)^2) / v.
double hyperbola_travel_time(double x_m, double x0_m, double d_m, double v);

// Intersection over union; 0 when disjoint.
double iou(const BBox& a, const BBox& b);

BBox clip_box(const BBox& b, int img_w, int img_h);

// Pixel geometry of one hyperbola signature: apex at column x0 (metres along
// the scan), two-way apex time t_apex (propagation only, no wavelet delay).
// The box spans horizontally until the geometric-spreading amplitude
// d/sqrt(d^2+dx^2) falls below tail_drop; rows run from half a dominant
// period above the apex arrival to one period below the tail arrival at the
// box edges. `wavelet_delay` shifts every arrival (the source fires delayed).
BBox hyperbola_bbox(double x0_m, double depth_m, double v, double wavelet_delay_s,
                    double dominant_freq_hz, const gram::Radargram& meta, double scan_x_start,
                    double tail_drop);

// Ground-truth box for a buried object. Throws ObjectNotImageable when the
// apex arrival exceeds the time window.
BBox object_bbox(const scene::ObjectSpec& object, const scene::Scene& s,
                 const gram::Radargram& r, double tail_drop = 0.5);

// Label files: one `class_id xmin ymin xmax ymax` line per object;
// prediction files append a score column.
void write_labels(const std::string& path, const std::vector<BBox>& boxes);
std::vector<BBox> read_labels(const std::string& path);

// Dataset generator configuration. Ranges are inclusive [lo,hi] draws.
struct GenConfig {
  int count = 50;
  uint64_t seed = 1;
  double eps_r_lo = 4.0, eps_r_hi = 9.0;
  double sigma_lo = 0.0005, sigma_hi = 0.004;
  int objects_lo = 1, objects_hi = 3;
  double depth_lo = 0.3, depth_hi = 0.8;
  double radius_lo = 0.025, radius_hi = 0.06;
  double noise_lo = 0.02, noise_hi = 0.06;  // std as a fraction of signal scale
  bool clutter = false;                     // random dipping layer interfaces
  // Survey geometry (defaults sized for desk-scale runs).
  double domain_w = 2.0, domain_d = 1.2;
  double cell = 0.0125;
  double time_window = 5.5e-8;
  int n_traces = 64;
  double scan_margin = 0.15;
  double fc = 3e8;
  double rx_offset = 0.1;
  int samples_out = 192;
  double gain_k = 0.0;        // exponential gain coefficient (1/s); 0 = preset default
  double noise_mult = 1.0;    // pseudo-real preset bumps this
  double gain_asym = 0.0;     // left/right gain imbalance fraction
};

GenConfig parse_gen_config(const std::string& text);
std::string serialize_gen_config(const GenConfig& cfg);

// Named presets: "simulated" (clean, per the simulated corpus) and
// "pseudo-real" (layered clutter, stronger loss and noise, asymmetric gain).
GenConfig preset_gen_config(const std::string& name);

struct GeneratedImage {
  int index = 0;
  uint64_t seed = 0;
  std::string pgm, gprb, labels, scene_file;
};

struct DatasetManifest {
  uint64_t seed = 0;
  int count = 0;
  std::vector<GeneratedImage> images;
};

// Draws a scene per index from the config ranges (stream derived from
// (seed, index), so a prefix of a larger dataset is bit-identical), simulates
// it, preprocesses, adds noise, and writes {i}.pgm/.gprb/.txt/.scene plus a
// manifest. Returns the manifest.
DatasetManifest generate_dataset(const GenConfig& cfg, const std::string& out_dir);

DatasetManifest read_manifest(const std::string& dir);

// Scene + metadata for a single dataset index (e.g. to recompute labels).
scene::Scene draw_scene(const GenConfig& cfg, uint64_t image_seed);

}  // namespace gprforge::annotate
