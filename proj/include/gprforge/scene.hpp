#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gprforge::scene {

// Relative permeability is implicitly 1 for every material.
struct Material {
  std::string name;
  double eps_r = 1.0;   // relative permittivity, >= 1
  double sigma = 0.0;   // conductivity S/m, >= 0
  bool is_pec = false;  // reserved "pec" sentinel, rasterized as a hard Ez=0 region

  bool operator==(const Material&) const = default;
};

struct ObjectSpec {
  enum class Shape { box, cylinder };
  Shape shape = Shape::cylinder;
  std::string material;
  // Box corners, metres; x1 < x2, z1 < z2. z grows downward from the surface.
  double x1 = 0, z1 = 0, x2 = 0, z2 = 0;
  // Cylinder centre and radius, metres.
  double xc = 0, zc = 0, r = 0;

  bool operator==(const ObjectSpec&) const = default;
};

struct Waveform {
  std::string type = "ricker";
  double amplitude = 1.0;
  double center_freq_hz = 3e8;

  bool operator==(const Waveform&) const = default;
};

struct ScanSpec {
  double x_start = 0;
  double x_end = 0;
  int n_traces = 1;

  bool operator==(const ScanSpec&) const = default;
};

struct Scene {
  double width_m = 0, depth_m = 0;
  double dx_m = 0, dz_m = 0;
  double time_window_s = 0;
  std::vector<Material> materials;  // user-declared; built-ins resolved separately
  std::vector<ObjectSpec> objects;
  Waveform waveform;
  double source_depth_m = 0;  // metres below the surface (0 = on the surface row)
  double rx_offset_m = 0;     // horizontal tx->rx spacing, metres
  ScanSpec scan;

  bool operator==(const Scene&) const = default;

  // Transmitter x positions, x_start..x_end inclusive.
  std::vector<double> trace_positions() const;
  double trace_spacing() const;
  // Looks up a declared material or one of the built-ins
  // ("free_space" eps_r=1 sigma=0, "pec" sentinel). Null when unknown.
  const Material* find_material(const std::string& name) const;
};

struct Diagnostic {
  std::string code;
  std::string message;
};

// Parses a scene file. Directives are '#name: args...' lines; blank lines
// and lines starting with "//" are ignored. Throws gprforge::Error with
// codes UnknownDirective, MissingRequiredDirective, BadArity,
// OutOfRangeValue, DanglingMaterialRef; parse errors carry 1-based lines.
Scene parse_scene(std::string_view text);

// Canonical directive order, full-precision floats; output re-parses to an
// identical Scene.
std::string serialize_scene(const Scene& s);

// Empty iff all invariants hold; otherwise one diagnostic per violation.
std::vector<Diagnostic> validate_scene(const Scene& s);

}  // namespace gprforge::scene
