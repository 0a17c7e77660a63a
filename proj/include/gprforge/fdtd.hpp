#pragma once

#include <vector>

#include "gprforge/radargram.hpp"
#include "gprforge/scene.hpp"

namespace gprforge::fdtd {

// Ricker wavelet: (1 - 2*pi^2*fc^2*tau^2) * exp(-pi^2*fc^2*tau^2), tau = t - delay.
double ricker(double t, double fc, double delay);

// 2D Courant limit: dt = courant / (c * sqrt(1/dx^2 + 1/dz^2)).
double cfl_timestep(double dx, double dz, double courant);

// Per-cell material maps. Row 0 is the top of the air layer; the surface sits
// air_cells rows down. Cells are addressed [i * nz + j], j = depth index.
struct MaterialGrid {
  int nx = 0, nz = 0;
  double dx = 0, dz = 0;
  int air_cells = 0;
  std::vector<float> eps_r;
  std::vector<float> sigma;
  std::vector<uint8_t> pec_mask;

  float eps_at(int i, int j) const { return eps_r[static_cast<size_t>(i) * nz + j]; }
  float sigma_at(int i, int j) const { return sigma[static_cast<size_t>(i) * nz + j]; }
  bool pec_at(int i, int j) const { return pec_mask[static_cast<size_t>(i) * nz + j] != 0; }
};

// Cell (i,j) takes the material of the last object covering its centre;
// background is free space above the surface and "halfspace" below. A
// 20-cell air layer is prepended so the antenna sits in air.
MaterialGrid rasterize_scene(const scene::Scene& s);

struct Trace {
  std::vector<float> samples;  // receiver Ez per step
  double dt = 0;
  double time_zero = 0;
};

struct SolverOptions {
  double courant = 0.95;
  int pml_cells = 10;
  bool pml_enabled = true;  // false = bare PEC-walled box (test use)
  // Split-field PML grading: polynomial order and target reflection.
  int pml_order = 3;
};

// Transverse-magnetic (Ez, Hx, Hy) leapfrog with semi-implicit conductivity
// loss, a soft additive Ez source at tx (current-style dt/eps scaling, so
// tx/rx swaps are reciprocal), and a 10-cell split-field PML ring around the
// material grid. tx/rx are metres in grid coordinates (z from the grid top).
// Throws NumericalBlowup when any field magnitude exceeds 1e30.
Trace run_ascan(const MaterialGrid& grid, double tx_x, double tx_z, double rx_x, double rx_z,
                const scene::Waveform& waveform, double time_window,
                const SolverOptions& options = {});

// One run_ascan per scan position (tx at the position, rx at position +
// rx_offset), assembled left to right. Traces are independent and may run on
// parallel workers; results merge by index, so output is thread-count
// invariant. NumericalBlowup is rethrown with the failing trace index.
gram::Radargram run_bscan(const scene::Scene& s, const SolverOptions& options = {});

}  // namespace gprforge::fdtd
