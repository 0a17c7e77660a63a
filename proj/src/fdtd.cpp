#include "gprforge/fdtd.hpp"

#include <atomic>
#include <cmath>
#include <mutex>

#include "gprforge/common.hpp"

namespace gprforge::fdtd {

namespace {

constexpr int kAirCells = 20;
constexpr double kBlowupLimit = 1e30;

struct Grid2D {
  int nx = 0, nz = 0;  // extents
  std::vector<float> v;

  Grid2D() = default;
  Grid2D(int nx_, int nz_) : nx(nx_), nz(nz_), v(static_cast<size_t>(nx_) * nz_, 0.0f) {}
  float* row(int i) { return v.data() + static_cast<size_t>(i) * nz; }
  const float* row(int i) const { return v.data() + static_cast<size_t>(i) * nz; }
  float& at(int i, int j) { return v[static_cast<size_t>(i) * nz + j]; }
  float at(int i, int j) const { return v[static_cast<size_t>(i) * nz + j]; }
};

// Padded simulation domain: the material grid plus `pad` replicated cells on
// every side (the PML region), all coefficients precomputed per node.
struct Solver {
  int pad;
  int NX, NZ;  // padded cell counts
  double dx, dz, dt;

  Grid2D ca_a, cb_a;  // Ez x-split: driven by dHy/dx
  Grid2D ca_b, cb_b;  // Ez z-split: driven by -dHx/dz
  Grid2D dah_x, dbh_x;  // Hx coefficients
  Grid2D dah_y, dbh_y;  // Hy coefficients
  Grid2D eza, ezb;      // split Ez, (NX+1) x (NZ+1)
  Grid2D hx;            // (NX+1) x NZ
  Grid2D hy;            // NX x (NZ+1)
  Grid2D inj;           // per-node source scaling dt/eps (loss-adjusted)

  Solver(const MaterialGrid& g, const SolverOptions& opt) {
    pad = opt.pml_enabled ? opt.pml_cells : 0;
    NX = g.nx + 2 * pad;
    NZ = g.nz + 2 * pad;
    dx = g.dx;
    dz = g.dz;
    dt = cfl_timestep(g.dx, g.dz, opt.courant);

    auto cell_eps = [&](int i, int j) {
      int ci = std::clamp(i - pad, 0, g.nx - 1);
      int cj = std::clamp(j - pad, 0, g.nz - 1);
      return static_cast<double>(g.eps_at(ci, cj));
    };
    auto cell_sigma = [&](int i, int j) {
      int ci = std::clamp(i - pad, 0, g.nx - 1);
      int cj = std::clamp(j - pad, 0, g.nz - 1);
      return static_cast<double>(g.sigma_at(ci, cj));
    };
    auto cell_pec = [&](int i, int j) {
      int ci = std::clamp(i - pad, 0, g.nx - 1);
      int cj = std::clamp(j - pad, 0, g.nz - 1);
      return g.pec_at(ci, cj);
    };

    // PML conductivity profile at a position `p` measured in cells from the
    // grid edge (node positions are integers, H positions half-integers).
    const double m = opt.pml_order;
    auto pml_sigma = [&](double p, double delta, double eps_rel) {
      if (pad == 0) return 0.0;
      double depth = 0.0;
      if (p < pad) depth = pad - p;
      return depth > 0 ? 0.8 * (m + 1) / (std::sqrt(kMu0 / kEps0) * delta * std::sqrt(eps_rel)) *
                             std::pow(depth / pad, m)
                       : 0.0;
    };
    auto pml_x = [&](double p, double eps_rel) {
      return pml_sigma(p, dx, eps_rel) + pml_sigma(NX - p, dx, eps_rel);
    };
    auto pml_z = [&](double p, double eps_rel) {
      return pml_sigma(p, dz, eps_rel) + pml_sigma(NZ - p, dz, eps_rel);
    };

    ca_a = Grid2D(NX + 1, NZ + 1);
    cb_a = Grid2D(NX + 1, NZ + 1);
    ca_b = Grid2D(NX + 1, NZ + 1);
    cb_b = Grid2D(NX + 1, NZ + 1);
    inj = Grid2D(NX + 1, NZ + 1);
    eza = Grid2D(NX + 1, NZ + 1);
    ezb = Grid2D(NX + 1, NZ + 1);
    hx = Grid2D(NX + 1, NZ);
    hy = Grid2D(NX, NZ + 1);
    dah_x = Grid2D(NX + 1, NZ);
    dbh_x = Grid2D(NX + 1, NZ);
    dah_y = Grid2D(NX, NZ + 1);
    dbh_y = Grid2D(NX, NZ + 1);

    for (int i = 0; i <= NX; ++i) {
      for (int j = 0; j <= NZ; ++j) {
        // Node material: average of the (up to) four touching cells.
        double eps = 0, sig = 0;
        bool pec = false;
        int cnt = 0;
        for (int di = -1; di <= 0; ++di) {
          for (int dj = -1; dj <= 0; ++dj) {
            int ci = i + di, cj = j + dj;
            if (ci < 0 || ci >= NX || cj < 0 || cj >= NZ) continue;
            eps += cell_eps(ci, cj);
            sig += cell_sigma(ci, cj);
            pec = pec || cell_pec(ci, cj);
            ++cnt;
          }
        }
        eps = kEps0 * eps / cnt;
        sig /= cnt;
        double eps_rel = eps / kEps0;

        bool wall = (i == 0 || i == NX || j == 0 || j == NZ);
        if (pec || wall) {
          // Hard Ez = 0.
          continue;
        }
        double sx = sig + pml_x(i, eps_rel);
        double sz = sig + pml_z(j, eps_rel);
        double la = sx * dt / (2.0 * eps);
        double lb = sz * dt / (2.0 * eps);
        ca_a.at(i, j) = static_cast<float>((1.0 - la) / (1.0 + la));
        cb_a.at(i, j) = static_cast<float>(dt / eps / (1.0 + la) / dx);
        ca_b.at(i, j) = static_cast<float>((1.0 - lb) / (1.0 + lb));
        cb_b.at(i, j) = static_cast<float>(dt / eps / (1.0 + lb) / dz);
        double lm = sig * dt / (2.0 * eps);
        inj.at(i, j) = static_cast<float>(dt / eps / (1.0 + lm));
      }
    }

    // Hx lives at (i, j+1/2): z-graded magnetic loss, matched to local eps.
    for (int i = 0; i <= NX; ++i) {
      for (int j = 0; j < NZ; ++j) {
        double eps_rel = 0.5 * (cell_eps(std::max(i - 1, 0), j) + cell_eps(std::min(i, NX - 1), j));
        double s_star = pml_z(j + 0.5, eps_rel) * kMu0 / (kEps0 * eps_rel);
        double l = s_star * dt / (2.0 * kMu0);
        dah_x.at(i, j) = static_cast<float>((1.0 - l) / (1.0 + l));
        dbh_x.at(i, j) = static_cast<float>(dt / kMu0 / (1.0 + l) / dz);
      }
    }
    // Hy lives at (i+1/2, j): x-graded magnetic loss.
    for (int i = 0; i < NX; ++i) {
      for (int j = 0; j <= NZ; ++j) {
        double eps_rel = 0.5 * (cell_eps(i, std::max(j - 1, 0)) + cell_eps(i, std::min(j, NZ - 1)));
        double s_star = pml_x(i + 0.5, eps_rel) * kMu0 / (kEps0 * eps_rel);
        double l = s_star * dt / (2.0 * kMu0);
        dah_y.at(i, j) = static_cast<float>((1.0 - l) / (1.0 + l));
        dbh_y.at(i, j) = static_cast<float>(dt / kMu0 / (1.0 + l) / dx);
      }
    }
  }

  void step_h() {
    for (int i = 0; i <= NX; ++i) {
      const float* ea0 = eza.row(i);
      const float* eb0 = ezb.row(i);
      float* h = hx.row(i);
      const float* da = dah_x.row(i);
      const float* db = dbh_x.row(i);
      for (int j = 0; j < NZ; ++j) {
        float dez = (ea0[j + 1] + eb0[j + 1]) - (ea0[j] + eb0[j]);
        h[j] = da[j] * h[j] - db[j] * dez;
      }
    }
    for (int i = 0; i < NX; ++i) {
      const float* e0a = eza.row(i);
      const float* e1a = eza.row(i + 1);
      const float* e0b = ezb.row(i);
      const float* e1b = ezb.row(i + 1);
      float* h = hy.row(i);
      const float* da = dah_y.row(i);
      const float* db = dbh_y.row(i);
      for (int j = 0; j <= NZ; ++j) {
        float dez = (e1a[j] + e1b[j]) - (e0a[j] + e0b[j]);
        h[j] = da[j] * h[j] + db[j] * dez;
      }
    }
  }

  void step_e() {
    for (int i = 1; i < NX; ++i) {
      float* ea = eza.row(i);
      float* eb = ezb.row(i);
      const float* hyi = hy.row(i);
      const float* hyim = hy.row(i - 1);
      const float* hxi = hx.row(i);
      const float* caa = ca_a.row(i);
      const float* cba = cb_a.row(i);
      const float* cab = ca_b.row(i);
      const float* cbb = cb_b.row(i);
      for (int j = 1; j < NZ; ++j) {
        ea[j] = caa[j] * ea[j] + cba[j] * (hyi[j] - hyim[j]);
        eb[j] = cab[j] * eb[j] - cbb[j] * (hxi[j] - hxi[j - 1]);
      }
    }
  }

  bool field_blown() const {
    for (float v : eza.v)
      if (!(std::abs(v) < kBlowupLimit)) return true;
    for (float v : ezb.v)
      if (!(std::abs(v) < kBlowupLimit)) return true;
    return false;
  }
};

}  // namespace

double ricker(double t, double fc, double delay) {
  double tau = t - delay;
  double arg = M_PI * M_PI * fc * fc * tau * tau;
  return (1.0 - 2.0 * arg) * std::exp(-arg);
}

double cfl_timestep(double dx, double dz, double courant) {
  return courant / (kC0 * std::sqrt(1.0 / (dx * dx) + 1.0 / (dz * dz)));
}

MaterialGrid rasterize_scene(const scene::Scene& s) {
  MaterialGrid g;
  g.dx = s.dx_m;
  g.dz = s.dz_m;
  g.air_cells = kAirCells;
  g.nx = static_cast<int>(std::llround(s.width_m / s.dx_m));
  g.nz = static_cast<int>(std::llround(s.depth_m / s.dz_m)) + g.air_cells;
  size_t n = static_cast<size_t>(g.nx) * g.nz;
  g.eps_r.assign(n, 1.0f);
  g.sigma.assign(n, 0.0f);
  g.pec_mask.assign(n, 0);

  const scene::Material* half = s.find_material("halfspace");
  for (int i = 0; i < g.nx; ++i) {
    double x = (i + 0.5) * g.dx;
    for (int j = 0; j < g.nz; ++j) {
      double z = (j - g.air_cells + 0.5) * g.dz;  // metres below the surface
      size_t idx = static_cast<size_t>(i) * g.nz + j;
      if (z >= 0 && half) {
        g.eps_r[idx] = static_cast<float>(half->eps_r);
        g.sigma[idx] = static_cast<float>(half->sigma);
      }
      if (z < 0) continue;  // objects live below the surface
      for (const auto& o : s.objects) {
        bool covers;
        if (o.shape == scene::ObjectSpec::Shape::cylinder) {
          double ddx = x - o.xc, ddz = z - o.zc;
          covers = ddx * ddx + ddz * ddz <= o.r * o.r;
        } else {
          covers = x >= o.x1 && x <= o.x2 && z >= o.z1 && z <= o.z2;
        }
        if (!covers) continue;
        const scene::Material* m = s.find_material(o.material);
        if (!m) continue;
        if (m->is_pec) {
          g.pec_mask[idx] = 1;
          g.eps_r[idx] = 1.0f;
          g.sigma[idx] = 0.0f;
        } else {
          g.pec_mask[idx] = 0;
          g.eps_r[idx] = static_cast<float>(m->eps_r);
          g.sigma[idx] = static_cast<float>(m->sigma);
        }
      }
    }
  }
  return g;
}

Trace run_ascan(const MaterialGrid& grid, double tx_x, double tx_z, double rx_x, double rx_z,
                const scene::Waveform& waveform, double time_window, const SolverOptions& options) {
  Solver s(grid, options);
  int txi = static_cast<int>(std::llround(tx_x / grid.dx)) + s.pad;
  int txj = static_cast<int>(std::llround(tx_z / grid.dz)) + s.pad;
  int rxi = static_cast<int>(std::llround(rx_x / grid.dx)) + s.pad;
  int rxj = static_cast<int>(std::llround(rx_z / grid.dz)) + s.pad;
  auto inside = [&](int i, int j) { return i >= 0 && i <= s.NX && j >= 0 && j <= s.NZ; };
  if (!inside(txi, txj) || !inside(rxi, rxj))
    throw Error("OutOfRangeValue", "tx/rx outside the simulation grid");

  double fc = waveform.center_freq_hz;
  double delay = 1.5 / fc;
  int n_steps = static_cast<int>(std::ceil(time_window / s.dt));

  Trace tr;
  tr.dt = s.dt;
  tr.time_zero = 0.0;
  tr.samples.resize(static_cast<size_t>(n_steps));

  float inj = s.inj.at(txi, txj);
  for (int n = 0; n < n_steps; ++n) {
    s.step_h();
    s.step_e();
    double w = waveform.amplitude * ricker(n * s.dt, fc, delay);
    s.eza.at(txi, txj) += 0.5f * inj * static_cast<float>(w);
    s.ezb.at(txi, txj) += 0.5f * inj * static_cast<float>(w);
    float sample = s.eza.at(rxi, rxj) + s.ezb.at(rxi, rxj);
    if (!(std::abs(sample) < kBlowupLimit))
      throw Error("NumericalBlowup", "field exceeded 1e30 at step " + std::to_string(n));
    tr.samples[static_cast<size_t>(n)] = sample;
    if ((n & 63) == 0 && s.field_blown())
      throw Error("NumericalBlowup", "field exceeded 1e30 at step " + std::to_string(n));
  }
  return tr;
}

gram::Radargram run_bscan(const scene::Scene& s, const SolverOptions& options) {
  MaterialGrid grid = rasterize_scene(s);
  auto positions = s.trace_positions();
  double z_grid = s.source_depth_m + grid.air_cells * grid.dz;
  double dt = cfl_timestep(s.dx_m, s.dz_m, options.courant);
  int n_samples = static_cast<int>(std::ceil(s.time_window_s / dt));

  gram::Radargram out =
      gram::Radargram::zeros(s.scan.n_traces, n_samples, dt, s.trace_spacing(), 0.0);

  std::mutex err_mutex;
  std::string err_msg;
  std::atomic<bool> failed{false};
  parallel_for(positions.size(), [&](size_t i) {
    if (failed.load()) return;
    try {
      Trace tr = run_ascan(grid, positions[i], z_grid, positions[i] + s.rx_offset_m, z_grid,
                           s.waveform, s.time_window_s, options);
      std::copy(tr.samples.begin(), tr.samples.end(), out.trace(static_cast<int>(i)));
    } catch (const Error& e) {
      std::lock_guard<std::mutex> lock(err_mutex);
      if (!failed.exchange(true))
        err_msg = std::string(e.code()) + " at trace " + std::to_string(i) + ": " + e.what();
    }
  });
  if (failed.load()) throw Error("NumericalBlowup", err_msg);
  return out;
}

}  // namespace gprforge::fdtd
