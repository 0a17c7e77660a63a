#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace gprforge::gram {

// B-scan container. Traces are stored trace-major: data[trace * n_samples + sample].
struct Radargram {
  int n_traces = 0;
  int n_samples = 0;
  std::vector<float> data;
  double dt = 0;         // s per sample
  double dx_m = 0;       // m per trace
  double time_zero = 0;  // s, time of sample 0

  static Radargram zeros(int n_traces, int n_samples, double dt, double dx_m,
                         double time_zero = 0);

  float& at(int trace, int sample) { return data[static_cast<size_t>(trace) * n_samples + sample]; }
  float at(int trace, int sample) const {
    return data[static_cast<size_t>(trace) * n_samples + sample];
  }
  const float* trace(int i) const { return data.data() + static_cast<size_t>(i) * n_samples; }
  float* trace(int i) { return data.data() + static_cast<size_t>(i) * n_samples; }
};

// Zero-mean Gaussian noise, independent per sample, std varying with depth only.
struct NoiseModel {
  std::vector<float> per_depth_std;  // length n_samples, >= 0 elementwise
  std::string generator = "gaussian";
};

// 8-bit grayscale; row 0 = earliest time, column = trace index.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> pixels;  // row-major

  uint8_t at(int row, int col) const { return pixels[static_cast<size_t>(row) * width + col]; }
  uint8_t& at(int row, int col) { return pixels[static_cast<size_t>(row) * width + col]; }
};

// Subtracts a centred running mean (window clipped at trace ends) from each
// trace. window must be odd and >= 3; throws BadWindow otherwise.
Radargram dewow(const Radargram& r, int window);

// Subtracts the mean trace from every trace. Throws TooFewTraces for n_traces < 2.
Radargram remove_background(const Radargram& r);

enum class GainKind { linear, exponential };

// sample(i,t) * g(t), g = 1 + k*t (linear) or exp(k*t) (exponential), t in seconds.
Radargram apply_gain(const Radargram& r, GainKind kind, double k);

// Per-depth sample standard deviation across the traces selected by [lo,hi)
// index ranges. Throws EmptySelection.
NoiseModel estimate_noise(const Radargram& r, const std::vector<std::pair<int, int>>& ranges);

// Adds seeded Gaussian noise with the model's per-depth std. Each trace draws
// from an independent stream derived from (seed, trace index). Throws
// LengthMismatch when the model length differs from n_samples.
Radargram add_noise(const Radargram& r, const NoiseModel& m, uint64_t seed);

enum class ScaleMode { global_minmax, percentile };

// Affine map of amplitudes to 0..255 (clipping for percentile mode). A
// degenerate range (max == min) renders uniform 128.
GrayImage to_image(const Radargram& r, ScaleMode mode, double p_lo = 2.0, double p_hi = 98.0);

// Block-mean decimation of the time axis down to roughly n_out samples
// (exactly ceil(n/k) with k = ceil(n/n_out)); dt scales by k.
Radargram resample_time(const Radargram& r, int n_out);

// GPRB: little-endian, magic "GPRB", version u16=1, n_traces u32, n_samples
// u32, dt f64, dx f64, time_zero f64 (38-byte header), payload trace-major
// f32. Round-trips bit-exactly. Readers throw BadMagic, UnsupportedVersion,
// TruncatedFile.
void write_gprb(const std::string& path, const Radargram& r);
Radargram read_gprb(const std::string& path);

// Binary PGM (P5, maxval 255).
void write_pgm(const std::string& path, const GrayImage& img);
GrayImage read_pgm(const std::string& path);
std::vector<uint8_t> encode_pgm(const GrayImage& img);
GrayImage decode_pgm(const std::vector<uint8_t>& bytes);

}  // namespace gprforge::gram
