#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gprforge {

// Physical constants (SI). eps0 derived from c0 and the classic mu0 so that
// c0^2 * mu0 * eps0 == 1 holds in double precision.
inline constexpr double kC0 = 2.99792458e8;
inline constexpr double kMu0 = 1.25663706143591730e-6;  // 4*pi*1e-7
inline constexpr double kEps0 = 1.0 / (kMu0 * kC0 * kC0);

// Typed runtime error. `code` is a stable machine-checkable identifier
// (e.g. "BadMagic", "UnknownDirective"); `line` is a 1-based source line
// for parse errors, 0 when not applicable.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message, int line = 0)
      : std::runtime_error(line > 0 ? code + " (line " + std::to_string(line) + "): " + message
                                    : code + ": " + message),
        code_(std::move(code)),
        line_(line) {}

  const std::string& code() const { return code_; }
  int line() const { return line_; }

 private:
  std::string code_;
  int line_;
};

// Deterministic PRNG. splitmix64 core with hand-rolled distributions so
// results are identical across compilers and standard libraries.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  // Independent child stream for (seed, index) pairs; used to keep
  // per-trace / per-image randomness stable under parallel execution.
  static Rng derive(uint64_t seed, uint64_t stream);

  uint64_t next_u64();
  // Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi);
  // Inclusive bounds.
  int uniform_int(int lo, int hi);
  size_t index(size_t n);
  // Standard normal via Box-Muller. Consumes two uniforms per call,
  // no cached spare, so the stream position is call-count deterministic.
  double normal();

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = index(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  uint64_t state_;
};

// Thread cap from GPRFORGE_THREADS (unset/0 -> hardware concurrency).
int max_threads();

// Runs fn(i) for i in [0, n) on up to max_threads() workers with a static
// block partition. Callers must write disjoint outputs; given that, results
// are bit-identical for any thread count.
void parallel_for(size_t n, const std::function<void(size_t)>& fn);

// Full-precision decimal formatting that round-trips doubles exactly.
std::string format_double(double v);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);
std::vector<uint8_t> read_binary_file(const std::string& path);
void write_binary_file(const std::string& path, const std::vector<uint8_t>& bytes);

}  // namespace gprforge
