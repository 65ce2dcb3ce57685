#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ccsr {

using Vec = std::vector<double>;
using Shape = std::vector<int>;

// ---------------------------------------------------------------------------
// Errors. One exception type per contract failure class so callers and tests
// can catch them individually.
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define CCSR_DEFINE_ERROR(Name)                                  \
  class Name : public Error {                                    \
   public:                                                       \
    explicit Name(const std::string& what) : Error(what) {}      \
  }

CCSR_DEFINE_ERROR(InvalidRangeError);       // bad numeric precondition
CCSR_DEFINE_ERROR(PlanDegenerateError);     // timestep plan collapsed
CCSR_DEFINE_ERROR(ShapeMismatchError);      // array shapes disagree
CCSR_DEFINE_ERROR(DimensionMismatchError);  // network/layer dims disagree
CCSR_DEFINE_ERROR(TimestepRangeError);      // t outside [1, T] (or [0, T])
CCSR_DEFINE_ERROR(NonFiniteError);          // NaN/Inf in a state or loss
CCSR_DEFINE_ERROR(StaleCacheError);         // backward cache does not match net
CCSR_DEFINE_ERROR(InsufficientRunsError);   // STD metrics need N >= 2
CCSR_DEFINE_ERROR(TooSmallImageError);      // image below filter support
CCSR_DEFINE_ERROR(UnknownKindError);        // unrecognized dataset kind
CCSR_DEFINE_ERROR(MissingDependencyError);  // required checkpoint/file absent
CCSR_DEFINE_ERROR(FreezeViolationError);    // frozen parameters changed
CCSR_DEFINE_ERROR(DivergenceError);         // training loss became non-finite
CCSR_DEFINE_ERROR(IoError);                 // file read/write failure
CCSR_DEFINE_ERROR(ConfigError);             // malformed configuration

#undef CCSR_DEFINE_ERROR

// ---------------------------------------------------------------------------
// Grayscale image in [0,1]. h == 1 degenerates to a flat 1-D signal; every
// filter below treats that case as a row vector.
// ---------------------------------------------------------------------------

struct Image {
  int h = 0;
  int w = 0;
  Vec v;

  Image() = default;
  Image(int h_, int w_, double fill = 0.0) : h(h_), w(w_), v(static_cast<size_t>(h_) * w_, fill) {}

  double& at(int r, int c) { return v[static_cast<size_t>(r) * w + c]; }
  double at(int r, int c) const { return v[static_cast<size_t>(r) * w + c]; }
  size_t size() const { return v.size(); }
};

// ---------------------------------------------------------------------------
// Deterministic RNG: xoshiro256++ core seeded via splitmix64, hand-rolled
// normal sampling. std::normal_distribution is implementation-defined, which
// would tie reproducibility to one standard library; this keeps run outputs
// stable across toolchains.
// ---------------------------------------------------------------------------

class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  double uniform();                                        // [0, 1)
  double uniform(double lo, double hi);                    // [lo, hi)
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);  // inclusive
  double normal();                                         // N(0, 1), Box-Muller
  Vec normal_vec(size_t n);
  Vec uniform_vec(size_t n, double lo, double hi);

  // Stream derivation: one splitmix64 output step of root + (stream+1)*GOLDEN.
  // Documented in the README so external tools can reproduce per-run seeds.
  static std::uint64_t mix(std::uint64_t root, std::uint64_t stream);

 private:
  std::uint64_t s_[4];
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

// ---------------------------------------------------------------------------
// Small numeric helpers.
// ---------------------------------------------------------------------------

bool all_finite(const Vec& v);
void require_finite(const Vec& v, const char* what);
double mean_of(const Vec& v);
double variance_of(const Vec& v);  // population variance

inline double clamp01(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }
void clamp01_inplace(Vec& v);

// FNV-1a over the raw bytes of a double array. Used for parameter freeze
// checks, so it must be exact, not tolerant.
std::uint64_t fnv1a_hash(const Vec& v, std::uint64_t h = 1469598103934665603ull);

// Number formatting used by every CSV writer: 9 significant digits, shortest
// form, locale-independent.
std::string format_sig9(double x);

std::int64_t shape_numel(const Shape& s);

// Runs fn(0..n-1) across up to max_threads workers in fixed blocks. Callers
// must make fn(i) independent of execution order (preallocated output slots,
// per-index seeds); results are then identical for any thread count.
void parallel_for(int n, const std::function<void(int)>& fn, int max_threads = 0);

}  // namespace ccsr
