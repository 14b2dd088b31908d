#pragma once

// Multi-start location of critical configurations of the signed volume.
//
// Restart i uses a start drawn from a generator keyed by (seed, i) and runs
// one of three strategies, chosen by i mod 3: projected gradient ascent,
// projected gradient descent, or a damped Newton solve of grad V = 0 from
// the start (the only route that reliably lands on saddles). Ascent and
// descent hand over to Newton refinement once the gradient norm drops below
// 1e-3. Converged points are canonicalized modulo the rotation about the
// first edge, deduplicated, and annotated with Morse data and a structure
// classification.

#include <cstdint>
#include <optional>
#include <vector>

#include "lvl/classify.hpp"
#include "lvl/geometry.hpp"
#include "lvl/variational.hpp"

namespace lvl {

struct SearchOptions {
  int restarts = 200;
  std::uint64_t seed = 0;
  double step_tol = 1e-14;
  double grad_tol = 1e-10;
  int max_iters = 2000;
  ParamMode mode = ParamMode::Reduced;
  /// 0: LVL_THREADS if set, otherwise hardware concurrency.
  int threads = 0;
  double classify_tol = kClassifyTolerance;
};

struct CriticalPointRecord {
  ArmConfiguration configuration;
  double value = 0.0;
  double grad_norm = 0.0;
  MorseData morse;
  std::optional<ClassificationReport> classification;  // absent in PlaneB mode
  int multiplicity = 1;
};

struct SearchSummary {
  int restarts = 0;
  int converged = 0;
  int failed = 0;
};

struct SearchResult {
  std::vector<CriticalPointRecord> records;
  SearchSummary summary;
};

/// Deterministic start for restart `index`: u_1 = (1,0,0), the remaining
/// free directions uniform on their sphere (or circle).
ArmConfiguration random_start(const ArmLengths& lengths, ParamMode mode, std::uint64_t seed,
                              std::uint64_t index);

struct RefineResult {
  ArmConfiguration configuration;
  bool converged = false;
  int iterations = 0;
  double grad_norm = 0.0;
};

/// Damped Newton iteration in the tangent frame. Hessian eigenvalues within
/// 1e-6 * max(1, spectral radius) of zero are dropped from the inverse; the
/// step length is chosen by backtracking on |grad|^2, falling back to a
/// descent step on |grad|^2 when the Newton direction makes no progress.
RefineResult refine_newton(const ArmConfiguration& cfg, double grad_tol, int max_iters = 100);

/// Rotates about the first edge so that the first joint with a
/// perpendicular component (> 1e-8) points into the e_u half of perp_basis
/// with zero e_v part; for u_1 = (1,0,0) that is +e2 with zero e3 part.
/// Aligned arms come back unchanged. Throws for PlaneB mode.
ArmConfiguration canonicalize(const ArmConfiguration& cfg);

/// Merges records whose directions agree within `tol` (max norm), summing
/// multiplicities. Output sorted by descending value then coordinates, and
/// independent of input order.
std::vector<CriticalPointRecord> dedupe(std::vector<CriticalPointRecord> records, double tol = 1e-6);

/// Sort order used for reports: value descending (resolved at 1e-9), then
/// lexicographic directions.
bool record_less(const CriticalPointRecord& a, const CriticalPointRecord& b);

SearchResult find_critical_points(const ArmLengths& lengths, const SearchOptions& opts);

/// Worker count for a request: explicit value, else LVL_THREADS, else the
/// hardware concurrency; always >= 1.
int resolve_thread_count(int requested);

}  // namespace lvl
