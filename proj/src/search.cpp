#include "lvl/search.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>

namespace lvl {

namespace {

constexpr double kNewtonHandover = 1e-3;
constexpr double kArmijo = 1e-4;
constexpr double kMaxStep = 1.0;
constexpr double kPolishFactor = 1e-4;

enum class RunKind { Ascent, Descent, Stationary };

RunKind kind_for(int restart) {
  switch (restart % 3) {
    case 0:
      return RunKind::Ascent;
    case 1:
      return RunKind::Descent;
    default:
      return RunKind::Stationary;
  }
}

ArmConfiguration retract_vec(const ArmConfiguration& cfg, std::span<const TangentDirection> frame,
                             const Eigen::VectorXd& xi) {
  return retract(cfg, frame, std::span<const double>(xi.data(), static_cast<std::size_t>(xi.size())));
}

double merit(const ArmConfiguration& cfg) {
  const auto frame = tangent_frame(cfg);
  return frame_gradient(cfg, frame).squaredNorm();
}

Eigen::VectorXd capped(Eigen::VectorXd step) {
  const double len = step.norm();
  if (len > kMaxStep) step *= kMaxStep / len;
  return step;
}

// Curvature scale of V in the tangent frame: the Hessian is bounded by
// roughly l_1 (l_2 + ... + l_n)^2, which is 4 for the unit 3-arm.
double curvature_scale(const ArmConfiguration& cfg) {
  double rest = 0.0;
  for (std::size_t j = 1; j < cfg.size(); ++j) rest += cfg.length(j);
  return cfg.length(0) * rest * rest;
}

// Projected gradient ascent (sign = +1) or descent (sign = -1) with Armijo
// backtracking, until the gradient is small enough for Newton. Every line
// search starts from 2 / curvature; growing the step instead lets Armijo
// accept steps that just oscillate across the extremum.
std::optional<ArmConfiguration> first_order(ArmConfiguration cfg, double sign, const SearchOptions& opts) {
  const double curv = curvature_scale(cfg);
  const double alpha0 = 2.0 / curv;
  const double handover = kNewtonHandover * curv / 4.0;
  for (int it = 0; it < opts.max_iters; ++it) {
    if (gradient_norm(cfg) < handover) return cfg;
    const auto frame = tangent_frame(cfg);
    const Eigen::VectorXd g = frame_gradient(cfg, frame);
    const double f0 = signed_volume(cfg);
    const double gg = g.squaredNorm();
    bool accepted = false;
    for (double alpha = alpha0; alpha * std::sqrt(gg) > opts.step_tol; alpha *= 0.5) {
      ArmConfiguration trial = retract_vec(cfg, frame, capped(sign * alpha * g));
      if (sign * (signed_volume(trial) - f0) >= kArmijo * alpha * gg) {
        cfg = std::move(trial);
        accepted = true;
        break;
      }
    }
    if (!accepted) return cfg;  // stalled; let Newton decide
  }
  return std::nullopt;
}

}  // namespace

ArmConfiguration random_start(const ArmLengths& lengths, ParamMode mode, std::uint64_t seed,
                              std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);

  std::vector<Vec3> dirs(lengths.size());
  dirs[0] = {1.0, 0.0, 0.0};
  for (std::size_t j = 1; j < dirs.size(); ++j) {
    const double phi = angle(rng);
    if (mode == ParamMode::PlaneB && j == 1) {
      dirs[j] = {std::cos(phi), std::sin(phi), 0.0};
      continue;
    }
    const double z = unit(rng);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    dirs[j] = {r * std::cos(phi), r * std::sin(phi), z};
  }
  return ArmConfiguration(lengths, std::move(dirs), mode);
}

RefineResult refine_newton(const ArmConfiguration& start, double grad_tol, int max_iters) {
  RefineResult out{start, false, 0, gradient_norm(start)};
  ArmConfiguration cfg = start;
  for (int it = 0; it < max_iters; ++it) {
    out.iterations = it;
    const double gn = gradient_norm(cfg);
    if (gn <= grad_tol) {
      out.configuration = std::move(cfg);
      out.converged = true;
      out.grad_norm = gn;
      return out;
    }
    const TangentHessian th = hessian_tangent(cfg);
    const Eigen::VectorXd g = frame_gradient(cfg, th.frame);
    const double m0 = g.squaredNorm();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(th.matrix);
    const Eigen::VectorXd& lam = es.eigenvalues();
    const Eigen::MatrixXd& q = es.eigenvectors();
    const double radius = lam.cwiseAbs().maxCoeff();
    const double cutoff = 1e-6 * std::max(1.0, radius);
    Eigen::VectorXd step = Eigen::VectorXd::Zero(g.size());
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
      if (std::abs(lam(i)) > cutoff) step -= (q.col(i).dot(g) / lam(i)) * q.col(i);
    }
    step = capped(step);

    bool accepted = false;
    double t = 1.0;
    for (int k = 0; k < 40 && !accepted; ++k, t *= 0.5) {
      ArmConfiguration trial = retract_vec(cfg, th.frame, t * step);
      if (merit(trial) < m0 * (1.0 - kArmijo * t)) {
        cfg = std::move(trial);
        accepted = true;
      }
    }
    if (!accepted) {
      // Gradient of |g|^2 / 2 in the frame is H g.
      const Eigen::VectorXd mg = th.matrix * g;
      const double mgn = mg.squaredNorm();
      if (mgn > 0.0) {
        double beta = m0 / mgn;
        for (int k = 0; k < 40 && !accepted; ++k, beta *= 0.5) {
          ArmConfiguration trial = retract_vec(cfg, th.frame, capped(-beta * mg));
          if (merit(trial) < m0 - kArmijo * beta * mgn) {
            cfg = std::move(trial);
            accepted = true;
          }
        }
      }
    }
    if (!accepted) break;
  }
  out.grad_norm = gradient_norm(cfg);
  out.converged = out.grad_norm <= grad_tol;
  out.configuration = std::move(cfg);
  return out;
}

ArmConfiguration canonicalize(const ArmConfiguration& cfg) {
  if (cfg.mode() == ParamMode::PlaneB) {
    throw std::invalid_argument("canonicalize: not defined for plane_b configurations");
  }
  const Vec3 axis = cfg.direction(0);
  const auto [eu, ev] = perp_basis(axis);
  for (std::size_t j = 1; j < cfg.size(); ++j) {
    const Vec3& u = cfg.direction(j);
    const Vec3 p = u - dot(u, axis) * axis;
    if (norm(p) <= 1e-8) continue;
    const double phi = std::atan2(dot(p, ev), dot(p, eu));
    std::vector<Vec3> dirs(cfg.directions().begin(), cfg.directions().end());
    for (std::size_t i = 1; i < dirs.size(); ++i) dirs[i] = rotate_about(dirs[i], axis, -phi);
    return cfg.with_directions(std::move(dirs));
  }
  return cfg;
}

bool record_less(const CriticalPointRecord& a, const CriticalPointRecord& b) {
  const long long ka = std::llround(a.value * 1e9);
  const long long kb = std::llround(b.value * 1e9);
  if (ka != kb) return ka > kb;
  const auto da = a.configuration.directions();
  const auto db = b.configuration.directions();
  for (std::size_t i = 0; i < std::min(da.size(), db.size()); ++i) {
    for (std::size_t c = 0; c < 3; ++c) {
      if (da[i][c] != db[i][c]) return da[i][c] < db[i][c];
    }
  }
  return da.size() < db.size();
}

namespace {

double coord_distance(const ArmConfiguration& a, const ArmConfiguration& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Vec3 diff = a.direction(i) - b.direction(i);
    d = std::max({d, std::abs(diff.x), std::abs(diff.y), std::abs(diff.z)});
  }
  return d;
}

}  // namespace

std::vector<CriticalPointRecord> dedupe(std::vector<CriticalPointRecord> records, double tol) {
  std::stable_sort(records.begin(), records.end(), record_less);
  std::vector<CriticalPointRecord> out;
  for (auto& r : records) {
    auto hit = std::find_if(out.begin(), out.end(), [&](const CriticalPointRecord& o) {
      return coord_distance(o.configuration, r.configuration) <= tol;
    });
    if (hit != out.end()) {
      hit->multiplicity += r.multiplicity;
    } else {
      out.push_back(std::move(r));
    }
  }
  std::stable_sort(out.begin(), out.end(), record_less);
  return out;
}

int resolve_thread_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("LVL_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return v;
    } catch (const std::exception&) {
      // unparsable values fall through to the hardware default
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

SearchResult find_critical_points(const ArmLengths& lengths, const SearchOptions& opts) {
  if (lengths.size() < 3) {
    throw std::invalid_argument("search: arm needs at least 3 edges");
  }
  if (opts.restarts < 1) throw std::invalid_argument("search: restarts must be >= 1");
  if (!(opts.grad_tol > 0.0)) throw std::invalid_argument("search: grad_tol must be > 0");
  if (opts.max_iters < 1) throw std::invalid_argument("search: max_iters must be >= 1");
  if (opts.mode == ParamMode::PlaneB && lengths.size() != 3) {
    throw std::invalid_argument("search: plane_b mode is only defined for 3-arms");
  }

  const auto restarts = static_cast<std::size_t>(opts.restarts);
  std::vector<std::optional<ArmConfiguration>> found(restarts);

  auto run_one = [&](std::size_t i) {
    ArmConfiguration start = random_start(lengths, opts.mode, opts.seed, i);
    std::optional<ArmConfiguration> seeded;
    switch (kind_for(static_cast<int>(i))) {
      case RunKind::Ascent:
        seeded = first_order(std::move(start), 1.0, opts);
        break;
      case RunKind::Descent:
        seeded = first_order(std::move(start), -1.0, opts);
        break;
      case RunKind::Stationary:
        seeded = std::move(start);
        break;
    }
    if (!seeded) return;
    const int budget = kind_for(static_cast<int>(i)) == RunKind::Stationary ? opts.max_iters : 100;
    // Aim well below grad_tol: near degenerate critical points the distance
    // to the true point only shrinks like sqrt(|grad|), and a sloppy stop
    // leaves joints inside the classifier's dead zone.
    RefineResult r = refine_newton(*seeded, opts.grad_tol * kPolishFactor, budget);
    if (r.grad_norm > opts.grad_tol) return;
    ArmConfiguration cfg =
        opts.mode == ParamMode::PlaneB ? std::move(r.configuration) : canonicalize(r.configuration);
    if (gradient_norm(cfg) > opts.grad_tol) return;
    found[i] = std::move(cfg);
  };

  const int workers = std::min<int>(resolve_thread_count(opts.threads), opts.restarts);
  if (workers <= 1) {
    for (std::size_t i = 0; i < restarts; ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < restarts; i = next++) run_one(i);
      });
    }
    for (auto& t : pool) t.join();
  }

  SearchResult result;
  result.summary.restarts = opts.restarts;
  std::vector<CriticalPointRecord> raw;
  for (auto& f : found) {
    if (!f) continue;
    ++result.summary.converged;
    CriticalPointRecord rec{*f, signed_volume(*f), gradient_norm(*f), {}, std::nullopt, 1};
    raw.push_back(std::move(rec));
  }
  result.summary.failed = result.summary.restarts - result.summary.converged;

  result.records = dedupe(std::move(raw));
  for (auto& rec : result.records) {
    rec.morse = morse_data(rec.configuration);
    if (opts.mode != ParamMode::PlaneB) {
      rec.classification = classify_critical(rec.configuration, opts.classify_tol);
    }
  }
  return result;
}

}  // namespace lvl
