#include "lvl/variational.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lvl {

namespace {

// Unit tangent of the xy-plane circle at u (u.z == 0).
Vec3 circle_tangent(const Vec3& u) { return Vec3{-u.y, u.x, 0.0}; }

bool is_circle_joint(const ArmConfiguration& cfg, std::size_t j) {
  return cfg.mode() == ParamMode::PlaneB && j == 1;
}

}  // namespace

std::vector<TangentDirection> tangent_frame(const ArmConfiguration& cfg) {
  std::vector<TangentDirection> frame;
  frame.reserve(2 * cfg.size());
  for (std::size_t j = 1; j < cfg.size(); ++j) {
    const Vec3& u = cfg.direction(j);
    if (is_circle_joint(cfg, j)) {
      frame.push_back({j, circle_tangent(u)});
      continue;
    }
    const auto [t1, t2] = perp_basis(u);
    frame.push_back({j, t1});
    frame.push_back({j, t2});
  }
  return frame;
}

std::size_t tangent_dimension(const ArmConfiguration& cfg) {
  const std::size_t free = cfg.size() - 1;
  return cfg.mode() == ParamMode::PlaneB ? 2 * free - 1 : 2 * free;
}

ArmConfiguration retract(const ArmConfiguration& cfg, std::span<const TangentDirection> frame,
                         std::span<const double> xi) {
  if (frame.size() != xi.size()) {
    throw std::invalid_argument("retract: frame and step sizes differ");
  }
  std::vector<Vec3> dirs(cfg.directions().begin(), cfg.directions().end());
  for (std::size_t k = 0; k < frame.size(); ++k) {
    dirs[frame[k].joint] += xi[k] * frame[k].dir;
  }
  for (std::size_t j = 1; j < dirs.size(); ++j) dirs[j] *= 1.0 / norm(dirs[j]);
  return cfg.with_directions(std::move(dirs));
}

std::vector<Vec3> euclidean_gradient(const ArmConfiguration& cfg) {
  const std::size_t n = cfg.size();
  if (n < 3) {
    throw std::invalid_argument("gradient: arm needs at least 3 edges");
  }
  const auto b = cfg.edges();
  // d_r = S_{<r} - S_{>r}; walk r upward moving b_{r-1} from right to left.
  Vec3 before{};
  Vec3 after{};
  for (std::size_t i = 2; i < n; ++i) after += b[i];
  std::vector<Vec3> w(n - 1);
  for (std::size_t r = 1; r < n; ++r) {
    const Vec3 d = before - after;
    w[r - 1] = cross(b[0], d);
    before += b[r];
    if (r + 1 < n) after -= b[r + 1];
  }
  return w;
}

std::vector<Vec3> riemannian_gradient(const ArmConfiguration& cfg) {
  auto w = euclidean_gradient(cfg);
  for (std::size_t r = 1; r < cfg.size(); ++r) {
    const Vec3& u = cfg.direction(r);
    Vec3& g = w[r - 1];
    if (is_circle_joint(cfg, r)) {
      const Vec3 t = circle_tangent(u);
      g = dot(g, t) * t;
    } else {
      g -= dot(g, u) * u;
    }
  }
  return w;
}

double gradient_norm(const ArmConfiguration& cfg) {
  double s = 0.0;
  for (const Vec3& g : riemannian_gradient(cfg)) s += dot(g, g);
  return std::sqrt(s);
}

Eigen::VectorXd frame_gradient(const ArmConfiguration& cfg, std::span<const TangentDirection> frame) {
  const auto w = euclidean_gradient(cfg);
  Eigen::VectorXd g(static_cast<Eigen::Index>(frame.size()));
  for (std::size_t k = 0; k < frame.size(); ++k) {
    const std::size_t j = frame[k].joint;
    g(static_cast<Eigen::Index>(k)) = cfg.length(j) * dot(w[j - 1], frame[k].dir);
  }
  return g;
}

ConditionResiduals condition_residuals(const ArmConfiguration& cfg) {
  const std::size_t n = cfg.size();
  const auto w = euclidean_gradient(cfg);
  const auto g = riemannian_gradient(cfg);
  const auto b = cfg.edges();
  ConditionResiduals out;
  out.joints.resize(n - 1);
  Vec3 before{};
  Vec3 after{};
  for (std::size_t i = 2; i < n; ++i) after += b[i];
  for (std::size_t r = 1; r < n; ++r) {
    out.joints[r - 1] = {norm(g[r - 1]), norm(w[r - 1]), before - after};
    before += b[r];
    if (r + 1 < n) after -= b[r + 1];
  }
  return out;
}

double default_hessian_step(const ArmConfiguration& /*cfg*/) { return 1e-4; }

TangentHessian hessian_tangent(const ArmConfiguration& cfg, std::optional<double> step) {
  TangentHessian out;
  out.frame = tangent_frame(cfg);
  out.step = step.value_or(default_hessian_step(cfg));
  out.gradient_norm = gradient_norm(cfg);
  out.off_critical = out.gradient_norm > kHessianGradientLimit;

  const std::size_t dim = out.frame.size();
  const double h = out.step;
  std::vector<double> xi(dim, 0.0);
  auto value_at = [&](std::size_t i, double si, std::size_t j, double sj) {
    std::fill(xi.begin(), xi.end(), 0.0);
    xi[i] += si;
    xi[j] += sj;
    return signed_volume(retract(cfg, out.frame, xi));
  };

  const double f0 = signed_volume(cfg);
  Eigen::MatrixXd hm(dim, dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const double fp = value_at(i, h, i, 0.0);
    const double fm = value_at(i, -h, i, 0.0);
    hm(i, i) = (fp - 2.0 * f0 + fm) / (h * h);
    for (std::size_t j = i + 1; j < dim; ++j) {
      const double fpp = value_at(i, h, j, h);
      const double fpm = value_at(i, h, j, -h);
      const double fmp = value_at(i, -h, j, h);
      const double fmm = value_at(i, -h, j, -h);
      hm(i, j) = hm(j, i) = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
    }
  }
  out.matrix = std::move(hm);
  return out;
}

MorseData morse_from_matrix(const Eigen::MatrixXd& symmetric, std::optional<double> tau) {
  MorseData m;
  if (symmetric.rows() == 0) {
    m.tau = tau.value_or(1e-6);
    return m;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetric, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& ev = es.eigenvalues();
  m.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  std::sort(m.eigenvalues.begin(), m.eigenvalues.end());
  const double radius = std::max(std::abs(m.eigenvalues.front()), std::abs(m.eigenvalues.back()));
  m.tau = tau.value_or(1e-6 * std::max(1.0, radius));
  for (double lam : m.eigenvalues) {
    if (lam < -m.tau) {
      ++m.morse_index;
    } else if (std::abs(lam) <= m.tau) {
      ++m.nullity;
    }
  }
  m.transversal_index = m.morse_index;
  return m;
}

MorseData morse_data(const ArmConfiguration& cfg, std::optional<double> tau) {
  const TangentHessian h = hessian_tangent(cfg);
  MorseData m = morse_from_matrix(h.matrix, tau);
  m.off_critical = h.off_critical;
  return m;
}

}  // namespace lvl
