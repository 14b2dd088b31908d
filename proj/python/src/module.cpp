#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <string>
#include <vector>

#include "lvl/classify.hpp"
#include "lvl/geometry.hpp"
#include "lvl/gram.hpp"
#include "lvl/morse_poly.hpp"
#include "lvl/search.hpp"
#include "lvl/variational.hpp"

namespace py = pybind11;
using namespace lvl;

namespace {

using Triple = std::array<double, 3>;

std::vector<Vec3> to_vecs(const std::vector<Triple>& v) {
  std::vector<Vec3> out;
  out.reserve(v.size());
  for (const auto& t : v) out.push_back({t[0], t[1], t[2]});
  return out;
}

Triple to_triple(const Vec3& v) { return {v.x, v.y, v.z}; }

std::vector<Triple> to_triples(std::span<const Vec3> v) {
  std::vector<Triple> out;
  out.reserve(v.size());
  for (const auto& u : v) out.push_back(to_triple(u));
  return out;
}

ArmConfiguration make_cfg(const std::vector<double>& lengths, const std::vector<Triple>& dirs,
                          const std::string& mode) {
  return ArmConfiguration(ArmLengths(lengths), to_vecs(dirs), parse_mode(mode));
}

py::dict morse_dict(const MorseData& m) {
  py::dict d;
  d["eigenvalues"] = m.eigenvalues;
  d["morse_index"] = m.morse_index;
  d["nullity"] = m.nullity;
  d["transversal_index"] = m.transversal_index;
  d["tau"] = m.tau;
  d["off_critical"] = m.off_critical;
  return d;
}

py::dict verdict_dict(const Verdict& v) {
  py::dict d;
  d["ok"] = v.ok;
  d["residual"] = v.residual;
  return d;
}

py::dict classification_dict(const ClassificationReport& c) {
  py::dict d;
  std::vector<std::string> pattern;
  for (auto f : c.pattern) pattern.emplace_back(to_string(f));
  d["label"] = std::string(to_string(c.label));
  d["split"] = c.split;
  d["pattern"] = pattern;
  d["degraded"] = c.degraded;
  d["mirror_normalized"] = c.mirror_normalized;
  if (c.circle) {
    py::dict circ;
    circ["center"] = std::array<double, 2>{c.circle->center.x, c.circle->center.y};
    circ["radius"] = c.circle->radius;
    circ["rms"] = c.circle->rms;
    d["circle"] = circ;
  } else {
    d["circle"] = py::none();
  }
  d["circle_rms_relative"] = c.circle_rms_relative;
  d["diameter_circle"] = verdict_dict(c.diameter_circle);
  d["closing"] = verdict_dict(c.closing);
  d["diameter"] = verdict_dict(c.diameter);
  d["zigzag"] = verdict_dict(c.zigzag);
  d["parity_ok"] = c.parity_ok;
  if (c.planar_subtype) d["planar_subtype"] = std::string(to_string(*c.planar_subtype));
  else d["planar_subtype"] = py::none();
  d["value_identity_residual"] = c.value_identity_residual;
  return d;
}

GramPoint gram_point(double x, double y, double z, double a, double b, double c) { return {x, y, z, a, b, c}; }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Signed volume of polygonal arms: critical points, Morse data, Gram picture.";
  m.attr("__version__") = LVL_PY_VERSION;

  py::register_exception<std::invalid_argument>(m, "InvalidArgument", PyExc_ValueError);

  m.def("signed_volume",
        [](const std::vector<double>& lengths, const std::vector<Triple>& dirs, const std::string& mode) {
          return signed_volume(make_cfg(lengths, dirs, mode));
        },
        py::arg("lengths"), py::arg("directions"), py::arg("mode") = "reduced");

  m.def("projected_area",
        [](const Triple& p, const std::vector<double>& lengths, const std::vector<Triple>& dirs,
           const std::string& mode) { return projected_area({p[0], p[1], p[2]}, make_cfg(lengths, dirs, mode)); },
        py::arg("p"), py::arg("lengths"), py::arg("directions"), py::arg("mode") = "reduced");

  m.def("signed_area",
        [](const std::vector<std::array<double, 2>>& pts) {
          std::vector<Point2> v;
          for (const auto& p : pts) v.push_back({p[0], p[1]});
          return signed_area(PlanarChain(std::move(v)), false);
        },
        py::arg("points"), "Shoelace area A, closing edge included.");

  m.def("euclidean_gradient",
        [](const std::vector<double>& lengths, const std::vector<Triple>& dirs, const std::string& mode) {
          return to_triples(euclidean_gradient(make_cfg(lengths, dirs, mode)));
        },
        py::arg("lengths"), py::arg("directions"), py::arg("mode") = "reduced");

  m.def("riemannian_gradient",
        [](const std::vector<double>& lengths, const std::vector<Triple>& dirs, const std::string& mode) {
          return to_triples(riemannian_gradient(make_cfg(lengths, dirs, mode)));
        },
        py::arg("lengths"), py::arg("directions"), py::arg("mode") = "reduced");

  m.def("gradient_norm",
        [](const std::vector<double>& lengths, const std::vector<Triple>& dirs, const std::string& mode) {
          return gradient_norm(make_cfg(lengths, dirs, mode));
        },
        py::arg("lengths"), py::arg("directions"), py::arg("mode") = "reduced");

  m.def("morse_data",
        [](const std::vector<double>& lengths, const std::vector<Triple>& dirs, const std::string& mode) {
          return morse_dict(morse_data(make_cfg(lengths, dirs, mode)));
        },
        py::arg("lengths"), py::arg("directions"), py::arg("mode") = "reduced");

  m.def("classify_critical",
        [](const std::vector<double>& lengths, const std::vector<Triple>& dirs, const std::string& mode,
           double tol) { return classification_dict(classify_critical(make_cfg(lengths, dirs, mode), tol)); },
        py::arg("lengths"), py::arg("directions"), py::arg("mode") = "reduced", py::arg("tol") = kClassifyTolerance);

  m.def("random_start",
        [](const std::vector<double>& lengths, const std::string& mode, std::uint64_t seed, std::uint64_t index) {
          return to_triples(random_start(ArmLengths(lengths), parse_mode(mode), seed, index).directions());
        },
        py::arg("lengths"), py::arg("mode") = "reduced", py::arg("seed") = 0, py::arg("index") = 0);

  m.def("find_critical_points",
        [](const std::vector<double>& lengths, const std::string& mode, int restarts, std::uint64_t seed,
           double grad_tol, int threads, double classify_tol) {
          SearchOptions opts;
          opts.mode = parse_mode(mode);
          opts.restarts = restarts;
          opts.seed = seed;
          opts.grad_tol = grad_tol;
          opts.threads = threads;
          opts.classify_tol = classify_tol;
          const ArmLengths len(lengths);
          SearchResult result;
          {
            py::gil_scoped_release release;
            result = find_critical_points(len, opts);
          }
          py::list records;
          for (const auto& r : result.records) {
            py::dict d;
            d["value"] = r.value;
            d["grad_norm"] = r.grad_norm;
            d["multiplicity"] = r.multiplicity;
            d["directions"] = to_triples(r.configuration.directions());
            d["morse"] = morse_dict(r.morse);
            if (r.classification) d["classification"] = classification_dict(*r.classification);
            else d["classification"] = py::none();
            records.append(d);
          }
          py::dict summary;
          summary["restarts"] = result.summary.restarts;
          summary["converged"] = result.summary.converged;
          summary["failed"] = result.summary.failed;
          py::dict out;
          out["records"] = records;
          out["summary"] = summary;
          return out;
        },
        py::arg("lengths"), py::arg("mode") = "reduced", py::arg("restarts") = 200, py::arg("seed") = 0,
        py::arg("grad_tol") = 1e-10, py::arg("threads") = 0, py::arg("classify_tol") = kClassifyTolerance);

  m.def("gram_det",
        [](double x, double y, double z, double a, double b, double c) { return gram_det(gram_point(x, y, z, a, b, c)); },
        py::arg("x"), py::arg("y"), py::arg("z"), py::arg("a") = 1.0, py::arg("b") = 1.0, py::arg("c") = 1.0);

  m.def("gram_gradient",
        [](double x, double y, double z, double a, double b, double c) {
          return to_triple(gram_gradient(gram_point(x, y, z, a, b, c)));
        },
        py::arg("x"), py::arg("y"), py::arg("z"), py::arg("a") = 1.0, py::arg("b") = 1.0, py::arg("c") = 1.0);

  m.def("gram_hessian",
        [](double x, double y, double z, double a, double b, double c) {
          return Eigen::Matrix3d(gram_hessian(gram_point(x, y, z, a, b, c)));
        },
        py::arg("x"), py::arg("y"), py::arg("z"), py::arg("a") = 1.0, py::arg("b") = 1.0, py::arg("c") = 1.0);

  m.def("gram_critical_points",
        [](double a, double b, double c) {
          py::list out;
          for (const auto& cp : gram_critical_points(a, b, c)) {
            py::dict d;
            d["point"] = Triple{cp.point.x, cp.point.y, cp.point.z};
            d["value"] = cp.value;
            d["eigenvalues"] = cp.eigenvalues;
            d["morse_index"] = cp.morse_index;
            out.append(d);
          }
          return out;
        },
        py::arg("a"), py::arg("b"), py::arg("c"));

  m.def("gram_from_config",
        [](const std::vector<double>& lengths, const std::vector<Triple>& dirs, const std::string& mode) {
          const GramPoint p = gram_from_config(make_cfg(lengths, dirs, mode));
          return Triple{p.x, p.y, p.z};
        },
        py::arg("lengths"), py::arg("directions"), py::arg("mode") = "reduced", "(x, y, z) = (b2.b3, b1.b3, b1.b2)");

  m.def("reconstruct_from_gram",
        [](double x, double y, double z, double a, double b, double c, bool mirror) {
          return to_triples(reconstruct_from_gram(gram_point(x, y, z, a, b, c), mirror).directions());
        },
        py::arg("x"), py::arg("y"), py::arg("z"), py::arg("a") = 1.0, py::arg("b") = 1.0, py::arg("c") = 1.0,
        py::arg("mirror") = false);

  m.def("cosine_rule_convert",
        [](double x, double y, double z, double a, double b, double c) {
          const auto d = cosine_rule_convert(gram_point(x, y, z, a, b, c));
          return Triple{d.d12, d.d13, d.d23};
        },
        py::arg("x"), py::arg("y"), py::arg("z"), py::arg("a") = 1.0, py::arg("b") = 1.0, py::arg("c") = 1.0);

  m.def("extract_isosurface",
        [](double a, double b, double c, double level, int resolution, int threads) {
          TriangleMesh mesh;
          {
            py::gil_scoped_release release;
            mesh = extract_isosurface(a, b, c, level, resolution, threads);
          }
          Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor> v(static_cast<Eigen::Index>(mesh.vertices.size()), 3);
          for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
            const auto r = static_cast<Eigen::Index>(i);
            v(r, 0) = mesh.vertices[i].x;
            v(r, 1) = mesh.vertices[i].y;
            v(r, 2) = mesh.vertices[i].z;
          }
          Eigen::Matrix<std::int64_t, Eigen::Dynamic, 3, Eigen::RowMajor> t(
              static_cast<Eigen::Index>(mesh.triangles.size()), 3);
          for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
            for (int k = 0; k < 3; ++k) t(static_cast<Eigen::Index>(i), k) = mesh.triangles[i][static_cast<std::size_t>(k)];
          }
          return py::make_tuple(v, t);
        },
        py::arg("a"), py::arg("b"), py::arg("c"), py::arg("level") = 0.0, py::arg("resolution") = 64,
        py::arg("threads") = 0, "Returns (vertices[N,3], triangles[M,3]).");

  m.def("isosurface_error_bound", &isosurface_error_bound, py::arg("a"), py::arg("b"), py::arg("c"),
        py::arg("resolution"));

  m.def("bott_morse_check",
        [](const std::vector<std::pair<int, std::vector<std::int64_t>>>& criticals,
           const std::vector<std::int64_t>& manifold) {
          std::vector<CriticalManifoldDatum> data;
          for (const auto& [lambda, poly] : criticals) data.push_back({lambda, IntPolynomial(poly)});
          const BottMorseResult r = bott_morse_check(data, IntPolynomial(manifold));
          auto coeffs = [](const IntPolynomial& p) {
            return std::vector<std::int64_t>(p.coeffs().begin(), p.coeffs().end());
          };
          py::dict d;
          d["difference"] = coeffs(r.difference);
          d["quotient"] = coeffs(r.quotient);
          d["remainder"] = r.remainder;
          d["divisible"] = r.divisible;
          d["ok"] = r.ok;
          return d;
        },
        py::arg("criticals"), py::arg("manifold"),
        "criticals: list of (lambda, poincare coefficients); manifold: coefficients of P(M).");
}
