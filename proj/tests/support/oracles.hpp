#pragma once

// Test-side oracles, deliberately independent of the library's computation
// paths: naive triple-loop products, breadth-first path search, and central
// finite differences. Used to freeze expected values.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "qnr/algebra.hpp"
#include "qnr/learn.hpp"
#include "qnr/metrics.hpp"
#include "qnr/quiver.hpp"

namespace oracle {

using qnr::cplx;
using qnr::Mat;

// Naive product C = A B without touching the kernel layer.
inline Mat naive_matmul(const Mat& a, const Mat& b) {
  Mat c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      cplx acc = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
      c(i, j) = acc;
    }
  return c;
}

// All arrow-id sequences of paths ending at `target`, found by breadth-first
// extension over raw arrow lists (no Quiver machinery).
inline std::set<std::vector<std::string>> bfs_paths_into(
    const std::vector<std::string>& vertices, const std::vector<qnr::Arrow>& arrows,
    const std::string& target) {
  std::set<std::vector<std::string>> found;
  // frontier of (current source vertex, arrow sequence so far), grown backwards
  std::vector<std::pair<std::string, std::vector<std::string>>> frontier;
  frontier.push_back({target, {}});
  found.insert(std::vector<std::string>{});
  while (!frontier.empty()) {
    std::vector<std::pair<std::string, std::vector<std::string>>> next;
    for (const auto& [at, seq] : frontier) {
      for (const auto& a : arrows) {
        if (a.head != at) continue;
        std::vector<std::string> ext = seq;
        ext.insert(ext.begin(), a.id);
        if (found.insert(ext).second) next.push_back({a.tail, ext});
      }
    }
    frontier = std::move(next);
    if (found.size() > 100000) throw std::runtime_error("path explosion (cyclic input?)");
  }
  return found;
}

// #paths into i = 1 + sum over incoming arrows of #paths into the tail.
inline std::size_t dp_path_count(const std::vector<std::string>& vertices,
                                 const std::vector<qnr::Arrow>& arrows,
                                 const std::string& target) {
  std::map<std::string, std::size_t> memo;
  std::function<std::size_t(const std::string&)> count = [&](const std::string& v) -> std::size_t {
    auto it = memo.find(v);
    if (it != memo.end()) return it->second;
    std::size_t n = 1;
    for (const auto& a : arrows)
      if (a.head == v) n += count(a.tail);
    memo[v] = n;
    return n;
  };
  return count(target);
}

// Central finite difference of a scalar functional against one entry of the
// representation (real or imaginary direction).
struct RepEntry {
  bool is_weight;
  std::string id;
  std::size_t row, col;
  bool imag_dir = false;
};

inline std::vector<RepEntry> all_entries(const qnr::Quiver& q, const qnr::DimData& dims,
                                         bool include_imag) {
  std::vector<RepEntry> out;
  for (const auto& a : q.arrows())
    for (std::size_t i = 0; i < dims.dim(a.head); ++i)
      for (std::size_t j = 0; j < dims.dim(a.tail); ++j) {
        out.push_back({true, a.id, i, j, false});
        if (include_imag) out.push_back({true, a.id, i, j, true});
      }
  for (const auto& v : q.vertices())
    for (std::size_t i = 0; i < dims.dim(v); ++i)
      for (std::size_t j = 0; j < dims.framing(v); ++j) {
        out.push_back({false, v, i, j, false});
        if (include_imag) out.push_back({false, v, i, j, true});
      }
  return out;
}

inline qnr::FramedRep perturb(const qnr::FramedRep& r, const RepEntry& e, double h) {
  qnr::FramedRep out = r;
  Mat& m = e.is_weight ? out.weights.at(e.id) : out.framings.at(e.id);
  m(e.row, e.col) += e.imag_dir ? cplx(0.0, h) : cplx(h);
  return out;
}

inline double central_diff(const std::function<double(const qnr::FramedRep&)>& f,
                           const qnr::FramedRep& r, const RepEntry& e, double h) {
  return (f(perturb(r, e, h)) - f(perturb(r, e, -h))) / (2.0 * h);
}

// Mixed Wirtinger Hessian of a real functional of the chart coordinates:
// G_{mu nubar} = 1/4 [ (f_xx + f_yy) + i (f_xy - f_yx) ].
inline Mat fd_wirtinger_hessian(const std::function<double(const std::vector<cplx>&)>& f,
                                const std::vector<cplx>& z0, double h) {
  const std::size_t P = z0.size();
  Mat G(P, P);
  auto at = [&](std::size_t mu, cplx dmu, std::size_t nu, cplx dnu) {
    std::vector<cplx> z = z0;
    z[mu] += dmu;
    z[nu] += dnu;
    return f(z);
  };
  const double f0 = f(z0);
  for (std::size_t mu = 0; mu < P; ++mu) {
    for (std::size_t nu = 0; nu < P; ++nu) {
      double fxx, fyy, fxy = 0.0, fyx = 0.0;
      if (mu == nu) {
        std::vector<cplx> zp = z0, zm = z0;
        zp[mu] += h;
        zm[mu] -= h;
        fxx = (f(zp) - 2.0 * f0 + f(zm)) / (h * h);
        zp = z0;
        zm = z0;
        zp[mu] += cplx(0.0, h);
        zm[mu] -= cplx(0.0, h);
        fyy = (f(zp) - 2.0 * f0 + f(zm)) / (h * h);
      } else {
        auto mixed = [&](cplx du, cplx dv) {
          return (at(mu, du, nu, dv) - at(mu, du, nu, -dv) - at(mu, -du, nu, dv) +
                  at(mu, -du, nu, -dv)) /
                 (4.0 * h * h);
        };
        fxx = mixed(h, h);
        fyy = mixed(cplx(0.0, h), cplx(0.0, h));
        fxy = mixed(h, cplx(0.0, h));
        fyx = mixed(cplx(0.0, h), h);
      }
      G(mu, nu) = 0.25 * cplx(fxx + fyy, fxy - fyx);
    }
  }
  return G;
}

// ---- shared test fixtures --------------------------------------------------

// One-hidden-layer network quiver: in1, in2 -> h1..hs -> out.
inline qnr::Quiver layered_quiver(std::size_t s) {
  std::vector<std::string> vs = {"in1", "in2"};
  std::vector<qnr::Arrow> as;
  for (std::size_t k = 1; k <= s; ++k) {
    const std::string h = "h" + std::to_string(k);
    vs.push_back(h);
    as.push_back({"a1" + std::to_string(k), "in1", h});
    as.push_back({"a2" + std::to_string(k), "in2", h});
  }
  vs.push_back("out");
  for (std::size_t k = 1; k <= s; ++k)
    as.push_back({"b" + std::to_string(k), "h" + std::to_string(k), "out"});
  return qnr::Quiver(vs, as);
}

inline qnr::DimData unit_dims(const qnr::Quiver& q) {
  qnr::DimData d;
  for (const auto& v : q.vertices()) {
    d.d[v] = 1;
    d.n[v] = 1;
  }
  return d;
}

// Two-hidden-layer variant: in1,in2 -> g1,g2 -> k1,k2 -> out.
inline qnr::Quiver deep_quiver() {
  std::vector<std::string> vs = {"in1", "in2", "g1", "g2", "k1", "k2", "out"};
  std::vector<qnr::Arrow> as;
  for (int j = 1; j <= 2; ++j)
    for (int k = 1; k <= 2; ++k)
      as.push_back({"p" + std::to_string(j) + std::to_string(k), "in" + std::to_string(j),
                    "g" + std::to_string(k)});
  for (int j = 1; j <= 2; ++j)
    for (int k = 1; k <= 2; ++k)
      as.push_back({"q" + std::to_string(j) + std::to_string(k), "g" + std::to_string(j),
                    "k" + std::to_string(k)});
  for (int k = 1; k <= 2; ++k) as.push_back({"r" + std::to_string(k), "k" + std::to_string(k), "out"});
  return qnr::Quiver(vs, as);
}

// Single arrow u -> v.
inline qnr::Quiver one_arrow_quiver() {
  return qnr::Quiver({"u", "v"}, {{"a", "u", "v"}});
}

// Deep tree for deep_quiver: out_r . sigma( q . sigma( p . x ) ).
inline qnr::AlgorithmTree deep_tree(const qnr::Quiver& q, const std::string& sigma) {
  using namespace qnr;
  auto hat = [](const std::string& src, const std::string& tgt, const std::string& arrow) {
    HattedElement h;
    h.source = src;
    h.target = tgt;
    h.terms.push_back({cplx(1.0), Path{tgt, {arrow}}});
    return h;
  };
  // inner layer sums at g1, g2
  auto inner = [&](const std::string& g, int k) {
    Expr e;
    e.target = g;
    for (int j = 1; j <= 2; ++j)
      e.terms.push_back({hat("in" + std::to_string(j), g,
                             "p" + std::to_string(j) + std::to_string(k)),
                         InputArg{"in" + std::to_string(j)}});
    return e;
  };
  auto mid = [&](const std::string& kv, int k) {
    Expr e;
    e.target = kv;
    for (int j = 1; j <= 2; ++j)
      e.terms.push_back({hat("g" + std::to_string(j), kv,
                             "q" + std::to_string(j) + std::to_string(k)),
                         ActArg{sigma, std::make_shared<const Expr>(inner("g" + std::to_string(j), j))}});
    return e;
  };
  AlgorithmTree t;
  t.root.target = "out";
  for (int k = 1; k <= 2; ++k)
    t.root.terms.push_back({hat("k" + std::to_string(k), "out", "r" + std::to_string(k)),
                            ActArg{sigma, std::make_shared<const Expr>(mid("k" + std::to_string(k), k))}});
  return t;
}

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(1e-12, std::abs(want));
}

}  // namespace oracle
