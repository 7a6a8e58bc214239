#include "sdfem/norms.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "parallel.hpp"
#include "sdfem/error.hpp"
#include "sdfem/quadrature.hpp"

namespace sdfem {

NormTerms& NormTerms::operator+=(const NormTerms& o) {
  eps_beta += o.eps_beta;
  eps_hat_eta += o.eps_hat_eta;
  l2 += o.l2;
  sd += o.sd;
  weight_convective += o.weight_convective;
  return *this;
}

double NormBreakdown::norm() const { return std::sqrt(squared()); }

double NormBreakdown::coarse_norm() const {
  return std::sqrt(region[static_cast<int>(Region::S)].total());
}

double NormBreakdown::layer_norm() const {
  return std::sqrt(region[static_cast<int>(Region::X)].total() +
                   region[static_cast<int>(Region::Y)].total() +
                   region[static_cast<int>(Region::XY)].total());
}

NormBreakdown msd_norm(const FEFunction& v, const AssembledSystem& sys) {
  const auto& mesh = *sys.mesh;
  const auto& rule = quad_rule(0);
  NormBreakdown out;
  for (int tri = 0; tri < static_cast<int>(mesh.triangles().size()); ++tri) {
    const auto t = TriangleGeometry::of(mesh, tri, sys.frame);
    const auto k = form_coefficients(mesh, sys.problem, sys.stab, tri);
    const auto u = v.triangle_values(tri);
    double vb = 0.0, ve = 0.0;
    for (int a = 0; a < 3; ++a) {
      vb += u[a] * t.grad_beta[a];
      ve += u[a] * t.grad_eta[a];
    }
    double l2 = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto& l = rule.bary[q];
      const double val = l[0] * u[0] + l[1] * u[1] + l[2] * u[2];
      l2 += rule.weights[q] * val * val;
    }
    NormTerms n;
    n.eps_beta = k.epsilon * vb * vb * t.area;
    n.eps_hat_eta = k.eps_hat * ve * ve * t.area;
    n.l2 = k.c * l2 * t.area;
    n.sd = k.delta * k.b * k.b * vb * vb * t.area;
    out.region[static_cast<int>(mesh.triangles()[tri].region)] += n;
  }
  for (const auto& r : out.region) out.global += r;
  return out;
}

namespace {

// Per-triangle accumulator slots of the fused weighted pass.
enum Slot : int {
  kEpsBeta,
  kEpsHatEta,
  kConv,
  kL2,
  kSd,
  kAWeighted,
  kCorrBeta,
  kCorrEta,
  kCorrSd,
  kAEG,
  kEL2,
  kEBeta,
  kEEta,
  kRefL2,    // int w^{-1} G^2, scale for the E slots
  kRefGrad,  // int w^{-1} |grad G|^2
  kNumSlots
};

using Slots = std::array<double, kNumSlots>;

struct PassResult {
  std::array<Slots, 4> region{};  // summed per region in triangle order
};

struct Scaled {
  double a;
  double t;
};

Scaled scaled(Point x, const WeightSpec& w) {
  const double dx = x.x - w.x_star.x, dy = x.y - w.x_star.y;
  return {(dx * w.frame.beta.x + dy * w.frame.beta.y) / w.sigma_beta,
          (dx * w.frame.eta.x + dy * w.frame.eta.y) / w.sigma_eta};
}

Slots integrate_triangle(const AssembledSystem& sys, const FEFunction& G, const WeightSpec& w,
                         const TriangleRule& rule, int tri) {
  const auto& mesh = *sys.mesh;
  const auto t = TriangleGeometry::of(mesh, tri, sys.frame);
  const auto k = form_coefficients(mesh, sys.problem, sys.stab, tri);
  const auto g = G.triangle_values(tri);

  double gb = 0.0, ge = 0.0;
  std::array<double, 3> av, tv, iv;
  for (int a = 0; a < 3; ++a) {
    gb += g[a] * t.grad_beta[a];
    ge += g[a] * t.grad_eta[a];
    const Scaled s = scaled(t.p[a], w);
    av[a] = s.a;
    tv[a] = s.t;
    iv[a] = inverse_weight(s.a, s.t, w.sigma_beta, w.sigma_eta).value * g[a];
  }
  double ib = 0.0, ie = 0.0;
  for (int a = 0; a < 3; ++a) {
    ib += iv[a] * t.grad_beta[a];
    ie += iv[a] * t.grad_eta[a];
  }

  Slots s{};
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const auto& l = rule.bary[q];
    const double wq = rule.weights[q];
    const double gq = l[0] * g[0] + l[1] * g[1] + l[2] * g[2];
    const double a = l[0] * av[0] + l[1] * av[1] + l[2] * av[2];
    const double tt = l[0] * tv[0] + l[1] * tv[1] + l[2] * tv[2];
    const InverseWeight W = inverse_weight(a, tt, w.sigma_beta, w.sigma_eta);
    const double om = 1.0 / W.value;

    // Weighted energy norm terms.
    s[kEpsBeta] += wq * k.epsilon * W.value * gb * gb;
    s[kEpsHatEta] += wq * k.eps_hat * W.value * ge * ge;
    s[kConv] += wq * 0.5 * k.b * W.d_beta * gq * gq;
    s[kL2] += wq * k.c * W.value * gq * gq;
    s[kSd] += wq * k.b * k.b * k.delta * W.value * gb * gb;

    // w^{-1} G and its streamline derivatives by the product rule.
    const double u = W.value * gq;
    const double ub = W.d_beta * gq + W.value * gb;
    const double ue = W.d_eta * gq + W.value * ge;
    s[kAWeighted] += wq * k(u, ub, ue, gq, gb, ge);
    s[kCorrBeta] += wq * k.epsilon * W.d_beta * gq * gb;
    s[kCorrEta] += wq * k.eps_hat * W.d_eta * gq * ge;
    s[kCorrSd] += wq * k.delta * (k.b * W.d_beta * gq + k.c * W.value * gq) * k.b * gb;

    const double iq = l[0] * iv[0] + l[1] * iv[1] + l[2] * iv[2];
    const double e = u - iq, eb = ub - ib, ee = ue - ie;
    s[kAEG] += wq * k(e, eb, ee, gq, gb, ge);
    s[kEL2] += wq * om * e * e;
    s[kEBeta] += wq * om * eb * eb;
    s[kEEta] += wq * om * ee * ee;

    s[kRefL2] += wq * W.value * gq * gq;
    s[kRefGrad] += wq * W.value * (gb * gb + ge * ge);
  }
  for (double& v : s) v *= t.area;
  return s;
}

PassResult weighted_pass(const AssembledSystem& sys, const FEFunction& G, const WeightSpec& w,
                         int depth, int workers) {
  const auto& mesh = *sys.mesh;
  const auto& rule = quad_rule(depth);
  const int n = static_cast<int>(mesh.triangles().size());
  std::vector<Slots> per_tri(n);
  detail::parallel_for(n, workers, [&](int begin, int end) {
    for (int tri = begin; tri < end; ++tri) per_tri[tri] = integrate_triangle(sys, G, w, rule, tri);
  });
  PassResult r;
  for (int tri = 0; tri < n; ++tri) {
    auto& dst = r.region[static_cast<int>(mesh.triangles()[tri].region)];
    for (int sl = 0; sl < kNumSlots; ++sl) dst[sl] += per_tri[tri][sl];
  }
  return r;
}

// Sum over X, Y and XY, accumulated directly to avoid cancellation.
double layer_sum(const PassResult& r, int sl) {
  return r.region[static_cast<int>(Region::X)][sl] + r.region[static_cast<int>(Region::Y)][sl] +
         r.region[static_cast<int>(Region::XY)][sl];
}

Slots total(const PassResult& r) {
  Slots s{};
  for (const auto& reg : r.region)
    for (int sl = 0; sl < kNumSlots; ++sl) s[sl] += reg[sl];
  return s;
}

// Largest relative change between two passes over the quantities that are
// reported. Quantities far below their natural scale are compared against a
// floor of 1e-6 of that scale.
double relative_change(const PassResult& coarse, const PassResult& fine) {
  const Slots c = total(coarse), f = total(fine);
  const double energy = f[kEpsBeta] + f[kEpsHatEta] + f[kConv] + f[kL2] + f[kSd];
  double worst = 0.0;
  auto cmp = [&](double a, double b, double scale) {
    const double denom = std::max(std::abs(b), 1e-6 * std::abs(scale));
    if (denom == 0.0) return;
    worst = std::max(worst, std::abs(b - a) / denom);
  };
  for (int sl = kEpsBeta; sl <= kAEG; ++sl) cmp(c[sl], f[sl], energy);
  auto split = [&](const PassResult& r, int sl, bool coarse_region) {
    return coarse_region ? r.region[static_cast<int>(Region::S)][sl] : layer_sum(r, sl);
  };
  for (bool in_s : {true, false}) {
    cmp(split(coarse, kEL2, in_s), split(fine, kEL2, in_s), f[kRefL2]);
    cmp(split(coarse, kEBeta, in_s), split(fine, kEBeta, in_s), f[kRefGrad]);
    cmp(split(coarse, kEEta, in_s), split(fine, kEEta, in_s), f[kRefGrad]);
  }
  return worst;
}

NormTerms terms_of(const Slots& s) {
  NormTerms t;
  t.eps_beta = s[kEpsBeta];
  t.eps_hat_eta = s[kEpsHatEta];
  t.l2 = s[kL2];
  t.sd = s[kSd];
  t.weight_convective = s[kConv];
  return t;
}

}  // namespace

GreenAnalysis analyze_weighted(const AssembledSystem& sys, const FEFunction& G, const WeightSpec& w,
                               const QuadratureOptions& opts) {
  if (&G.mesh() != sys.mesh.get()) throw InvalidArgument("Green function lives on another mesh");
  if (opts.base_depth < 0 || opts.max_depth < opts.base_depth)
    throw InvalidArgument("invalid quadrature depth range");

  int depth = opts.base_depth;
  PassResult prev = weighted_pass(sys, G, w, depth, opts.workers);
  double change = std::numeric_limits<double>::infinity();
  bool converged = false;
  while (depth < opts.max_depth) {
    PassResult next = weighted_pass(sys, G, w, depth + 1, opts.workers);
    change = relative_change(prev, next);
    prev = std::move(next);
    ++depth;
    if (change < opts.rtol) {
      converged = true;
      break;
    }
  }
  if (opts.base_depth == opts.max_depth) {
    converged = false;
    change = std::numeric_limits<double>::quiet_NaN();
  }

  GreenAnalysis out;
  auto& nb = out.weighted;
  for (int r = 0; r < 4; ++r) {
    nb.region[r] = terms_of(prev.region[r]);
    nb.global += nb.region[r];
  }
  nb.quad_depth = depth;
  nb.converged = converged;
  nb.achieved_tolerance = change;

  const Slots tot = total(prev);
  const Slots& s = prev.region[static_cast<int>(Region::S)];
  auto not_s = [&](int sl) { return layer_sum(prev, sl); };
  auto root = [](double v) { return std::sqrt(std::max(v, 0.0)); };
  auto& e = out.e;
  e.l2_s = root(s[kEL2]);
  e.l2_not_s = root(not_s(kEL2));
  e.beta_s = root(s[kEBeta]);
  e.beta_not_s = root(not_s(kEBeta));
  e.eta_s = root(s[kEEta]);
  e.eta_not_s = root(not_s(kEEta));
  e.a_EG = tot[kAEG];

  auto& lq = out.lemma;
  lq.a_weighted = tot[kAWeighted];
  lq.g_at_star = G.evaluate(w.x_star);
  lq.a_EG = tot[kAEG];
  lq.corr_beta = tot[kCorrBeta];
  lq.corr_eta = tot[kCorrEta];
  lq.corr_sd = tot[kCorrSd];
  lq.weighted_norm_sq = nb.squared();
  const double scale = lq.weighted_norm_sq > 0.0 ? lq.weighted_norm_sq : 1.0;
  lq.identity_residual =
      std::abs(lq.weighted_norm_sq - (lq.a_weighted - lq.corr_beta - lq.corr_eta - lq.corr_sd)) /
      scale;
  lq.decomposition_residual = std::abs(lq.a_weighted - lq.a_EG - lq.g_at_star) / scale;
  return out;
}

NormBreakdown weighted_norm(const AssembledSystem& sys, const FEFunction& G, const WeightSpec& w,
                            const QuadratureOptions& opts) {
  return analyze_weighted(sys, G, w, opts).weighted;
}

EDiagnostics e_diagnostics(const AssembledSystem& sys, const FEFunction& G, const WeightSpec& w,
                           const QuadratureOptions& opts) {
  return analyze_weighted(sys, G, w, opts).e;
}

LemmaQuantities lemma_quantities(const AssembledSystem& sys, const FEFunction& G,
                                 const WeightSpec& w, const QuadratureOptions& opts,
                                 double identity_tolerance) {
  auto lq = analyze_weighted(sys, G, w, opts).lemma;
  if (!(lq.identity_residual <= identity_tolerance))
    throw std::runtime_error("weighted energy identity violated: relative residual " +
                             std::to_string(lq.identity_residual));
  return lq;
}

double interpolation_error(const FEFunction& G, const WeightSpec& w, Point x) {
  const auto& mesh = G.mesh();
  const int tri = mesh.triangle_at(x);
  const auto t = TriangleGeometry::of(mesh, tri);
  const auto g = G.triangle_values(tri);
  const auto& p = t.p;
  const double det = (p[1].x - p[0].x) * (p[2].y - p[0].y) - (p[2].x - p[0].x) * (p[1].y - p[0].y);
  std::array<double, 3> l;
  l[1] = ((x.x - p[0].x) * (p[2].y - p[0].y) - (p[2].x - p[0].x) * (x.y - p[0].y)) / det;
  l[2] = ((p[1].x - p[0].x) * (x.y - p[0].y) - (x.x - p[0].x) * (p[1].y - p[0].y)) / det;
  l[0] = 1.0 - l[1] - l[2];
  double gx = 0.0, a = 0.0, tt = 0.0, interp = 0.0;
  for (int v = 0; v < 3; ++v) {
    const Scaled s = scaled(p[v], w);
    gx += l[v] * g[v];
    a += l[v] * s.a;
    tt += l[v] * s.t;
    interp += l[v] * inverse_weight(s.a, s.t, w.sigma_beta, w.sigma_eta).value * g[v];
  }
  return inverse_weight(a, tt, w.sigma_beta, w.sigma_eta).value * gx - interp;
}

nlohmann::json to_json(const NormTerms& t) {
  return {{"eps_beta_term", t.eps_beta},
          {"eps_hat_eta_term", t.eps_hat_eta},
          {"l2_term", t.l2},
          {"sd_term", t.sd},
          {"weight_convective_term", t.weight_convective},
          {"total", t.total()}};
}

nlohmann::json to_json(const NormBreakdown& b) {
  nlohmann::json regions;
  for (Region r : kAllRegions) regions[to_string(r)] = to_json(b.region[static_cast<int>(r)]);
  return {{"norm", b.norm()},
          {"norm_squared", b.squared()},
          {"global", to_json(b.global)},
          {"regions", regions},
          {"quad_depth", b.quad_depth},
          {"converged", b.converged},
          {"achieved_tolerance", b.achieved_tolerance}};
}

nlohmann::json to_json(const EDiagnostics& e) {
  return {{"l2_s", e.l2_s},       {"l2_not_s", e.l2_not_s}, {"beta_s", e.beta_s},
          {"beta_not_s", e.beta_not_s}, {"eta_s", e.eta_s},       {"eta_not_s", e.eta_not_s},
          {"a_EG", e.a_EG}};
}

nlohmann::json to_json(const LemmaQuantities& l) {
  return {{"a_weighted", l.a_weighted},
          {"g_at_star", l.g_at_star},
          {"a_EG", l.a_EG},
          {"corr_beta", l.corr_beta},
          {"corr_eta", l.corr_eta},
          {"corr_sd", l.corr_sd},
          {"weighted_norm_sq", l.weighted_norm_sq},
          {"identity_residual", l.identity_residual},
          {"decomposition_residual", l.decomposition_residual}};
}

}  // namespace sdfem
