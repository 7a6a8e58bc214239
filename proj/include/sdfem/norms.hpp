#pragma once

#include <array>

#include <nlohmann/json.hpp>

#include "sdfem/assembly.hpp"
#include "sdfem/weight.hpp"

namespace sdfem {

/// The five nonnegative pieces of the (weighted) energy norm squared.
/// For the unweighted norm `weight_convective` is zero.
struct NormTerms {
  double eps_beta = 0.0;           // eps ||w^{-1/2} v_beta||^2
  double eps_hat_eta = 0.0;        // eps_hat ||w^{-1/2} v_eta||^2
  double l2 = 0.0;                 // c ||w^{-1/2} v||^2
  double sd = 0.0;                 // sum_K delta_K b^2 ||w^{-1/2} v_beta||_K^2
  double weight_convective = 0.0;  // (b/2) ||(w^{-1})_beta^{1/2} v||^2

  double total() const { return eps_beta + eps_hat_eta + l2 + sd + weight_convective; }
  NormTerms& operator+=(const NormTerms& o);
};

struct NormBreakdown {
  NormTerms global;
  std::array<NormTerms, 4> region{};  // indexed by Region
  int quad_depth = 0;
  bool converged = true;
  double achieved_tolerance = 0.0;

  double squared() const { return global.total(); }
  double norm() const;
  /// Norm restricted to the coarse region (true) or to its complement (false).
  double coarse_norm() const;
  double layer_norm() const;
};

/// Unweighted energy norm of a P1 function. The gradient terms are exact;
/// the L2 term uses the 7-point rule, which is exact for quadratics.
NormBreakdown msd_norm(const FEFunction& v, const AssembledSystem& sys);

struct QuadratureOptions {
  int base_depth = 2;
  int max_depth = 5;
  double rtol = 1e-8;
  int workers = 1;
};

/// Norms of E = w^{-1} G - (w^{-1} G)^I split into the coarse region S and
/// its complement.
struct EDiagnostics {
  double l2_s = 0.0;        // ||w^{1/2} E||_S
  double l2_not_s = 0.0;    // ||w^{1/2} E||_{not S}
  double beta_s = 0.0;      // ||w^{1/2} E_beta||_S
  double beta_not_s = 0.0;
  double eta_s = 0.0;       // ||w^{1/2} E_eta||_S
  double eta_not_s = 0.0;
  double a_EG = 0.0;        // a(E, G)
};

/// Terms of the weighted-energy identity
///   |||G|||_w^2 = a(w^{-1}G, G) - corr_beta - corr_eta - corr_sd
/// and of the decomposition a(w^{-1}G, G) = a(E, G) + G(x*).
struct LemmaQuantities {
  double a_weighted = 0.0;  // a(w^{-1} G, G)
  double g_at_star = 0.0;   // (w^{-1} G)(x*) = G(x*)
  double a_EG = 0.0;
  double corr_beta = 0.0;  // eps ((w^{-1})_beta G, G_beta)
  double corr_eta = 0.0;   // eps_hat ((w^{-1})_eta G, G_eta)
  double corr_sd = 0.0;    // sum_K (b (w^{-1})_beta G + c w^{-1} G, delta_K b G_beta)_K
  double weighted_norm_sq = 0.0;
  // Both relative to |||G|||_w^2.
  double identity_residual = 0.0;
  double decomposition_residual = 0.0;
};

/// Everything the weighted analysis of one Green function produces, from a
/// single adaptive quadrature pass.
struct GreenAnalysis {
  NormBreakdown weighted;
  EDiagnostics e;
  LemmaQuantities lemma;
};

GreenAnalysis analyze_weighted(const AssembledSystem& sys, const FEFunction& G,
                               const WeightSpec& w, const QuadratureOptions& opts = {});

NormBreakdown weighted_norm(const AssembledSystem& sys, const FEFunction& G, const WeightSpec& w,
                            const QuadratureOptions& opts = {});

EDiagnostics e_diagnostics(const AssembledSystem& sys, const FEFunction& G, const WeightSpec& w,
                           const QuadratureOptions& opts = {});

/// Throws std::runtime_error if the weighted-energy identity residual
/// exceeds `identity_tolerance`; that signals an integrand bug.
LemmaQuantities lemma_quantities(const AssembledSystem& sys, const FEFunction& G,
                                 const WeightSpec& w, const QuadratureOptions& opts = {},
                                 double identity_tolerance = 1e-7);

/// Pointwise E(x) = (w^{-1} G)(x) - (w^{-1} G)^I(x).
double interpolation_error(const FEFunction& G, const WeightSpec& w, Point x);

nlohmann::json to_json(const NormTerms& t);
nlohmann::json to_json(const NormBreakdown& b);
nlohmann::json to_json(const EDiagnostics& e);
nlohmann::json to_json(const LemmaQuantities& l);

}  // namespace sdfem
