#include "newton3/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace newton3 {
namespace {

constexpr double kSqrt2 = 1.4142135623730950488;

int tri_size(int s) { return s * (s + 1) / 2; }

// Row-major upper-triangle index of (r, c), r <= c, in an s x s block.
int tri_index(int s, int r, int c) { return r * s - r * (r - 1) / 2 + (c - r); }

bool finite(const dmat& M) { return M.allFinite(); }

}  // namespace

void LinFun::add(int block, int row, int col, double coeff) {
  if (coeff == 0.0) return;
  if (row > col) std::swap(row, col);
  terms.push_back({block, row, col, coeff});
}

void LinFun::add_free(int index, double coeff) {
  if (coeff == 0.0) return;
  terms.push_back({kFreeVar, index, 0, coeff});
}

double evaluate(const LinFun& f, const SdpAssignment& a) {
  double v = f.constant;
  for (const SdpTerm& t : f.terms)
    v += t.coeff * (t.block == kFreeVar ? a.free_vars[t.row]
                                        : a.blocks[t.block](t.row, t.col));
  return v;
}

const char* to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::Optimal: return "Optimal";
    case SdpStatus::MaxIterations: return "MaxIterations";
    case SdpStatus::NumericalFailure: return "NumericalFailure";
  }
  return "?";
}

dvec svec(const dmat& M) {
  const int s = static_cast<int>(M.rows());
  dvec v(tri_size(s));
  int idx = 0;
  for (int r = 0; r < s; ++r)
    for (int c = r; c < s; ++c)
      v[idx++] = (r == c) ? M(r, c) : kSqrt2 * M(r, c);
  return v;
}

dmat smat(const dvec& v, int size) {
  dmat M(size, size);
  int idx = 0;
  for (int r = 0; r < size; ++r)
    for (int c = r; c < size; ++c) {
      const double x = (r == c) ? v[idx] : v[idx] / kSqrt2;
      M(r, c) = x;
      M(c, r) = x;
      ++idx;
    }
  return M;
}

StandardForm assemble_standard_form(const SdpProblem& p) {
  StandardForm sf;
  sf.free_dim = p.free_dim;
  int off = 0;
  for (const SdpBlock& b : p.blocks) {
    if (b.size <= 0) throw std::invalid_argument("sdp: empty block");
    if (b.affine && static_cast<int>(b.entries.size()) != tri_size(b.size))
      throw std::invalid_argument("sdp: affine block entry count mismatch");
    sf.block_sizes.push_back(b.size);
    sf.block_offset.push_back(off);
    off += tri_size(b.size);
  }
  sf.svec_dim = off;
  const int ncols = sf.svec_dim + sf.free_dim;

  // Translate one modeling-layer functional into a canonical row. Terms may
  // address free variables and plain matrix-variable blocks; entries of
  // affine blocks are determined quantities and must not be referenced.
  auto lower_into = [&](const LinFun& f, auto&& row) {
    for (const SdpTerm& t : f.terms) {
      if (t.block == kFreeVar) {
        if (t.row < 0 || t.row >= sf.free_dim)
          throw std::invalid_argument("sdp: free index out of range");
        row[sf.svec_dim + t.row] += t.coeff;
        continue;
      }
      if (t.block < 0 || t.block >= static_cast<int>(p.blocks.size()))
        throw std::invalid_argument("sdp: block index out of range");
      if (p.blocks[t.block].affine)
        throw std::invalid_argument("sdp: term addresses an affine block entry");
      const int s = p.blocks[t.block].size;
      if (t.row < 0 || t.col >= s)
        throw std::invalid_argument("sdp: block entry out of range");
      const int j = sf.block_offset[t.block] + tri_index(s, t.row, t.col);
      row[j] += (t.row == t.col) ? t.coeff : t.coeff / kSqrt2;
    }
  };

  const int user_rows = static_cast<int>(p.eq_constraints.size());
  int tie_rows = 0;
  for (const SdpBlock& b : p.blocks)
    if (b.affine) tie_rows += tri_size(b.size);

  sf.A = dmat::Zero(user_rows + tie_rows, ncols);
  sf.rhs = dvec::Zero(user_rows + tie_rows);
  for (int i = 0; i < user_rows; ++i) {
    lower_into(p.eq_constraints[i].first, sf.A.row(i));
    sf.rhs[i] = p.eq_constraints[i].second - p.eq_constraints[i].first.constant;
  }
  // Affine blocks become matrix variables; their defining functionals turn
  // into one tying equality per upper-triangle entry: X_rc - f(vars) = 0.
  int rowi = user_rows;
  for (int bi = 0; bi < static_cast<int>(p.blocks.size()); ++bi) {
    const SdpBlock& b = p.blocks[bi];
    if (!b.affine) continue;
    int e = 0;
    for (int r = 0; r < b.size; ++r)
      for (int c = r; c < b.size; ++c, ++e) {
        const LinFun& f = b.entries[e];
        Eigen::RowVectorXd neg = Eigen::RowVectorXd::Zero(ncols);
        lower_into(f, neg);
        sf.A.row(rowi) -= neg;
        const int j = sf.block_offset[bi] + tri_index(b.size, r, c);
        sf.A(rowi, j) += (r == c) ? 1.0 : 1.0 / kSqrt2;
        sf.rhs[rowi] = f.constant;
        ++rowi;
      }
  }

  sf.c = dvec::Zero(ncols);
  lower_into(p.objective, sf.c);
  sf.c0 = p.objective.constant;
  return sf;
}

void write_debug_dump(const StandardForm& sf, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open dump file: " + path);
  char buf[160];
  auto emit_row = [&](int cons, const dvec& row, double rhs) {
    for (int k = 0; k < static_cast<int>(sf.block_sizes.size()); ++k) {
      const int s = sf.block_sizes[k];
      const dmat M = smat(row.segment(sf.block_offset[k], tri_size(s)), s);
      for (int r = 0; r < s; ++r)
        for (int c = r; c < s; ++c)
          if (M(r, c) != 0.0) {
            std::snprintf(buf, sizeof buf, "%d %d %d %d %.17g\n", cons, k, r, c,
                          M(r, c));
            out << buf;
          }
    }
    for (int j = 0; j < sf.free_dim; ++j)
      if (row[sf.svec_dim + j] != 0.0) {
        std::snprintf(buf, sizeof buf, "%d -1 %d 0 %.17g\n", cons, j,
                      row[sf.svec_dim + j]);
        out << buf;
      }
    if (rhs != 0.0) {
      std::snprintf(buf, sizeof buf, "%d -2 0 0 %.17g\n", cons, rhs);
      out << buf;
    }
  };
  emit_row(-1, sf.c, sf.c0);
  for (int t = 0; t < sf.A.rows(); ++t) emit_row(t, sf.A.row(t), sf.rhs[t]);
}

VerifyReport verify_assignment(const SdpProblem& p, const SdpAssignment& a) {
  VerifyReport rep;
  rep.objective_value = evaluate(p.objective, a);
  for (const auto& [fun, rhs] : p.eq_constraints)
    rep.max_eq_residual =
        std::max(rep.max_eq_residual, std::abs(evaluate(fun, a) - rhs));
  rep.min_block_eigenvalue = std::numeric_limits<double>::infinity();
  for (int bi = 0; bi < static_cast<int>(p.blocks.size()); ++bi) {
    const SdpBlock& b = p.blocks[bi];
    if (b.affine) {
      int e = 0;
      for (int r = 0; r < b.size; ++r)
        for (int c = r; c < b.size; ++c, ++e)
          rep.max_eq_residual =
              std::max(rep.max_eq_residual,
                       std::abs(a.blocks[bi](r, c) - evaluate(b.entries[e], a)));
    }
    Eigen::SelfAdjointEigenSolver<dmat> es(a.blocks[bi],
                                           Eigen::EigenvaluesOnly);
    rep.min_block_eigenvalue =
        std::min(rep.min_block_eigenvalue, es.eigenvalues().minCoeff());
  }
  return rep;
}

namespace {

// One PSD cone iterate: the matrices live per block.
struct ConeVars {
  std::vector<dmat> M;
  double dot(const ConeVars& o) const {
    double s = 0;
    for (size_t k = 0; k < M.size(); ++k)
      s += M[k].cwiseProduct(o.M[k]).sum();
    return s;
  }
};

// Longest step keeping X + alpha * D positive semidefinite, given X = L L^T.
double max_cone_step(const Eigen::LLT<dmat>& llt, const dmat& D) {
  const auto& L = llt.matrixL();
  dmat T = L.solve(D);
  T = L.solve(dmat(T.transpose()));
  Eigen::SelfAdjointEigenSolver<dmat> es(0.5 * (T + T.transpose()),
                                         Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  if (lmin >= -1e-14) return std::numeric_limits<double>::infinity();
  return -1.0 / lmin;
}

}  // namespace

SdpSolution solve(const SdpProblem& p, const SolverConfig& cfg) {
  const StandardForm sf = assemble_standard_form(p);
  const int nb = static_cast<int>(sf.block_sizes.size());
  const int m = static_cast<int>(sf.A.rows());
  const int nf = sf.free_dim;

  SdpSolution sol;
  sol.status = SdpStatus::NumericalFailure;
  if (nb == 0 || (nf > 0 && m == 0)) return sol;

  // Per-constraint and objective matrices in the symmetric inner-product
  // convention: <A_t, X> reproduces row t restricted to the cone part.
  std::vector<std::vector<dmat>> Amat(m);
  std::vector<dmat> Cmat(nb);
  double data_scale = 1.0;
  for (int k = 0; k < nb; ++k) {
    Cmat[k] = smat(sf.c.segment(sf.block_offset[k], tri_size(sf.block_sizes[k])),
                   sf.block_sizes[k]);
    data_scale = std::max(data_scale, Cmat[k].cwiseAbs().maxCoeff());
  }
  for (int t = 0; t < m; ++t) {
    Amat[t].resize(nb);
    for (int k = 0; k < nb; ++k) {
      Amat[t][k] = smat(
          sf.A.row(t).segment(sf.block_offset[k], tri_size(sf.block_sizes[k])),
          sf.block_sizes[k]);
      data_scale = std::max(data_scale, Amat[t][k].cwiseAbs().maxCoeff());
    }
  }
  const dmat Afree = sf.A.rightCols(nf);
  const dvec cfree = sf.c.tail(nf);
  if (m > 0) data_scale = std::max(data_scale, sf.rhs.cwiseAbs().maxCoeff());
  const double dual_scale = 1.0 + sf.c.cwiseAbs().maxCoeff();

  double nu = 0;
  for (int s : sf.block_sizes) nu += s;

  const double tau = std::max(1.0, data_scale);
  ConeVars X, Z;
  for (int s : sf.block_sizes) {
    X.M.push_back(tau * dmat::Identity(s, s));
    Z.M.push_back(tau * dmat::Identity(s, s));
  }
  dvec y = dvec::Zero(m), u = dvec::Zero(nf);

  auto cone_apply_A = [&](const ConeVars& V) {  // t -> <A_t, V>
    dvec out(m);
    for (int t = 0; t < m; ++t) {
      double s = 0;
      for (int k = 0; k < nb; ++k) s += Amat[t][k].cwiseProduct(V.M[k]).sum();
      out[t] = s;
    }
    return out;
  };
  auto cone_apply_At = [&](const dvec& w) {  // sum_t w_t A_t per block
    ConeVars out;
    for (int k = 0; k < nb; ++k) {
      dmat s = dmat::Zero(sf.block_sizes[k], sf.block_sizes[k]);
      for (int t = 0; t < m; ++t) s += w[t] * Amat[t][k];
      out.M.push_back(std::move(s));
    }
    return out;
  };

  std::vector<Eigen::LLT<dmat>> lltX(nb), lltZ(nb);
  std::vector<dmat> Zi(nb);

  auto refresh_factors = [&]() {
    for (int k = 0; k < nb; ++k) {
      lltX[k].compute(X.M[k]);
      lltZ[k].compute(Z.M[k]);
      if (lltX[k].info() != Eigen::Success || lltZ[k].info() != Eigen::Success)
        return false;
      dmat inv = lltZ[k].solve(dmat::Identity(sf.block_sizes[k], sf.block_sizes[k]));
      Zi[k] = 0.5 * (inv + inv.transpose());
    }
    return true;
  };

  // E_k(U) = (X U Z^-1 + Z^-1 U X) / 2, the scaling operator of the search
  // direction; symmetric and positive definite on symmetric matrices.
  auto scale_op = [&](int k, const dmat& U) {
    dmat P = X.M[k] * U * Zi[k];
    return dmat(0.5 * (P + P.transpose()));
  };

  auto finish = [&](SdpStatus st) {
    sol.status = st;
    sol.primal.free_vars = u;
    sol.primal.blocks = X.M;
    double pobj = cfree.dot(u);
    for (int k = 0; k < nb; ++k) pobj += Cmat[k].cwiseProduct(X.M[k]).sum();
    sol.objective_value = pobj + sf.c0;
    dvec rp = m > 0 ? dvec(sf.rhs - cone_apply_A(X) - Afree * u) : dvec();
    sol.max_eq_residual = m > 0 ? rp.cwiseAbs().maxCoeff() : 0.0;
    sol.min_block_eigenvalue = std::numeric_limits<double>::infinity();
    for (int k = 0; k < nb; ++k) {
      Eigen::SelfAdjointEigenSolver<dmat> es(X.M[k], Eigen::EigenvaluesOnly);
      sol.min_block_eigenvalue =
          std::min(sol.min_block_eigenvalue, es.eigenvalues().minCoeff());
    }
    const double dobj = (m > 0 ? sf.rhs.dot(y) : 0.0) + sf.c0;
    sol.relative_gap = std::abs(sol.objective_value - dobj) /
                       (1.0 + std::abs(sol.objective_value) + std::abs(dobj));
    return sol;
  };

  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    if (!refresh_factors()) return finish(SdpStatus::NumericalFailure);

    // Residuals.
    const dvec rp = sf.rhs - cone_apply_A(X) - Afree * u;
    ConeVars Aty = cone_apply_At(y);
    ConeVars Rd;
    double dinf = 0;
    for (int k = 0; k < nb; ++k) {
      Rd.M.push_back(Cmat[k] - Aty.M[k] - Z.M[k]);
      dinf = std::max(dinf, Rd.M.back().cwiseAbs().maxCoeff());
    }
    const dvec rf = cfree - Afree.transpose() * y;
    if (nf > 0) dinf = std::max(dinf, rf.cwiseAbs().maxCoeff());
    const double pinf = m > 0 ? rp.cwiseAbs().maxCoeff() : 0.0;

    const double mu = X.dot(Z) / nu;
    sol.mu_history.push_back(mu);
    double pobj = cfree.dot(u);
    for (int k = 0; k < nb; ++k) pobj += Cmat[k].cwiseProduct(X.M[k]).sum();
    const double dobj = m > 0 ? sf.rhs.dot(y) : 0.0;
    const double relgap =
        std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));

    if (!std::isfinite(mu) || !std::isfinite(pinf) || !std::isfinite(dinf) ||
        mu > 1e30 || (m > 0 && y.cwiseAbs().maxCoeff() > 1e30))
      return finish(SdpStatus::NumericalFailure);
    if (pinf <= cfg.feas_tol && dinf / dual_scale <= cfg.feas_tol &&
        relgap <= cfg.gap_tol)
      return finish(SdpStatus::Optimal);

    sol.iterations = iter + 1;

    // Schur complement M_ts = sum_k <A_t, E_k(A_s)>.
    dmat Schur = dmat::Zero(m, m);
    std::vector<std::vector<dmat>> G(m);
    for (int t = 0; t < m; ++t) {
      G[t].resize(nb);
      for (int k = 0; k < nb; ++k) G[t][k] = scale_op(k, Amat[t][k]);
    }
    for (int t = 0; t < m; ++t)
      for (int s = 0; s <= t; ++s) {
        double v = 0;
        for (int k = 0; k < nb; ++k)
          v += Amat[t][k].cwiseProduct(G[s][k]).sum();
        Schur(t, s) = Schur(s, t) = v;
      }

    // The Schur diagonal spans many orders of magnitude as mu -> 0 (the
    // scaling operator mixes 1/mu directions with O(1) rows), so factor a
    // symmetrically diagonal-scaled copy: on the unit-diagonal matrix a tiny
    // shift stabilizes the factorization without stalling the refinement
    // passes against the true matrix.
    Eigen::LLT<dmat> lltM;
    dvec dsc;
    if (m > 0) dsc = Schur.diagonal().cwiseMax(1e-300).cwiseSqrt();
    if (m > 0 && nf == 0) {
      dmat Sn(m, m);
      for (int t = 0; t < m; ++t)
        for (int s = 0; s < m; ++s) Sn(t, s) = Schur(t, s) / (dsc[t] * dsc[s]);
      double reg = 2e-14;
      bool ok = false;
      for (int tries = 0; tries < 10; ++tries) {
        lltM.compute(dmat(Sn + reg * dmat::Identity(m, m)));
        if (lltM.info() == Eigen::Success) {
          ok = true;
          break;
        }
        reg *= 100.0;
      }
      if (!ok) return finish(SdpStatus::NumericalFailure);
    }

    auto schur_solve = [&](const dvec& r) {
      dvec x = lltM.solve(dvec(r.cwiseQuotient(dsc))).cwiseQuotient(dsc);
      for (int pass = 0; pass < 2; ++pass)
        x += lltM.solve(dvec((r - Schur * x).cwiseQuotient(dsc)))
                 .cwiseQuotient(dsc);
      return x;
    };

    // Free variables are handled through the augmented saddle system
    // [[M, B], [B^T, 0]]: forming the reduced matrix B^T M^-1 B explicitly
    // loses all accuracy once M is ill conditioned, while a full-pivot LU of
    // the (small) augmented matrix stays stable. The free columns are scaled
    // to unit magnitude alongside the Schur rows.
    Eigen::FullPivLU<dmat> luK;
    dvec fsc;
    if (nf > 0) {
      dmat Bn(m, nf);
      for (int j = 0; j < nf; ++j) Bn.col(j) = Afree.col(j).cwiseQuotient(dsc);
      fsc = dvec(nf);
      for (int j = 0; j < nf; ++j)
        fsc[j] = std::max(Bn.col(j).cwiseAbs().maxCoeff(), 1e-300);
      for (int j = 0; j < nf; ++j) Bn.col(j) /= fsc[j];
      dmat K = dmat::Zero(m + nf, m + nf);
      for (int t = 0; t < m; ++t)
        for (int s = 0; s < m; ++s) K(t, s) = Schur(t, s) / (dsc[t] * dsc[s]);
      K.topRightCorner(m, nf) = Bn;
      K.bottomLeftCorner(nf, m) = Bn.transpose();
      luK.compute(K);
      // Degenerate optima can make the saddle matrix singular to working
      // precision; a signed proximal shift keeps it factorable and the
      // refinement passes correct against the unshifted system.
      for (double kreg = 1e-14; !luK.isInvertible() && kreg < 1.0;
           kreg *= 100.0) {
        dmat Kr = K;
        Kr.topLeftCorner(m, m).diagonal().array() += kreg;
        Kr.bottomRightCorner(nf, nf).diagonal().array() -= kreg;
        luK.compute(Kr);
      }
      if (!luK.isInvertible()) return finish(SdpStatus::NumericalFailure);
    }
    // Solves M dy + B du = h, B^T dy = g, with refinement in the saddle form.
    auto aug_solve = [&](const dvec& h, const dvec& g, dvec& dy, dvec& du) {
      dvec rhs(m + nf);
      rhs.head(m) = h.cwiseQuotient(dsc);
      rhs.tail(nf) = g.cwiseQuotient(fsc);
      dvec ab = luK.solve(rhs);
      dy = ab.head(m).cwiseQuotient(dsc);
      du = ab.tail(nf).cwiseQuotient(fsc);
      for (int pass = 0; pass < 2; ++pass) {
        rhs.head(m) = dvec(h - Schur * dy - Afree * du).cwiseQuotient(dsc);
        rhs.tail(nf) = dvec(g - Afree.transpose() * dy).cwiseQuotient(fsc);
        ab = luK.solve(rhs);
        dy += ab.head(m).cwiseQuotient(dsc);
        du += ab.tail(nf).cwiseQuotient(fsc);
      }
    };

    // Solves the saddle system for given residuals of the four Newton
    // equations: A dx + B du = g1, A^T dy + dz = G2, B^T dy = g3,
    // dx + E(dz) = G4.
    auto direction_raw = [&](const dvec& g1, const ConeVars& G2, const dvec& g3,
                             const ConeVars& G4, dvec& dy, dvec& du,
                             ConeVars& dX, ConeVars& dZ) {
      dvec h = g1;
      for (int k = 0; k < nb; ++k) {
        const dmat Tk = G4.M[k] - scale_op(k, G2.M[k]);
        for (int t = 0; t < m; ++t)
          h[t] -= Amat[t][k].cwiseProduct(Tk).sum();
      }
      if (m > 0) {
        if (nf > 0) {
          aug_solve(h, g3, dy, du);
        } else {
          du = dvec();
          dy = schur_solve(h);
        }
      } else {
        dy = dvec();
        du = dvec();
      }
      ConeVars Atdy = cone_apply_At(dy);
      dX.M.clear();
      dZ.M.clear();
      for (int k = 0; k < nb; ++k) {
        dmat dz = G2.M[k] - Atdy.M[k];
        dz = 0.5 * (dz + dz.transpose());
        dmat dx = G4.M[k] - scale_op(k, dz);
        dx = 0.5 * (dx + dx.transpose());
        dZ.M.push_back(std::move(dz));
        dX.M.push_back(std::move(dx));
      }
    };

    // Direction with full-system refinement passes. Back-substituting
    // dx = G4 - E(dz) amplifies roundoff by ||E|| ~ 1/mu, which would erode
    // primal feasibility as mu shrinks; re-solving against the full residuals
    // cancels that error without touching the 1/mu-amplified rows. Near the
    // boundary the correction itself can diverge, so a pass that does not
    // reduce the residual is rolled back rather than kept.
    auto direction = [&](const ConeVars& Rc, dvec& dy, dvec& du, ConeVars& dX,
                         ConeVars& dZ) {
      direction_raw(rp, Rd, rf, Rc, dy, du, dX, dZ);
      double prev = std::numeric_limits<double>::infinity();
      dvec dy0, du0;
      ConeVars dX0, dZ0;
      for (int pass = 0; pass < 4; ++pass) {
        dvec r1 = rp - cone_apply_A(dX) - Afree * du;
        const ConeVars Atdy = cone_apply_At(dy);
        ConeVars r2, r4;
        double rnorm = m > 0 ? r1.cwiseAbs().maxCoeff() : 0.0;
        for (int k = 0; k < nb; ++k) {
          r2.M.push_back(Rd.M[k] - Atdy.M[k] - dZ.M[k]);
          r4.M.push_back(Rc.M[k] - dX.M[k] - scale_op(k, dZ.M[k]));
          rnorm = std::max(rnorm, r2.M.back().cwiseAbs().maxCoeff());
        }
        const dvec r3 = rf - Afree.transpose() * dy;
        if (nf > 0) rnorm = std::max(rnorm, r3.cwiseAbs().maxCoeff());
        if (rnorm >= prev) {
          dy = dy0;
          du = du0;
          dX = dX0;
          dZ = dZ0;
          break;
        }
        if (rnorm <= 1e-14 * data_scale) break;
        prev = rnorm;
        dy0 = dy;
        du0 = du;
        dX0 = dX;
        dZ0 = dZ;
        dvec edy, edu;
        ConeVars edX, edZ;
        direction_raw(r1, r2, r3, r4, edy, edu, edX, edZ);
        if (m > 0) dy += edy;
        if (nf > 0) du += edu;
        for (int k = 0; k < nb; ++k) {
          dX.M[k] += edX.M[k];
          dZ.M[k] += edZ.M[k];
        }
      }
    };

    // Predictor (affine scaling direction).
    ConeVars Rc_aff;
    for (int k = 0; k < nb; ++k) Rc_aff.M.push_back(-X.M[k]);
    dvec dy_a, du_a;
    ConeVars dX_a, dZ_a;
    direction(Rc_aff, dy_a, du_a, dX_a, dZ_a);

    double ap = 1.0, ad = 1.0;
    for (int k = 0; k < nb; ++k) {
      ap = std::min(ap, 0.98 * max_cone_step(lltX[k], dX_a.M[k]));
      ad = std::min(ad, 0.98 * max_cone_step(lltZ[k], dZ_a.M[k]));
    }
    double mu_aff = 0;
    for (int k = 0; k < nb; ++k)
      mu_aff += (X.M[k] + ap * dX_a.M[k])
                    .cwiseProduct(Z.M[k] + ad * dZ_a.M[k])
                    .sum();
    mu_aff = std::max(0.0, mu_aff / nu);
    double sigma = std::pow(mu_aff / mu, 3);
    sigma = std::clamp(sigma, 0.0, 1.0);
    // While the equalities are unfinished, keep the barrier from collapsing
    // to the numerical floor: once the cone blocks reach eps-level
    // eigenvalues the Newton systems can no longer be solved accurately
    // enough for feasibility to recover. Inactive in the common case where
    // feasibility converges first.
    if (std::max(pinf, dinf / dual_scale) > cfg.feas_tol)
      sigma = std::clamp(1e-11 * tau / std::max(mu, 1e-300), sigma, 1.0);

    // Corrector. The second-order term assumes the full affine step; when the
    // cone only admits a fraction of it, the full-step correction is a large
    // overestimate that stalls the line search, so damp it accordingly.
    const double gamma = ap * ad;
    ConeVars Rc;
    for (int k = 0; k < nb; ++k) {
      const dmat D = dX_a.M[k] * dZ_a.M[k] * Zi[k];
      Rc.M.push_back(sigma * mu * Zi[k] - X.M[k] -
                     gamma * 0.5 * (D + D.transpose()));
    }
    dvec dy, du;
    ConeVars dX, dZ;
    direction(Rc, dy, du, dX, dZ);

    ap = 1.0;
    ad = 1.0;
    for (int k = 0; k < nb; ++k) {
      ap = std::min(ap, 0.98 * max_cone_step(lltX[k], dX.M[k]));
      ad = std::min(ad, 0.98 * max_cone_step(lltZ[k], dZ.M[k]));
    }

    // Backtrack until the new iterate is safely inside the cone and the
    // complementarity measure does not grow. Unequal block steps can make
    // <X,Z> grow through the cross terms even for a good direction, so after
    // the first rejection retry with equal step lengths (for which the Newton
    // equations make the measure contract) before shrinking further.
    bool accepted = false;
    for (int tries = 0; tries < 30; ++tries) {
      ConeVars Xn, Zn;
      for (int k = 0; k < nb; ++k) {
        Xn.M.push_back(X.M[k] + ap * dX.M[k]);
        Zn.M.push_back(Z.M[k] + ad * dZ.M[k]);
      }
      bool pd = true;
      for (int k = 0; k < nb && pd; ++k) {
        if (Eigen::LLT<dmat>(Xn.M[k]).info() != Eigen::Success) pd = false;
        if (pd && Eigen::LLT<dmat>(Zn.M[k]).info() != Eigen::Success) pd = false;
      }
      const double mu_new = pd ? Xn.dot(Zn) / nu : 0.0;
      if (pd && mu_new <= 1.01 * mu + 1e-300) {
        X = std::move(Xn);
        Z = std::move(Zn);
        if (m > 0) y += ad * dy;
        if (nf > 0) u += ap * du;
        accepted = true;
        break;
      }
      if (tries == 0 && ap != ad) {
        ap = ad = std::min(ap, ad);
      } else {
        ap *= 0.7;
        ad *= 0.7;
      }
    }
    if (!accepted) return finish(SdpStatus::NumericalFailure);

    bool all_finite = u.allFinite() && (m == 0 || y.allFinite());
    for (int k = 0; k < nb; ++k)
      all_finite = all_finite && finite(X.M[k]) && finite(Z.M[k]);
    if (!all_finite) return finish(SdpStatus::NumericalFailure);
  }
  return finish(SdpStatus::MaxIterations);
}

}  // namespace newton3
