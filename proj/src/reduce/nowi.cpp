#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/SVD>

#include "mor/linalg.hpp"
#include "mor/reduce.hpp"

namespace mor {
namespace {

struct Candidate {
  cplx pole;
  CVec b;
  CVec c;
  double weight;
};

bool is_real(cplx s) { return std::abs(s.imag()) <= 1e-10 * (1.0 + std::abs(s)); }

// Picks `count` poles, highest weight first, keeping conjugate pairs together.
// A pair that does not fit the last slot is replaced by a real pole further
// down the ranking, or failing that by its real part.
std::vector<Candidate> pick_dominant(std::vector<Candidate> cands, int count) {
  std::stable_sort(cands.begin(), cands.end(),
                   [](const Candidate& a, const Candidate& b) { return a.weight > b.weight; });
  std::vector<Candidate> out;
  std::vector<bool> used(cands.size(), false);
  const Candidate* spare = nullptr;
  for (std::size_t i = 0; i < cands.size() && static_cast<int>(out.size()) < count; ++i) {
    if (used[i]) continue;
    const Candidate& ci = cands[i];
    if (is_real(ci.pole)) {
      out.push_back(ci);
      out.back().pole = ci.pole.real();
      used[i] = true;
      continue;
    }
    // find the conjugate partner
    std::size_t j = 0;
    for (; j < cands.size(); ++j) {
      if (j != i && !used[j] &&
          std::abs(cands[j].pole - std::conj(ci.pole)) <= 1e-8 * (1.0 + std::abs(ci.pole))) {
        break;
      }
    }
    if (count - static_cast<int>(out.size()) >= 2) {
      Candidate up = ci.pole.imag() > 0 ? ci : (j < cands.size() ? cands[j] : ci);
      if (up.pole.imag() < 0) {
        up.pole = std::conj(up.pole);
        up.b = up.b.conjugate();
        up.c = up.c.conjugate();
      }
      Candidate lo = up;
      lo.pole = std::conj(up.pole);
      lo.b = up.b.conjugate();
      lo.c = up.c.conjugate();
      out.push_back(lo);
      out.push_back(up);
      used[i] = true;
      if (j < cands.size()) used[j] = true;
    } else if (!spare) {
      spare = &ci;
    }
  }
  if (static_cast<int>(out.size()) < count && spare) {
    Candidate r = *spare;
    r.pole = spare->pole.real();
    r.b = CVec(spare->b.real().cast<cplx>());
    r.c = CVec(spare->c.real().cast<cplx>());
    if (r.b.norm() == 0.0) r.b = CVec(spare->b.imag().cast<cplx>());
    if (r.c.norm() == 0.0) r.c = CVec(spare->c.imag().cast<cplx>());
    out.push_back(r);
  }
  return out;
}

std::vector<Candidate> pole_candidates(const StateSpace& sys) {
  const PoleResidue pr = to_pole_residue(sys);
  std::vector<Candidate> out;
  for (Eigen::Index k = 0; k < pr.poles.size(); ++k) {
    const double w = pr.c.col(k).norm() * pr.b.col(k).norm() /
                     (2.0 * std::max(std::abs(pr.poles(k).real()), 1e-300));
    out.push_back({pr.poles(k), pr.b.col(k), pr.c.col(k), w});
  }
  return out;
}

// Leading singular directions of F[G](s): b maximizes |F b|, c maximizes |c^T F|.
void leading_directions(const FRealization& F, cplx s, CVec& b, CVec& c) {
  const CMat f = eval_f(F, s);
  Eigen::JacobiSVD<CMat> svd(f, Eigen::ComputeThinU | Eigen::ComputeThinV);
  b = svd.matrixV().col(0);
  c = svd.matrixU().col(0).conjugate();
}

// Shifts and directions for a conjugate-closed list of poles (mirrored).
InterpolationData directions_from_svd(const FRealization& F, const std::vector<cplx>& shifts) {
  InterpolationData d;
  const Eigen::Index r = static_cast<Eigen::Index>(shifts.size());
  d.shifts.resize(r);
  d.b.resize(F.BF.cols(), r);
  d.c.resize(F.CF.rows(), r);
  for (Eigen::Index i = 0; i < r; ++i) {
    cplx s = shifts[i];
    if (is_real(s)) s = s.real();
    d.shifts(i) = s;
    CVec b, c;
    leading_directions(F, s.imag() < 0 ? std::conj(s) : s, b, c);
    if (s.imag() < 0) {
      b = b.conjugate();
      c = c.conjugate();
    }
    if (is_real(s)) {
      // real data: the singular vectors are real up to a phase
      auto realify = [](CVec v) {
        Eigen::Index k;
        v.cwiseAbs().maxCoeff(&k);
        const cplx phase = v(k) / std::abs(v(k));
        return CVec((v / phase).real().cast<cplx>());
      };
      b = realify(b);
      c = realify(c);
    }
    d.b.col(i) = b;
    d.c.col(i) = c;
  }
  return d;
}

double min_abs_real(const CVec& v) {
  double m = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < v.size(); ++i) m = std::min(m, std::abs(v(i).real()));
  return m;
}

double max_abs(const CVec& v) {
  double m = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) m = std::max(m, std::abs(v(i)));
  return m;
}

// Moves any shift that sits on a pole of the F realization or of A_r.
bool avoid_spectra(CVec& shifts, const CVec& spec) {
  bool moved = false;
  for (Eigen::Index i = 0; i < shifts.size(); ++i) {
    const double h = 1e-8 * (1.0 + std::abs(shifts(i)));
    for (Eigen::Index k = 0; k < spec.size(); ++k) {
      if (std::abs(shifts(i) - spec(k)) < h) {
        shifts(i) += h;
        moved = true;
        break;
      }
    }
  }
  return moved;
}

CVec eigenvalues(const Mat& A) {
  if (A.rows() == 0) return CVec(0);
  Eigen::EigenSolver<Mat> es(A, false);
  return es.eigenvalues();
}

Mat range_basis(const Mat& Z) {
  if (Z.cols() == 0) return Mat(Z.rows(), 0);
  Eigen::JacobiSVD<Mat> svd(Z, Eigen::ComputeThinU);
  const Vec& s = svd.singularValues();
  Eigen::Index k = 0;
  while (k < s.size() && s(k) > 1e-13 * s(0) && s(k) > 0.0) ++k;
  return svd.matrixU().leftCols(k);
}

}  // namespace

InterpolationData initial_data(const StateSpace& G, const WeightFilter& W,
                               const NowiConfig& cfg) {
  const StateSpace G0 = G.with_D(Mat::Zero(G.outputs(), G.inputs()));
  const FRealization F = build_f_realization(G0, W);
  const int r = cfg.order;
  std::vector<cplx> shifts;

  switch (cfg.init) {
    case InitStrategy::MirroredDominant: {
      int nu = std::min({cfg.weight_poles, r, static_cast<int>(W.order())});
      std::vector<Candidate> wc;
      for (Eigen::Index k = 0; k < W.order(); ++k) {
        const double w = W.e().col(k).norm() * W.f().col(k).norm() /
                         (2.0 * std::abs(W.gamma()(k).real()));
        wc.push_back({W.gamma()(k), CVec(), CVec(), w});
      }
      std::vector<Candidate> picked;
      if (nu > 0) picked = pick_dominant(wc, nu);
      const int rest = r - static_cast<int>(picked.size());
      std::vector<Candidate> sp = pick_dominant(pole_candidates(G0), rest);
      picked.insert(picked.end(), sp.begin(), sp.end());
      for (const auto& p : picked) shifts.push_back(-p.pole);
      break;
    }
    case InitStrategy::LogSpaced: {
      const CVec lam = eigenvalues(G.A());
      const double lo = min_abs_real(lam), hi = std::max(max_abs(lam), lo);
      for (double s : logspace(lo, hi, r)) shifts.push_back(s);
      break;
    }
    case InitStrategy::Random: {
      const CVec lam = eigenvalues(G.A());
      const double lo = min_abs_real(lam), hi = std::max(max_abs(lam), lo);
      std::mt19937_64 rng(cfg.seed);
      std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
      std::normal_distribution<double> nd;
      InterpolationData d;
      d.shifts.resize(r);
      d.b.resize(G.inputs(), r);
      d.c.resize(G.outputs(), r);
      for (int i = 0; i < r; ++i) {
        d.shifts(i) = std::exp(u(rng));
        Vec b(G.inputs()), c(G.outputs());
        for (Eigen::Index k = 0; k < b.size(); ++k) b(k) = nd(rng);
        for (Eigen::Index k = 0; k < c.size(); ++k) c(k) = nd(rng);
        d.b.col(i) = (b / b.norm()).cast<cplx>();
        d.c.col(i) = (c / c.norm()).cast<cplx>();
      }
      return d;
    }
  }
  InterpolationData d = directions_from_svd(F, shifts);
  CVec spec(F.order());
  spec << eigenvalues(F.A), eigenvalues(F.Aw);
  avoid_spectra(d.shifts, spec);
  return d;
}

namespace {

struct Iterate {
  StateSpace system;
  Mat Zr;
  ProjectionPair proj;
  InterpolationData data;
  bool stable = false;
  bool regularized = false;
  double residual = std::numeric_limits<double>::quiet_NaN();
};

}  // namespace

ReducedModel nowi(const StateSpace& G, const WeightFilter& W, const NowiConfig& cfg,
                  const std::optional<InterpolationData>& init) {
  validate_membership(G, W);
  const Eigen::Index n = G.order();
  if (cfg.order < 1 || cfg.order > n) {
    fail(ErrorKind::UsageError, "reduced order must lie in [1, " + std::to_string(n) + "]");
  }
  if (!(cfg.tol > 0.0)) fail(ErrorKind::UsageError, "tolerance must be positive");

  const Mat D = G.D();
  const StateSpace G0 = G.with_D(Mat::Zero(G.outputs(), G.inputs()));
  const FRealization F = build_f_realization(G0, W);

  bool exact = cfg.exactness.value_or(W.order() <= n);
  Mat zbasis;
  if (exact) {
    zbasis = range_basis(F.Z);
    if (cfg.order + zbasis.cols() > n) {
      if (cfg.exactness.has_value()) {
        fail(ErrorKind::UsageError,
             "exactness mode needs order + rank(Z) <= n, got " +
                 std::to_string(cfg.order + zbasis.cols()));
      }
      exact = false;
      zbasis.resize(n, 0);
    }
  } else {
    zbasis.resize(n, 0);
  }

  InterpolationData data = init ? *init : initial_data(G0, W, cfg);
  if (data.shifts.size() != cfg.order) {
    fail(ErrorKind::UsageError, "initial interpolation data has the wrong length");
  }
  CVec fspec(F.order());
  fspec << eigenvalues(F.A), eigenvalues(F.Aw);

  ReducedModel model;
  model.method = "nowi";
  model.requested_order = cfg.order;
  model.exactness = exact;

  std::optional<Iterate> best;
  Iterate last;
  for (int it = 1; it <= cfg.max_iter; ++it) {
    model.shift_perturbed |= avoid_spectra(data.shifts, fspec);
    auto [Vraw, Wraw] = build_subspaces(F, data);
    Iterate cur;
    cur.data = data;
    cur.proj = extract_projection(Vraw, Wraw, n, data.shifts, zbasis);
    const Mat& V = cur.proj.V;
    const Mat& Wr = cur.proj.W;
    const Mat Ar = Wr.transpose() * G0.A() * V;
    const Mat Br = Wr.transpose() * G0.B();
    const Mat Cr = G0.C() * V;
    cur.stable = is_stable(Ar);

    Mat Dr = Mat::Zero(G.outputs(), G.inputs());
    const bool want_d = cfg.feedthrough_each_iteration || it == cfg.max_iter;
    try {
      const Feedthrough ft = compute_feedthrough(G0, W, F, cur.proj, Ar, Br);
      cur.Zr = ft.Zr;
      if (want_d) Dr = ft.Dr;
      cur.regularized = ft.regularized;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::SingularOperator) throw;
      cur.Zr = Mat::Zero(Ar.rows(), W.order());
    }
    cur.system = StateSpace(Ar, Br, Cr, Dr);

    IterationRecord rec;
    rec.iteration = it;
    rec.shifts.assign(data.shifts.data(), data.shifts.data() + data.shifts.size());
    rec.stable = cur.stable;
    rec.max_interpolatory_rel = std::numeric_limits<double>::quiet_NaN();
    if (cur.stable) {
      try {
        rec.max_interpolatory_rel =
            interpolatory_residuals(G0, cur.system, W).max_interpolatory_rel();
        cur.residual = rec.max_interpolatory_rel;
      } catch (const Error&) {
      }
    }

    // Next shifts: mirrored reduced poles.
    std::vector<Candidate> cands;
    bool ok = true;
    try {
      cands = pole_candidates(cur.system);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DefectiveMatrix) throw;
      ok = false;
    }
    InterpolationData next = data;
    if (ok) {
      for (auto& cd : cands) {
        if (cd.pole.real() >= 0.0 && cfg.stability_repair) {
          cd.pole = cplx(-std::abs(cd.pole.real()), cd.pole.imag());
        }
      }
      std::vector<Candidate> picked;
      if (static_cast<int>(cands.size()) == cfg.order) {
        picked = cands;
      } else {
        // Exactness mode carries extra poles from Ran(Z). Follow the poles
        // nearest the current shifts so the selection does not jump.
        for (auto& cd : cands) {
          double d = std::numeric_limits<double>::infinity();
          for (Eigen::Index i = 0; i < data.shifts.size(); ++i) {
            d = std::min(d, std::abs(-cd.pole - data.shifts(i)) / std::abs(data.shifts(i)));
          }
          cd.weight = 1.0 / (d + 1e-300);
        }
        picked = pick_dominant(cands, cfg.order);
      }
      next.shifts.resize(cfg.order);
      next.b.resize(G.inputs(), cfg.order);
      next.c.resize(G.outputs(), cfg.order);
      for (int i = 0; i < cfg.order; ++i) {
        next.shifts(i) = -picked[i].pole;
        next.b.col(i) = picked[i].b;
        next.c.col(i) = picked[i].c;
      }
      CVec rspec = eigenvalues(Ar);
      model.shift_perturbed |= avoid_spectra(next.shifts, rspec);
    }
    rec.shift_change = ok ? shift_change(data.shifts, next.shifts)
                          : std::numeric_limits<double>::infinity();
    model.history.push_back(rec);
    model.iterations = it;

    if (cur.stable && !std::isnan(cur.residual) &&
        (!best || !(best->residual <= cur.residual))) {
      best = cur;
    }
    last = cur;
    if (!ok) break;
    data = next;
    if (rec.shift_change <= cfg.tol) {
      model.converged = true;
      break;
    }
  }

  model.max_iter_reached = !model.converged;
  if (model.converged && !last.stable && best) {
    // the shifts settled on an unstable model; hand back the best stable one
    model.converged = false;
  }
  const Iterate& chosen = (model.converged || !best) ? last : *best;
  model.stable = chosen.stable;
  model.feedthrough_regularized = chosen.regularized;
  model.Zr = chosen.Zr;
  model.projection = chosen.proj;
  model.data = chosen.data;
  const StateSpace& s = chosen.system;
  model.system = StateSpace(s.A(), s.B(), s.C(), Mat(s.D() + D));
  if (!model.stable && !cfg.stability_repair) {
    fail(ErrorKind::UnstableReducedModel, "final reduced model is unstable");
  }
  if (model.stable) {
    try {
      model.diagnostics = residual_report(G, model.system, W);
      model.has_diagnostics = true;
    } catch (const Error&) {
      model.has_diagnostics = false;
    }
  }
  return model;
}

}  // namespace mor
