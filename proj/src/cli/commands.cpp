#include "mor/cli.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <thread>

#include <Eigen/SVD>

#include "mor/io.hpp"
#include "mor/linalg.hpp"

namespace mor::cli {
namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

StateSpace zero_system(Eigen::Index p, Eigen::Index m) {
  return StateSpace(Mat(0, 0), Mat(0, m), Mat(p, 0), Mat::Zero(p, m));
}

ReducedModel run_method(const std::string& method, const StateSpace& G, const WeightFilter& W,
                        int order, const NowiConfig& base) {
  if (order < 1 || order > G.order()) {
    fail(ErrorKind::UsageError, "order " + std::to_string(order) + " outside [1, " +
                                    std::to_string(G.order()) + "]");
  }
  if (method == "nowi") {
    NowiConfig cfg = base;
    cfg.order = order;
    return nowi(G, W, cfg);
  }
  if (method == "fwbt") return fwbt(G, W, order);
  fail(ErrorKind::UsageError, "unknown method '" + method + "'");
}

struct Metrics {
  double h2 = std::numeric_limits<double>::quiet_NaN();
  double h2_rel = std::numeric_limits<double>::quiet_NaN();
  double hinf = std::numeric_limits<double>::quiet_NaN();
  double hinf_rel = std::numeric_limits<double>::quiet_NaN();
  double interp = std::numeric_limits<double>::quiet_NaN();
  double halevi = std::numeric_limits<double>::quiet_NaN();
};

Metrics evaluate(const StateSpace& G, const WeightFilter& W, const ReducedModel& model,
                 const std::vector<double>& grid, double gnorm, double ghinf) {
  Metrics m;
  if (model.stable) {
    m.h2 = weighted_error_norm(G, model.system, W);
    m.h2_rel = gnorm > 0 ? m.h2 / gnorm : m.h2;
  }
  m.hinf = weighted_hinf_sampled(difference(G, model.system), W, grid);
  m.hinf_rel = ghinf > 0 ? m.hinf / ghinf : m.hinf;
  if (model.has_diagnostics) {
    m.interp = model.diagnostics.max_interpolatory_rel();
    m.halevi = model.diagnostics.max_halevi_rel();
  }
  return m;
}

struct Problem {
  io::LoadedProblem lp;
  std::vector<double> grid;
  double gnorm;
  double ghinf;
};

Problem load(const RunConfig& cfg) {
  Problem p{io::load_manifest(cfg.manifest), {}, 0.0, 0.0};
  const StateSpace& G = p.lp.system;
  const WeightFilter& W = p.lp.weight;
  p.grid = cfg.grid ? grid_points(*cfg.grid) : default_grid(G, W);
  p.gnorm = weighted_error_norm(G, zero_system(G.outputs(), G.inputs()), W);
  p.ghinf = weighted_hinf_sampled(G, W, p.grid);
  return p;
}

std::string shifts_text(const std::vector<cplx>& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ';';
    out += num(s[i].real());
    out += s[i].imag() < 0 ? "-" : "+";
    out += num(std::abs(s[i].imag()));
    out += 'j';
  }
  return out;
}

}  // namespace

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::UsageError:
      return 2;
    case ErrorKind::ParseError:
    case ErrorKind::DimensionMismatch:
    case ErrorKind::NotInWeightedH2:
      return 3;
    default:
      return 4;
  }
}

GridSpec parse_grid(const std::string& text) {
  GridSpec g;
  std::istringstream in(text);
  std::string a, b, c;
  if (!std::getline(in, a, ':') || !std::getline(in, b, ':') || !std::getline(in, c)) {
    fail(ErrorKind::UsageError, "grid must be MIN:MAX:POINTS, got '" + text + "'");
  }
  try {
    std::size_t used = 0;
    g.min = std::stod(a, &used);
    if (used != a.size()) throw std::invalid_argument(a);
    g.max = std::stod(b, &used);
    if (used != b.size()) throw std::invalid_argument(b);
    g.points = std::stoi(c, &used);
    if (used != c.size()) throw std::invalid_argument(c);
  } catch (const std::logic_error&) {
    fail(ErrorKind::UsageError, "grid must be MIN:MAX:POINTS, got '" + text + "'");
  }
  if (!(g.min >= 0.0) || !(g.min < g.max) || g.points < 1) {
    fail(ErrorKind::UsageError, "grid needs 0 <= MIN < MAX and POINTS >= 1");
  }
  return g;
}

std::vector<double> grid_points(const GridSpec& g) {
  if (g.min > 0.0) return logspace(g.min, g.max, g.points);
  std::vector<double> w;
  if (g.points == 1) return {g.min};
  for (int i = 0; i < g.points; ++i) {
    w.push_back(g.min + (g.max - g.min) * i / (g.points - 1));
  }
  return w;
}

std::vector<double> default_grid(const StateSpace& G, const WeightFilter& W) {
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const Mat* A : {&G.A(), &W.A()}) {
    if (A->rows() == 0) continue;
    Eigen::EigenSolver<Mat> es(*A, false);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      const double a = std::abs(es.eigenvalues()(i));
      if (a > 0) lo = std::min(lo, a);
      hi = std::max(hi, a);
    }
  }
  if (!(hi > 0.0)) return logspace(1e-3, 1e3, 400);
  return logspace(lo / 100.0, hi * 100.0, 400);
}

double weighted_hinf_sampled(const StateSpace& X, const WeightFilter& W,
                             const std::vector<double>& omega) {
  return hinf_norm_sampled(cascade_with_weight(X, W), omega);
}

void cmd_reduce(const RunConfig& cfg) {
  if (cfg.orders.size() != 1) fail(ErrorKind::UsageError, "reduce takes exactly one --order");
  if (cfg.methods.size() != 1) fail(ErrorKind::UsageError, "reduce takes exactly one --method");
  const Problem p = load(cfg);
  const StateSpace& G = p.lp.system;
  const WeightFilter& W = p.lp.weight;

  const auto t0 = std::chrono::steady_clock::now();
  const ReducedModel model = run_method(cfg.methods[0], G, W, cfg.orders[0], cfg.nowi);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const Metrics m = evaluate(G, W, model, p.grid, p.gnorm, p.ghinf);

  std::filesystem::create_directories(cfg.out);
  io::write_model_dir(cfg.out, model.system);

  std::ostringstream rep;
  rep << "method,requested_order,order,weighted_h2_error,relative_weighted_h2_error,"
         "weighted_hinf_error_sampled,relative_weighted_hinf_error_sampled,"
         "max_rel_interpolatory_residual,max_rel_halevi_residual,iterations,converged,"
         "stable,exactness,wall_time_s\n";
  rep << model.method << ',' << model.requested_order << ',' << model.order() << ','
      << num(m.h2) << ',' << num(m.h2_rel) << ',' << num(m.hinf) << ',' << num(m.hinf_rel)
      << ',' << num(m.interp) << ',' << num(m.halevi) << ',' << model.iterations << ','
      << (model.converged ? 1 : 0) << ',' << (model.stable ? 1 : 0) << ','
      << (model.exactness ? 1 : 0) << ',' << num(wall) << '\n';
  io::write_text_atomic(cfg.out / "report.csv", rep.str());

  std::ostringstream hist;
  hist << "iteration,shift_change,max_rel_interpolatory_residual,stable,shifts\n";
  for (const auto& r : model.history) {
    hist << r.iteration << ',' << num(r.shift_change) << ',' << num(r.max_interpolatory_rel)
         << ',' << (r.stable ? 1 : 0) << ',' << shifts_text(r.shifts) << '\n';
  }
  io::write_text_atomic(cfg.out / "history.csv", hist.str());
}

void cmd_sweep(const RunConfig& cfg) {
  if (cfg.orders.empty()) fail(ErrorKind::UsageError, "sweep needs --order");
  const Problem p = load(cfg);
  const StateSpace& G = p.lp.system;
  const WeightFilter& W = p.lp.weight;
  for (const auto& method : cfg.methods) {
    if (method != "nowi" && method != "fwbt") {
      fail(ErrorKind::UsageError, "unknown method '" + method + "'");
    }
  }

  struct Row {
    std::string method;
    int order;
    std::string text;
  };
  std::vector<Row> rows;
  for (const auto& method : cfg.methods) {
    for (int order : cfg.orders) rows.push_back({method, order, {}});
  }
  std::filesystem::create_directories(cfg.out / "models");

  auto work = [&](Row& row) {
    std::ostringstream os;
    os << row.method << ',' << row.order << ',';
    try {
      const ReducedModel model = run_method(row.method, G, W, row.order, cfg.nowi);
      const Metrics m = evaluate(G, W, model, p.grid, p.gnorm, p.ghinf);
      const std::string dir = row.method + "_" + std::to_string(row.order);
      io::write_model_dir(cfg.out / "models" / dir, model.system);
      os << model.order() << ",ok," << num(m.h2) << ',' << num(m.h2_rel) << ','
         << num(m.hinf_rel) << ',' << num(m.interp) << ',' << model.iterations << ','
         << (model.converged ? 1 : 0) << ',' << (model.stable ? 1 : 0) << ",models/" << dir
         << ",";
    } catch (const Error& e) {
      os << ",error,nan,nan,nan,nan,0,0,0,," << to_string(e.kind()) << ':' << quote(e.what());
    }
    row.text = os.str();
  };

  const int threads = std::max(1, std::min<int>(cfg.threads, static_cast<int>(rows.size())));
  if (threads == 1) {
    for (auto& r : rows) work(r);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < rows.size(); i = next++) work(rows[i]);
      });
    }
    for (auto& th : pool) th.join();
  }

  std::ostringstream out;
  out << "method,requested_order,order,status,weighted_h2_error,relative_weighted_h2_error,"
         "relative_weighted_hinf_error_sampled,max_rel_interpolatory_residual,iterations,"
         "converged,stable,model,error\n";
  for (const auto& r : rows) out << r.text << '\n';
  io::write_text_atomic(cfg.out / "sweep.csv", out.str());
}

void cmd_residuals(const RunConfig& cfg) {
  if (!cfg.model_dir) fail(ErrorKind::UsageError, "residuals needs --model DIR");
  const io::LoadedProblem lp = io::load_manifest(cfg.manifest);
  const StateSpace Gr = io::load_model_dir(*cfg.model_dir);
  if (Gr.inputs() != lp.system.inputs() || Gr.outputs() != lp.system.outputs()) {
    fail(ErrorKind::DimensionMismatch, "reduced model shape does not match the system");
  }
  const ResidualReport r = residual_report(lp.system, Gr, lp.weight);
  auto vmax = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, x);
    return m;
  };
  std::ostringstream os;
  os << "condition,interpolatory_abs,interpolatory_rel,halevi_equation,halevi_abs,halevi_rel\n";
  os << "right," << num(vmax(r.right_abs)) << ',' << num(vmax(r.right_rel)) << ",b,"
     << num(r.rho_b) << ',' << num(r.rho_b_rel) << '\n';
  os << "left," << num(vmax(r.left_abs)) << ',' << num(vmax(r.left_rel)) << ",c,"
     << num(r.rho_c) << ',' << num(r.rho_c_rel) << '\n';
  os << "bitangential," << num(vmax(r.bitangential_abs)) << ','
     << num(vmax(r.bitangential_rel)) << ",a," << num(r.rho_a) << ',' << num(r.rho_a_rel)
     << '\n';
  os << "kernel," << num(r.kernel_abs) << ',' << num(r.kernel_rel) << ",d," << num(r.rho_d)
     << ',' << num(r.rho_d_rel) << '\n';
  std::filesystem::create_directories(cfg.out);
  io::write_text_atomic(cfg.out / "residuals.csv", os.str());
}

void cmd_sample(const RunConfig& cfg) {
  const io::LoadedProblem lp = io::load_manifest(cfg.manifest);
  const StateSpace& G = lp.system;
  const WeightFilter& W = lp.weight;
  const std::vector<double> grid = cfg.grid ? grid_points(*cfg.grid) : default_grid(G, W);

  std::optional<StateSpace> Gr;
  if (cfg.model_dir) {
    Gr = io::load_model_dir(*cfg.model_dir);
  } else if (!cfg.orders.empty()) {
    if (cfg.orders.size() != 1 || cfg.methods.size() != 1) {
      fail(ErrorKind::UsageError, "sample reduces with exactly one --method and --order");
    }
    Gr = run_method(cfg.methods[0], G, W, cfg.orders[0], cfg.nowi).system;
  }
  std::optional<StateSpace> E;
  if (Gr) E = cascade_with_weight(difference(G, *Gr), W);

  auto sigma = [](const StateSpace& s, double w) {
    const CMat g = eval_transfer(s, cplx(0.0, w));
    if (g.size() == 0) return 0.0;
    Eigen::JacobiSVD<CMat> svd(g);
    return svd.singularValues()(0);
  };
  std::ostringstream os;
  os << "omega,sigma_G";
  if (Gr) os << ",sigma_Gr,sigma_weighted_error";
  os << '\n';
  for (double w : grid) {
    os << num(w) << ',' << num(sigma(G, w));
    if (Gr) os << ',' << num(sigma(*Gr, w)) << ',' << num(sigma(*E, w));
    os << '\n';
  }
  std::filesystem::create_directories(cfg.out);
  io::write_text_atomic(cfg.out / "freqresp.csv", os.str());
}

}  // namespace mor::cli
