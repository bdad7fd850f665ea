#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mor/cli.hpp"

namespace {

std::vector<int> parse_orders(const std::string& text) {
  std::vector<int> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::logic_error&) {
      used = 0;
    }
    if (item.empty() || used != item.size()) {
      mor::fail(mor::ErrorKind::UsageError, "bad order '" + item + "'");
    }
    out.push_back(v);
  }
  return out;
}

std::vector<std::string> parse_methods(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item != "nowi" && item != "fwbt") {
      mor::fail(mor::ErrorKind::UsageError, "unknown method '" + item + "'");
    }
    out.push_back(item);
  }
  if (out.empty()) mor::fail(mor::ErrorKind::UsageError, "empty --method");
  return out;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c == '\n' ? ' ' : c;
  }
  return out;
}

int threads_from_env() {
  const char* v = std::getenv("MOR_THREADS");
  if (!v || !*v) return 1;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 1) mor::fail(mor::ErrorKind::UsageError, "MOR_THREADS must be a positive integer");
  return static_cast<int>(std::min<long>(n, 256));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"frequency-weighted H2 model reduction"};
  app.require_subcommand(1);

  std::string manifest, methods = "nowi", orders, init = "mirrored", exactness = "auto";
  std::string out = ".", grid, model;
  double tol = 1e-4;
  int max_iter = 100;
  std::uint64_t seed = 0;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--manifest", manifest, "system manifest (key=value)")->required();
    sub->add_option("--method", methods, "nowi|fwbt, comma separated for sweep");
    sub->add_option("--order", orders, "reduced order(s), N[,N...]");
    sub->add_option("--tol", tol, "shift-change tolerance");
    sub->add_option("--max-iter", max_iter, "iteration cap");
    sub->add_option("--init", init, "mirrored|log|random")
        ->check(CLI::IsMember({"mirrored", "log", "random"}));
    sub->add_option("--seed", seed, "seed for random initialization");
    sub->add_option("--exactness", exactness, "on|off|auto")
        ->check(CLI::IsMember({"on", "off", "auto"}));
    sub->add_option("--out", out, "output directory");
    sub->add_option("--grid", grid, "MIN:MAX:POINTS frequency grid");
    sub->add_option("--model", model, "directory holding model.{A,B,C,D}.mtx");
  };
  CLI::App* reduce = app.add_subcommand("reduce", "reduce one system to one order");
  CLI::App* sweep = app.add_subcommand("sweep", "error/residual table over orders and methods");
  CLI::App* residuals = app.add_subcommand("residuals", "interpolatory and Halevi residuals");
  CLI::App* sample = app.add_subcommand("sample", "sigma values on a frequency grid");
  for (auto* s : {reduce, sweep, residuals, sample}) common(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    mor::cli::RunConfig cfg;
    cfg.manifest = manifest;
    cfg.methods = parse_methods(methods);
    if (!orders.empty()) cfg.orders = parse_orders(orders);
    cfg.out = out;
    if (!grid.empty()) cfg.grid = mor::cli::parse_grid(grid);
    if (!model.empty()) cfg.model_dir = model;
    cfg.threads = threads_from_env();
    if (!(tol > 0)) mor::fail(mor::ErrorKind::UsageError, "--tol must be positive");
    if (max_iter < 1) mor::fail(mor::ErrorKind::UsageError, "--max-iter must be positive");
    cfg.nowi.tol = tol;
    cfg.nowi.max_iter = max_iter;
    cfg.nowi.seed = seed;
    cfg.nowi.init = init == "log"      ? mor::InitStrategy::LogSpaced
                    : init == "random" ? mor::InitStrategy::Random
                                       : mor::InitStrategy::MirroredDominant;
    if (exactness != "auto") cfg.nowi.exactness = exactness == "on";

    if (reduce->parsed()) {
      mor::cli::cmd_reduce(cfg);
    } else if (sweep->parsed()) {
      mor::cli::cmd_sweep(cfg);
    } else if (residuals->parsed()) {
      mor::cli::cmd_residuals(cfg);
    } else {
      mor::cli::cmd_sample(cfg);
    }
  } catch (const mor::Error& e) {
    std::cerr << "error: kind=" << mor::to_string(e.kind()) << " message=\"" << escape(e.what())
              << "\"\n";
    return mor::cli::exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: kind=Internal message=\"" << escape(e.what()) << "\"\n";
    return 4;
  }
  return 0;
}
