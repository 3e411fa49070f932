// Experiment harness for the conservative KdV DG solver. Drives the shared
// library through its C API and writes plain CSV artifacts:
//   convergence tables, invariant time series, and solution snapshots.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kdvdg.h"

namespace {

std::string fmt(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string fmt_short(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", value);
  return buf;
}

struct CsvWriter {
  explicit CsvWriter(const std::filesystem::path& path) : out(path) {
    if (!out) throw std::runtime_error("cannot open " + path.string());
  }
  void row(const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      out << cells[i];
    }
    out << '\n';
  }
  std::ofstream out;
};

struct ProblemHandle {
  kdv_problem* ptr = nullptr;
  ProblemHandle(const std::string& name, double eps) {
    if (kdv_problem_create(name.c_str(), eps, &ptr) != KDV_OK) {
      throw std::runtime_error(std::string("problem setup failed: ") + kdv_last_error());
    }
  }
  ~ProblemHandle() { kdv_problem_destroy(ptr); }
  ProblemHandle(const ProblemHandle&) = delete;
  ProblemHandle& operator=(const ProblemHandle&) = delete;
};

struct SimHandle {
  kdv_sim* ptr = nullptr;
  SimHandle(const kdv_problem* problem, const kdv_sim_options& opts) {
    if (kdv_sim_create(problem, &opts, &ptr) != KDV_OK) {
      throw std::runtime_error(std::string("simulation setup failed: ") + kdv_last_error());
    }
  }
  ~SimHandle() { kdv_sim_destroy(ptr); }
  SimHandle(const SimHandle&) = delete;
  SimHandle& operator=(const SimHandle&) = delete;
};

struct Config {
  std::string problem = "linear";
  int degree = 2;
  std::vector<int> elements{32};
  double final_time = 0.1;
  double dt = 0.0;  // 0 means the problem's default rule
  double eps = 1.0;
  double tol = 1e-12;
  std::string out_dir = ".";
  std::string mode = "convergence";
  std::vector<double> snap_times{0.0};
};

kdv_sim_options make_options(const Config& cfg, const kdv_problem* problem, int n_elems,
                             double final_time) {
  kdv_sim_options opts;
  kdv_sim_options_defaults(&opts);
  opts.degree = cfg.degree;
  opts.num_elements = n_elems;
  opts.final_time = final_time;
  opts.tol_residual = cfg.tol;
  if (cfg.dt > 0.0) {
    opts.dt = cfg.dt;
  } else {
    if (kdv_problem_default_dt(problem, cfg.degree, n_elems, &opts.dt) != KDV_OK) {
      throw std::runtime_error(kdv_last_error());
    }
  }
  return opts;
}

struct ConvergenceRow {
  int n_elems = 0;
  bool ok = false;
  double err_u = 0.0, err_q = 0.0, err_p = 0.0;
  std::string message;
};

ConvergenceRow run_convergence_row(const Config& cfg, int n_elems) {
  ConvergenceRow row;
  row.n_elems = n_elems;
  try {
    ProblemHandle problem(cfg.problem, cfg.eps);
    SimHandle sim(problem.ptr, make_options(cfg, problem.ptr, n_elems, cfg.final_time));
    if (kdv_sim_run(sim.ptr) != KDV_OK) {
      row.message = kdv_last_error();
      return row;
    }
    if (kdv_sim_errors(sim.ptr, &row.err_u, &row.err_q, &row.err_p) != KDV_OK) {
      row.message = kdv_last_error();
      return row;
    }
    row.ok = true;
  } catch (const std::exception& err) {
    row.message = err.what();
  }
  return row;
}

int run_convergence(const Config& cfg) {
  std::vector<std::future<ConvergenceRow>> futures;
  futures.reserve(cfg.elements.size());
  for (int n : cfg.elements) {
    futures.push_back(
        std::async(std::launch::async, [&cfg, n]() { return run_convergence_row(cfg, n); }));
  }
  std::vector<ConvergenceRow> rows;
  for (auto& f : futures) rows.push_back(f.get());

  const auto path = std::filesystem::path(cfg.out_dir) /
                    ("convergence_" + cfg.problem + "_k" + std::to_string(cfg.degree) + ".csv");
  CsvWriter csv(path);
  csv.row({"N", "err_u", "order_u", "err_q", "order_q", "err_p", "order_p", "status"});
  bool all_ok = true;
  const ConvergenceRow* prev = nullptr;
  for (const auto& row : rows) {
    std::vector<std::string> cells{std::to_string(row.n_elems)};
    if (row.ok) {
      auto order = [&](double err, double prev_err) -> std::string {
        if (prev == nullptr || !prev->ok || err <= 0.0 || prev_err <= 0.0) return "";
        return fmt(std::log2(prev_err / err));
      };
      cells.push_back(fmt(row.err_u));
      cells.push_back(order(row.err_u, prev ? prev->err_u : 0.0));
      cells.push_back(fmt(row.err_q));
      cells.push_back(order(row.err_q, prev ? prev->err_q : 0.0));
      cells.push_back(fmt(row.err_p));
      cells.push_back(order(row.err_p, prev ? prev->err_p : 0.0));
      cells.push_back("ok");
      prev = &row;
    } else {
      all_ok = false;
      cells.insert(cells.end(), {"nan", "", "nan", "", "nan", "", "FAILED"});
      std::cerr << "N=" << row.n_elems << " FAILED: " << row.message << '\n';
      prev = nullptr;
    }
    csv.row(cells);
    std::cout << "N=" << row.n_elems;
    if (row.ok) {
      std::cout << "  err_u=" << fmt_short(row.err_u) << "  err_q=" << fmt_short(row.err_q)
                << "  err_p=" << fmt_short(row.err_p);
    } else {
      std::cout << "  FAILED";
    }
    std::cout << '\n';
  }
  std::cout << "wrote " << path.string() << '\n';
  return all_ok ? 0 : 1;
}

int run_conservation(const Config& cfg) {
  const int n_elems = cfg.elements.front();
  ProblemHandle problem(cfg.problem, cfg.eps);
  SimHandle sim(problem.ptr, make_options(cfg, problem.ptr, n_elems, cfg.final_time));

  const auto path = std::filesystem::path(cfg.out_dir) /
                    ("invariants_" + cfg.problem + "_k" + std::to_string(cfg.degree) + "_N" +
                     std::to_string(n_elems) + ".csv");
  CsvWriter csv(path);
  csv.row({"t", "mass", "energy", "hamiltonian", "tau_qu", "tau_pu", "res_energy_constraint",
           "res_hamiltonian_constraint"});
  auto emit = [&]() {
    kdv_invariants inv;
    if (kdv_sim_invariants(sim.ptr, &inv) != KDV_OK) {
      throw std::runtime_error(kdv_last_error());
    }
    csv.row({fmt(inv.t), fmt(inv.mass), fmt(inv.energy), fmt(inv.hamiltonian), fmt(inv.tau_qu),
             fmt(inv.tau_pu), fmt(inv.constraint_residual_energy),
             fmt(inv.constraint_residual_hamiltonian)});
  };
  emit();
  const int total = kdv_sim_total_steps(sim.ptr);
  for (int s = 0; s < total; ++s) {
    if (kdv_sim_step(sim.ptr) != KDV_OK) {
      std::cerr << "step " << s << " FAILED: " << kdv_last_error() << '\n';
      return 1;
    }
    emit();
  }
  std::cout << "wrote " << path.string() << '\n';
  return 0;
}

int run_snapshot(const Config& cfg) {
  const int n_elems = cfg.elements.front();
  const int points_per_element = 10;
  ProblemHandle problem(cfg.problem, cfg.eps);

  double t_max = 0.0;
  for (double t : cfg.snap_times) t_max = std::max(t_max, t);
  SimHandle sim(problem.ptr, make_options(cfg, problem.ptr, n_elems, t_max));
  const double dt = kdv_sim_dt(sim.ptr);
  const int total = kdv_sim_total_steps(sim.ptr);
  const bool has_exact = kdv_problem_has_exact(problem.ptr) != 0;

  // Capture at the whole step nearest each requested time.
  std::vector<std::pair<int, double>> targets;  // (step, requested time)
  for (double t : cfg.snap_times) {
    const int s = t_max > 0.0 ? std::min(total, static_cast<int>(std::llround(t / dt))) : 0;
    targets.emplace_back(s, t);
  }

  const size_t count = kdv_sim_sample_count(sim.ptr, points_per_element);
  std::vector<double> x(count), u(count), q(count), p(count);
  auto capture = [&](double requested) {
    if (kdv_sim_sample(sim.ptr, points_per_element, x.data(), u.data(), q.data(), p.data()) !=
        KDV_OK) {
      throw std::runtime_error(kdv_last_error());
    }
    const double t_now = kdv_sim_time(sim.ptr);
    const auto path = std::filesystem::path(cfg.out_dir) /
                      ("snapshot_" + cfg.problem + "_t" + fmt_short(requested) + ".csv");
    CsvWriter csv(path);
    csv.row({"x", "u_h", "q_h", "p_h", "u_exact", "q_exact", "p_exact"});
    for (size_t i = 0; i < count; ++i) {
      double ue = 0.0, qe = 0.0, pe = 0.0;
      if (has_exact) kdv_problem_exact(problem.ptr, x[i], t_now, &ue, &qe, &pe);
      csv.row({fmt(x[i]), fmt(u[i]), fmt(q[i]), fmt(p[i]),
               has_exact ? fmt(ue) : "", has_exact ? fmt(qe) : "", has_exact ? fmt(pe) : ""});
    }
    std::cout << "wrote " << path.string() << " (t = " << fmt_short(t_now) << ")\n";
  };

  for (int s = 0; s <= total; ++s) {
    for (const auto& [step, requested] : targets) {
      if (step == s) capture(requested);
    }
    if (s == total) break;
    if (kdv_sim_step(sim.ptr) != KDV_OK) {
      std::cerr << "step " << s << " FAILED: " << kdv_last_error() << '\n';
      return 1;
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Config cfg;
  CLI::App app{"Conservative DG solver for generalized KdV equations"};
  app.option_defaults()->always_capture_default();
  app.add_option("--problem", cfg.problem, "Test problem")
      ->check(CLI::IsMember({"linear", "nonlinear", "cnoidal"}));
  app.add_option("--k", cfg.degree, "Polynomial degree")->check(CLI::NonNegativeNumber);
  app.add_option("--N", cfg.elements, "Element count, or comma list for sweeps")
      ->delimiter(',');
  app.add_option("--T", cfg.final_time, "Final time");
  app.add_option("--dt", cfg.dt, "Time step (0 = problem default rule)");
  app.add_option("--eps", cfg.eps, "Dispersion coefficient (nonlinear problem only)");
  app.add_option("--tol", cfg.tol, "Nonlinear solver tolerance");
  app.add_option("--out", cfg.out_dir, "Output directory");
  app.add_option("--mode", cfg.mode, "What to run")
      ->check(CLI::IsMember({"convergence", "conservation", "snapshot"}));
  app.add_option("--snap-times", cfg.snap_times, "Snapshot times (snapshot mode)")
      ->delimiter(',');
  app.set_config("--config", "", "Config file with key=value lines");
  CLI11_PARSE(app, argc, argv);

  try {
    if (cfg.elements.empty()) throw std::runtime_error("need at least one element count");
    std::filesystem::create_directories(cfg.out_dir);
    if (cfg.mode == "convergence") return run_convergence(cfg);
    if (cfg.mode == "conservation") return run_conservation(cfg);
    return run_snapshot(cfg);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 1;
  }
}
