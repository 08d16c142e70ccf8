#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "lel/dynamics.hpp"
#include "lel/effective_reduction.hpp"
#include "lel/quantum_states.hpp"

namespace lel {

/// Uniform grid t_i = i * t_max / steps, i = 0..steps.
struct TimeGrid {
  double t_max = 1.0;
  int steps = 1;

  std::vector<double> points() const {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(steps) + 1);
    for (int i = 0; i <= steps; ++i) {
      out.push_back(t_max * static_cast<double>(i) / static_cast<double>(steps));
    }
    return out;
  }
};

template <typename Real>
struct TraceRow {
  Real t = 0;
  Real s_eff = 0;
  Real s_global = 0;
  Real purity = 0;
  bool effectively_pure = false;
  std::vector<Real> shell_entropy;  // one entry per basis shell, 0 when empty
  Real max_hermiticity_defect = 0;
  Real trace_error = 0;
  Real min_eigenvalue = 0;
};

/// Worker count from LEL_THREADS (0 or unset means hardware concurrency).
inline unsigned worker_count_from_env() {
  unsigned n = 0;
  if (const char* env = std::getenv("LEL_THREADS")) {
    try {
      n = static_cast<unsigned>(std::max(0L, std::stol(env)));
    } catch (const std::exception&) {
      n = 0;
    }
  }
  if (n == 0) {
    n = std::max(1u, std::thread::hardware_concurrency());
  }
  return n;
}

/// Runs fn(i) for i in [0, count) on up to `workers` threads. Each index is
/// handled by exactly one thread, so results written to slot i are
/// independent of the worker count.
template <typename Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(count)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      fn(i);
    }
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += workers) {
          fn(i);
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) {
    th.join();
  }
  for (auto& e : errors) {
    if (e) {
      std::rethrow_exception(e);
    }
  }
}

/// Exact evolution followed by reduction at every grid time.
template <typename Real>
std::vector<TraceRow<Real>> entropy_trace(const DensityMatrix<Real>& rho0,
                                          const Hamiltonian<Real>& h, const MomentumBasis& basis,
                                          const std::vector<double>& times, unsigned workers = 1) {
  const Propagator<Real> prop(h);
  std::vector<TraceRow<Real>> rows(times.size());
  parallel_for(times.size(), workers, [&](std::size_t i) {
    const Real t = Real(times[i]);
    const DensityMatrix<Real> rho = prop.evolve(rho0, t);
    const auto dec = reduce(rho, basis);
    TraceRow<Real> row;
    row.t = t;
    row.shell_entropy = shell_entropies(dec);
    for (Real s : row.shell_entropy) {
      row.s_eff += s;
    }
    row.s_global = global_entropy(rho);
    row.purity = global_purity(rho);
    row.effectively_pure = is_effectively_pure(dec);
    row.max_hermiticity_defect = hermiticity_defect(rho.matrix());
    row.trace_error = std::abs(rho.matrix().trace() - Complex<Real>(1));
    Eigen::SelfAdjointEigenSolver<CMatrix<Real>> es(rho.matrix(), Eigen::EigenvaluesOnly);
    row.min_eigenvalue = es.eigenvalues().minCoeff();
    rows[i] = std::move(row);
  });
  return rows;
}

}  // namespace lel
