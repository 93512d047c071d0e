#pragma once

// Grids of independent protocol runs over error and control parameters.
//
// Cells sharing the same step Hamiltonians (every axis except delta_t_rel and
// n_cycles changes them) share one set of eigendecompositions. Both the
// generator builds and the cell runs are spread over a worker pool; each
// task writes only its own slot, so output order and values do not depend on
// the worker count.

#include <qpump/protocol.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

namespace qpump {

enum class SweepAxisName { delta_r, delta_t_rel, doppler, omega2, n_cycles };

inline std::string_view to_string(SweepAxisName a) {
  switch (a) {
    case SweepAxisName::delta_r: return "delta_r";
    case SweepAxisName::delta_t_rel: return "delta_t_rel";
    case SweepAxisName::doppler: return "doppler";
    case SweepAxisName::omega2: return "omega2";
    case SweepAxisName::n_cycles: return "n_cycles";
  }
  return "?";
}

inline std::optional<SweepAxisName> parse_axis_name(std::string_view s) {
  for (auto a : {SweepAxisName::delta_r, SweepAxisName::delta_t_rel, SweepAxisName::doppler, SweepAxisName::omega2,
                 SweepAxisName::n_cycles})
    if (to_string(a) == s) return a;
  return std::nullopt;
}

/// Axis values are in internal units: um, dimensionless, rad/us, rad/us, count.
struct SweepAxis {
  SweepAxisName name = SweepAxisName::delta_r;
  std::vector<double> values;
};

struct SweepBase {
  RunConfig run;
  SystemParams params;
  ErrorModel errors;
};

struct SweepGrid {
  SweepAxis axis1;
  std::optional<SweepAxis> axis2;
  SweepBase base;

  void validate() const {
    auto check = [](const SweepAxis& a) {
      if (a.values.empty()) throw Error(ErrorCode::Config, "sweep axis has no values");
      for (double v : a.values)
        if (!std::isfinite(v)) throw Error(ErrorCode::Config, "sweep axis values must be finite");
    };
    check(axis1);
    if (axis2) {
      check(*axis2);
      if (axis2->name == axis1.name) throw Error(ErrorCode::Config, "sweep axes must differ");
    }
  }
  [[nodiscard]] std::size_t rows() const { return axis1.values.size(); }
  [[nodiscard]] std::size_t cols() const { return axis2 ? axis2->values.size() : 1; }
};

struct SweepCell {
  double x1 = 0.0;
  double x2 = std::numeric_limits<double>::quiet_NaN();
  double final_fidelity = std::numeric_limits<double>::quiet_NaN();
  double final_purity = std::numeric_limits<double>::quiet_NaN();
  double total_time = std::numeric_limits<double>::quiet_NaN();  ///< us
  std::optional<std::string> error;
};

struct SweepResult {
  std::vector<SweepCell> cells;  ///< row-major: axis1 outer, axis2 inner
  std::size_t rows = 0;
  std::size_t cols = 0;
  double wall_time_s = 0.0;

  [[nodiscard]] std::size_t failed_cells() const {
    return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [](const SweepCell& c) {
      return c.error.has_value();
    }));
  }
};

/// Applies one axis value to a copy of the base configuration.
inline void apply_axis(SweepBase& cfg, SweepAxisName axis, double value) {
  switch (axis) {
    case SweepAxisName::delta_r: cfg.errors.delta_r = value; break;
    case SweepAxisName::delta_t_rel: cfg.errors.delta_t_rel = value; break;
    case SweepAxisName::doppler: cfg.errors.doppler = value; break;
    case SweepAxisName::omega2: cfg.params.omega2 = value; break;
    case SweepAxisName::n_cycles:
      if (value != std::round(value)) throw Error(ErrorCode::Config, "n_cycles values must be integers");
      cfg.run.n_cycles = static_cast<int>(value);
      break;
  }
}

namespace detail {

/// Everything a set of step Hamiltonians depends on.
using GeneratorKey = std::tuple<int, bool, bool, double, double, double, double, double, double, double, double,
                                double>;

inline GeneratorKey generator_key(const SweepBase& c) {
  const auto& p = c.params;
  return {static_cast<int>(c.run.model), c.run.drives, c.run.stark_compensation, p.omega1, p.omega2, p.delta,
          p.c6, p.c6_cross, p.r_pair.r12 + c.errors.delta_r, p.r_pair.r13 + c.errors.delta_r,
          p.r_pair.r23 + c.errors.delta_r, c.errors.doppler};
}

/// Runs task(i) for i in [0, n) on `workers` threads.
template <class Task>
void parallel_for(std::size_t n, unsigned workers, Task&& task) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  std::atomic<std::size_t> next{0};
  auto loop = [&] {
    for (std::size_t i = next++; i < n; i = next++) task(i);
  };
  if (workers == 1) {
    loop();
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(loop);
}

}  // namespace detail

inline SweepResult run_sweep(const SweepGrid& grid, unsigned workers) {
  if (workers == 0) throw Error(ErrorCode::Config, "workers must be positive");
  grid.validate();
  const auto start = std::chrono::steady_clock::now();

  SweepResult result;
  result.rows = grid.rows();
  result.cols = grid.cols();
  const std::size_t n = result.rows * result.cols;
  result.cells.resize(n);

  // Resolve every cell's configuration up front.
  std::vector<std::optional<SweepBase>> configs(n);
  for (std::size_t r = 0; r < result.rows; ++r) {
    for (std::size_t c = 0; c < result.cols; ++c) {
      const std::size_t i = r * result.cols + c;
      SweepCell& cell = result.cells[i];
      cell.x1 = grid.axis1.values[r];
      if (grid.axis2) cell.x2 = grid.axis2->values[c];
      try {
        SweepBase cfg = grid.base;
        cfg.run.record = Record::per_step;
        apply_axis(cfg, grid.axis1.name, cell.x1);
        if (grid.axis2) apply_axis(cfg, grid.axis2->name, cell.x2);
        configs[i] = std::move(cfg);
      } catch (const Error& e) {
        cell.error = e.what();
      }
    }
  }

  // Distinct generator sets, in first-appearance order.
  std::map<detail::GeneratorKey, std::size_t> slot_of;
  std::vector<std::size_t> representative;
  std::vector<std::size_t> cell_slot(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!configs[i]) continue;
    const auto key = detail::generator_key(*configs[i]);
    auto [it, inserted] = slot_of.try_emplace(key, representative.size());
    if (inserted) representative.push_back(i);
    cell_slot[i] = it->second;
  }

  std::vector<std::optional<ProtocolGenerators>> generators(representative.size());
  std::vector<std::string> generator_errors(representative.size());
  detail::parallel_for(representative.size(), workers, [&](std::size_t s) {
    const SweepBase& cfg = *configs[representative[s]];
    try {
      generators[s] = prepare_generators(cfg.run, cfg.params, cfg.errors);
    } catch (const Error& e) {
      generator_errors[s] = e.what();
    }
  });

  detail::parallel_for(n, workers, [&](std::size_t i) {
    SweepCell& cell = result.cells[i];
    if (!configs[i]) return;
    const std::size_t s = cell_slot[i];
    if (!generators[s]) {
      cell.error = generator_errors[s];
      return;
    }
    const SweepBase& cfg = *configs[i];
    try {
      const Trajectory traj = run_protocol(cfg.run, cfg.params, cfg.errors, *generators[s]);
      cell.final_fidelity = traj.final_sample().fidelity;
      cell.final_purity = traj.final_sample().purity;
      cell.total_time = total_runtime(cfg.run, cfg.params, cfg.errors);
    } catch (const Error& e) {
      cell.error = e.what();
    }
  });

  result.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace qpump
