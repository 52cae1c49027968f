#pragma once

#include <chrono>
#include <cmath>

#include "dopt/algorithms/algorithms.hpp"
#include "dopt/errors.hpp"

namespace dopt::algorithms::detail {

// Bookkeeping shared by every run: CS and scalar counters, stop tests, rows.
class Recorder {
 public:
  Recorder(ProblemInstance* inst, const RunOptions& opts, std::string name, double rho, int cs_per_iter,
           long long scalars_per_cs)
      : inst_(inst), opts_(opts), cs_per_iter_(cs_per_iter), scalars_per_cs_(scalars_per_cs) {
    rec_.algorithm = std::move(name);
    rec_.rho = rho;
    rec_.scalars_per_cs = scalars_per_cs;
    if (opts.stop.max_cs < 0) throw ArgumentError("max CS must be nonnegative");
    if (!(opts.stop.target > 0)) throw ArgumentError("target error must be positive");
    start_ = std::chrono::steady_clock::now();
    if (inst_) trunc0_ = inst_->truncations();
  }

  void set_error(std::function<double(const Estimates&)> err) { err_ = std::move(err); }

  // False when the run ends before the first iteration.
  bool begin(const Estimates& x) {
    if (opts_.observer) opts_.observer(0, x);
    if (opts_.stop.max_cs == 0) return false;
    double e = error(x);
    if (e <= opts_.stop.target) {
      rec_.rows.push_back({0, 0, 0, e, elapsed()});
      rec_.status = RunStatus::Converged;
      rec_.cs_to_target = 0;
      return false;
    }
    return room();
  }

  // Records iteration k+1; false when the run must stop.
  bool step(const Estimates& x) {
    ++k_;
    cs_ += cs_per_iter_;
    scalars_ += static_cast<long long>(cs_per_iter_) * scalars_per_cs_;
    double e = error(x);
    rec_.rows.push_back({k_, cs_, scalars_, e, elapsed()});
    if (opts_.observer) opts_.observer(k_, x);
    if (!std::isfinite(e) || e > opts_.stop.diverge) {
      rec_.status = RunStatus::Diverged;
      return false;
    }
    if (e <= opts_.stop.target) {
      rec_.status = RunStatus::Converged;
      rec_.cs_to_target = cs_;
      return false;
    }
    return room();
  }

  void fail(const std::string& why) {
    rec_.status = RunStatus::Diverged;
    rec_.note = why;
  }

  long iteration() const { return k_; }

  RunRecord finish(Estimates x) {
    rec_.final = std::move(x);
    if (inst_) rec_.inner_truncations = inst_->truncations() - trunc0_;
    return std::move(rec_);
  }

 private:
  bool room() const { return cs_ + cs_per_iter_ <= opts_.stop.max_cs; }
  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }
  double error(const Estimates& x) const {
    if (err_) return err_(x);
    return inst_->rel_error(x, opts_.stop.metric.value_or(inst_->metric));
  }

  ProblemInstance* inst_;
  const RunOptions& opts_;
  int cs_per_iter_;
  long long scalars_per_cs_;
  std::function<double(const Estimates&)> err_;
  RunRecord rec_;
  long k_ = 0;
  long cs_ = 0;
  long long scalars_ = 0;
  long trunc0_ = 0;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace dopt::algorithms::detail
