#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gradobs/matexp.hpp"
#include "gradobs/sensing.hpp"

namespace gradobs {

/// Plant on the truncation: diagonal drift, optional actuators.
struct SystemSpec {
  BasisPtr basis;
  Eigen::MatrixXd input_map;                       // modes x p (p may be 0)
  std::function<Eigen::VectorXd(double)> control;  // u(t) in R^p
  ModalField x0;
};

/// Output-injection gain, modes x q.
struct GainMap {
  Eigen::MatrixXd entries;
};

struct ModeSplit {
  std::vector<std::size_t> unstable;  // eigenvalue >= threshold
  std::vector<std::size_t> stable;
};
ModeSplit split_unstable(const ModalBasis& basis, double threshold = 0.0);

struct DetectabilityFailure {
  int group_index = 0;  // 1-based within the checked groups
  double eigenvalue = 0.0;
  int multiplicity = 0;
  int rank = 0;
};

class DetectabilityError : public std::runtime_error {
 public:
  DetectabilityError(std::string message, std::vector<DetectabilityFailure> failing)
      : std::runtime_error(std::move(message)), failures(std::move(failing)) {}
  std::vector<DetectabilityFailure> failures;
};

struct GainDesignOptions {
  /// When set, slow groups whose modes leave no gradient trace on the target
  /// region are exempt from injection (their error never shows in the target
  /// norm).  Exempt groups must not feed the designed rows through the
  /// sensors; that coupling is verified and rejected otherwise.
  const BoundaryTraceOperator* target = nullptr;
  double spectrum_tol = 1e-6;
  double rank_tol = 1e-10;
  double trace_null_tol = 1e-12;
};

struct GainDesign {
  GainMap gain;
  std::vector<int> exempt_groups;        // 1-based indices into `groups`
  double closed_loop_max_real = 0.0;     // over the non-exempt subsystem
};

/// Output-injection design for every group with eigenvalue >= -margin:
/// a single slow group gets the pseudo-inverse gain shift * pinv(G), which
/// places its closed-loop eigenvalues at -margin exactly; several coupled
/// slow groups or exempt groups with live sensor columns are handled by a
/// joint annihilating pseudo-inverse.  Rows of fast modes stay zero.  The
/// returned design is verified: max Re eig of the (non-exempt) closed loop
/// must be <= -margin + spectrum_tol.  Throws DetectabilityError when a slow
/// group is rank deficient.
GainDesign design_gain(const OutputMap& output_map, const ModalBasis& basis,
                       const std::vector<EigenvalueGroup>& groups, double margin,
                       const GainDesignOptions& options = {});

struct DetectabilityReport {
  bool detectable = false;
  std::vector<DetectabilityFailure> failing;
  int slow_groups = 0;
};

/// True iff every eigenvalue group with eigenvalue >= -margin has full rank.
DetectabilityReport detectability_check(const OutputMap& output_map,
                                        const ModalBasis& basis, double margin,
                                        double grouping_tol = 1e-8,
                                        double rank_tol = 1e-10);

/// x_hat = M y + N z with M C + N = I enforced at construction.
class EstimatorCombiner {
 public:
  EstimatorCombiner(Eigen::MatrixXd m, Eigen::MatrixXd n,
                    const OutputMap& output_map, double tol = 1e-12);

  const Eigen::MatrixXd& m() const { return m_; }
  const Eigen::MatrixXd& n() const { return n_; }
  ModalField output(const Eigen::VectorXd& y, const ModalField& z) const;

 private:
  Eigen::MatrixXd m_, n_;
  BasisPtr basis_;
};

struct SimulationGrid {
  double t_end = 4.0;
  double dt_out = 0.01;
};

struct TrajectoryRecord {
  Eigen::VectorXd times;
  Eigen::MatrixXd state_coeffs;     // modes x instants
  Eigen::MatrixXd observer_coeffs;  // = state + error at every instant
  Eigen::MatrixXd error_coeffs;
  Eigen::VectorXd gamma_error_norm;  // trace norm of the error on the target
  Eigen::VectorXd omega_error_norm;  // H^1 norm of the error
};

/// Coupled plant/observer run with exact modal propagation: the state moves
/// by per-mode exponentials (plus the input convolution when u != 0), the
/// error by exp((Lambda - H C) t), and the observer is state + error.
TrajectoryRecord simulate_coupled(const SystemSpec& sys, const OutputMap& output_map,
                                  const GainMap& gain, const ModalField& z0,
                                  const BoundaryTraceOperator& target,
                                  const SimulationGrid& grid);

struct DecayFit {
  double amplitude = 0.0;
  double rate = 0.0;  // positive = decay; +inf when the tail sits at zero
  double residual = 0.0;
  bool converged = false;
  int samples_used = 0;
};

/// Log-linear least squares on the strictly positive tail samples; values
/// below 1e-14 count as converged and are left out of the fit.
DecayFit fit_decay(const Eigen::VectorXd& times, const Eigen::VectorXd& values,
                   double tail_fraction);

}  // namespace gradobs
