#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gradobs/trace_ops.hpp"

namespace gradobs {

enum class BoundaryMeasurement { Trace, Flux };

/// Axis-aligned rectangle given by center and half-widths; must fit in the
/// closed domain with positive half-widths.
struct ZoneRect {
  double c1 = 0.0, c2 = 0.0;
  double l1 = 0.0, l2 = 0.0;
};

using ScalarProfile1d = std::function<double(double)>;       // of the side coordinate
using ScalarProfile2d = std::function<double(double, double)>;

/// The five supported sensor kinds.
struct InternalZoneSensor {
  ZoneRect support;
  ScalarProfile2d profile;
};
struct BoundaryZoneSensor {
  std::vector<BoundarySegment> segments;   // one or two sides
  std::vector<ScalarProfile1d> profiles;   // one per segment
  BoundaryMeasurement measurement = BoundaryMeasurement::Trace;
};
struct PointwiseSensor {
  double b1 = 0.0, b2 = 0.0;
};
struct BoundaryPointwiseSensor {
  Side side = Side::Left;
  double s = 0.0;
  BoundaryMeasurement measurement = BoundaryMeasurement::Flux;
};
struct FilamentSensor {
  Eigen::Vector2d from{0.0, 0.0}, to{0.0, 0.0};
  ScalarProfile1d profile;  // of the arclength along the filament
};

struct SensorSpec {
  std::variant<InternalZoneSensor, BoundaryZoneSensor, PointwiseSensor,
               BoundaryPointwiseSensor, FilamentSensor>
      kind;
  std::string label;
};

const char* sensor_kind_name(const SensorSpec& sensor);

/// The output operator C restricted to the truncation: one row per sensor,
/// one column per mode, entry = sensor functional applied to the basis
/// function.  Trace-type boundary sensors pair with the Neumann family and
/// flux-type with the Dirichlet family; the complementary pairings read
/// identically zero and are rejected.
struct OutputMap {
  BasisPtr basis;
  std::vector<SensorSpec> sensors;
  Eigen::MatrixXd entries;  // q x modes

  int outputs() const { return static_cast<int>(entries.rows()); }
};

OutputMap assemble_output_map(std::vector<SensorSpec> sensors, BasisPtr basis,
                              const QuadratureRule& rule);

/// Modes sharing one eigenvalue within the grouping tolerance.
struct EigenvalueGroup {
  double eigenvalue = 0.0;
  std::vector<std::size_t> members;  // mode indices, ascending

  int multiplicity() const { return static_cast<int>(members.size()); }
};

/// Clusters the listed modes by eigenvalue, most unstable first.
std::vector<EigenvalueGroup> group_modes(const ModalBasis& basis,
                                         const std::vector<std::size_t>& mode_indices,
                                         double tol);
std::vector<EigenvalueGroup> group_all_eigenvalues(const ModalBasis& basis,
                                                   double tol);
/// First J groups of the full spectrum; throws when fewer exist.
std::vector<EigenvalueGroup> group_eigenvalues(const ModalBasis& basis, int J,
                                               double tol);

struct GroupReport {
  int index = 0;  // 1-based group number
  double eigenvalue = 0.0;
  int multiplicity = 0;
  int rank = 0;
  double sigma_min = 0.0;  // smallest singular value of G_m
  bool marginal = false;
  bool full_rank = false;
};

/// Outcome of the per-group rank condition.  Numerical rank counts singular
/// values >= rank_tol * sigma_ref, where sigma_ref is the largest singular
/// value across all tested groups (a per-group reference would make every
/// nonzero 1x1 block full rank no matter how small).
struct StrategicReport {
  std::vector<GroupReport> groups;
  bool strategic = false;
  bool precondition_ok = true;  // q >= every multiplicity
  std::string note;
  double sigma_ref = 0.0;
  std::vector<int> failing_groups;  // 1-based indices

  std::string to_csv() const;  // group,eigenvalue,multiplicity,rank,min_singular_value,verdict
};

StrategicReport strategic_rank_test(const OutputMap& output_map,
                                    const std::vector<EigenvalueGroup>& groups,
                                    double rank_tol = 1e-10);

/// Closed-form placement criteria for the Dirichlet family.  The sensor is
/// matched against the zone / boundary-zone / pointwise / filament /
/// boundary-pointwise patterns; profile symmetry about the geometric center
/// is verified by sampling before the criterion applies.
struct PropositionViolation {
  int n = 0;  // 0 when the criterion has no condition on this index
  int m = 0;
  double product = 0.0;  // the offending near-integer product
};

struct PropositionCheck {
  bool has_criterion = false;
  std::string proposition;  // "4.1".."4.6", or the reason when !has_criterion
  bool predicted_strategic = false;
  std::vector<PropositionViolation> violations;
};

PropositionCheck proposition_check(const SensorSpec& sensor,
                                   const ModalBasis& basis, int J);

}  // namespace gradobs
