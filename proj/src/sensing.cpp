#include "gradobs/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "gradobs/csv.hpp"
#include "gradobs/kernels.hpp"

namespace gradobs {

std::string csv_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

const char* sensor_kind_name(const SensorSpec& sensor) {
  struct Visitor {
    const char* operator()(const InternalZoneSensor&) const { return "internal_zone"; }
    const char* operator()(const BoundaryZoneSensor&) const { return "boundary_zone"; }
    const char* operator()(const PointwiseSensor&) const { return "pointwise"; }
    const char* operator()(const BoundaryPointwiseSensor&) const { return "boundary_pointwise"; }
    const char* operator()(const FilamentSensor&) const { return "filament"; }
  };
  return std::visit(Visitor{}, sensor.kind);
}

namespace {

void check_measurement_pairing(BoundaryMeasurement meas, BcFamily family,
                               const char* what) {
  if (meas == BoundaryMeasurement::Flux && family == BcFamily::NeumannCosine) {
    throw std::invalid_argument(std::string(what) +
                                ": flux measurement is identically zero for the "
                                "Neumann family");
  }
  if (meas == BoundaryMeasurement::Trace && family == BcFamily::DirichletSine) {
    throw std::invalid_argument(std::string(what) +
                                ": trace measurement is identically zero for the "
                                "Dirichlet family");
  }
}

void validate_zone(const ZoneRect& z, const RectDomain& dom) {
  if (!(z.l1 > 0.0) || !(z.l2 > 0.0)) {
    throw std::invalid_argument("internal zone: half-widths must be positive");
  }
  if (z.c1 - z.l1 < 0.0 || z.c1 + z.l1 > dom.a1 || z.c2 - z.l2 < 0.0 ||
      z.c2 + z.l2 > dom.a2) {
    throw std::invalid_argument("internal zone: support leaves the domain");
  }
}

Eigen::VectorXd assemble_row(const SensorSpec& sensor, const ModalBasis& basis,
                             const QuadratureRule& rule) {
  const RectDomain& dom = basis.domain();
  const std::size_t nmodes = basis.size();
  Eigen::VectorXd row = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nmodes));

  if (const auto* zone = std::get_if<InternalZoneSensor>(&sensor.kind)) {
    validate_zone(zone->support, dom);
    if (!zone->profile) throw std::invalid_argument("internal zone: missing profile");
    AreaRule area = tensor_rule(zone->support.c1 - zone->support.l1,
                                zone->support.c1 + zone->support.l1,
                                zone->support.c2 - zone->support.l2,
                                zone->support.c2 + zone->support.l2,
                                rule.area_points_per_axis);
    const std::size_t nn = static_cast<std::size_t>(area.w.size());
    Eigen::ArrayXd f(nn), phi(nn);
    for (std::size_t i = 0; i < nn; ++i) f[i] = zone->profile(area.x[i], area.y[i]);
    for (std::size_t k = 0; k < nmodes; ++k) {
      basis.values_at(k, area.x.data(), area.y.data(), phi.data(), nn);
      row[k] = kernels::weighted_dot(area.w.data(), phi.data(), f.data(), nn);
    }
    return row;
  }

  if (const auto* bz = std::get_if<BoundaryZoneSensor>(&sensor.kind)) {
    BoundaryRegion region(dom, bz->segments);  // validates geometry
    if (bz->profiles.size() != bz->segments.size()) {
      throw std::invalid_argument("boundary zone: one profile per segment required");
    }
    check_measurement_pairing(bz->measurement, basis.family(), "boundary zone");
    const int per = rule.boundary_points_per_segment;
    for (std::size_t si = 0; si < bz->segments.size(); ++si) {
      const BoundarySegment& seg = bz->segments[si];
      if (!bz->profiles[si]) throw std::invalid_argument("boundary zone: missing profile");
      Interval1dRule r1 = gauss_legendre_on(seg.lo, seg.hi, per);
      const Eigen::Vector2d nu = side_normal(seg.side);
      for (int i = 0; i < per; ++i) {
        Eigen::Vector2d p = side_point(seg.side, dom, r1.x[i]);
        const double fw = bz->profiles[si](r1.x[i]) * r1.w[i];
        for (std::size_t k = 0; k < nmodes; ++k) {
          const double val = bz->measurement == BoundaryMeasurement::Trace
                                 ? basis.value(k, p.x(), p.y())
                                 : basis.gradient(k, p.x(), p.y()).dot(nu);
          row[k] += fw * val;
        }
      }
    }
    return row;
  }

  if (const auto* pw = std::get_if<PointwiseSensor>(&sensor.kind)) {
    if (!dom.contains(pw->b1, pw->b2)) {
      throw std::invalid_argument("pointwise sensor: location outside the closed domain");
    }
    for (std::size_t k = 0; k < nmodes; ++k) row[k] = basis.value(k, pw->b1, pw->b2);
    return row;
  }

  if (const auto* bp = std::get_if<BoundaryPointwiseSensor>(&sensor.kind)) {
    const double len = side_length(bp->side, dom);
    if (!(bp->s >= 0.0 && bp->s <= len)) {
      throw std::invalid_argument("boundary pointwise sensor: location outside its side");
    }
    check_measurement_pairing(bp->measurement, basis.family(), "boundary pointwise");
    Eigen::Vector2d p = side_point(bp->side, dom, bp->s);
    const Eigen::Vector2d nu = side_normal(bp->side);
    for (std::size_t k = 0; k < nmodes; ++k) {
      row[k] = bp->measurement == BoundaryMeasurement::Trace
                   ? basis.value(k, p.x(), p.y())
                   : basis.gradient(k, p.x(), p.y()).dot(nu);
    }
    return row;
  }

  const auto& fil = std::get<FilamentSensor>(sensor.kind);
  if (!dom.contains(fil.from.x(), fil.from.y()) ||
      !dom.contains(fil.to.x(), fil.to.y())) {
    throw std::invalid_argument("filament sensor: endpoints outside the closed domain");
  }
  const double len = (fil.to - fil.from).norm();
  if (!(len > 0.0)) throw std::invalid_argument("filament sensor: zero length");
  if (!fil.profile) throw std::invalid_argument("filament sensor: missing profile");
  Interval1dRule r1 = gauss_legendre_on(0.0, len, rule.boundary_points_per_segment);
  const Eigen::Vector2d dir = (fil.to - fil.from) / len;
  for (int i = 0; i < r1.x.size(); ++i) {
    Eigen::Vector2d p = fil.from + r1.x[i] * dir;
    const double fw = fil.profile(r1.x[i]) * r1.w[i];
    for (std::size_t k = 0; k < nmodes; ++k) {
      row[k] += fw * basis.value(k, p.x(), p.y());
    }
  }
  return row;
}

}  // namespace

OutputMap assemble_output_map(std::vector<SensorSpec> sensors, BasisPtr basis,
                              const QuadratureRule& rule) {
  OutputMap map;
  map.basis = std::move(basis);
  map.entries.resize(static_cast<Eigen::Index>(sensors.size()),
                     static_cast<Eigen::Index>(map.basis->size()));
  for (std::size_t i = 0; i < sensors.size(); ++i) {
    map.entries.row(static_cast<Eigen::Index>(i)) =
        assemble_row(sensors[i], *map.basis, rule).transpose();
  }
  map.sensors = std::move(sensors);
  return map;
}

std::vector<EigenvalueGroup> group_modes(const ModalBasis& basis,
                                         const std::vector<std::size_t>& mode_indices,
                                         double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("group_modes: tolerance must be positive");
  if (mode_indices.empty()) throw std::invalid_argument("group_modes: empty mode set");
  std::vector<std::size_t> order = mode_indices;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double la = basis.eigenvalue_of(a), lb = basis.eigenvalue_of(b);
    if (la != lb) return la > lb;  // least stable first
    return a < b;
  });
  std::vector<EigenvalueGroup> groups;
  for (std::size_t idx : order) {
    const double lam = basis.eigenvalue_of(idx);
    if (groups.empty() || groups.back().eigenvalue - lam > tol) {
      groups.push_back({lam, {idx}});
    } else {
      groups.back().members.push_back(idx);
    }
  }
  for (EigenvalueGroup& g : groups) {
    std::sort(g.members.begin(), g.members.end());
  }
  return groups;
}

std::vector<EigenvalueGroup> group_all_eigenvalues(const ModalBasis& basis,
                                                   double tol) {
  std::vector<std::size_t> all(basis.size());
  std::iota(all.begin(), all.end(), 0);
  return group_modes(basis, all, tol);
}

std::vector<EigenvalueGroup> group_eigenvalues(const ModalBasis& basis, int J,
                                               double tol) {
  if (J < 1) throw std::invalid_argument("group_eigenvalues: J must be >= 1");
  std::vector<EigenvalueGroup> groups = group_all_eigenvalues(basis, tol);
  if (static_cast<int>(groups.size()) < J) {
    throw std::invalid_argument("group_eigenvalues: J exceeds the distinct groups in the truncation");
  }
  groups.resize(static_cast<std::size_t>(J));
  return groups;
}

StrategicReport strategic_rank_test(const OutputMap& output_map,
                                    const std::vector<EigenvalueGroup>& groups,
                                    double rank_tol) {
  if (groups.empty()) throw std::invalid_argument("strategic_rank_test: no groups");
  for (const EigenvalueGroup& g : groups) {
    if (g.members.empty()) throw std::invalid_argument("strategic_rank_test: empty group");
  }
  const int q = output_map.outputs();

  StrategicReport report;
  std::vector<Eigen::VectorXd> sigmas;
  sigmas.reserve(groups.size());
  for (const EigenvalueGroup& g : groups) {
    Eigen::MatrixXd block(q, g.multiplicity());
    for (int j = 0; j < g.multiplicity(); ++j) {
      block.col(j) = output_map.entries.col(
          static_cast<Eigen::Index>(g.members[static_cast<std::size_t>(j)]));
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(block);
    sigmas.push_back(svd.singularValues());
    if (sigmas.back().size() > 0) {
      report.sigma_ref = std::max(report.sigma_ref, sigmas.back()[0]);
    }
  }

  const double threshold = rank_tol * report.sigma_ref;
  int max_mult = 0;
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const EigenvalueGroup& g = groups[gi];
    const Eigen::VectorXd& sv = sigmas[gi];
    GroupReport gr;
    gr.index = static_cast<int>(gi) + 1;
    gr.eigenvalue = g.eigenvalue;
    gr.multiplicity = g.multiplicity();
    max_mult = std::max(max_mult, gr.multiplicity);
    int rank = 0;
    if (report.sigma_ref > 0.0) {
      for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv[i] >= threshold) ++rank;
      }
    }
    gr.rank = rank;
    gr.sigma_min = sv.size() > 0 ? sv[sv.size() - 1] : 0.0;
    gr.marginal = rank > 0 && sv[rank - 1] < 10.0 * threshold;
    gr.full_rank = rank == gr.multiplicity;
    if (!gr.full_rank) report.failing_groups.push_back(gr.index);
    report.groups.push_back(gr);
  }

  report.precondition_ok = q >= max_mult;
  if (!report.precondition_ok) {
    report.note = "sensor count q is below the largest eigenvalue multiplicity";
  }
  report.strategic = report.precondition_ok && report.failing_groups.empty();
  return report;
}

std::string StrategicReport::to_csv() const {
  std::string out = "group,eigenvalue,multiplicity,rank,min_singular_value,verdict\n";
  for (const GroupReport& g : groups) {
    out += std::to_string(g.index) + ',' + csv_double(g.eigenvalue) + ',' +
           std::to_string(g.multiplicity) + ',' + std::to_string(g.rank) + ',' +
           csv_double(g.sigma_min) + ',' + (g.full_rank ? "true" : "false") + '\n';
  }
  return out;
}

namespace {

constexpr double kIntegerTol = 1e-9;
constexpr int kSymmetrySamples = 24;

bool near_integer(double x) { return std::abs(x - std::round(x)) < kIntegerTol; }

bool profile_even_about(const ScalarProfile1d& f, double center, double halfwidth) {
  double scale = 1.0, residual = 0.0;
  for (int i = 1; i <= kSymmetrySamples; ++i) {
    const double tau = halfwidth * i / kSymmetrySamples;
    const double a = f(center + tau), b = f(center - tau);
    scale = std::max({scale, std::abs(a), std::abs(b)});
    residual = std::max(residual, std::abs(a - b));
  }
  return residual < 1e-10 * scale;
}

bool profile_even_about_2d(const ScalarProfile2d& f, const ZoneRect& z) {
  double scale = 1.0, residual = 0.0;
  for (int i = 1; i <= 6; ++i) {
    for (int j = 1; j <= 6; ++j) {
      const double u = z.l1 * i / 6.0, v = z.l2 * j / 6.0;
      const double ref = f(z.c1 + u, z.c2 + v);
      scale = std::max(scale, std::abs(ref));
      residual = std::max(residual, std::abs(ref - f(z.c1 - u, z.c2 + v)));
      residual = std::max(residual, std::abs(ref - f(z.c1 + u, z.c2 - v)));
    }
  }
  return residual < 1e-10 * scale;
}

PropositionCheck no_criterion(std::string reason) {
  PropositionCheck out;
  out.has_criterion = false;
  out.proposition = std::move(reason);
  return out;
}

void add_axis1_products(double coord, double a1, int J, PropositionCheck& out) {
  for (int n = 1; n <= J; ++n) {
    const double p = n * coord / a1;
    if (near_integer(p)) out.violations.push_back({n, 0, p});
  }
}

void add_axis2_products(double coord, double a2, int J, PropositionCheck& out) {
  for (int m = 1; m <= J; ++m) {
    const double p = m * coord / a2;
    if (near_integer(p)) out.violations.push_back({0, m, p});
  }
}

bool horizontal(Side side) { return side == Side::Bottom || side == Side::Top; }

}  // namespace

PropositionCheck proposition_check(const SensorSpec& sensor,
                                   const ModalBasis& basis, int J) {
  if (J < 1) throw std::invalid_argument("proposition_check: J must be >= 1");
  if (basis.family() != BcFamily::DirichletSine) {
    return no_criterion("closed-form placement criteria cover the Dirichlet family only");
  }
  const RectDomain& dom = basis.domain();
  PropositionCheck out;
  out.has_criterion = true;

  if (const auto* zone = std::get_if<InternalZoneSensor>(&sensor.kind)) {
    validate_zone(zone->support, dom);
    if (!profile_even_about_2d(zone->profile, zone->support)) {
      return no_criterion("zone profile is not symmetric about the zone center");
    }
    out.proposition = "4.1";
    add_axis1_products(zone->support.c1, dom.a1, J, out);
    add_axis2_products(zone->support.c2, dom.a2, J, out);
  } else if (const auto* bz = std::get_if<BoundaryZoneSensor>(&sensor.kind)) {
    if (bz->measurement != BoundaryMeasurement::Flux) {
      return no_criterion("boundary-zone criterion applies to flux measurements");
    }
    if (bz->segments.size() == 1) {
      const BoundarySegment& seg = bz->segments[0];
      const double c = 0.5 * (seg.lo + seg.hi);
      if (!profile_even_about(bz->profiles[0], c, 0.5 * (seg.hi - seg.lo))) {
        return no_criterion("boundary profile is not symmetric about the segment center");
      }
      out.proposition = "4.2";
      if (horizontal(seg.side)) {
        add_axis1_products(c, dom.a1, J, out);
      } else {
        add_axis2_products(c, dom.a2, J, out);
      }
    } else if (bz->segments.size() == 2) {
      const BoundarySegment* hseg = nullptr;
      const BoundarySegment* vseg = nullptr;
      const ScalarProfile1d* hprof = nullptr;
      const ScalarProfile1d* vprof = nullptr;
      for (std::size_t i = 0; i < 2; ++i) {
        if (horizontal(bz->segments[i].side)) {
          hseg = &bz->segments[i];
          hprof = &bz->profiles[i];
        } else {
          vseg = &bz->segments[i];
          vprof = &bz->profiles[i];
        }
      }
      if (!hseg || !vseg) {
        return no_criterion("two-side criterion needs one horizontal and one vertical segment");
      }
      const double hc = 0.5 * (hseg->lo + hseg->hi);
      const double vc = 0.5 * (vseg->lo + vseg->hi);
      if (!profile_even_about(*hprof, hc, 0.5 * (hseg->hi - hseg->lo)) ||
          !profile_even_about(*vprof, vc, 0.5 * (vseg->hi - vseg->lo))) {
        return no_criterion("boundary profiles are not symmetric about their segment centers");
      }
      out.proposition = "4.3";
      add_axis1_products(hc, dom.a1, J, out);
    } else {
      return no_criterion("no closed-form criterion for more than two segments");
    }
  } else if (const auto* pw = std::get_if<PointwiseSensor>(&sensor.kind)) {
    out.proposition = "4.4";
    add_axis1_products(pw->b1, dom.a1, J, out);
    add_axis2_products(pw->b2, dom.a2, J, out);
  } else if (const auto* fil = std::get_if<FilamentSensor>(&sensor.kind)) {
    const double len = (fil->to - fil->from).norm();
    if (!(len > 0.0)) throw std::invalid_argument("filament sensor: zero length");
    if (!profile_even_about(fil->profile, 0.5 * len, 0.5 * len)) {
      return no_criterion("filament profile is not symmetric about the midpoint");
    }
    const Eigen::Vector2d mid = 0.5 * (fil->from + fil->to);
    out.proposition = "4.5";
    add_axis1_products(mid.x(), dom.a1, J, out);
    add_axis2_products(mid.y(), dom.a2, J, out);
  } else {
    const auto& bp = std::get<BoundaryPointwiseSensor>(sensor.kind);
    if (bp.measurement != BoundaryMeasurement::Flux) {
      return no_criterion("boundary-pointwise criterion applies to flux measurements");
    }
    out.proposition = "4.6";
    if (horizontal(bp.side)) {
      add_axis1_products(bp.s, dom.a1, J, out);
    } else {
      add_axis2_products(bp.s, dom.a2, J, out);
    }
  }

  out.predicted_strategic = out.violations.empty();
  return out;
}

}  // namespace gradobs
