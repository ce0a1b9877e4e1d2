#include "gradobs/trace_ops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gradobs/kernels.hpp"

namespace gradobs {

const char* side_name(Side side) {
  switch (side) {
    case Side::Bottom: return "bottom";
    case Side::Right: return "right";
    case Side::Top: return "top";
    case Side::Left: return "left";
  }
  return "?";
}

double side_length(Side side, const RectDomain& domain) {
  return (side == Side::Bottom || side == Side::Top) ? domain.a1 : domain.a2;
}

Eigen::Vector2d side_point(Side side, const RectDomain& domain, double s) {
  switch (side) {
    case Side::Bottom: return {s, 0.0};
    case Side::Top: return {s, domain.a2};
    case Side::Left: return {0.0, s};
    case Side::Right: return {domain.a1, s};
  }
  return {0.0, 0.0};
}

Eigen::Vector2d side_normal(Side side) {
  switch (side) {
    case Side::Bottom: return {0.0, -1.0};
    case Side::Top: return {0.0, 1.0};
    case Side::Left: return {-1.0, 0.0};
    case Side::Right: return {1.0, 0.0};
  }
  return {0.0, 0.0};
}

BoundaryRegion::BoundaryRegion(const RectDomain& domain,
                               std::vector<BoundarySegment> segments)
    : domain_(domain), segments_(std::move(segments)) {
  if (segments_.empty()) {
    throw std::invalid_argument("BoundaryRegion: needs at least one segment");
  }
  for (const BoundarySegment& seg : segments_) {
    const double len = side_length(seg.side, domain_);
    if (!(seg.lo >= 0.0 && seg.lo < seg.hi && seg.hi <= len)) {
      throw std::invalid_argument("BoundaryRegion: segment outside its side or degenerate");
    }
  }
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    for (std::size_t j = i + 1; j < segments_.size(); ++j) {
      if (segments_[i].side != segments_[j].side) continue;
      const double lo = std::max(segments_[i].lo, segments_[j].lo);
      const double hi = std::min(segments_[i].hi, segments_[j].hi);
      if (lo < hi) {
        throw std::invalid_argument("BoundaryRegion: overlapping segments");
      }
    }
  }
}

BoundaryRegion BoundaryRegion::full_boundary(const RectDomain& domain) {
  return BoundaryRegion(domain, {{Side::Bottom, 0.0, domain.a1},
                                 {Side::Right, 0.0, domain.a2},
                                 {Side::Top, 0.0, domain.a1},
                                 {Side::Left, 0.0, domain.a2}});
}

namespace {

BoundaryTraceField make_layout(const RectDomain& domain,
                               const std::vector<BoundarySegment>& segments,
                               int points_per_segment) {
  if (points_per_segment < 1) {
    throw std::invalid_argument("boundary rule: need at least one point per segment");
  }
  BoundaryTraceField tf;
  tf.segments = segments;
  const int per = points_per_segment;
  const int total = per * static_cast<int>(segments.size());
  tf.s.resize(total);
  tf.px.resize(total);
  tf.py.resize(total);
  tf.w.resize(total);
  tf.vx = Eigen::ArrayXd::Zero(total);
  tf.vy = Eigen::ArrayXd::Zero(total);
  int at = 0;
  for (const BoundarySegment& seg : segments) {
    tf.offsets.push_back(at);
    Interval1dRule rule = gauss_legendre_on(seg.lo, seg.hi, per);
    for (int i = 0; i < per; ++i) {
      tf.s[at] = rule.x[i];
      Eigen::Vector2d p = side_point(seg.side, domain, rule.x[i]);
      tf.px[at] = p.x();
      tf.py[at] = p.y();
      tf.w[at] = rule.w[i];
      ++at;
    }
  }
  tf.offsets.push_back(at);
  return tf;
}

}  // namespace

BoundaryTraceOperator::BoundaryTraceOperator(BasisPtr basis, BoundaryRegion region,
                                             int points_per_segment)
    : basis_(std::move(basis)),
      region_(std::move(region)),
      points_per_segment_(points_per_segment) {
  if (!basis_->domain().same_as(region_.domain())) {
    throw std::invalid_argument("BoundaryTraceOperator: basis and region domains differ");
  }
  layout_ = make_layout(region_.domain(), region_.segments(), points_per_segment_);
  const int nodes = layout_.nodes();
  const Eigen::Index nmodes = static_cast<Eigen::Index>(basis_->size());
  gx_.resize(nodes, nmodes);
  gy_.resize(nodes, nmodes);
  for (Eigen::Index k = 0; k < nmodes; ++k) {
    basis_->gradients_at(static_cast<std::size_t>(k), layout_.px.data(),
                         layout_.py.data(), gx_.col(k).data(), gy_.col(k).data(),
                         static_cast<std::size_t>(nodes));
  }
}

BoundaryTraceField BoundaryTraceOperator::apply(const ModalField& field) const {
  if (!field.basis()->same_as(*basis_)) {
    throw std::invalid_argument("BoundaryTraceOperator: field basis mismatch");
  }
  BoundaryTraceField tf = layout_;
  const std::size_t nodes = static_cast<std::size_t>(tf.nodes());
  const Eigen::VectorXd& c = field.coeffs();
  for (Eigen::Index k = 0; k < c.size(); ++k) {
    if (c[k] == 0.0) continue;
    kernels::axpy(c[k], gx_.col(k).data(), tf.vx.data(), nodes);
    kernels::axpy(c[k], gy_.col(k).data(), tf.vy.data(), nodes);
  }
  return tf;
}

bool BoundaryTraceOperator::mode_is_trace_null(std::size_t k, double tol) const {
  return gx_.col(static_cast<Eigen::Index>(k)).lpNorm<Eigen::Infinity>() <= tol &&
         gy_.col(static_cast<Eigen::Index>(k)).lpNorm<Eigen::Infinity>() <= tol;
}

BoundaryTraceField boundary_gradient_trace(const ModalField& field,
                                           const BoundaryRegion& region,
                                           const QuadratureRule& rule) {
  BoundaryTraceOperator op(field.basis(), region, rule.boundary_points_per_segment);
  return op.apply(field);
}

double trace_norm(const BoundaryTraceField& tf) {
  return std::sqrt(kernels::weighted_norm2_sq(
      tf.w.data(), tf.vx.data(), tf.vy.data(), static_cast<std::size_t>(tf.nodes())));
}

BoundaryTraceField restrict_to(const BoundaryTraceField& tf,
                               const BoundaryRegion& region) {
  BoundaryTraceField out;
  int at = 0;
  for (const BoundarySegment& seg : region.segments()) {
    auto it = std::find(tf.segments.begin(), tf.segments.end(), seg);
    if (it == tf.segments.end()) {
      throw std::invalid_argument(
          "restrict_to: region segment not sampled by the trace field");
    }
    const std::size_t si = static_cast<std::size_t>(it - tf.segments.begin());
    const int lo = tf.offsets[si];
    const int hi = tf.offsets[si + 1];
    const int count = hi - lo;
    out.segments.push_back(seg);
    out.offsets.push_back(at);
    auto grow = [&](Eigen::ArrayXd& dst, const Eigen::ArrayXd& src) {
      dst.conservativeResize(at + count);
      dst.segment(at, count) = src.segment(lo, count);
    };
    grow(out.s, tf.s);
    grow(out.px, tf.px);
    grow(out.py, tf.py);
    grow(out.w, tf.w);
    grow(out.vx, tf.vx);
    grow(out.vy, tf.vy);
    at += count;
  }
  out.offsets.push_back(at);
  return out;
}

namespace {

// Gaps of the boundary not covered by `segments`, per side.
std::vector<BoundarySegment> boundary_complement(
    const RectDomain& domain, const std::vector<BoundarySegment>& segments) {
  std::vector<BoundarySegment> out;
  for (Side side : {Side::Bottom, Side::Right, Side::Top, Side::Left}) {
    std::vector<std::pair<double, double>> covered;
    for (const BoundarySegment& seg : segments) {
      if (seg.side == side) covered.emplace_back(seg.lo, seg.hi);
    }
    std::sort(covered.begin(), covered.end());
    double cursor = 0.0;
    const double len = side_length(side, domain);
    for (const auto& [lo, hi] : covered) {
      if (lo - cursor > 1e-12) out.push_back({side, cursor, lo});
      cursor = std::max(cursor, hi);
    }
    if (len - cursor > 1e-12) out.push_back({side, cursor, len});
  }
  return out;
}

}  // namespace

BoundaryTraceField extend_by_zero(const BoundaryTraceField& tf,
                                  const RectDomain& domain,
                                  const QuadratureRule& rule) {
  std::vector<BoundarySegment> extra = boundary_complement(domain, tf.segments);
  BoundaryTraceField zeros =
      make_layout(domain, extra, rule.boundary_points_per_segment);
  BoundaryTraceField out = tf;
  const int base = out.nodes();
  const int added = zeros.nodes();
  out.offsets.pop_back();
  for (std::size_t i = 0; i < extra.size(); ++i) {
    out.segments.push_back(extra[i]);
    out.offsets.push_back(base + zeros.offsets[i]);
  }
  out.offsets.push_back(base + added);
  auto append = [&](Eigen::ArrayXd& dst, const Eigen::ArrayXd& src) {
    dst.conservativeResize(base + added);
    dst.tail(added) = src;
  };
  append(out.s, zeros.s);
  append(out.px, zeros.px);
  append(out.py, zeros.py);
  append(out.w, zeros.w);
  append(out.vx, zeros.vx);
  append(out.vy, zeros.vy);
  return out;
}

double trace_inner(const BoundaryTraceField& a, const BoundaryTraceField& b) {
  if (a.nodes() != b.nodes()) {
    throw std::invalid_argument("trace_inner: node layouts differ");
  }
  const std::size_t n = static_cast<std::size_t>(a.nodes());
  return kernels::weighted_dot(a.w.data(), a.vx.data(), b.vx.data(), n) +
         kernels::weighted_dot(a.w.data(), a.vy.data(), b.vy.data(), n);
}

ModalField gradient_adjoint(const ModalField& y1, const ModalField& y2,
                            const BasisPtr& solver_basis,
                            const QuadratureRule& rule) {
  if (solver_basis->family() != BcFamily::DirichletSine) {
    throw std::invalid_argument("gradient_adjoint: solver basis must be DirichletSine");
  }
  const RectDomain& dom = solver_basis->domain();
  if (!y1.basis()->domain().same_as(dom) || !y2.basis()->domain().same_as(dom)) {
    throw std::invalid_argument("gradient_adjoint: domain mismatch");
  }

  AreaRule area = tensor_rule(0.0, dom.a1, 0.0, dom.a2, rule.area_points_per_axis);
  const std::size_t nn = static_cast<std::size_t>(area.w.size());

  // rhs = -div(y) at the quadrature nodes.
  Eigen::ArrayXd rhs = Eigen::ArrayXd::Zero(nn);
  Eigen::ArrayXd gx(nn), gy(nn);
  auto accumulate_div = [&](const ModalField& comp, int axis) {
    const ModalBasis& b = *comp.basis();
    for (std::size_t k = 0; k < b.size(); ++k) {
      const double c = comp.coeffs()[k];
      if (c == 0.0) continue;
      b.gradients_at(k, area.x.data(), area.y.data(), gx.data(), gy.data(), nn);
      kernels::axpy(-c, (axis == 0 ? gx : gy).data(), rhs.data(), nn);
    }
  };
  accumulate_div(y1, 0);
  accumulate_div(y2, 1);

  // Expand rhs in the L^2-orthonormal sine basis and divide by the (strictly
  // negative) eigenvalues; convert to the H^1-normalized coefficients.
  const ModalBasis& sb = *solver_basis;
  Eigen::VectorXd coeffs(static_cast<Eigen::Index>(sb.size()));
  Eigen::ArrayXd psi(nn);
  const double kappa_l2 = 2.0 / std::sqrt(dom.a1 * dom.a2);
  for (std::size_t k = 0; k < sb.size(); ++k) {
    sb.values_at(k, area.x.data(), area.y.data(), psi.data(), nn);
    const double lam = sb.eigenvalue_of(k);
    // values_at gives the H^1-normalized function; rescale to L^2-orthonormal.
    const double to_l2 = kappa_l2 / sb.norm_constant(k);
    const double d = to_l2 * kernels::weighted_dot(area.w.data(), psi.data(),
                                                   rhs.data(), nn);
    const double b_l2 = d / lam;
    coeffs[k] = b_l2 * std::sqrt(1.0 - lam);
  }
  return ModalField(solver_basis, std::move(coeffs));
}

}  // namespace gradobs
