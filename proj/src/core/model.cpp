#include "core/model.hpp"

namespace gwfit {

namespace {

WendlandParams make_params(const SmoothnessConfig& smooth, const Theta& theta) {
  WendlandParams p;
  p.sigma2 = theta[0];
  p.beta = theta[1];
  p.smooth = smooth;
  p.validate();
  return p;
}

}  // namespace

BoundKernels WendlandModel::bind(const Theta& theta, int max_order) const {
  const WendlandParams p = make_params(smooth_, theta);
  const QuadratureConfig q = quad_;
  BoundKernels b;
  b.support = p.beta;
  b.value = [p, q](double t) { return eval_phi(p, t, q); };
  if (max_order >= 1) {
    b.d1[0] = [p, q](double t) { return eval_dphi(p, t, {1, 0}, q); };
    b.d1[1] = [p, q](double t) { return eval_dphi(p, t, {0, 1}, q); };
  }
  if (max_order >= 2) {
    b.d2[0] = [](double) { return 0.0; };
    b.d2[1] = [p, q](double t) { return eval_dphi(p, t, {1, 1}, q); };
    b.d2[2] = [p, q](double t) { return eval_dphi(p, t, {0, 2}, q); };
  }
  return b;
}

BoundKernels ApproxModel::bind(const Theta& theta, int max_order) const {
  const WendlandParams p = make_params(smooth_, theta);
  auto inst = std::make_shared<const ApproxInstance>(family_, m_, p, quad_);
  BoundKernels b;
  b.support = inst->support_radius();
  b.value = [inst](double t) { return inst->eval(t); };
  if (max_order >= 1) {
    b.d1[0] = [inst](double t) { return inst->eval_dtheta(t, {1, 0}); };
    b.d1[1] = [inst](double t) { return inst->eval_dtheta(t, {0, 1}); };
  }
  if (max_order >= 2) {
    b.d2[0] = [](double) { return 0.0; };
    b.d2[1] = [inst](double t) { return inst->eval_dtheta(t, {1, 1}); };
    b.d2[2] = [inst](double t) { return inst->eval_dtheta(t, {0, 2}); };
  }
  return b;
}

double ApproxModel::support_radius(const Theta& theta) const {
  return family_support_radius(family_, m_, theta[1]);
}

namespace {
bool chain_has_nugget(const ApproxFamily& f) {
  if (f.kind == ApproxKind::Nugget) return true;
  return f.inner && chain_has_nugget(*f.inner);
}
}  // namespace

bool ApproxModel::linear_in_variance() const { return !chain_has_nugget(family_); }

}  // namespace gwfit
