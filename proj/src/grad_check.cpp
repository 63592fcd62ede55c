#include "phasekd/grad_check.hpp"

#include <algorithm>
#include <cmath>

namespace phasekd {

double grad_check(const std::function<Tensor()>& forward, Tensor x, double h) {
  const bool had_requires_grad = x.requires_grad();
  x.set_requires_grad(true);
  x.clear_grad();
  Tape::active().clear();

  Tensor loss = forward();
  backward(loss);
  ArrayX analytic = x.has_grad() ? ArrayX(x.grad()) : ArrayX(ArrayX::Zero(x.values().size()));

  double worst = 0.0;
  {
    NoGradGuard guard;
    for (Eigen::Index i = 0; i < x.values().size(); ++i) {
      const double original = x.values()(i);
      x.values()(i) = original + h;
      const double plus = forward().item();
      x.values()(i) = original - h;
      const double minus = forward().item();
      x.values()(i) = original;
      const double numeric = (plus - minus) / (2.0 * h);
      const double rel = std::fabs(analytic(i) - numeric) / std::max(1.0, std::fabs(analytic(i)));
      worst = std::max(worst, rel);
    }
  }

  x.clear_grad();
  x.set_requires_grad(had_requires_grad);
  return worst;
}

}  // namespace phasekd
