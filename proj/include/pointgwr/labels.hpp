#pragma once

#include "pointgwr/types.hpp"

#include <span>

namespace pointgwr {

/// Label of a freshly inserted node: centered on the midpoint of the two
/// centroids, sized by the mean width and height of the two boxes.
template <typename Scalar>
Box<Scalar> init_label(const Box<Scalar>& bmu_label, const Box<Scalar>& obs_label) {
  const Vec2<Scalar> c = (bmu_label.centroid() + obs_label.centroid()) / Scalar(2);
  const Scalar w = (bmu_label.width() + obs_label.width()) / Scalar(2);
  const Scalar h = (bmu_label.height() + obs_label.height()) / Scalar(2);
  return Box<Scalar>::from_center(c, w, h);
}

/// Moves `label` toward `target` by `step` (the product of learning rate and
/// firing counter). The centroid always moves; width and height follow the
/// same rule when `adapt_size` is set.
template <typename Scalar>
void adapt_label(Box<Scalar>& label, const Box<Scalar>& target, Scalar step,
                 bool adapt_size = true) {
  Vec2<Scalar> c = label.centroid();
  Scalar w = label.width();
  Scalar h = label.height();
  c += step * (target.centroid() - c);
  if (adapt_size) {
    w += step * (target.width() - w);
    h += step * (target.height() - h);
  }
  label = Box<Scalar>::from_center(c, w, h);
}

/// Label update for one training step. `neighbor_h` holds the firing
/// counters of the neighbors in the same order as `neighbor_labels`.
template <typename Scalar>
void adapt_labels(Box<Scalar>& bmu_label, std::span<Box<Scalar>*> neighbor_labels,
                  const Box<Scalar>& obs_label, Scalar eta_b, Scalar eta_n, Scalar bmu_h,
                  std::span<const Scalar> neighbor_h, bool adapt_size = true) {
  if (neighbor_labels.size() != neighbor_h.size())
    throw ContractError("adapt_labels: neighbor label/counter size mismatch");
  adapt_label(bmu_label, obs_label, eta_b * bmu_h, adapt_size);
  for (std::size_t i = 0; i < neighbor_labels.size(); ++i)
    adapt_label(*neighbor_labels[i], obs_label, eta_n * neighbor_h[i], adapt_size);
}

}  // namespace pointgwr
