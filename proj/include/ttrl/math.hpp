#pragma once

#include <cmath>
#include <stdexcept>

#include <Eigen/Core>

namespace ttrl {

template <typename Derived>
using VectorOf = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>;

/// Max-shifted softmax of a logit vector.
template <typename Derived>
VectorOf<Derived> softmax(const Eigen::MatrixBase<Derived>& logits) {
  const auto shift = logits.maxCoeff();
  const VectorOf<Derived> e = (logits.array() - shift).exp().matrix();
  return e / e.sum();
}

template <typename Derived>
VectorOf<Derived> log_softmax(const Eigen::MatrixBase<Derived>& logits) {
  using std::log;
  const auto shift = logits.maxCoeff();
  const auto centred = (logits.array() - shift).eval();
  const auto log_z = log(centred.exp().sum());
  return (centred - log_z).matrix();
}

/// Shannon entropy in nats; zero-probability entries contribute nothing.
template <typename Derived>
typename Derived::Scalar entropy(const Eigen::MatrixBase<Derived>& probs) {
  using std::log;
  using Scalar = typename Derived::Scalar;
  Scalar h(0);
  for (Eigen::Index i = 0; i < probs.size(); ++i)
    if (probs[i] > Scalar(0)) h -= probs[i] * log(probs[i]);
  return h;
}

/// Group-normalized advantages (r - mean) / max(std_pop, epsilon).
///
/// A group whose rewards are all identical yields exact zeros. For any group
/// with std_pop >= epsilon the result is invariant under r -> a*r + b, a > 0.
template <typename Derived>
VectorOf<Derived> group_advantages(const Eigen::MatrixBase<Derived>& rewards,
                                   typename Derived::Scalar epsilon) {
  using std::max;
  using std::sqrt;
  using Scalar = typename Derived::Scalar;
  if (rewards.size() == 0)
    throw std::invalid_argument("group_advantages: empty reward vector");
  if ((rewards.array() == rewards[0]).all())
    return VectorOf<Derived>::Zero(rewards.size());
  const Scalar mean = rewards.mean();
  const VectorOf<Derived> centred = (rewards.array() - mean).matrix();
  const Scalar std_pop = sqrt(centred.squaredNorm() / Scalar(rewards.size()));
  return centred / max(std_pop, epsilon);
}

}  // namespace ttrl
