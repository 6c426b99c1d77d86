#pragma once

// Random instance generators shared by the test binaries.

#include <gowl/data.hpp>
#include <gowl/problem.hpp>

#include <algorithm>
#include <functional>
#include <random>

namespace gowl::fixtures {

inline Vector random_vector(std::mt19937_64& rng, Index n, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

inline Matrix random_matrix(std::mt19937_64& rng, Index rows, Index cols, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  }
  return m;
}

inline WeightVector random_weights(std::mt19937_64& rng, Index d, double scale = 1.0) {
  std::uniform_real_distribution<double> unif(0.0, scale);
  Vector w(d);
  for (Index i = 0; i < d; ++i) w[i] = unif(rng);
  std::sort(w.begin(), w.end(), std::greater<>());
  return WeightVector(w);
}

inline Matrix random_one_hot(std::mt19937_64& rng, Index n, Index q) {
  std::uniform_int_distribution<Index> pick(0, q - 1);
  Matrix Y = Matrix::Zero(n, q);
  for (Index i = 0; i < n; ++i) Y(i, pick(rng)) = 1.0;
  return Y;
}

inline ProblemData random_problem(std::mt19937_64& rng, Index n, Index d, Index q, LossKind kind) {
  Matrix X = random_matrix(rng, n, d);
  Matrix Y = kind == LossKind::squared ? random_matrix(rng, n, q) : random_one_hot(rng, n, q);
  return ProblemData(Design(std::move(X)), std::move(Y), kind);
}

}  // namespace gowl::fixtures
