#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>

#include <armadillo>

namespace scca {

// Seeded random stream owned by one chain/replicate.  All stochastic code in
// the library draws through this class so that a run is reproducible from a
// single 64-bit seed.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : gen_(seed) {}

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(gen_); }

  double normal() { return std::normal_distribution<double>(0.0, 1.0)(gen_); }

  // Gamma(shape, scale) parameterization; mean = shape * scale.
  double gamma(double shape, double scale) {
    if (shape <= 0.0 || scale <= 0.0)
      throw std::invalid_argument("gamma: shape and scale must be positive");
    return std::gamma_distribution<double>(shape, scale)(gen_);
  }

  // Inverse gamma with shape alpha and rate beta: density ~ x^{-a-1} e^{-b/x}.
  double inv_gamma(double shape, double rate) {
    double g = gamma(shape, 1.0 / rate);
    if (g < 1e-300) g = 1e-300;
    return 1.0 / g;
  }

  arma::vec normal_vec(arma::uword n) {
    arma::vec out(n);
    for (arma::uword i = 0; i < n; ++i) out(i) = normal();
    return out;
  }

  arma::mat normal_mat(arma::uword r, arma::uword c) {
    arma::mat out(r, c);
    // column-major fill order, fixed so that draws are reproducible
    for (arma::uword j = 0; j < c; ++j)
      for (arma::uword i = 0; i < r; ++i) out(i, j) = normal();
    return out;
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace scca
