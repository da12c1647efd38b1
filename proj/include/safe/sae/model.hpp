#pragma once

#include <filesystem>
#include <span>

#include "safe/core/matrix.hpp"

namespace safe::sae {

enum class Nonlinearity { relu, jump_relu };

// Sparse autoencoder f(x) = sigma(W_enc x + b_enc), x_hat(f) = W_dec f + b_dec.
// W_enc is [M x n], W_dec is [n x M]; the columns of W_dec are the dictionary
// directions. Immutable once constructed.
class SaeModel {
 public:
  // Throws DimensionError on inconsistent shapes and Error when M <= n.
  // Logs a warning when M < 4n.
  SaeModel(Matrix w_enc, Vector b_enc, Matrix w_dec, Vector b_dec, Nonlinearity nonlinearity = Nonlinearity::relu,
           Vector jump_thresholds = {});

  // Manifest JSON naming the nonlinearity, the shapes, and one tensor file
  // per parameter (paths relative to the manifest's directory).
  static SaeModel load(const std::filesystem::path& manifest);
  void save(const std::filesystem::path& manifest) const;

  std::size_t input_width() const { return w_enc_.cols; }
  std::size_t feature_count() const { return w_enc_.rows; }

  const Matrix& w_enc() const { return w_enc_; }
  const Vector& b_enc() const { return b_enc_; }
  const Matrix& w_dec() const { return w_dec_; }
  const Vector& b_dec() const { return b_dec_; }
  Nonlinearity nonlinearity() const { return nonlinearity_; }
  const Vector& jump_thresholds() const { return jump_thresholds_; }

 private:
  Matrix w_enc_;
  Vector b_enc_;
  Matrix w_dec_;
  Vector b_dec_;
  Nonlinearity nonlinearity_;
  Vector jump_thresholds_;
};

// W_enc x + b_enc, before the nonlinearity.
Vector pre_activation(const SaeModel& model, std::span<const double> x);
Vector encode(const SaeModel& model, std::span<const double> x);
Vector decode(const SaeModel& model, std::span<const double> f);

}  // namespace safe::sae
