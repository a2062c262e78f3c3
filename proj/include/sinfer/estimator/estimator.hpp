/* Copyright 2026 The sinfer Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef SINFER_ESTIMATOR_ESTIMATOR_HPP
#define SINFER_ESTIMATOR_ESTIMATOR_HPP

// Accuracy estimation for candidate networks. A training request
// (sw_flag = true) trains from scratch and returns a weights handle; an
// evaluation request re-quantizes the weights behind that handle.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sinfer/core/model.hpp"

namespace sinfer {

struct AccuracyRequest {
  NetworkParms net;
  std::string dataset = "surrogate";
  std::optional<std::string> weights_id;

  /// Empty when well formed: evaluation requests carry a weights_id and
  /// the dataset tag is known.
  std::vector<std::string> check() const;
};

struct AccuracyResponse {
  double A = 0.0;
  std::string weights_id;
  bool trained = false;
};

bool known_dataset(const std::string& tag);

class EstimatorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The trainer did not answer within the configured time.
class TrainerTimeout : public EstimatorError {
 public:
  using EstimatorError::EstimatorError;
};

/// A malformed or out-of-contract message, in either direction.
class ProtocolError : public EstimatorError {
 public:
  using EstimatorError::EstimatorError;
};

/// The trainer answered with an error message.
class TrainerFailure : public EstimatorError {
 public:
  using EstimatorError::EstimatorError;
};

class AccuracyEstimator {
 public:
  virtual ~AccuracyEstimator() = default;
  virtual AccuracyResponse estimate(const AccuracyRequest& request) = 0;
};

/// 1 - 2^-l: the accuracy retained by an l-bit quantizer.
double quantizer_gain(std::int64_t bits);

/// Closed-form stand-in for a trained network:
///   A = A_base * prod over layers of g(l_i) / g(l_max), times g(l_f) / g(l_max)
///       for linear layers,
///   A_base = 0.99 (1 - exp(-filters / 64)) (1 - exp(-depth / 2)),
/// with g = quantizer_gain, depth the number of linear layers and filters
/// the summed conv output channels (plus hidden FC widths). Pure.
double surrogate_accuracy(const NetworkParms& net, QuantizerBounds bounds = {});

/// Hash of the network with every quantizer field cleared: two networks
/// share trained weights iff their fingerprints agree.
std::string architecture_fingerprint(const NetworkParms& net);

/// Serves the surrogate through the request/response contract. Handles are
/// architecture fingerprints, so reuse with a different architecture is a
/// protocol error exactly as with a real trainer.
class SurrogateEstimator final : public AccuracyEstimator {
 public:
  explicit SurrogateEstimator(QuantizerBounds bounds = {}) : bounds_(bounds) {}
  AccuracyResponse estimate(const AccuracyRequest& request) override;

 private:
  QuantizerBounds bounds_;
};

}  // namespace sinfer

#endif  // SINFER_ESTIMATOR_ESTIMATOR_HPP
