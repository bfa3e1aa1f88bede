// Copyright 2026 The bdauth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace bdauth {

class InvalidGeometry : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Channel, OFDM or experiment parameters that cannot be simulated.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Buffer or message sizes that do not line up with the frame structure.
class LengthError : public std::length_error {
 public:
  using std::length_error::length_error;
};

class MeasurementError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A zero harvested-power reading used as a divisor.
class DegenerateMeasurement : public MeasurementError {
 public:
  using MeasurementError::MeasurementError;
};

class EstimatorError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bdauth
