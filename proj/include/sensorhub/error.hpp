// Copyright 2026 The SensorHub Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sensorhub {

/// Error classes shared by every layer. The HTTP and SOS front ends map
/// these onto status codes, so keep the names stable.
enum class Errc {
  // validation
  MissingField,
  BadFieldType,
  OutOfRange,
  EmptyRequired,
  UnknownField,
  BadInterval,
  ImmutableField,
  ValidationErrors,
  // store
  NotFound,
  DanglingRef,
  EmptyLocations,
  StoreFull,
  ConflictingSystemEntity,
  InUse,
  UnknownRelation,
  BadParams,
  IoError,
  CorruptStore,
  // http
  MalformedJson,
  UnknownRoute,
  MethodNotAllowed,
  // xml / sos / cop
  MalformedXml,
  MissingElement,
  MissingAttribute,
  UnknownAttribute,
  DuplicateProcedure,
  UnknownProcedure,
  BadResult,
  BadSymptomList,
  UnregisteredSymptom,
  BadCoordinate,
  BadPatientGrammar,
  BadTimestamp,
  // benchmark
  TargetUnreachable,
  SeedConflict,
  NonSuccessStatus,
  NoSuchProcess,
  PermissionDenied,
  BadConfig,
};

constexpr std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::MissingField: return "MissingField";
    case Errc::BadFieldType: return "BadFieldType";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::EmptyRequired: return "EmptyRequired";
    case Errc::UnknownField: return "UnknownField";
    case Errc::BadInterval: return "BadInterval";
    case Errc::ImmutableField: return "ImmutableField";
    case Errc::ValidationErrors: return "ValidationErrors";
    case Errc::NotFound: return "NotFound";
    case Errc::DanglingRef: return "DanglingRef";
    case Errc::EmptyLocations: return "EmptyLocations";
    case Errc::StoreFull: return "StoreFull";
    case Errc::ConflictingSystemEntity: return "ConflictingSystemEntity";
    case Errc::InUse: return "InUse";
    case Errc::UnknownRelation: return "UnknownRelation";
    case Errc::BadParams: return "BadParams";
    case Errc::IoError: return "IoError";
    case Errc::CorruptStore: return "CorruptStore";
    case Errc::MalformedJson: return "MalformedJson";
    case Errc::UnknownRoute: return "UnknownRoute";
    case Errc::MethodNotAllowed: return "MethodNotAllowed";
    case Errc::MalformedXml: return "MalformedXml";
    case Errc::MissingElement: return "MissingElement";
    case Errc::MissingAttribute: return "MissingAttribute";
    case Errc::UnknownAttribute: return "UnknownAttribute";
    case Errc::DuplicateProcedure: return "DuplicateProcedure";
    case Errc::UnknownProcedure: return "UnknownProcedure";
    case Errc::BadResult: return "BadResult";
    case Errc::BadSymptomList: return "BadSymptomList";
    case Errc::UnregisteredSymptom: return "UnregisteredSymptom";
    case Errc::BadCoordinate: return "BadCoordinate";
    case Errc::BadPatientGrammar: return "BadPatientGrammar";
    case Errc::BadTimestamp: return "BadTimestamp";
    case Errc::TargetUnreachable: return "TargetUnreachable";
    case Errc::SeedConflict: return "SeedConflict";
    case Errc::NonSuccessStatus: return "NonSuccessStatus";
    case Errc::NoSuchProcess: return "NoSuchProcess";
    case Errc::PermissionDenied: return "PermissionDenied";
    case Errc::BadConfig: return "BadConfig";
  }
  return "Unknown";
}

/// One field-level problem. `field` is a dotted path such as
/// "location.lat" and may be empty for whole-entity problems.
struct Violation {
  Errc code;
  std::string field;
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string message, std::string subject = {})
      : std::runtime_error(std::move(message)), code_(code), subject_(std::move(subject)) {}

  Error(Errc code, std::string message, std::vector<Violation> violations)
      : std::runtime_error(std::move(message)), code_(code), violations_(std::move(violations)) {}

  Errc code() const noexcept { return code_; }

  /// Name of the offending relation, attribute, element or field.
  const std::string& subject() const noexcept { return subject_; }

  const std::vector<Violation>& violations() const noexcept { return violations_; }

 private:
  Errc code_;
  std::string subject_;
  std::vector<Violation> violations_;
};

}  // namespace sensorhub
