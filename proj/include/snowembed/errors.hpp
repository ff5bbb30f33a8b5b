#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include <json.hpp>

namespace snowembed {

using Json = nlohmann::ordered_json;

// Exit-code contract: validation errors map to exit code 1, mathematical
// failures (infeasible constants, exhausted lattices, ...) to exit code 2.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message, Json details)
      : std::runtime_error(message), code_(std::move(code)), details_(std::move(details)) {}

  const std::string& code() const noexcept { return code_; }
  const Json& details() const noexcept { return details_; }

  Json to_json() const {
    Json j;
    j["error"] = code_;
    j["message"] = what();
    if (!details_.empty()) j["details"] = details_;
    return j;
  }

 private:
  std::string code_;
  Json details_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class MathError : public Error {
 public:
  using Error::Error;
};

#define SNOWEMBED_DEFINE_ERROR(NAME, BASE)                              \
  class NAME : public BASE {                                            \
   public:                                                              \
    explicit NAME(const std::string& message, Json details = Json::object()) \
        : BASE(#NAME, message, std::move(details)) {}                   \
  }

SNOWEMBED_DEFINE_ERROR(AsymmetryError, ValidationError);
SNOWEMBED_DEFINE_ERROR(NegativeDistanceError, ValidationError);
SNOWEMBED_DEFINE_ERROR(NonzeroDiagonal, ValidationError);
SNOWEMBED_DEFINE_ERROR(TriangleViolation, ValidationError);
SNOWEMBED_DEFINE_ERROR(DuplicatePoints, ValidationError);
SNOWEMBED_DEFINE_ERROR(DegenerateSpace, ValidationError);
SNOWEMBED_DEFINE_ERROR(EmptySet, ValidationError);
SNOWEMBED_DEFINE_ERROR(ExactTooLarge, ValidationError);
SNOWEMBED_DEFINE_ERROR(InsufficientScales, ValidationError);
SNOWEMBED_DEFINE_ERROR(ThetaOutOfRange, ValidationError);
SNOWEMBED_DEFINE_ERROR(BadParameters, ValidationError);
SNOWEMBED_DEFINE_ERROR(SpaceMismatch, ValidationError);
SNOWEMBED_DEFINE_ERROR(GenerationFailed, ValidationError);
SNOWEMBED_DEFINE_ERROR(IoError, ValidationError);

SNOWEMBED_DEFINE_ERROR(NoFeasibleTau, MathError);
SNOWEMBED_DEFINE_ERROR(BudgetOverflow, MathError);
SNOWEMBED_DEFINE_ERROR(BudgetExceeded, MathError);
SNOWEMBED_DEFINE_ERROR(LatticeExhausted, MathError);
SNOWEMBED_DEFINE_ERROR(SelectionFailed, MathError);

#undef SNOWEMBED_DEFINE_ERROR

}  // namespace snowembed
