#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace vinelock {

enum class ErrorCode {
  Domain,
  DegenerateSpec,
  InvalidDesign,
  Precondition,
  InvalidPolyline,
  InfeasibleCurvature,
  LengthBudget,
  UnreachableTolerance,
  InsufficientSamples,
  SessionFinished,
  Schema,
  Io,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised by the planner when a primitive cannot be realized under the curvature bound.
class InfeasibleCurvatureError : public Error {
 public:
  InfeasibleCurvatureError(std::size_t primitive_index, const std::string& what)
      : Error(ErrorCode::InfeasibleCurvature, what), primitive_index_(primitive_index) {}
  std::size_t primitive_index() const noexcept { return primitive_index_; }

 private:
  std::size_t primitive_index_;
};

class UnreachableToleranceError : public Error {
 public:
  UnreachableToleranceError(double best_residual_mm, std::size_t best_primitive_count,
                            const std::string& what)
      : Error(ErrorCode::UnreachableTolerance, what),
        best_residual_mm_(best_residual_mm),
        best_primitive_count_(best_primitive_count) {}
  double best_residual_mm() const noexcept { return best_residual_mm_; }
  std::size_t best_primitive_count() const noexcept { return best_primitive_count_; }

 private:
  double best_residual_mm_;
  std::size_t best_primitive_count_;
};

// Schema violations carry the JSON pointer of the offending value.
class SchemaError : public Error {
 public:
  SchemaError(std::string pointer, const std::string& what)
      : Error(ErrorCode::Schema, (pointer.empty() ? std::string("/") : pointer) + ": " + what),
        pointer_(std::move(pointer)) {}
  const std::string& pointer() const noexcept { return pointer_; }

 private:
  std::string pointer_;
};

}  // namespace vinelock
