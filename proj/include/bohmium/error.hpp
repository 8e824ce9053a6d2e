#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bohmium {

enum class ErrorKind {
  DomainError,
  OverflowGuard,
  NodeProximity,
  StepFloorReached,
  MaxStepsExceeded,
  NodalDegeneracy,
  NoConvergence,
  OnlyNodeRoot,
  InsufficientSpan,
  NonUniformSampling,
  IncompleteWindow,
  NoPeriodFound,
  UnknownScenario,
  ConfigParse,
  Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library. `module()` names the component that
/// raised it so the CLI can report provenance in its error JSON.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string module, const std::string& message)
      : std::runtime_error(message), kind_(kind), module_(std::move(module)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& module() const noexcept { return module_; }

 private:
  ErrorKind kind_;
  std::string module_;
};

}  // namespace bohmium
