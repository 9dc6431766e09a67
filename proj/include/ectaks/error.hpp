#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ectaks {

enum class ErrorCode {
  // algebra
  ZeroInverse,
  ParameterMismatch,
  InvalidPoint,
  DegenerateConstraint,
  InfeasibleConstraint,
  NotInSubgroup,
  OracleRefused,
  InvalidParameter,
  // topology
  AsymmetricArrow,
  SelfLoop,
  IdOutOfRange,
  RootsMismatch,
  // authority
  AlreadyProvisioned,
  PrerequisiteMissing,
  ZeroSessionKey,
  ClusterConflict,
  UnknownNode,
  IdCollision,
  // session
  UnknownPeer,
  InvalidShare,
  BadTag,
  MalformedMessage,
  ClusterNotFormed,
  // persistence
  MalformedFile,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ectaks
