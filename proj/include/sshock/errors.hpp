#pragma once

#include <stdexcept>
#include <string>

namespace sshock {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Riemann data outside the supported hypotheses (degenerate speed, H1/H2 failure).
class HypothesisError : public Error {
 public:
  using Error::Error;
};

class DegenerateData : public HypothesisError {
 public:
  using HypothesisError::HypothesisError;
};

class HypothesisViolated : public HypothesisError {
 public:
  using HypothesisError::HypothesisError;
};

class NonpositiveU2 : public HypothesisError {
 public:
  using HypothesisError::HypothesisError;
};

/// A numerical procedure failed to produce a result.
class SolverError : public Error {
 public:
  using Error::Error;
};

class StepLimitExceeded : public SolverError {
 public:
  using SolverError::SolverError;
};

class BlowUp : public SolverError {
 public:
  using SolverError::SolverError;
};

class NoConvergence : public SolverError {
 public:
  using SolverError::SolverError;
};

class SingularJacobian : public SolverError {
 public:
  using SolverError::SolverError;
};

class TailNotConverged : public SolverError {
 public:
  using SolverError::SolverError;
};

class MatchFailure : public SolverError {
 public:
  using SolverError::SolverError;
};

class MissedTarget : public SolverError {
 public:
  using SolverError::SolverError;
};

class SectionMiss : public SolverError {
 public:
  using SolverError::SolverError;
};

class InsufficientData : public SolverError {
 public:
  using SolverError::SolverError;
};

class UnstableBlowup : public SolverError {
 public:
  using SolverError::SolverError;
};

}  // namespace sshock
