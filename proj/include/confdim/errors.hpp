#pragma once

#include <stdexcept>
#include <string>

namespace confdim {

// Base for every error thrown by the library. `code()` is a stable
// machine-readable tag used by the CLI when emitting error JSON.
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

private:
  std::string code_;
};

#define CONFDIM_ERROR(Name)                                       \
  class Name : public Error {                                     \
  public:                                                         \
    explicit Name(const std::string& what) : Error(#Name, what) {} \
  }

CONFDIM_ERROR(AsymmetricMatrix);
CONFDIM_ERROR(NegativeDistance);
CONFDIM_ERROR(TriangleViolation);
CONFDIM_ERROR(AnchorInsideBall);
CONFDIM_ERROR(DiamNotNormalized);
CONFDIM_ERROR(BackendTooLarge);
CONFDIM_ERROR(NonpositiveLambda);
CONFDIM_ERROR(NonpositiveInput);
CONFDIM_ERROR(ParameterOutOfRange);
CONFDIM_ERROR(RejectionBudgetExceeded);
CONFDIM_ERROR(NotDecreasing);
CONFDIM_ERROR(SolverDiverged);
CONFDIM_ERROR(DegenerateFace);
CONFDIM_ERROR(EmptySet);
CONFDIM_ERROR(NotDoublyConnected);
CONFDIM_ERROR(NegativeModulus);
CONFDIM_ERROR(BadRadii);
CONFDIM_ERROR(InsufficientSamples);
CONFDIM_ERROR(EmptyLevel);
CONFDIM_ERROR(MissingEmbedding);
CONFDIM_ERROR(ScaleTooCoarse);
CONFDIM_ERROR(ZeroMargin);
CONFDIM_ERROR(AxiomViolation);
CONFDIM_ERROR(H1Violation);
CONFDIM_ERROR(H2Violation);
CONFDIM_ERROR(IdenticalPoints);
CONFDIM_ERROR(BadEpsilon);
CONFDIM_ERROR(DegenerateRange);
CONFDIM_ERROR(MissingMass);
CONFDIM_ERROR(TooFewLevels);
CONFDIM_ERROR(BadConfig);
CONFDIM_ERROR(IoError);

#undef CONFDIM_ERROR

}  // namespace confdim
