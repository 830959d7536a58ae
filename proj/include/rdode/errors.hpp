#pragma once

#include <stdexcept>
#include <string>

namespace rdode {

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidParams : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct NegativeTime : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };
struct SingularJacobian : Error { using Error::Error; };
struct NoSolution : Error { using Error::Error; };
struct EventNotCrossed : Error { using Error::Error; };
struct BranchUndefined : Error { using Error::Error; };
struct EigensolveFailure : Error { using Error::Error; };
struct ResolventSingular : Error { using Error::Error; };
struct UnsupportedShape : Error { using Error::Error; };
struct Divergence : Error { using Error::Error; };
struct InsufficientData : Error { using Error::Error; };
struct NonPositiveNorms : Error { using Error::Error; };

struct BlowUp : Error {
  double time;
  BlowUp(double t, const std::string& what) : Error(what), time(t) {}
};

}  // namespace rdode
