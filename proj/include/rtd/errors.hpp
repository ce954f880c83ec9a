#pragma once

#include <stdexcept>
#include <string>

namespace rtd {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// planning
struct DegenerateFormation : Error { using Error::Error; };
struct TieError : Error { using Error::Error; };
struct OrderingMismatch : Error { using Error::Error; };
struct InfeasiblePlan : Error { using Error::Error; };
struct UnknownAgent : Error { using Error::Error; };

// trajectory
struct OutOfWindow : Error { using Error::Error; };

// vehicle / control
struct NearSingularAttitude : Error { using Error::Error; };
struct SingularDecoupling : Error { using Error::Error; };
struct InfeasibleThrust : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };
struct UnstableRequest : Error { using Error::Error; };

// simulation
struct NonFiniteState : Error { using Error::Error; };

// io
struct SchemaError : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };
struct EmptyLog : Error { using Error::Error; };

} // namespace rtd
