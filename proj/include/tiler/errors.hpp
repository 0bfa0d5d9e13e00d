#ifndef TILER_ERRORS_HPP
#define TILER_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace tiler {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// graph-core
struct ParityError : Error { using Error::Error; };
struct InfeasibleError : Error { using Error::Error; };
struct DegenerateCut : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

// decompose
struct ValidationError : Error { using Error::Error; };
struct GapError : Error { using Error::Error; };

// balance / ktt-engine
struct InvariantError : Error { using Error::Error; };
struct SearchExhausted : Error { using Error::Error; };
struct CoverageError : Error { using Error::Error; };
struct NoEvenWalk : Error { using Error::Error; };
struct TooIrregular : Error { using Error::Error; };
struct ConcentrationError : Error { using Error::Error; };

// matching
struct NotRegular : Error { using Error::Error; };
struct NoPerfectMatching : Error { using Error::Error; };

// hamilton
struct PreconditionError : Error { using Error::Error; };
struct NoMatching : Error { using Error::Error; };
struct Disconnected : Error { using Error::Error; };
struct TooLong : Error { using Error::Error; };

// Hamilton search misses: a budgeted miss is not a proof of absence.
struct NotFound : Error {
    bool budget_exhausted;
    NotFound(const std::string& msg, bool budget)
        : Error(msg), budget_exhausted(budget) {}
};

// subdivide
struct BudgetError : Error { using Error::Error; };

} // namespace tiler

#endif
