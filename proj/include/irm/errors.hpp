#pragma once

#include <stdexcept>
#include <string>

namespace irm {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define IRM_DEFINE_ERROR(Name)                                   \
    class Name : public Error {                                  \
    public:                                                      \
        explicit Name(const std::string& what) : Error(what) {}  \
    }

// arithmetic
IRM_DEFINE_ERROR(InvalidScalar);
IRM_DEFINE_ERROR(ScalarOverflow);
IRM_DEFINE_ERROR(DivisionByZero);
IRM_DEFINE_ERROR(BudgetExceeded);
IRM_DEFINE_ERROR(ParseError);

// linalg
IRM_DEFINE_ERROR(DimensionError);
IRM_DEFINE_ERROR(SingularRitzSystem);
IRM_DEFINE_ERROR(NotSPD);

// solvers
IRM_DEFINE_ERROR(InvalidConfig);
IRM_DEFINE_ERROR(GeneratorError);
IRM_DEFINE_ERROR(NumericalBreakdown);

// benchgen
IRM_DEFINE_ERROR(InvalidSpectrum);
IRM_DEFINE_ERROR(InvalidRotation);
IRM_DEFINE_ERROR(ExactRequired);
IRM_DEFINE_ERROR(InvalidStiffness);

// analysis
IRM_DEFINE_ERROR(ZeroInitialResidual);
IRM_DEFINE_ERROR(DiagonalRequired);
IRM_DEFINE_ERROR(IncomparableTraces);
IRM_DEFINE_ERROR(IoError);

#undef IRM_DEFINE_ERROR

} // namespace irm
