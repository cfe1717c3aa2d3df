#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace spocb {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define SPOCB_DEFINE_ERROR(Name)            \
    class Name : public Error {             \
    public:                                 \
        using Error::Error;                 \
    }

// Problem ingestion / validation
SPOCB_DEFINE_ERROR(DimensionMismatch);
SPOCB_DEFINE_ERROR(NonFiniteEntry);
SPOCB_DEFINE_ERROR(AsymmetryTooLarge);
SPOCB_DEFINE_ERROR(NotPositiveDefinite);
SPOCB_DEFINE_ERROR(NotPsd);
SPOCB_DEFINE_ERROR(AssumptionViolated);

// Linear algebra / decomposition
SPOCB_DEFINE_ERROR(SingularFastBlock);
SPOCB_DEFINE_ERROR(SingularSystem);
SPOCB_DEFINE_ERROR(EigSplitError);
SPOCB_DEFINE_ERROR(NonsingularityError);

// Integration / evaluation
SPOCB_DEFINE_ERROR(IntegrationFailure);
SPOCB_DEFINE_ERROR(InfeasibleTrajectory);
SPOCB_DEFINE_ERROR(GridTooCoarse);

// File / CLI plumbing
SPOCB_DEFINE_ERROR(ParseError);
SPOCB_DEFINE_ERROR(SchemaError);
SPOCB_DEFINE_ERROR(TooFewPoints);

#undef SPOCB_DEFINE_ERROR

} // namespace spocb
