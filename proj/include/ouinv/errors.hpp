#pragma once

#include <stdexcept>
#include <string>

namespace ouinv {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define OUINV_DEFINE_ERROR(Name)          \
    struct Name : Error {                 \
        using Error::Error;               \
    }

// matrix-core
OUINV_DEFINE_ERROR(NonSymmetric);
OUINV_DEFINE_ERROR(NonPositiveDefinite);
OUINV_DEFINE_ERROR(NonHurwitz);
OUINV_DEFINE_ERROR(Overflow);
OUINV_DEFINE_ERROR(NonPositiveTime);
OUINV_DEFINE_ERROR(QuadratureNotConverged);

// kernels
OUINV_DEFINE_ERROR(SingularCovariance);
OUINV_DEFINE_ERROR(DegenerateSample);

// semigroup
OUINV_DEFINE_ERROR(NonIntegrable);
OUINV_DEFINE_ERROR(TruncationDominates);

// geometry
OUINV_DEFINE_ERROR(ZeroVector);
OUINV_DEFINE_ERROR(RootFindFailed);
OUINV_DEFINE_ERROR(TailNotNegligible);

// maximal
OUINV_DEFINE_ERROR(GridTooCoarse);
OUINV_DEFINE_ERROR(ResolutionTooCoarse);
OUINV_DEFINE_ERROR(BallEscapesBox);

// covering
OUINV_DEFINE_ERROR(NoWitnessT);
OUINV_DEFINE_ERROR(DisjointnessViolated);
OUINV_DEFINE_ERROR(CoverageViolated);

// cli
OUINV_DEFINE_ERROR(UnknownFlag);
OUINV_DEFINE_ERROR(MalformedMatrix);
OUINV_DEFINE_ERROR(ConflictingOptions);
OUINV_DEFINE_ERROR(NonFiniteData);

#undef OUINV_DEFINE_ERROR

} // namespace ouinv
