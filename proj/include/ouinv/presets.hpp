#pragma once

#include <string>

#include "ouinv/model.hpp"

namespace ouinv {

/// salogni1d: Q = 1, B = -1 (the classical inverse Gaussian case).
Model preset_salogni1d();

/// isotropic2d: Q = I_2, B = -I_2 (QB^T = BQ, symmetric semigroup).
Model preset_isotropic2d();

/// nonnormal2d: Q = I_2, B = [[-1,1],[0,-2]] (QB^T != BQ).
Model preset_nonnormal2d();

/// Lookup by name; throws UnknownFlag for unknown names.
Model preset_by_name(const std::string& name);

} // namespace ouinv
