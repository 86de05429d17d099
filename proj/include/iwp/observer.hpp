#pragma once

#include "iwp/state.hpp"

namespace iwp {

/// What an observer does with its wheel-velocity estimate when the selected
/// model switches to sticking. The sticking model only pins the derivative,
/// so holding the value is the literal reading; projecting to zero assumes
/// the physical stiction value.
enum class WheelStickPolicy {
    Hold,  ///< keep omega2_hat, reuse it when the model switches back
    Zero,  ///< set omega2_hat to 0 on entry
};

}  // namespace iwp
