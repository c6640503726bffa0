#pragma once

#include <stdexcept>

namespace gridshed {

struct DimensionMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace gridshed
