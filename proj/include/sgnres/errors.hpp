#pragma once

#include <stdexcept>

namespace sgnres {

/// Invalid combination of user-facing settings (grid, camera, campaign).
class ConfigurationError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// A computation could not reach the accuracy it promises.
class NumericalError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

} // namespace sgnres
