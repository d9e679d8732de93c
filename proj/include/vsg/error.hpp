#pragma once

#include <stdexcept>
#include <string>

namespace vsg {

/// Invalid or unparsable configuration. `field()` names the offending
/// key in `section.key` form (empty when the error is not tied to a key).
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error(field.empty() ? message : field + ": " + message),
          field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace vsg
