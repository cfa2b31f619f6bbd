#include "fishmig/error.hpp"

namespace fishmig {

ParseError::ParseError(std::string source, std::size_t line, const std::string& what)
    : InputError(source + ":" + std::to_string(line) + ": " + what),
      source_(std::move(source)),
      line_(line) {}

}  // namespace fishmig
