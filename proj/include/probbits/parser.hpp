#pragma once

#include <string_view>

#include "probbits/ast.hpp"

namespace probbits::lang {

/// Parses a program and resolves names (define-before-use, Beta usage sites).
/// Throws Error with kind SyntaxError and a source position on failure.
Program parse(std::string_view source);

}  // namespace probbits::lang
